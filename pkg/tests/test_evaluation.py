import re
from pathlib import Path

import pytest

from emodrop.emotions import EMOTIONS, Emotion, EmotionScores, top_emotion
from emodrop.errors import ConfigError, EmptyDatasetError, IncompleteStudyError
from emodrop.evaluation import (
    EvaluationReport,
    ScoreAggregate,
    StudyRecord,
    aggregate_scores,
    aggregates_to_tsv,
    cross_evaluate,
    evaluate,
    format_report,
    parse_study_file,
    report_from_confusion,
)

from conftest import random_image

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "reports"
FIXTURE_FILES = ["cife_self.json", "gamo_self.json", "cife_cross.json", "gamo_cross.json"]


def one_hot(emotion: Emotion) -> EmotionScores:
    values = [0.0] * 7
    values[int(emotion)] = 1.0
    return EmotionScores(tuple(values))


class OracleBackend:
    """Predicts whatever label the test wired for each image."""

    name = "oracle"

    def __init__(self, answers):
        self.answers = answers  # image data -> Emotion

    def classify(self, image, region=None):
        return one_hot(self.answers[image.data])


class ConstantBackend:
    name = "always-angry"

    def classify(self, image, region=None):
        return one_hot(Emotion.ANGRY)


def balanced_dataset(per_class=3):
    data = []
    for e in EMOTIONS:
        for i in range(per_class):
            data.append((random_image(1000 * int(e) + i), e))
    return data


def test_oracle_backend_is_perfect():
    dataset = balanced_dataset()
    backend = OracleBackend({im.data: label for im, label in dataset})
    report = evaluate(backend, dataset, dataset_name="synthetic")
    assert report.per_emotion == (1.0,) * 7
    assert report.micro_average == 1.0
    assert report.macro_average == 1.0


def test_constant_backend_on_balanced_dataset():
    report = evaluate(ConstantBackend(), balanced_dataset(), dataset_name="synthetic")
    assert report.per_emotion[int(Emotion.ANGRY)] == 1.0
    assert sum(report.per_emotion) == 1.0
    assert report.micro_average == pytest.approx(1 / 7)
    assert report.macro_average == pytest.approx(1 / 7)


def test_micro_average_matches_independent_recount(tiny_backend):
    dataset = [(random_image(3000 + i), Emotion(i % 7)) for i in range(100)]
    report = evaluate(tiny_backend, dataset, dataset_name="synthetic")
    correct = sum(
        1 for image, label in dataset
        if top_emotion(tiny_backend.classify(image)) is label
    )
    assert report.micro_average == pytest.approx(correct / len(dataset))


def test_confusion_row_sums_are_class_counts(tiny_backend):
    dataset = [(random_image(5000 + i), Emotion(i % 3)) for i in range(60)]
    report = evaluate(tiny_backend, dataset, dataset_name="synthetic")
    for e in EMOTIONS:
        expected = sum(1 for _, label in dataset if label is e)
        assert sum(report.confusion[int(e)]) == expected
    assert sum(map(sum, report.confusion)) == len(dataset)


def test_macro_skips_unsupported_classes():
    confusion = [[0] * 7 for _ in range(7)]
    confusion[0][0] = 8            # angry perfect
    confusion[3][3] = 1
    confusion[3][0] = 1            # happy at 0.5
    report = report_from_confusion(confusion, name="sparse")
    assert report.macro_average == pytest.approx((1.0 + 0.5) / 2)
    assert report.per_emotion[int(Emotion.SAD)] == 0.0


def test_empty_dataset_rejected(tiny_backend):
    with pytest.raises(EmptyDatasetError):
        evaluate(tiny_backend, [], dataset_name="empty")


def test_cross_evaluate_is_same_computation(tiny_backend):
    dataset = [(random_image(7000 + i), Emotion(i % 7)) for i in range(35)]
    self_report = evaluate(tiny_backend, dataset, dataset_name="d", name="n")
    cross_report = cross_evaluate(tiny_backend, dataset, dataset_name="d", name="n")
    assert self_report == cross_report


def test_report_json_round_trip(tiny_backend, tmp_path):
    dataset = [(random_image(8000 + i), Emotion(i % 7)) for i in range(21)]
    report = evaluate(tiny_backend, dataset, dataset_name="d")
    path = tmp_path / "report.json"
    report.save(path)
    assert EvaluationReport.load(path) == report


def test_fixture_reports_render_expected_cells():
    reports = [EvaluationReport.load(FIXTURE_DIR / f) for f in FIXTURE_FILES]
    table = format_report(reports)
    lines = table.splitlines()
    assert lines[0].split() == ["CIFE", "GaMo", "CIFE", "cross", "GaMo", "cross"]
    parsed = {}
    for line in lines[1:]:
        parts = line.split()
        parsed[parts[0]] = parts[1:]
    assert parsed["Average"] == ["0.74", "0.64", "0.21", "0.50"]
    assert parsed["Angry"] == ["0.68", "0.65", "0.03", "0.35"]
    assert parsed["Disgust"] == ["0.29", "0.57", "0.02", "0.14"]
    assert parsed["Fear"] == ["0.44", "0.52", "0.10", "0.36"]
    assert parsed["Happy"] == ["0.87", "0.71", "0.03", "0.80"]
    assert parsed["Neutral"] == ["0.75", "0.71", "0.60", "0.33"]
    assert parsed["Sad"] == ["0.79", "0.64", "0.17", "0.52"]
    assert parsed["Surprise"] == ["0.73", "0.65", "0.09", "0.50"]


def test_format_single_report_two_columns():
    report = EvaluationReport.load(FIXTURE_DIR / "cife_self.json")
    table = format_report([report])
    for line in table.splitlines()[1:]:
        assert len(line.split()) == 2


def test_accuracy_one_renders_as_1_00():
    confusion = [[0] * 7 for _ in range(7)]
    for i in range(7):
        confusion[i][i] = 2
    table = format_report([report_from_confusion(confusion, name="perfect")])
    assert "1.00" in table
    assert re.search(r"Average\s+1\.00", table)


def test_format_report_parses_back_to_two_decimals(tiny_backend):
    dataset = [(random_image(9000 + i), Emotion(i % 7)) for i in range(70)]
    report = evaluate(tiny_backend, dataset, dataset_name="d")
    table = format_report([report])
    rows = {line.split()[0]: line.split()[1] for line in table.splitlines()[1:]}
    assert float(rows["Average"]) == pytest.approx(report.micro_average, abs=0.005)
    for e in EMOTIONS:
        assert float(rows[e.display]) == pytest.approx(report.per_emotion[int(e)],
                                                       abs=0.005)


def test_micro_invariant_under_consistent_relabeling():
    rng_confusion = [[i * 7 + j + 1 for j in range(7)] for i in range(7)]
    base = report_from_confusion(rng_confusion, name="base")
    perm = [3, 0, 6, 1, 5, 2, 4]
    permuted = [[rng_confusion[perm[i]][perm[j]] for j in range(7)] for i in range(7)]
    relabeled = report_from_confusion(permuted, name="perm")
    assert relabeled.micro_average == pytest.approx(base.micro_average)


def test_aggregate_two_rounds_mean():
    records = [StudyRecord("p1", "engineX", 1, 3), StudyRecord("p1", "engineX", 2, 5)]
    aggregates = aggregate_scores(records)
    assert aggregates == [ScoreAggregate("p1", "engineX", 4.0, 2)]


def test_aggregate_full_study_shape():
    records = []
    for p in range(5):
        for engine in ("cife", "gamo"):
            for r in range(1, 6):
                records.append(StudyRecord(f"p{p}", engine, r, p + r))
    aggregates = aggregate_scores(records)
    assert len(aggregates) == 10
    assert all(a.rounds == 5 for a in aggregates)


def test_aggregate_missing_group_fails():
    records = [
        StudyRecord("p1", "engineX", 1, 3),
        StudyRecord("p2", "engineX", 1, 4),
        StudyRecord("p1", "engineY", 1, 5),
    ]
    with pytest.raises(IncompleteStudyError):
        aggregate_scores(records)
    with pytest.raises(IncompleteStudyError):
        aggregate_scores([])


def test_study_record_validation():
    with pytest.raises(ConfigError):
        StudyRecord("p", "e", 0, 3)
    with pytest.raises(ConfigError):
        StudyRecord("p", "e", 1, -1)


def test_study_file_parse_and_tsv():
    text = "p1\tengineX\t1\t3\np1\tengineX\t2\t5\n# comment\n"
    records = parse_study_file(text)
    assert len(records) == 2
    tsv = aggregates_to_tsv(aggregate_scores(records))
    lines = tsv.splitlines()
    assert lines[0] == "player\tengine\tmean_score\trounds"
    assert lines[1] == "p1\tengineX\t4.0000\t2"
    with pytest.raises(ConfigError):
        parse_study_file("p1\tengineX\t1\n")
    with pytest.raises(ConfigError):
        parse_study_file("p1\tengineX\tone\t3\n")


def test_simulated_study_better_engine_wins():
    from emodrop.engine import simulate_session

    records = []
    for player_index in range(3):
        for engine_name, p in (("strong", 0.8), ("weak", 0.4)):
            for round_index in range(1, 6):
                seed = player_index * 1000 + round_index * 17 + (hash(engine_name) % 97)
                score = simulate_session(p, seed=seed).final_score
                records.append(StudyRecord(f"p{player_index}", engine_name,
                                           round_index, score))
    aggregates = {(a.player_id, a.engine_name): a.mean_score
                  for a in aggregate_scores(records)}
    for player_index in range(3):
        assert aggregates[(f"p{player_index}", "strong")] > \
            aggregates[(f"p{player_index}", "weak")]
