import random

import pytest

from emodrop.backend import FeatureVector
from emodrop.emotions import EMOTIONS, Emotion
from emodrop.errors import (
    ConfigError,
    IncompleteRegistrationError,
    NoFaceError,
    StoreError,
    UnregisteredPlayerError,
)
from emodrop.templates import (
    TemplateRegistry,
    TemplateSet,
    nearest_emotion,
    read_template_file,
    write_template_file,
)

from conftest import constant_image, patterned_image


@pytest.fixture()
def registry(tiny_backend, tmp_path):
    return TemplateRegistry(tiny_backend, tmp_path / "templates")


def register_all(registry, player="alice", offset=0):
    for e in EMOTIONS:
        registry.register_template(player, e, patterned_image(int(e) + offset))


def unit_template_set(dim=7):
    templates = {}
    for e in EMOTIONS:
        values = [0.0] * dim
        values[int(e)] = 1.0
        templates[e] = FeatureVector(tuple(values))
    return TemplateSet("unit", templates)


def test_register_and_complete_flow(registry):
    state = registry.get("alice")
    assert state is None
    registry.register_template("alice", Emotion.SAD, patterned_image(1))
    ts = registry.get("alice")
    assert ts.registered == [Emotion.SAD]
    assert not ts.complete
    with pytest.raises(IncompleteRegistrationError) as err:
        registry.complete_registration("alice")
    assert len(err.value.missing) == 6
    register_all(registry)
    completed = registry.complete_registration("alice")
    assert completed.complete
    # idempotent
    assert registry.complete_registration("alice").complete


def test_complete_with_one_missing_lists_it(registry):
    for e in EMOTIONS:
        if e is not Emotion.FEAR:
            registry.register_template("bob", e, patterned_image(int(e)))
    with pytest.raises(IncompleteRegistrationError) as err:
        registry.complete_registration("bob")
    assert err.value.missing == ["fear"]


def test_complete_with_none_lists_all(registry):
    with pytest.raises(IncompleteRegistrationError) as err:
        registry.complete_registration("ghost")
    assert err.value.missing == [e.label for e in EMOTIONS]


def test_blank_capture_is_no_face_and_keeps_set(registry):
    registry.register_template("carol", Emotion.HAPPY, patterned_image(3))
    before = registry.get("carol").templates
    with pytest.raises(NoFaceError) as err:
        registry.register_template("carol", Emotion.FEAR, constant_image(90))
    assert err.value.emotion == "fear"
    assert registry.get("carol").templates == before


def test_reregistration_overwrites(registry):
    first = registry.register_template("dave", Emotion.HAPPY, patterned_image(10))
    second = registry.register_template("dave", Emotion.HAPPY, patterned_image(11))
    assert first.values != second.values
    assert registry.get("dave").templates[Emotion.HAPPY] == second


def test_match_requires_complete_set(registry):
    with pytest.raises(UnregisteredPlayerError):
        registry.match_template("nobody", patterned_image(0))
    registry.register_template("erin", Emotion.ANGRY, patterned_image(0))
    with pytest.raises(UnregisteredPlayerError):
        registry.match_template("erin", patterned_image(0))


def test_match_no_face(registry):
    register_all(registry, "frank")
    with pytest.raises(NoFaceError):
        registry.match_template("frank", constant_image(5))


def test_match_returns_registered_emotion_for_same_image(registry):
    register_all(registry, "gina")
    for e in EMOTIONS:
        assert registry.match_template("gina", patterned_image(int(e))) is e


def test_zero_distance_wins(tiny_backend):
    ts = unit_template_set()
    assert nearest_emotion(ts.templates[Emotion.DISGUST], ts) is Emotion.DISGUST


def test_unit_vector_example():
    ts = unit_template_set()
    query = FeatureVector((0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
    assert nearest_emotion(query, ts) is Emotion.ANGRY


def test_ties_resolve_to_lowest_index():
    same = FeatureVector((1.0, 2.0, 3.0))
    templates = {e: same for e in EMOTIONS}
    ts = TemplateSet("tied", templates)
    assert nearest_emotion(FeatureVector((0.0, 0.0, 0.0)), ts) is Emotion.ANGRY
    # two-way tie between fear and happy
    templates = {e: FeatureVector((100.0 + int(e),)) for e in EMOTIONS}
    templates[Emotion.FEAR] = FeatureVector((1.0,))
    templates[Emotion.HAPPY] = FeatureVector((-1.0,))
    assert nearest_emotion(FeatureVector((0.0,)), TemplateSet("t2", templates)) is Emotion.FEAR


def test_matches_brute_force_oracle():
    rnd = random.Random(99)
    for _ in range(300):
        dim = rnd.choice((3, 8, 17))
        templates = {
            e: FeatureVector(tuple(rnd.uniform(-2, 2) for _ in range(dim)))
            for e in EMOTIONS
        }
        ts = TemplateSet("o", templates)
        query = FeatureVector(tuple(rnd.uniform(-2, 2) for _ in range(dim)))
        distances = [
            sum((a - b) ** 2 for a, b in zip(query.values, templates[e].values))
            for e in EMOTIONS
        ]
        expected = distances.index(min(distances))
        assert int(nearest_emotion(query, ts)) == expected


def test_result_invariant_under_insertion_order():
    rnd = random.Random(5)
    vectors = {e: FeatureVector(tuple(rnd.uniform(-1, 1) for _ in range(5)))
               for e in EMOTIONS}
    query = FeatureVector(tuple(rnd.uniform(-1, 1) for _ in range(5)))
    orders = [list(EMOTIONS), list(reversed(EMOTIONS))]
    rnd.shuffle(order4 := list(EMOTIONS))
    orders.append(order4)
    results = set()
    for order in orders:
        templates = {}
        for e in order:
            templates[e] = vectors[e]
        results.add(nearest_emotion(query, TemplateSet("p", templates)))
    assert len(results) == 1


def test_incomplete_set_cannot_match():
    templates = {Emotion.ANGRY: FeatureVector((1.0,))}
    with pytest.raises(IncompleteRegistrationError):
        nearest_emotion(FeatureVector((0.0,)), TemplateSet("x", templates))


def test_mixed_dimensions_rejected():
    with pytest.raises(ConfigError):
        TemplateSet("bad", {
            Emotion.ANGRY: FeatureVector((1.0,)),
            Emotion.SAD: FeatureVector((1.0, 2.0)),
        })


def test_persistence_round_trip(tiny_backend, tmp_path):
    root = tmp_path / "templates"
    registry = TemplateRegistry(tiny_backend, root)
    register_all(registry, "henry")
    registry.register_template("iris", Emotion.NEUTRAL, patterned_image(40))

    reloaded = TemplateRegistry(tiny_backend, root)
    assert reloaded.get("henry").complete
    assert reloaded.get("henry").templates == registry.get("henry").templates
    assert reloaded.get("iris").registered == [Emotion.NEUTRAL]
    # matching still works after reload
    assert reloaded.match_template("henry", patterned_image(int(Emotion.HAPPY)))


def test_template_file_format(tmp_path):
    path = tmp_path / "pat.gmt"
    templates = {
        Emotion.DISGUST: FeatureVector((1.5, -2.25)),
        Emotion.SURPRISE: FeatureVector((0.0, 8.0)),
    }
    write_template_file(path, TemplateSet("pat", templates))
    blob = path.read_bytes()
    assert blob[:4] == b"GMT1"
    assert blob[4:8] == (2).to_bytes(4, "little")
    assert blob[8] == (1 << int(Emotion.DISGUST)) | (1 << int(Emotion.SURPRISE))
    assert len(blob) == 9 + 2 * 2 * 4
    ts = read_template_file(path)
    assert ts.player_id == "pat"
    assert ts.templates == templates


def test_template_file_corruption_detected(tmp_path):
    path = tmp_path / "z.gmt"
    write_template_file(path, unit_template_set())
    data = path.read_bytes()
    (tmp_path / "bad_magic.gmt").write_bytes(b"XXXX" + data[4:])
    with pytest.raises(StoreError):
        read_template_file(tmp_path / "bad_magic.gmt")
    (tmp_path / "cut.gmt").write_bytes(data[:-3])
    with pytest.raises(StoreError):
        read_template_file(tmp_path / "cut.gmt")
    (tmp_path / "extra.gmt").write_bytes(data + b"\x00")
    with pytest.raises(StoreError):
        read_template_file(tmp_path / "extra.gmt")


def test_player_id_validation(registry):
    with pytest.raises(ConfigError):
        registry.register_template("../evil", Emotion.HAPPY, patterned_image(1))
    with pytest.raises(ConfigError):
        registry.complete_registration("")
