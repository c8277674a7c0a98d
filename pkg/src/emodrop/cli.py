"""Command line entry points: server, evaluation harness, and thin client.

Every flag can also be set through an environment variable with the
``EMODROP_`` prefix, e.g. ``EMODROP_SERVE_BIND`` for ``serve --bind``.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click
import numpy as np

from .backend import load_backend_file, make_backend
from .engine import EngineConfig
from .errors import EmodropError
from .evaluation import (
    EvaluationReport,
    aggregate_scores,
    aggregates_to_tsv,
    evaluate,
    format_report,
    load_study_file,
)
from .faces import FaceImage
from .store import load_dataset


@click.group()
def main():
    """Emotion-matching game server and dataset tooling."""


@main.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="host:port to listen on")
@click.option("--dataset-root", type=click.Path(path_type=Path), required=True,
              help="directory for the collected dataset (created if missing)")
@click.option("--backend", "backend_path", type=click.Path(path_type=Path),
              help="weight file for the classifier backend")
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True, path_type=Path),
              help="per-emotion threshold config file")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              help="engine config file (key=value lines)")
@click.option("--ui-dir", type=click.Path(exists=True, path_type=Path),
              help="static frontend bundle to serve at /")
def serve(bind: str, dataset_root: Path, backend_path: Path | None,
          thresholds_path: Path | None, config_path: Path | None, ui_dir: Path | None):
    """Run the game server."""
    import uvicorn

    from .service import ServiceSettings, create_app

    engine_config = EngineConfig.load(config_path) if config_path else EngineConfig()
    if backend_path is None and engine_config.backend_path:
        backend_path = Path(engine_config.backend_path)
    if thresholds_path is None and engine_config.thresholds_path:
        thresholds_path = Path(engine_config.thresholds_path)
    if backend_path is None:
        raise click.UsageError(
            "no backend weight file; pass --backend or set backend_path in --config "
            "(generate one with `emodrop make-backend`)")
    host, _, port_text = bind.rpartition(":")
    try:
        port = int(port_text)
    except ValueError:
        raise click.UsageError(f"--bind must be host:port, got {bind!r}")
    settings = ServiceSettings(
        dataset_root=dataset_root,
        backend_path=backend_path,
        thresholds_path=thresholds_path,
        engine_config=engine_config,
        ui_dir=ui_dir,
    )
    uvicorn.run(create_app(settings), host=host or "127.0.0.1", port=port)


@main.command("make-backend")
@click.argument("out", type=click.Path(path_type=Path))
@click.option("--input-side", default=32, show_default=True)
@click.option("--feature-dim", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--scale", default=0.5, show_default=True,
              help="weight range is [-scale, scale]")
def make_backend_cmd(out: Path, input_side: int, feature_dim: int, seed: int, scale: float):
    """Write a random-weight reference backend file."""
    backend = make_backend(input_side=input_side, feature_dimension=feature_dim,
                           seed=seed, scale=scale, name=out.stem)
    backend.save(out)
    click.echo(f"wrote {out} (side={input_side}, dim={feature_dim}, seed={seed})")


@main.group("eval", invoke_without_command=True)
@click.option("--backend", "backend_path", type=click.Path(exists=True, path_type=Path),
              help="weight file to evaluate")
@click.option("--dataset", "dataset_root", type=click.Path(exists=True, path_type=Path),
              help="dataset root containing manifest.tsv")
@click.option("--cross-backend", "cross_path", type=click.Path(exists=True, path_type=Path),
              help="second weight file to evaluate on the same dataset")
@click.option("--out-dir", type=click.Path(path_type=Path),
              help="write the report JSON files here")
@click.pass_context
def eval_group(ctx: click.Context, backend_path: Path | None, dataset_root: Path | None,
               cross_path: Path | None, out_dir: Path | None):
    """Evaluate backends on a labeled dataset and render report tables."""
    if ctx.invoked_subcommand is not None:
        return
    if backend_path is None or dataset_root is None:
        raise click.UsageError("eval requires --backend and --dataset "
                               "(or a subcommand: report, study)")
    dataset_name = dataset_root.name
    reports = []
    backend = load_backend_file(backend_path)
    reports.append(evaluate(backend, load_dataset(dataset_root), dataset_name=dataset_name))
    if cross_path is not None:
        cross = load_backend_file(cross_path)
        reports.append(evaluate(cross, load_dataset(dataset_root),
                                dataset_name=dataset_name,
                                name=f"{cross.name} cross"))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for report in reports:
            path = out_dir / f"{report.name.replace(' ', '_').replace('/', '_')}.json"
            report.save(path)
            click.echo(f"wrote {path}", err=True)
    click.echo(format_report(reports))


@eval_group.command("report")
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
def eval_report(files: tuple[Path, ...]):
    """Render one table from saved report JSON files."""
    click.echo(format_report([EvaluationReport.load(f) for f in files]))


@eval_group.command("study")
@click.argument("study_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path),
              help="also write the aggregate table to this file")
def eval_study(study_file: Path, out: Path | None):
    """Aggregate per-player mean scores from a study log."""
    aggregates = aggregate_scores(load_study_file(study_file))
    table = aggregates_to_tsv(aggregates)
    if out is not None:
        out.write_text(table, encoding="utf-8")
    click.echo(table, nl=False)


@main.group()
def client():
    """Talk to a running game server."""


@client.command()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
def stats(server: str):
    """Print the dataset distribution."""
    from .client import GameClient

    with GameClient(server) as game:
        payload = game.stats()
    for label, count in payload["counts"].items():
        click.echo(f"{label}\t{count}")
    click.echo(f"total\t{payload['total']}")


@client.command()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--player", required=True, help="player id to register")
@click.argument("captures", nargs=-1, required=True)
@click.option("--complete/--no-complete", default=True, show_default=True,
              help="finish registration after uploading")
def register(server: str, player: str, captures: tuple[str, ...], complete: bool):
    """Upload template captures given as <emotion>=<image path> pairs."""
    from .client import GameClient

    with GameClient(server) as game:
        state = None
        for capture in captures:
            if "=" not in capture:
                raise click.UsageError(f"expected <emotion>=<path>, got {capture!r}")
            label, _, path = capture.partition("=")
            state = game.register_template(player, label.strip(),
                                           FaceImage.load(path.strip()))
            click.echo(f"registered {label.strip()}: "
                       f"{len(state['registered'])}/7 captured")
        if complete:
            state = game.complete_registration(player)
            click.echo("registration complete")
        if state and state["missing"]:
            click.echo("still missing: " + ", ".join(state["missing"]))


@client.command()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--mode", type=click.Choice(["general", "customized"]), default="general",
              show_default=True)
@click.option("--player", help="player id (required for customized mode)")
@click.option("--frames-dir", type=click.Path(exists=True, path_type=Path),
              help="directory of images to cycle through; synthetic noise if omitted")
@click.option("--interval-ms", default=1000, show_default=True,
              help="client-side capture cadence")
@click.option("--max-seconds", default=60.0, show_default=True)
def play(server: str, mode: str, player: str | None, frames_dir: Path | None,
         interval_ms: int, max_seconds: float):
    """Play a scripted session, one frame per interval, until game over."""
    from .client import ApiError, GameClient

    frames: list[FaceImage] = []
    if frames_dir is not None:
        for path in sorted(frames_dir.iterdir()):
            if path.suffix.lower() in (".png", ".jpg", ".jpeg"):
                frames.append(FaceImage.load(path))
    if not frames:
        rng = np.random.default_rng(0)
        frames = [FaceImage.from_array(rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8))
                  for _ in range(8)]

    with GameClient(server) as game:
        session = game.create_session(mode=mode, player_id=player)
        session_id = session["session_id"]
        click.echo(f"session {session_id}: lives={session['lives']} "
                   f"target={session['target']['emotion']}")
        started = time.monotonic()
        frame_index = 0
        while time.monotonic() - started < max_seconds:
            try:
                outcome = game.submit_frame(session_id, frames[frame_index % len(frames)])
            except ApiError as exc:
                if exc.code == "session_over":
                    break
                if not exc.retryable:
                    raise
                click.echo(f"  ({exc.code})")
                time.sleep(interval_ms / 1000.0)
                continue
            frame_index += 1
            target = outcome.get("target")
            click.echo(f"  {outcome['status']}: score={outcome['score']} "
                       f"lives={outcome['lives']}"
                       + (f" next={target['emotion']}" if target else ""))
            if outcome["state"] == "over":
                break
            time.sleep(interval_ms / 1000.0)
        final = game.get_session(session_id)
        click.echo(f"final: state={final['state']} score={final['score']}")


def entrypoint() -> None:
    try:
        main(auto_envvar_prefix="EMODROP")
    except EmodropError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
