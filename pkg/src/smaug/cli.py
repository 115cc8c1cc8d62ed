"""Command-line interface: enroll, verify, evaluate, inspect, serve."""
from __future__ import annotations

import os
import random
import sys

import click

from .authflow import (
    enroll as do_enroll,
    load_record,
    record_from_payload,
    save_record,
    select_gesture,
    verify_attempt,
)
from .config import SmaugConfig, default_config, load_config
from .errors import SmaugError
from .store import TemplateStore, parse_record
from .synth import SHAPES, ImpostorProfile, UserProfile, emit_report, run_experiment
from .trace import parse_trace

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


def _load_cfg(config_path: str | None) -> SmaugConfig:
    if config_path:
        return load_config(config_path)
    return default_config()


def _store(data_dir: str | None) -> TemplateStore:
    root = data_dir or os.environ.get("SMAUG_DATA_DIR") or "./smaug-data"
    return TemplateStore(root)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


@click.group()
def main() -> None:
    """Gesture-based authentication engine."""


@main.command("enroll")
@click.argument("user")
@click.argument("gesture_name")
@click.argument("trace_files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None, help="template database root")
def cli_enroll(user, gesture_name, trace_files, config_path, data_dir):
    """Enroll GESTURE_NAME for USER from one trace file per round."""
    try:
        cfg = _load_cfg(config_path)
        if len(trace_files) != cfg.rounds:
            _fail(f"expected {cfg.rounds} rounds, got {len(trace_files)}")
        traces = []
        for path in trace_files:
            with open(path, "rb") as fh:
                traces.append(parse_trace(fh.read()))
        record = do_enroll(user, traces, cfg)
        path = save_record(_store(data_dir), record)
    except SmaugError as exc:
        _fail(str(exc))
    click.echo(f"enrolled gesture {record.gesture_id} for {user}")
    click.echo(f"record: {path}")


@main.command("verify")
@click.argument("user")
@click.argument("trace_files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--gesture", "gesture_id", default=None, help="gesture id; omit for random")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None)
@click.option("--seed", type=int, default=None, help="seed for random gesture choice")
@click.option("--debug", is_flag=True, help="print fault details")
def cli_verify(user, trace_files, gesture_id, config_path, data_dir, seed, debug):
    """Verify USER with up to the configured attempt budget of trace files.

    Exit status: 0 accept, 1 reject, 2 error.
    """
    try:
        cfg = _load_cfg(config_path)
        store = _store(data_dir)
        if not trace_files:
            _fail("need at least one trace file")
        if gesture_id is None:
            rng = random.Random(seed) if seed is not None else None
            gesture_id = select_gesture(store, user, rng)
        record = load_record(store, user, gesture_id, cfg)
        max_attempts = cfg.retries + 1
        if len(trace_files) > max_attempts:
            _fail(f"at most {max_attempts} attempts allowed")
        for attempt, path in enumerate(trace_files, start=1):
            with open(path, "rb") as fh:
                trace = parse_trace(fh.read())
            result = verify_attempt(record, trace, cfg)
            click.echo(
                f"attempt {attempt}: iW={result.i_w:.4f}/{result.theta1:.4f} "
                f"iF={result.i_f:.0f}/{result.theta2:.4f} "
                f"-> {'accept' if result.accepted else 'reject'}"
            )
            if debug:
                for fault in result.faults:
                    where = "" if fault.stroke is None else f" stroke {fault.stroke}"
                    click.echo(f"  fault: {fault.feature} {fault.cmp.value}{where}")
            if result.accepted:
                sys.exit(EXIT_ACCEPT)
        click.echo("fallback required")
    except SmaugError as exc:
        _fail(str(exc))
    sys.exit(EXIT_REJECT)


@main.command("evaluate")
@click.option("--shape", "shape_name", type=click.Choice(sorted(SHAPES)), default="A")
@click.option("--trials", type=int, default=100)
@click.option("--seed", type=int, default=1)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "csv"]), default="text")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def cli_evaluate(shape_name, trials, seed, config_path, fmt, out_path):
    """Run a synthetic genuine/impostor experiment and print the report."""
    try:
        cfg = _load_cfg(config_path)
        shape = SHAPES[shape_name]
        user = UserProfile(seed=seed)
        impostor = ImpostorProfile(victim=user, seed=seed + 1)
        report = run_experiment(shape, user, impostor, trials, cfg)
        payload = emit_report(report, fmt)
    except SmaugError as exc:
        _fail(str(exc))
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(payload)
        click.echo(f"report written to {out_path}")
    else:
        click.echo(payload.decode("utf-8"), nl=False)


@main.command("inspect")
@click.argument("record_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def cli_inspect(record_path, config_path):
    """Dump template statistics, weights, and thresholds of a stored record."""
    try:
        cfg = _load_cfg(config_path)
        with open(record_path, "rb") as fh:
            payload = parse_record(fh.read())
        record = record_from_payload(payload, cfg)
    except SmaugError as exc:
        _fail(str(exc))
    t = record.template
    ws = record.weight_set
    th = record.thresholds
    click.echo(f"user: {record.user}")
    click.echo(f"gesture: {t.meta.gesture_id} ({t.meta.name})")
    click.echo(f"strokes: {t.stroke_count}  maxPointers: {t.max_pointers}")
    click.echo(f"motion: {'yes' if t.has_motion else 'no'}")
    click.echo(f"best round (touch): {t.t4.best_round}")
    if t.f4 is not None:
        click.echo(f"best round (motion): {t.f4.best_round}")
    click.echo("gesture feature spread:")
    for name in sorted(t.t5):
        fs = t.t5[name]
        click.echo(
            f"  {name}: min={fs.min:.4g} max={fs.max:.4g} "
            f"am={fs.am:.4g} stdev={fs.stdev:.4g} median={fs.median:.4g}"
        )
    values = sorted(ws.weights.values())
    click.echo(
        f"weights: {len(values)} comparison features, "
        f"min={values[0]:.4g} max={values[-1]:.4g} "
        f"mean={sum(values) / len(values):.4g}"
    )
    click.echo(f"indicators: iW={ws.i_w:.4f} iF={ws.i_f:.4f}")
    click.echo(f"thresholds: theta1={th.theta1:.4f} theta2={th.theta2:.4f}")
    click.echo(
        f"security params: wMul={th.params.w_mul} wAdd={th.params.w_add} "
        f"fMul={th.params.f_mul} fAdd={th.params.f_add}"
    )


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8732)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None)
@click.option("--debug", is_flag=True, help="expose indicators in responses")
def cli_serve(host, port, config_path, data_dir, debug):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    try:
        cfg = _load_cfg(config_path)
    except SmaugError as exc:
        _fail(str(exc))
    root = data_dir or os.environ.get("SMAUG_DATA_DIR") or "./smaug-data"
    app = create_app(root, cfg, debug=debug)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
