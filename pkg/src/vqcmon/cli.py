"""Command-line entry point.

Commands: train, sweep, replay, validate. Exit codes: 0 success, 1 runtime
failure, 2 usage/config error. The run directory defaults to ./runs/<run_id>
and can be overridden with the VQCMON_RUN_DIR environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from collections import Counter
from pathlib import Path
from typing import Optional, Sequence

from .circuit import CircuitSpec, parse_circuit_file
from .errors import CircuitParseError, FitError, VqcmonError
from .server import RunStatus, TelemetryServer
from .sweep import fit_decay, sweep_variance, write_csv
from .telemetry import StreamEmitter, TelemetryRecorder, read_run_log
from .trainer import TrainConfig, TrainingEngine

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

DEFAULT_PORT = 8321


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcmon",
        description="Train a variational quantum classifier with live "
        "gradient-variance (barren plateau) monitoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run a monitored training session")
    train.add_argument("--wires", type=int, default=4)
    train.add_argument("--layers", type=int, default=2)
    train.add_argument("--rotations", type=int, default=4, help="rotation slots per layer")
    train.add_argument("--epochs", type=int, default=40)
    train.add_argument("--batch", type=int, default=16)
    train.add_argument("--lr", type=float, default=0.1)
    train.add_argument("--threshold", type=float, default=1e-5)
    train.add_argument("--dataset", type=int, default=100)
    train.add_argument("--interval", type=float, default=30.0, help="stream flush interval, seconds")
    train.add_argument("--seed", type=int, default=7)
    train.add_argument("--port", type=int, default=DEFAULT_PORT)
    train.add_argument("--no-server", action="store_true", help="skip the live HTTP server")
    train.add_argument("--circuit", type=Path, help="circuit file overriding the generated PQC")
    train.add_argument("--run-dir", type=Path, help="run log directory")

    sweep = sub.add_parser("sweep", help="gradient-variance decay vs qubit count")
    sweep.add_argument("--wires", default="2,4,6,8,10", help="comma-separated qubit counts")
    sweep.add_argument("--layers", type=int, default=8)
    sweep.add_argument("--samples", type=int, default=200)
    sweep.add_argument("--seed", type=int, default=7)
    sweep.add_argument("--out", type=Path, default=Path("sweep.csv"))

    replay = sub.add_parser("replay", help="serve a finished run log over the live endpoint")
    replay.add_argument("log", type=Path, help="events.jsonl path")
    replay.add_argument("--port", type=int, default=DEFAULT_PORT)
    replay.add_argument("--once", action="store_true", help=argparse.SUPPRESS)  # tests: exit after load

    validate = sub.add_parser("validate", help="check a circuit file")
    validate.add_argument("file", type=Path)
    validate.add_argument("--json", action="store_true", dest="as_json")

    return parser


def _load_circuit(path: Path) -> CircuitSpec:
    return parse_circuit_file(path.read_text(encoding="utf-8"))


def _run_dir(args_dir: Optional[Path], run_id: str) -> Path:
    if args_dir is not None:
        return args_dir
    env = os.environ.get("VQCMON_RUN_DIR")
    if env:
        return Path(env)
    return Path("runs") / run_id


def cmd_train(args: argparse.Namespace) -> int:
    circuit = None
    if args.circuit is not None:
        circuit = _load_circuit(args.circuit)
    config = TrainConfig(
        n_wires=args.wires,
        n_layers=args.layers,
        rotations_per_layer=args.rotations,
        seed=args.seed,
        epochs=args.epochs,
        batch_size=args.batch,
        learning_rate=args.lr,
        threshold=args.threshold,
        dataset_size=args.dataset,
        stream_interval_seconds=args.interval,
    )
    run_id = f"train-{args.seed}-{int(time.time())}"
    recorder = TelemetryRecorder(_run_dir(args.run_dir, run_id))
    engine = TrainingEngine(config, circuit=circuit, recorder=recorder)
    status = RunStatus(run_id, config.threshold)
    engine.on_epoch = lambda result: status.update(
        epoch=result.epoch, threshold=result.report.threshold
    )

    emitter = StreamEmitter(recorder, config.stream_interval_seconds)
    server = None
    if not args.no_server:
        server = TelemetryServer(
            recorder, status, set_threshold=engine.set_threshold, port=args.port
        )
        server.start()
        print(f"live telemetry on http://127.0.0.1:{server.port}")
    emitter.start()
    try:
        results = engine.run_all()
    except KeyboardInterrupt:
        print("interrupted, flushing run log", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        emitter.stop()
        if server is not None:
            server.stop()
        recorder.close()
    final = results[-1]
    plateau_epochs = sum(1 for r in results if r.event is not None)
    print(
        f"final train_loss={final.train_loss:.6f} "
        f"test_accuracy={final.test_accuracy:.3f} "
        f"plateau_events={plateau_epochs} "
        f"run_log={recorder.log_path}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        n_range = [int(tok) for tok in str(args.wires).split(",") if tok.strip()]
    except ValueError:
        print(f"bad --wires list: {args.wires!r}", file=sys.stderr)
        return EXIT_USAGE
    result = sweep_variance(n_range, args.layers, args.samples, args.seed)
    write_csv(result, args.out)
    print(f"wrote {args.out} ({len(result.rows)} rows)")
    try:
        fit = fit_decay(result)
    except FitError as exc:
        print(f"decay fit skipped: {exc}", file=sys.stderr)
        return EXIT_OK
    print(f"slope={fit.slope:.4f} intercept={fit.intercept:.4f} r_squared={fit.r_squared:.4f}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    result = read_run_log(args.log)
    if result.skipped:
        print(f"skipped {result.skipped} corrupt line(s)", file=sys.stderr)
    recorder = TelemetryRecorder(args.log.parent / "replay")
    for event in result.events:
        recorder.record(event)
    recorder.flush_stream()
    status = RunStatus(f"replay-{args.log.name}", threshold=0.0)
    last_step = max((e.step for e in result.events), default=-1)
    status.update(epoch=last_step)
    server = TelemetryServer(recorder, status, port=args.port)
    server.start()
    print(
        f"replaying {len(result.events)} events on http://127.0.0.1:{server.port}"
    )
    try:
        if not args.once:
            while True:
                time.sleep(1.0)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        recorder.close()
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    spec = _load_circuit(args.file)
    census = Counter(slot.kind.name for slot in spec.pqc)
    if args.as_json:
        print(
            json.dumps(
                {
                    "wires": spec.n_wires,
                    "params": spec.n_params,
                    "measured_wires": list(spec.measured_wires),
                    "gates": dict(sorted(census.items())),
                }
            )
        )
    else:
        print(f"wires: {spec.n_wires}")
        print(f"params: {spec.n_params}")
        print(f"measured: {' '.join(str(w) for w in spec.measured_wires)}")
        for kind, count in sorted(census.items()):
            print(f"{kind}: {count}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "train": cmd_train,
        "sweep": cmd_sweep,
        "replay": cmd_replay,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except CircuitParseError as exc:
        print(f"circuit file error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except VqcmonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
