"""Command line entry point: ``run``, ``sweep`` and ``validate``.

Errors are reported on stderr as one JSON object with an ``error`` category
(``config``, ``io`` or ``internal``); the exit code is 2, 3 or 1 respectively.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, config_to_dict, load_config
from .controller import run_episode
from .harness import episode_row, episode_seeds, run_sweep, write_summary, write_trace

EXIT_CODES = {"config": 2, "io": 3, "internal": 1}


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aoi-dpp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one episode")
    run.add_argument("--config", required=True)
    run.add_argument("--trace-out", help="per-(slot, sensor) CSV trace")
    run.add_argument("--summary-out", help="one-row CSV summary")
    run.add_argument("--V", type=float, help="override controller.V")
    run.add_argument("--horizon", type=int, help="override simulation.horizon_slots")

    sweep = sub.add_parser("sweep", help="average episodes over seeds for several V")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--v-list", required=True, type=_floats, help="e.g. 1,10,100")
    sweep.add_argument("--seeds", type=int, default=20,
                       help="number of episodes per V; episode i uses seed XOR i")
    sweep.add_argument("--out", help="summary CSV path")
    sweep.add_argument("--horizon", type=int, help="override simulation.horizon_slots")

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("--config", required=True)
    return ap


def _fail(category: str, message: str, details=None) -> int:
    payload = {"error": category, "message": message}
    if details:
        payload["fields"] = [{"field": f, "message": m} for f, m in details]
    print(json.dumps(payload), file=sys.stderr)
    return EXIT_CODES[category]


def _overrides(cfg, args):
    changes = {}
    if getattr(args, "V", None) is not None:
        if args.V < 0:
            raise ConfigError([("--V", "must be >= 0")])
        changes["V"] = args.V
    if getattr(args, "horizon", None) is not None:
        if args.horizon < 1:
            raise ConfigError([("--horizon", "must be >= 1")])
        changes["horizon_slots"] = args.horizon
    return cfg.with_(**changes) if changes else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _overrides(load_config(args.config), args)
        if args.command == "validate":
            print(json.dumps({"ok": True, "config": config_to_dict(cfg)}))
        elif args.command == "run":
            trace_out = args.trace_out or cfg.trace_output
            summary_out = args.summary_out or cfg.summary_output
            metrics = run_episode(cfg, record=bool(trace_out))
            row = episode_row(metrics, cfg.max_avg_aoi)
            if trace_out:
                write_trace(metrics.records, trace_out)
            if summary_out:
                write_summary([row], summary_out)
            print(json.dumps(row))
        else:
            if args.seeds < 1:
                raise ConfigError([("--seeds", "must be >= 1")])
            rows = run_sweep(cfg, args.v_list, episode_seeds(cfg.seed, args.seeds))
            out = args.out or cfg.summary_output
            if out:
                write_summary(rows, out)
            for row in rows:
                print(json.dumps(row))
    except ConfigError as exc:
        return _fail("config", str(exc), exc.errors)
    except OSError as exc:
        return _fail("io", f"{exc.filename or ''}: {exc.strerror or exc}")
    except Exception as exc:  # noqa: BLE001 - surfaced as a structured error
        return _fail("internal", f"{type(exc).__name__}: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
