"""
Command-line interface: simple-dimred {run, timing, roc, validate-config}

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from ..exceptions import ConfigError, DimredError
from ..store import ResultStore
from .config import ExperimentConfig, config_schema, load_config
from .report import atomic_write_text, emit_roc, roc_filename, roc_text
from .runner import run_experiment
from .timing import run_timing, write_timing

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simple-dimred",
        description="Compare dimensionality-reduction methods for sparse binary detection",
    )
    parser.add_argument(
        "--print-schema", action="store_true", help="Print the config JSON schema and exit"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="Experiment config (JSON)")
        p.add_argument("--seed", type=int, help="Override the config seed")
        p.add_argument("--out", help="Output directory (overrides the config)")
        p.add_argument(
            "--jobs", type=int, help="Worker threads for grid cells; results do not depend on it"
        )
        p.add_argument(
            "-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="Debug logging"
        )

    run = sub.add_parser("run", help="Run the experiment and write report files")
    common(run)
    run.add_argument("--db", help="Also record the report in this results store (SQLAlchemy URL)")

    timing = sub.add_parser("timing", help="Time every method and write timing.csv")
    common(timing)
    timing.add_argument("--sizes", type=int, nargs="+", help="Sample counts for the scaling fit")

    roc = sub.add_parser("roc", help="Emit one cell's ROC curve")
    common(roc)
    roc.add_argument("--label", required=True, help="Target label")
    roc.add_argument("--method", required=True, help="Method name")
    roc.add_argument("--path", help="Output file (default: <out>/roc/<label>_<method>.csv)")
    roc.add_argument("--db", help="Read the curve from this results store instead of re-running")
    roc.add_argument("--run-id", type=int, help="Stored run to read (default: latest)")

    validate = sub.add_parser("validate-config", help="Validate a config without running it")
    validate.add_argument("--config", required=True, help="Experiment config (JSON)")
    validate.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                          help="Debug logging")
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    return config.with_overrides(seed=args.seed, output=args.out, jobs=args.jobs)


def cmd_run(args) -> int:
    config = _load(args)
    report = run_experiment(config, out=config.output)
    if args.db:
        with ResultStore(args.db) as store:
            run_id = store.record_report(report, config)
        print(f"Recorded run {run_id} in {args.db}")
    print(f"Wrote report to {Path(config.output)}")
    return EXIT_OK


def cmd_timing(args) -> int:
    config = _load(args)
    table = run_timing(config, sizes=args.sizes)
    path = write_timing(table, config.output)
    print(table.to_frame().to_string(index=False))
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_roc(args) -> int:
    config = _load(args)
    default_path = Path(config.output) / "roc" / roc_filename(args.label, args.method)
    path = Path(args.path) if args.path else default_path
    if args.db:
        with ResultStore(args.db, create=False) as store:
            run_id = args.run_id if args.run_id is not None else store.latest_run_id()
            if run_id is None:
                raise ConfigError("--db", "store holds no runs")
            curve = store.roc_curve(run_id, args.label, args.method)
        atomic_write_text(path, roc_text(curve))
    else:
        report = run_experiment(config)
        emit_roc(report, args.label, args.method, path)
    print(f"Wrote {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = load_config(args.config)
    print(f"OK: {len(config.labels)} label(s), methods {', '.join(config.method_names)}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "timing": cmd_timing,
    "roc": cmd_roc,
    "validate-config": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(getattr(args, "verbose", False))

    if args.print_schema:
        print(json.dumps(config_schema(), indent=2, sort_keys=True))
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG
    except (DimredError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
