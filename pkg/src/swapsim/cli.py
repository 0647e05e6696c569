"""Command-line runner.

    swapsim <subcommand> --scenario <path|paper> --seed <u64> --out <dir>
            [--events-per-setting N] [--jitter-fs X] [--overlap I]

Exit codes: 0 success, 2 invalid scenario or arguments, 3 runtime failure
(lost lock, null Bell-state-measurement outcome, I/O).
"""

from __future__ import annotations

import argparse
import logging
import sys

from .laser_sync import NotLockedError
from .pipeline import (
    RunRecord,
    emit_outputs,
    run_chsh,
    run_overlap,
    run_pipeline,
    run_swap,
    run_sync,
)
from .polarization import NullOutcomeError
from .scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("swapsim")

SUBCOMMANDS = ("sync", "hom-overlap", "swap", "chsh", "full")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapsim",
        description="Entanglement swapping between synchronized pulsed photon-pair sources.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", default="paper",
                       help="scenario TOML file or preset name (default: paper)")
        p.add_argument("--seed", type=int, help="root seed (unsigned 64-bit)")
        p.add_argument("--out", dest="output_dir", help="output directory")
        p.add_argument("--events-per-setting", dest="events_per_setting", type=int)
        p.add_argument("--jitter-fs", dest="jitter_override_fs", type=float,
                       help="use this photon arrival offset instead of the simulated jitter")
        p.add_argument("--overlap", dest="overlap_override", type=float,
                       help="force the photon 2/3 overlap")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _needs_sync(command: str, s) -> bool:
    if command in ("sync", "full"):
        return True
    return s.overlap_override is None and s.jitter_override_fs is None


def execute(command: str, s) -> RunRecord:
    record = RunRecord(scenario=s.to_dict(), seed=s.seed)
    if command == "full":
        return run_pipeline(s)
    jitter = run_sync(s, record) if _needs_sync(command, s) else 0.0
    if command == "sync":
        return record
    overlap = run_overlap(s, record, jitter)
    if command == "hom-overlap":
        return record
    out = run_swap(s, record, overlap)
    if command == "chsh":
        run_chsh(s, record, out.rho_14)
    return record


def print_summary(record: RunRecord, stream=None) -> None:
    stream = stream or sys.stdout
    rows = [("derived." + k, v) for k, v in record.derived.items()]
    if record.swap:
        rows += [("swap." + k, v) for k, v in record.swap.items() if not k.startswith("rho")]
    if record.chsh:
        rows += [("chsh." + k, v) for k, v in record.chsh.items()
                 if not isinstance(v, list)]
    width = max((len(k) for k, _ in rows), default=0)
    for k, v in rows:
        print(f"{k:<{width}}  {v:.3f}", file=stream)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k) for k in
                 ("seed", "output_dir", "events_per_setting", "jitter_override_fs",
                  "overlap_override")}
    try:
        s = load_scenario(args.scenario, overrides)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        record = execute(args.command, s)
        paths = emit_outputs(record, s.output_dir)
    except (NotLockedError, NullOutcomeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for p in paths:
        log.info("wrote %s", p)
    print_summary(record)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
