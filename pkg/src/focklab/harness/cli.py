"""``focklab <experiment> --config <path> [--out <dir>] [--seed <u64>] [--threads <k>]``.

Exit status: 0 every contract holds, 1 a contract is violated, 2 configuration
error, 3 the request exceeds the binary64 budget.
"""
from __future__ import annotations

import argparse
import os
import sys

from ..errors import BudgetExceeded, InvalidArgument
from .config import EXPERIMENTS, ConfigError, load_config
from .experiments import run
from .report import write_report

OUT_ENV = "FOCKLAB_OUT"
DEFAULT_OUT = "focklab-out"

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="focklab", description="Bargmann-Fock block experiments")
    p.add_argument("experiment", help=" | ".join(EXPERIMENTS))
    p.add_argument("--config", required=True, help="JSON config (see config_schema.json)")
    p.add_argument("--out", default=None,
                   help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--threads", type=int, default=None, help="BLAS/FFT thread cap")
    p.add_argument("--dump-matrices", action="store_true",
                   help="block-decay only: write each Toeplitz matrix (.bin + .json sidecar)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    if args.threads is not None and args.threads < 1:
        print("focklab: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.experiment not in EXPERIMENTS:
        print(f"focklab: unknown experiment {args.experiment!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.experiment, args.seed)
    except ConfigError as exc:
        print(f"focklab: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    def _go():
        dump = os.path.join(out, "matrices") if args.dump_matrices else None
        if dump:
            os.makedirs(dump, exist_ok=True)
        return run(cfg, dump)

    try:
        if args.threads is not None:
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=args.threads):
                report = _go()
        else:
            report = _go()
    except BudgetExceeded as exc:
        print(f"focklab: budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvalidArgument as exc:
        print(f"focklab: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    status = EXIT_PASS if report.passed else EXIT_FAIL
    csv_path, json_path = write_report(report, out, status)
    for c in report.failures:
        print(f"FAIL {c.name}: margin {c.margin:.3e} {c.detail}".rstrip(), file=sys.stderr)
    print(f"{report.experiment}: {len(report.contracts) - len(report.failures)}/{len(report.contracts)} "
          f"contracts hold; wrote {csv_path} and {json_path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
