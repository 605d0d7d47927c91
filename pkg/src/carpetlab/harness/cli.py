"""Command line entry point ``carpetlab``.

Exit status: 0 success, 2 configuration error, 3 validation failure,
4 I/O error.
"""
import argparse
import sys

from ..carpet import EVALUATORS
from . import output
from .commands import AXES, cmd_carpet, cmd_slice, cmd_traces, cmd_validate, thread_count
from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_IO = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="carpetlab",
        description="Quantum carpets of a particle in a box: render, validate, "
                    "list traces and take slices.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--evaluator", choices=EVALUATORS,
                       help="override the configured evaluator")
        p.add_argument("--out", help="output path (default: config output.path or stdout)")

    common(sub.add_parser("carpet", help="render W(x, t) to PGM, CSV or JSON"))
    common(sub.add_parser("validate", help="run the cross-representation checks"))
    p = sub.add_parser("traces", help="catalog of visible spacetime lines")
    common(p)
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="relative weight threshold in (0, 1] (default 1e-3)")
    p = sub.add_parser("slice", help="1-D cut comparing direct and line sums")
    common(p)
    p.add_argument("--axis", choices=AXES, default="fixed-t")
    p.add_argument("--value", type=float, required=True,
                   help="t/T for fixed-t, x/L for fixed-x")
    return parser


def _emit(text, path):
    if path:
        output.write_text(path, text)
    else:
        sys.stdout.write(text)


def run(args):
    cfg = load_config(args.config)
    if args.evaluator:
        cfg = cfg.with_(evaluator=args.evaluator)
    if args.command == "carpet":
        path, meta = cmd_carpet(cfg, args.out, threads=thread_count())
        for w in meta["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
        print(path)
        return EXIT_OK
    if args.command == "validate":
        report = cmd_validate(cfg)
        sys.stdout.write(report.to_text())
        if args.out:
            output.write_json(args.out, report.to_dict())
        return EXIT_OK if report.passed else EXIT_VALIDATION
    if args.command == "traces":
        _emit(output.dumps_json(cmd_traces(cfg, args.threshold)), args.out)
        return EXIT_OK
    _emit(cmd_slice(cfg, args.axis, args.value), args.out)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
