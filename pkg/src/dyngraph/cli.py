"""Command-line front end: ``dyngraph run|fuzz|bench``."""
from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import GraphError

EXIT_CHECK = 1
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_GRAPH = 4


def _add_engine_flags(p: argparse.ArgumentParser, engine_default: str | None = "fd-scc"):
    if engine_default is not None:
        p.add_argument("--engine", choices=sorted(harness.ENGINES), default=engine_default)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized engines")
    p.add_argument("--epsilon", type=float, default=0.5, help="approximation parameter")
    p.add_argument("--phase-len", type=int, default=None, help="updates per phase")
    p.add_argument("--delta", type=int, default=None, help="block width for tree structures")
    p.add_argument("--alpha", type=float, default=None, help="phase-length exponent")


def _options(args, engine=None, check=False) -> harness.Options:
    return harness.Options(engine=engine or args.engine, seed=args.seed, epsilon=args.epsilon,
                           phase_len=args.phase_len, delta=args.delta, alpha=args.alpha,
                           check=check)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyngraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a command script")
    run.add_argument("script", help="script file, or - for stdin")
    _add_engine_flags(run)
    run.add_argument("--check", action="store_true", help="verify every answer against oracles")
    run.add_argument("--counters", metavar="FILE.csv", help="write per-command counters")

    fz = sub.add_parser("fuzz", help="differential fuzzing against the oracles")
    _add_engine_flags(fz, engine_default=None)
    fz.add_argument("--engine", action="append", choices=sorted(harness.ENGINES),
                    help="engine to fuzz (repeatable; default all)")
    fz.add_argument("--n", type=int, default=10)
    fz.add_argument("--steps", type=int, default=100)
    fz.add_argument("--runs", type=int, default=10, help="seeds per engine, starting at --seed")
    fz.add_argument("--mix", choices=("mixed", "insert-only", "acyclic"), default=None)
    fz.add_argument("--standard", action="store_true",
                    help="run the fixed path/tree suite (ignores --engine/--n/--steps/--runs)")

    bn = sub.add_parser("bench", help="per-command counters at several sizes")
    _add_engine_flags(bn)
    bn.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    bn.add_argument("--steps", type=int, default=50)
    bn.add_argument("--out", metavar="FILE.csv", help="write CSV here instead of stdout")
    return parser


def _cmd_run(args) -> int:
    text = sys.stdin.read() if args.script == "-" else open(args.script).read()
    report = harness.run(text, _options(args, check=args.check))
    for note in report.notes:
        print(note, file=sys.stderr)
    for line in report.lines:
        print(line)
    if args.counters:
        with open(args.counters, "w", newline="") as fh:
            harness.write_counters(report.counter_rows, fh)
    return 0


def _cmd_fuzz(args) -> int:
    engines = args.engine or sorted(harness.ENGINES)
    if args.standard:
        rep = harness.standard_suite(_options(args, engine=engines[0]))
    else:
        seeds = range(args.seed, args.seed + args.runs)
        rep = harness.fuzz(args.n, args.steps, engines, seeds, mix=args.mix,
                           opts=_options(args, engine=engines[0]))
    print(f"runs={rep.runs} queries={rep.queries} failures={len(rep.failures)}")
    for f in rep.failures:
        print(f)
    return EXIT_CHECK if rep.failures else 0


def _cmd_bench(args) -> int:
    text = harness.bench(args.sizes, engine=args.engine, steps=args.steps, seed=args.seed,
                         opts=_options(args))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "fuzz": _cmd_fuzz, "bench": _cmd_bench}[args.command]
    try:
        return handler(args)
    except harness.CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except harness.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except harness.EngineMismatch as exc:
        print(f"engine mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (GraphError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GRAPH


if __name__ == "__main__":
    sys.exit(main())
