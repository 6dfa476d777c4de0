"""Command line entry point ``lab``."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import interchange, report, scenarios


def _threads(arg: int | None) -> int | None:
    if arg is not None:
        return arg
    env = os.environ.get("LAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise scenarios.ScenarioError(f"LAB_THREADS={env!r} is not an integer") from None
    return None


def cmd_run(args) -> int:
    name, seed, params = scenarios.load(args.scenario, args.seed)
    threads = _threads(args.threads)
    if threads is not None and threads < 1:
        raise scenarios.ScenarioError("thread count must be >= 1")
    out = Path(args.out) if args.out else Path("runs") / f"{Path(args.scenario).stem}-seed{seed}"
    t0 = time.perf_counter()
    if threads is not None:
        from threadpoolctl import threadpool_limits
        with threadpool_limits(limits=threads):
            rep = scenarios.run(name, seed, params)
    else:
        rep = scenarios.run(name, seed, params)
    wall = time.perf_counter() - t0
    path = report.write(rep, out)
    # timing lives beside the report so that reruns stay byte-identical
    (out / "timing.json").write_text(json.dumps({"wall_seconds": wall, "threads": threads}) + "\n")
    for key, v in sorted(rep.verdicts.items()):
        print(f"{key}: {v}")
    print(f"report written to {path}")
    return 0


def cmd_compare(args) -> int:
    a = report.load(args.a)
    b = report.load(args.b)
    lines, differ = report.compare(a, b, rtol=args.rtol)
    for line in lines:
        print(line)
    return 1 if differ else 0


def cmd_fixtures(args) -> int:
    for name in sorted(interchange.FIXTURES):
        tup = interchange.fixture(name)
        print(f"{name}: dim={tup.dim} arity={tup.arity}  {interchange.FIXTURES[name][1]}")
        if args.write:
            interchange.write_tuple(tup, Path(args.write) / name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lab", description="Run and compare operator-norm experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--out", help="output directory (default runs/<name>-seed<N>)")
    run.add_argument("--threads", type=int, help="BLAS thread limit (default $LAB_THREADS)")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="diff two reports; exit 1 if any verdict differs")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--rtol", type=float, default=1e-9)
    cmp_.set_defaults(func=cmd_compare)

    fx = sub.add_parser("fixtures", help="list named operator tuples")
    fx.add_argument("--write", metavar="DIR", help="also export each fixture under DIR")
    fx.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except report.SchemaMismatch as exc:
        print(f"lab: schema mismatch: {exc}", file=sys.stderr)
        return 2
    except (scenarios.ScenarioError, OSError, ValueError) as exc:
        print(f"lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
