"""Command-line front end.

    ssroute fib SCENARIO [--backend source-first] [--golden PATH]
    ssroute sim TOPOLOGY [--max-rounds N] [--seed N] [--golden PATH]
    ssroute check [--width-dest 4 --width-src 4] [--routes 8] [--ops 40]
                  [--seed 0] [--iterations 200] [--output PATH]

Exit codes: 0 success, 1 property or expectation failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from pathlib import Path

from .check import run_check
from .fib import Backend
from .scenario import ScenarioError, parse_fib_scenario, parse_topology, run_fib_scenario, run_topology

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def cmd_fib(text, backend=Backend.SOURCE_FIRST, width_dest=128, width_src=128):
    sc = parse_fib_scenario(text, width_dest, width_src)
    return run_fib_scenario(sc, backend)


def cmd_sim(text, max_rounds=1000, width_dest=128, width_src=128, seed=None):
    sc = parse_topology(text, width_dest, width_src)
    return run_topology(sc, max_rounds, shuffle_seed=seed)


def cmd_check(width_dest=4, width_src=4, routes=8, ops=40, seed=0, iterations=200):
    if width_dest + width_src > 16:
        raise ValueError("check enumerates every address pair; keep widths at 8 bits or less")
    report = run_check(width_dest, width_src, routes, ops, seed, iterations)
    out = report.summary() + "\n"
    if report.counterexample:
        out += "counterexample:\n" + report.counterexample
    return (EXIT_OK if report.passed else EXIT_FAIL), out, report


def _compare_golden(output, path):
    golden = Path(path).read_text()
    if golden == output:
        return None
    return "".join(difflib.unified_diff(
        golden.splitlines(True), output.splitlines(True), fromfile=str(path), tofile="output"
    ))


def build_parser():
    parser = argparse.ArgumentParser(prog="ssroute", description="Source-specific routing tables and simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def widths(p, default):
        p.add_argument("--width-dest", type=int, default=default, metavar="N")
        p.add_argument("--width-src", type=int, default=default, metavar="N")

    fib = sub.add_parser("fib", help="run a FIB scenario through the disambiguation engine")
    fib.add_argument("scenario")
    fib.add_argument("--backend", choices=[b.value for b in Backend], default=Backend.SOURCE_FIRST.value)
    widths(fib, 128)
    fib.add_argument("--golden", metavar="PATH")

    sim = sub.add_parser("sim", help="simulate a topology and trace packets")
    sim.add_argument("topology")
    sim.add_argument("--max-rounds", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=None, help="shuffle link delivery order")
    widths(sim, 128)
    sim.add_argument("--golden", metavar="PATH")

    check = sub.add_parser("check", help="randomised oracle-equivalence sweep")
    widths(check, 4)
    check.add_argument("--routes", type=int, default=8)
    check.add_argument("--ops", type=int, default=40)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--iterations", type=int, default=200)
    check.add_argument("--output", metavar="PATH", help="write the counterexample scenario here")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fib":
            code, out = cmd_fib(Path(args.scenario).read_text(), args.backend, args.width_dest, args.width_src)
        elif args.command == "sim":
            code, out = cmd_sim(Path(args.topology).read_text(), args.max_rounds,
                                args.width_dest, args.width_src, args.seed)
        else:
            code, out, report = cmd_check(args.width_dest, args.width_src, args.routes, args.ops,
                                          args.seed, args.iterations)
            if args.output and report.counterexample:
                Path(args.output).write_text(report.counterexample)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out)
    golden = getattr(args, "golden", None)
    if golden:
        diff = _compare_golden(out, golden)
        if diff:
            sys.stderr.write(diff)
            return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
