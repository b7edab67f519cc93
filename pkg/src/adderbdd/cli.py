"""Command-line front end.

Exit codes: 0 verified / success, 1 non-equivalent, 2 bound violation,
64 usage error, 73 output file cannot be written.
"""
import argparse
import csv
import io
import json
import sys

from . import adder_spec, circuits, symsim

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_BOUND_VIOLATION = 2
EXIT_USAGE = 64
EXIT_CANTCREAT = 73


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bits(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid bit width {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("bit width must be >= 1")
    return n


def _n_list(text):
    try:
        ns = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid width list {text!r}")
    if not ns or any(n < 1 for n in ns):
        raise argparse.ArgumentTypeError("widths must be >= 1")
    if ns != sorted(ns):
        raise argparse.ArgumentTypeError("widths must be ascending")
    return ns


def build_parser():
    p = _Parser(prog="adderbdd",
                description="BDD-based verification of adder circuits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    archs = list(symsim.ARCHITECTURES)

    g = sub.add_parser("gen", help="write an adder netlist")
    g.add_argument("--arch", choices=archs, required=True)
    g.add_argument("--bits", type=_bits, required=True)
    g.add_argument("-o", "--out", help="output file (default: stdout)")

    v = sub.add_parser("verify", help="verify an adder against the "
                                      "arithmetic reference")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--arch", choices=archs)
    src.add_argument("--netlist", help="netlist file to verify")
    v.add_argument("--bits", type=_bits, required=True)
    v.add_argument("--trace", help="write the per-gate size trace as CSV")
    v.add_argument("-o", "--out", help="write the JSON report here "
                                       "(default: stdout)")
    v.add_argument("--mutate", type=int, metavar="SEED",
                   help="apply one seeded single-gate mutation first")

    b = sub.add_parser("bounds", help="size bounds vs. measured sizes (CSV)")
    b.add_argument("--bits", type=_bits, required=True)
    b.add_argument("-o", "--out")

    s = sub.add_parser("sweep", help="construction cost over several widths")
    s.add_argument("--arch", choices=archs, required=True)
    s.add_argument("--n", type=_n_list, required=True,
                   help="comma-separated ascending widths")
    s.add_argument("--max-ratio", type=float, default=4.5,
                   help="allowed peak_live growth per doubling of n")
    s.add_argument("--timing", action="store_true",
                   help="add a wall_time column")
    s.add_argument("-o", "--out")

    d = sub.add_parser("dump-bdd", help="reference BDD as Graphviz DOT")
    d.add_argument("function", help="sum:i, carry:i, p:j:i or g:j:i")
    d.add_argument("--bits", type=_bits, required=True)
    d.add_argument("-o", "--out")
    return p


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w") as f:
        f.write(text)


def cmd_gen(args):
    c = circuits.gen_adder(args.arch, args.bits)
    _emit(circuits.serialize_netlist(c), args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.netlist:
        try:
            with open(args.netlist) as f:
                text = f.read()
        except OSError as e:
            raise UsageError(f"cannot read {args.netlist}: {e.strerror}")
        try:
            c = circuits.parse_netlist(text, name=args.netlist)
        except circuits.MalformedCircuitError as e:
            raise UsageError(f"{args.netlist}: {e}")
    else:
        c = circuits.gen_adder(args.arch, args.bits)
    mutation = None
    if args.mutate is not None:
        c, mutation = circuits.mutate(c, args.mutate)
    try:
        rep = symsim.verify_circuit(c, args.bits)
    except ValueError as e:
        raise UsageError(str(e))
    data = rep.to_dict()
    if mutation is not None:
        data["mutation"] = mutation
    if args.trace:
        _emit(rep.trace.to_csv(), args.trace)
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    if not rep.all_equivalent:
        cex = rep.counterexample
        print(f"NOT EQUIVALENT: output {cex['output']} differs at "
              f"a={cex['a']} b={cex['b']} cin={cex['cin']} "
              f"(circuit {cex['circuit_value']}, "
              f"expected {cex['spec_value']})", file=sys.stderr)
        return EXIT_NOT_EQUIVALENT
    if rep.bound_violations:
        for bv in rep.bound_violations:
            print(f"bound violation: {bv.signal} ({bv.tag or 'untagged'}) "
                  f"size {bv.measured} > {bv.bound}", file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def cmd_bounds(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "sum_bound", "carry_bound", "measured_sum",
                "measured_carry"])
    rows = adder_spec.bounds_table(args.bits)
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    over = [r for r in rows if r[3] > r[1] or r[4] > r[2]]
    return EXIT_BOUND_VIOLATION if over else EXIT_OK


def cmd_sweep(args):
    try:
        rows = symsim.growth_fit(args.arch, args.n, max_ratio=None)
    except symsim.GrowthError as e:
        print(str(e), file=sys.stderr)
        return EXIT_NOT_EQUIVALENT
    _emit(symsim.growth_csv(rows, timing=args.timing), args.out)
    for prev, cur in zip(rows, rows[1:]):
        if cur.n == 2 * prev.n and cur.peak_live > args.max_ratio * prev.peak_live:
            print(f"peak_live grew {cur.peak_live / prev.peak_live:.2f}x from "
                  f"n={prev.n} to n={cur.n}", file=sys.stderr)
            return EXIT_BOUND_VIOLATION
    return EXIT_OK


def cmd_dump_bdd(args):
    vars = adder_spec.interleaved_order(args.bits)
    try:
        f = adder_spec.spec_function(vars, args.function)
    except (ValueError, IndexError) as e:
        raise UsageError(str(e))
    _emit(vars.manager.to_dot([f], vars.var_names(), [args.function]),
          args.out)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "dump-bdd": cmd_dump_bdd,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"adderbdd: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"adderbdd: cannot write output: {e}", file=sys.stderr)
        return EXIT_CANTCREAT


if __name__ == "__main__":
    sys.exit(main())
