"""Command-line front end: ``deptw <command> ...``.

Exit codes: 10 true, 20 false (solve, oracle); 0/1 verified/rejected (check);
1 on bad input or usage; 2 when an internal invariant fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .chain import min_width_via_chains
from .decomp import format_td, ordering_to_decomposition, ordering_width
from .dp import solve
from .errors import DeptwError, InvariantError
from .game import treewidth_via_game
from .oracle import brute_force_truth
from .poset import build_trivial_poset, format_poset_file, parse_poset_file
from .proof import check_refutation, serialize
from .qbf import build_primal_graph, generate_family, parse_qdimacs, to_qdimacs

EXIT_TRUE, EXIT_FALSE = 10, 20
AUTO_CHAIN_MAX_POSET_WIDTH = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    if isinstance(data, str):
        data = data.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)


class _InputError(Exception):
    def __init__(self, where, err):
        super().__init__(f"{where}: {err}")


def _load_instance(path):
    try:
        return parse_qdimacs(_read(path))
    except (DeptwError, UnicodeDecodeError) as e:
        raise _InputError(path, e) from None


def _load_poset(args, inst):
    if getattr(args, "poset", None):
        try:
            return parse_poset_file(_read(args.poset), inst)
        except (DeptwError, UnicodeDecodeError) as e:
            raise _InputError(args.poset, e) from None
    return build_trivial_poset(inst)


def _compute_width(args, g, p):
    """``(algo, width, ordering, decomposition)``; width None past the cap."""
    algo = args.algo
    if algo == "auto":
        algo = "chain" if p.width <= AUTO_CHAIN_MAX_POSET_WIDTH else "game"
    if not g.vertices:
        return algo, 0, (), None
    if algo == "chain":
        width, order = min_width_via_chains(g, p, args.max_width)
        return algo, width, order, None
    res = treewidth_via_game(g, p, args.max_width)
    return algo, res.width, res.ordering, res.decomposition


def _cmd_solve(args, out):
    inst = _load_instance(args.qdimacs)
    p = _load_poset(args, inst)
    g = build_primal_graph(inst)
    algo, width, order, _ = _compute_width(args, g, p)
    if width is None:
        out.write(f"c width > {args.max_width}\n")
        out.write("s UNKNOWN\n")
        return 0
    res = solve(inst, p, order, check_invariants=args.check_invariants)
    k = ordering_width(g, order)
    out.write(f"c algorithm {algo}\n")
    out.write(f"c dependency treewidth {width}\n")
    out.write(f"c ordering width {k}\n")
    out.write("c ordering " + " ".join(map(str, order)) + "\n")
    st = res.stats
    out.write(f"c max clauses {st.max_clauses}\n")
    out.write(f"c max clause width {st.max_clause_width}\n")
    out.write(f"c resolvents {st.resolvents}\n")
    out.write(f"c derived clauses {st.derived_clauses}\n")
    if args.ordering:
        _write(args.ordering, "o " + " ".join([*map(str, order), "0"]) + "\n")
    if res.verdict:
        out.write("s TRUE\n")
        return EXIT_TRUE
    if args.proof:
        _write(args.proof, serialize(res.refutation))
    out.write("s FALSE\n")
    return EXIT_FALSE


def _cmd_width(args, out):
    inst = _load_instance(args.qdimacs)
    p = _load_poset(args, inst)
    _, width, _, _ = _compute_width(args, build_primal_graph(inst), p)
    out.write(f"> {args.max_width}\n" if width is None else f"{width}\n")
    return 0


def _cmd_decompose(args, out):
    inst = _load_instance(args.qdimacs)
    p = _load_poset(args, inst)
    g = build_primal_graph(inst)
    _, width, order, td = _compute_width(args, g, p)
    if width is None:
        raise _InputError(args.qdimacs, f"dependency treewidth exceeds {args.max_width}")
    if td is None:
        td = ordering_to_decomposition(g, p, order)
    text = "c ordering " + " ".join(map(str, order)) + "\n" + format_td(td, g)
    if args.out:
        _write(args.out, text)
    else:
        out.write(text)
    if args.ordering:
        _write(args.ordering, "o " + " ".join([*map(str, order), "0"]) + "\n")
    return 0


def _cmd_check(args, out):
    inst = _load_instance(args.qdimacs)
    p = _load_poset(args, inst) if args.poset else None
    try:
        report = check_refutation(inst, _read(args.proof), p)
    except (DeptwError, UnicodeDecodeError) as e:
        raise _InputError(args.proof, e) from None
    out.write(report.render())
    return 0 if report.verified else 1


def _cmd_oracle(args, out):
    inst = _load_instance(args.qdimacs)
    truth = brute_force_truth(inst)
    out.write("s TRUE\n" if truth else "s FALSE\n")
    return EXIT_TRUE if truth else EXIT_FALSE


def _cmd_gen(args, out):
    try:
        fam = generate_family(args.family, args.i)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out.write(to_qdimacs(fam.instance))
    if args.poset_out:
        if fam.poset_pairs is None:
            logging.getLogger(__name__).warning("family %s has no refined poset", args.family)
        else:
            _write(args.poset_out, format_poset_file(fam.poset_pairs))
    return 0


def _add_width_opts(sp):
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--poset", metavar="FILE", help="dependency poset file (lines 'u v' meaning u <= v)")
    grp.add_argument("--scheme", choices=["trivial"], default="trivial", help="dependency scheme when no poset file is given")
    sp.add_argument("--algo", choices=["game", "chain", "auto"], default="auto")
    sp.add_argument("--max-width", type=int, default=None, metavar="W")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="deptw", description="QBF evaluation along dependency elimination orderings.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="decide a QDIMACS instance")
    sp.add_argument("qdimacs")
    _add_width_opts(sp)
    sp.add_argument("--proof", metavar="OUT", help="write a refutation here when false")
    sp.add_argument("--ordering", metavar="OUT", help="write the elimination ordering here")
    sp.add_argument("--check-invariants", action="store_true", help="assert the per-step size bounds")
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("width", help="print the dependency treewidth")
    sp.add_argument("qdimacs")
    _add_width_opts(sp)
    sp.set_defaults(func=_cmd_width)

    sp = sub.add_parser("decompose", help="write a dependency tree decomposition")
    sp.add_argument("qdimacs")
    _add_width_opts(sp)
    sp.add_argument("--out", metavar="FILE", help="write the decomposition here instead of stdout")
    sp.add_argument("--ordering", metavar="OUT", help="write the elimination ordering here")
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("check", help="verify a dqrp refutation")
    sp.add_argument("qdimacs")
    sp.add_argument("proof")
    sp.add_argument("--poset", metavar="FILE")
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("oracle", help="brute-force truth value")
    sp.add_argument("qdimacs")
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("gen", help="write a family instance to stdout")
    sp.add_argument("family", metavar="{A,B,E,F}")
    sp.add_argument("i", type=int)
    sp.add_argument("--poset-out", metavar="FILE")
    sp.set_defaults(func=_cmd_gen)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format="c warning: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as e:
        sys.stderr.write(f"deptw: usage error: {e}\n")
        return 1
    except InvariantError as e:
        sys.stderr.write(f"deptw: internal invariant failed: {e}\n")
        return 2
    except (_InputError, DeptwError, OSError) as e:
        sys.stderr.write(f"deptw: error: {e}\n")
        return 1


def main():
    sys.exit(run())
