"""Command-line interface.

Exit codes: 0 success, 2 configuration/parse error, 3 size cap exceeded,
4 precondition violation.  All randomness flows from the --seed-rng flag;
identical configuration and seed give byte-identical output.  CSV output
uses ',' separators, '.' decimal points and LF line endings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .decomposition import coupled_grow, decompose
from .errors import CapExceededError, PreconditionError
from .growth import as_alpha, enumerate_growth, grow_abstract, grow_planar
from .moments import RecurrenceSystem, gamma_exponent
from .observables import count_F, count_F_region
from .planar import PlaneTree
from .seedtest import distinguish, is_blind
from .treeio import dump_plane, dump_tree, read_tree_file, write_tree_file
from .trees import DecoratedTree, Tree

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_PRECONDITION = 4


def _out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _as_plane(obj) -> PlaneTree:
    if isinstance(obj, PlaneTree):
        return obj
    if isinstance(obj, Tree):
        return PlaneTree.from_tree(obj)
    raise PreconditionError("expected a tree or plane tree file")


def _as_abstract(obj) -> Tree:
    if isinstance(obj, PlaneTree):
        return obj.tree
    if isinstance(obj, DecoratedTree):
        return obj.tree
    return obj


def _as_decorated(obj) -> DecoratedTree:
    if isinstance(obj, DecoratedTree):
        return obj
    if isinstance(obj, Tree):
        return DecoratedTree(obj, (0,) * obj.n)
    raise PreconditionError("expected a tree or decorated tree file")


def _n_list(text: str) -> list[int]:
    ns = [int(x) for x in text.split(",") if x]
    if ns != sorted(set(ns)):
        raise PreconditionError("n list must be strictly increasing")
    return ns


def cmd_grow(args) -> int:
    seed = read_tree_file(args.seed)
    if args.planar:
        plane = _as_plane(seed)
        trajectory = [] if args.trajectory else None
        grown = grow_planar(plane, args.alpha, args.n, args.seed_rng, trajectory)
        text = dump_plane(grown)
        if args.trajectory:
            with open(args.trajectory, "w", encoding="ascii", newline="\n") as fh:
                for t, v, c, color in trajectory:
                    fh.write(f"step {t}: vertex {v} corner {c} color {color}\n")
    else:
        grown = grow_abstract(_as_abstract(seed), args.alpha, args.n, args.seed_rng)
        text = dump_tree(grown)
    _out(args, text)
    return EXIT_OK


def cmd_observe(args) -> int:
    tau = _as_decorated(read_tree_file(args.tau))
    host = _as_abstract(read_tree_file(args.tree))
    if args.region:
        if args.seed_size is None:
            raise PreconditionError("--region needs --seed-size")
        value = count_F_region(tau, host, args.seed_size, args.region)
    else:
        value = count_F(tau, host)
    _out(args, f"{value}\n")
    return EXIT_OK


def cmd_moments(args) -> int:
    tau = _as_decorated(read_tree_file(args.tau))
    seed = _as_abstract(read_tree_file(args.seed))
    ns = _n_list(args.n_list)
    system = RecurrenceSystem(args.alpha)
    values = system.expectations(tau, seed, ns)
    lines = ["n,expectation_num,expectation_den,float"]
    for n, v in zip(ns, values):
        lines.append(f"{n},{v.numerator},{v.denominator},{float(v)!r}")
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_exponents(args) -> int:
    tau = _as_decorated(read_tree_file(args.tau))
    rep = gamma_exponent(tau, args.alpha)
    _out(
        args,
        f"power\t{rep.power}\ngamma\t{rep.log_power}\ncritical\t{str(rep.critical).lower()}\n",
    )
    return EXIT_OK


def cmd_blind(args) -> int:
    s1 = _as_abstract(read_tree_file(args.seed1))
    s2 = _as_abstract(read_tree_file(args.seed2))
    tau = _as_abstract(read_tree_file(args.tau))
    report = is_blind(tau, s1, s2)
    witness = " ".join(str(x) for x in report.witness) if report.witness else "-"
    _out(args, f"is_blind\t{str(report.is_blind).lower()}\nwitness\t{witness}\n")
    return EXIT_OK


def cmd_couple(args) -> int:
    s1 = _as_plane(read_tree_file(args.seed1))
    s2 = _as_plane(read_tree_file(args.seed2))
    t1, t2 = coupled_grow(s1, s2, args.alpha, args.n, args.seed_rng)
    sizes = decompose(t1, s1.n).size_vector()
    lines = ["tree,payload"]
    lines += [f"tree1,{line}" for line in dump_plane(t1).splitlines()]
    lines += [f"tree2,{line}" for line in dump_plane(t2).splitlines()]
    lines.append("sizes," + " ".join(str(s) for s in sizes))
    _out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    seed = _as_abstract(read_tree_file(args.seed))
    outcomes = enumerate_growth(seed, args.alpha, args.n, canonicalize=args.canonicalize)
    chunks = []
    for out in outcomes:
        body = dump_tree(out.tree).rstrip("\n")
        chunks.append(f"p {out.probability.numerator}/{out.probability.denominator}\n{body}\n")
    _out(args, "".join(chunks))
    return EXIT_OK


def cmd_distinguish(args) -> int:
    s1 = _as_abstract(read_tree_file(args.seed1))
    s2 = _as_abstract(read_tree_file(args.seed2))
    ns = _n_list(args.n_list)
    report = distinguish(
        s1, s2, args.alpha, ns, args.reps, args.seed_rng, workers=args.threads
    )
    _out(args, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def _alpha_arg(text: str):
    try:
        return as_alpha(text)
    except (PreconditionError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinepa",
        description="Affine preferential attachment trees: growth, exact "
        "observables, moments and seed recognition.",
        epilog="Exit codes: 0 ok, 2 config error, 3 cap exceeded, 4 precondition violation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("grow", cmd_grow, "grow one tree from a seed file")
    p.add_argument("--seed", required=True, help="seed tree file")
    p.add_argument("--alpha", required=True, type=_alpha_arg, help="attachment parameter p/q")
    p.add_argument("--n", required=True, type=int, help="target size")
    p.add_argument("--seed-rng", required=True, type=int, help="64-bit rng seed")
    p.add_argument("--planar", action="store_true", help="grow the corner-coloured planar model")
    p.add_argument("--trajectory", help="dump chosen corners, one line per step (planar)")
    p.add_argument("--out", help="output file (default stdout)")

    p = add("observe", cmd_observe, "evaluate a decorated-tree observable")
    p.add_argument("--tau", required=True, help="pattern file (tree or decorated tree)")
    p.add_argument("--tree", required=True, help="host tree file")
    p.add_argument("--region", choices=["intersects_seed", "inside_seed", "outside_seed"])
    p.add_argument("--seed-size", type=int, help="seed size k for --region")
    p.add_argument("--out")

    p = add("moments", cmd_moments, "exact expectations along an n list (CSV)")
    p.add_argument("--tau", required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--n-list", required=True)
    p.add_argument("--out")

    p = add("exponents", cmd_exponents, "growth exponents of an observable")
    p.add_argument("--tau", required=True)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--out")

    p = add("blind", cmd_blind, "blindness of a pattern for two seeds")
    p.add_argument("--seed1", required=True)
    p.add_argument("--seed2", required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--out")

    p = add("couple", cmd_couple, "couple two equal-size seeds (CSV)")
    p.add_argument("--seed1", required=True)
    p.add_argument("--seed2", required=True)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed-rng", required=True, type=int)
    p.add_argument("--out")

    p = add("oracle", cmd_oracle, "exact growth distribution dump")
    p.add_argument("--seed", required=True)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--canonicalize", action="store_true")
    p.add_argument("--out")

    p = add("distinguish", cmd_distinguish, "end-to-end seed recognition report (JSON)")
    p.add_argument("--seed1", required=True)
    p.add_argument("--seed2", required=True)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--n-list", required=True)
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--seed-rng", required=True, type=int)
    p.add_argument("--threads", type=int, default=1, help="worker cap for replicates")
    p.add_argument("--out", help="report path (default stdout)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PreconditionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
