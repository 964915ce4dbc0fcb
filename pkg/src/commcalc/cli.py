"""Command-line front end: hall, nf, subgroup, mu, beta, verify.

Exit status is 0 on success, 1 when a verification check fails (unstable
checks do not count as failures) and 2 on bad input: unparsable words,
out-of-range parameters or unknown check ids.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .errors import CommCalcError
from .hall import generate_basis, witt_count
from .milnor import (all_mu, check_cyclic_symmetry, check_relations_star, classify_mu,
                     emit_gk_presentation, format_index, mu, parse_index, read_presentation)
from .nilpotent import context
from .sato_levine import (beta_jump, beta_tilde, principal_minors, read_trace, surgery_det,
                          three_component_special_s)
from .subgroups import (DEFAULT_MAX_INSTANCES, GeneratorScheme, build_lattice,
                        build_stable_lattice, compare_lattices)
from .verify import CHECKS, load_config, verify_suite
from .words import parse_word


class UsageError(Exception):
    pass


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# -- hall ------------------------------------------------------------------------


def cmd_hall(args) -> int:
    basis = generate_basis(args.gens, args.max_weight)
    md = None
    if args.multidegree:
        md = tuple(_int_list(args.multidegree))
        if len(md) != args.gens:
            raise UsageError(f"multidegree needs {args.gens} entries, got {len(md)}")
    print("ordinal weight multidegree commutator")
    for c in basis:
        if md is not None and c.multidegree != md:
            continue
        print(f"{c.ordinal} {c.weight} {','.join(map(str, c.multidegree))} {c.format(args.gens)}")
    if md is None:
        counts = " ".join(f"{n}:{witt_count(args.gens, n)}" for n in range(1, args.max_weight + 1))
        print(f"# per weight {counts}")
    return 0


# -- nf --------------------------------------------------------------------------


def _context(m, q, max_q=None):
    return context(m, q, max_q=max_q)


def cmd_nf(args) -> int:
    ctx = _context(args.gens, args.q, args.max_q)
    w = parse_word(args.word, args.gens)
    e = ctx.normal_form(w)
    lines = e.lines(include_zero=args.all)
    if not lines:
        print("# identity modulo gamma_%d" % args.q)
    for line in lines:
        print(line)
    return 0


# -- subgroup --------------------------------------------------------------------


def _scheme(text, args):
    bounds = {"length": args.len} if args.len is not None else {}
    return GeneratorScheme.parse(text, **bounds)


def _print_lattice(lat, args):
    print(f"# {lat.label} in F_{lat.ctx.m}/gamma_{lat.ctx.q}, "
          f"{'normal' if lat.normal else 'plain'} subgroup, stable: {_flag(lat.stable)}")
    print("weight commutator pivot row")
    for line in lat.pivot_table():
        print(line)
    weights = [args.section] if args.section else range(1, lat.ctx.q)
    for n in weights:
        N = len(lat.ctx.stratum(n))
        idx = lat.section_index(n)
        print(f"section {n}: rank {len(lat.section(n))}/{N}, index {idx if idx else 'infinite'}")
        for row in lat.section(n):
            print("  " + " ".join(map(str, row)))


def _flag(x):
    return "unknown" if x is None else ("yes" if x else "no")


def cmd_subgroup(args) -> int:
    ctx = _context(args.gens, args.q, args.max_q)
    builder = build_lattice if args.no_stability else build_stable_lattice
    lat = builder(_scheme(args.scheme, args), ctx, args.max_instances)
    _print_lattice(lat, args)
    for text in args.contains or []:
        w = parse_word(text, args.gens)
        print(f"contains {text}: {'yes' if lat.contains(w) else 'no'}")
    if args.compare:
        other = builder(_scheme(args.compare, args), ctx, args.max_instances)
        print(f"compare {lat.label} vs {other.label}: {compare_lattices(lat, other)} "
              f"(stable: {_flag(lat.stable)}/{_flag(other.stable)})")
    return 0


# -- mu --------------------------------------------------------------------------


def cmd_mu(args) -> int:
    if args.classify:
        if args.k is None:
            raise UsageError("--classify needs --k")
        print(f"{args.classify} k={args.k}: {classify_mu(args.classify, args.k)}")
        return 0
    if not args.file:
        raise UsageError("need --file (or --classify)")
    lp = read_presentation(args.file)
    if args.delta_mode == "paper":
        args.delta_mode = "ordered"
    did = False
    if args.index:
        print(mu(lp, parse_index(args.index), args.delta_mode))
        did = True
    if args.all_upto:
        for v in all_mu(lp, args.all_upto, args.delta_mode, nonzero_only=not args.show_zero):
            print(v)
        did = True
    if args.star:
        for line in check_relations_star(lp, args.star).lines(lp.m):
            print(line)
        did = True
    if args.cyclic:
        rep = check_cyclic_symmetry(lp, args.cyclic, args.delta_mode)
        print(f"cyclic symmetry, length {rep.length} ({rep.mode} Delta): {'pass' if rep.passed else 'FAIL'}")
        for idx, vals in rep.failures:
            print("  " + ", ".join(f"{format_index(i)}={v}" for i, v in vals))
        if rep.star_passed is not None:
            print(f"relations at weight {rep.length}: {'pass' if rep.star_passed else 'FAIL'}; "
                  f"equivalent: {'yes' if rep.equivalent else 'NO'}")
        did = True
    if args.emit_gk is not None:
        sys.stdout.write(emit_gk_presentation(lp, args.emit_gk).text())
        did = True
    if not did:
        sys.stdout.write(lp.text())
    return 0


# -- beta ------------------------------------------------------------------------


def _fmt(x):
    return str(x) if not isinstance(x, Fraction) or x.denominator != 1 else str(x.numerator)


def cmd_beta(args) -> int:
    did = False
    if args.trace:
        tr = read_trace(args.trace)
        s = None
        if args.s:
            s = [Fraction(v) for v in args.s.split(",")]
            if len(s) != tr.m:
                raise UsageError(f"--s needs {tr.m} entries")
        total = Fraction(0)
        for n, rec in enumerate(tr.records, 1):
            line = f"record {n}: component {rec.x}, sign {rec.sign:+d}"
            if s is not None:
                j = beta_jump(s, tr.linking, rec)
                total += rec.sign * j
                line += f", beta jump {_fmt(j)}"
            print(line)
        if tr.m == 2:
            print(f"beta~ = {_fmt(beta_tilde(tr))}")
        if s is not None:
            print(f"beta(s) change along the trace = {_fmt(total)}")
        did = True
    if args.special_s:
        a = _int_list(args.special_s)
        if len(a) != 3:
            raise UsageError("--special-s needs a12,a13,a23")
        A = [[0, a[0], a[1]], [a[0], 0, a[2]], [a[1], a[2], 0]]
        for sign in (1, -1):
            s = three_component_special_s(a, sign)
            minors = principal_minors(s, A)
            print(f"sign {'+' if sign > 0 else '-'}: s = ({', '.join(map(_fmt, s))}), "
                  f"minors = ({', '.join(map(_fmt, minors))}), det A = {_fmt(surgery_det(s, A))}")
        did = True
    if not did:
        raise UsageError("need --trace or --special-s")
    return 0


# -- verify ----------------------------------------------------------------------


def cmd_verify(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    cfg = load_config(args.config, overrides)
    for cid in args.only or []:
        if cid not in CHECKS:
            raise UsageError(f"unknown check {cid!r}; known: {', '.join(CHECKS)}")
    report = verify_suite(cfg, args.only)
    for c in report.checks:
        print(f"{c.verdict.upper():8s} {c.id:24s} {c.seconds:7.2f}s  stable={_flag(c.stable)}")
    failed = [c.id for c in report.checks if c.verdict == "fail"]
    unstable = [c.id for c in report.checks if c.verdict == "unstable"]
    summary = "all checks pass" if report.passed else f"{len(failed)} failed, {len(unstable)} unstable"
    print(f"# seed {report.seed}: {summary}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
    # unstable checks are undecided rather than refuted
    return 1 if failed else 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="commcalc", description="Commutator calculus in free nilpotent groups")
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hall", help="list the Hall basis")
    h.add_argument("--gens", type=int, required=True)
    h.add_argument("--max-weight", type=int, required=True)
    h.add_argument("--multidegree", help="only commutators with this multidegree, e.g. 2,1")
    h.set_defaults(func=cmd_hall)

    n = sub.add_parser("nf", help="normal form of a word in F_m/gamma_q")
    n.add_argument("--gens", type=int, required=True)
    n.add_argument("--q", type=int, required=True)
    n.add_argument("--max-q", type=int, help="raise the default class cap")
    n.add_argument("--all", action="store_true", help="print zero exponents too")
    n.add_argument("word")
    n.set_defaults(func=cmd_nf)

    s = sub.add_parser("subgroup", help="build a subgroup lattice")
    s.add_argument("--gens", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--scheme", required=True, help="gamma:n mu:k mu27:k mu28:k delta:k delta32:k "
                                                   "epsilon:n nu:n nk:k derived2")
    s.add_argument("--len", type=int, help="length bound for substituted words")
    s.add_argument("--contains", action="append", help="word to test for membership (repeatable)")
    s.add_argument("--section", type=int, help="only print this weight section")
    s.add_argument("--compare", help="second scheme to compare against")
    s.add_argument("--max-instances", type=int, default=DEFAULT_MAX_INSTANCES)
    s.add_argument("--max-q", type=int, help="raise the default class cap")
    s.add_argument("--no-stability", action="store_true", help="skip the rebuild at the smaller bound")
    s.set_defaults(func=cmd_subgroup)

    m = sub.add_parser("mu", help="mu-bar invariants of a link presentation")
    m.add_argument("--file")
    m.add_argument("--index", help="multi-index such as 231 or 2,3,1")
    m.add_argument("--all-upto", type=int)
    m.add_argument("--show-zero", action="store_true")
    m.add_argument("--delta-mode", choices=("ordered", "milnor", "paper"), default="ordered",
                   help="ordered: subsequences of the index only (alias: paper); "
                        "milnor: also of its cyclic rotations")
    m.add_argument("--star", type=int, metavar="N", help="check the weight N+1 relations")
    m.add_argument("--cyclic", type=int, metavar="LEN", help="check cyclic symmetry at this length")
    m.add_argument("--classify", help="classify a multi-index (with --k)")
    m.add_argument("--k", type=int)
    m.add_argument("--emit-gk", type=int, metavar="K", help="print a presentation of the k-th quotient")
    m.set_defaults(func=cmd_mu)

    b = sub.add_parser("beta", help="crossing-change invariants")
    b.add_argument("--trace", help="trace file")
    b.add_argument("--s", help="s1,...,sm for the determinant jumps along the trace")
    b.add_argument("--special-s", help="a12,a13,a23")
    b.set_defaults(func=cmd_beta)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--only", action="append", help="check id (repeatable)")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--seed", type=int)
    v.add_argument("--config", help="JSON configuration file")
    v.add_argument("--jobs", type=int)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CommCalcError, ValueError, KeyError, OSError) as exc:
        print(f"commcalc {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
