"""Command-line front end.

    mubforge construct --dim 6 --out mub6.txt
    mubforge verify mub6.txt
    mubforge search --factors 6,6
    mubforge net --factors 3,3 --out plane.txt

Exit status: 0 pass, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from mubforge import groups, mub, nets
from mubforge.errors import ConstructionError
from mubforge.linalg import OUTPUT_TOL, EigenError
from mubforge.report import Report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _factor_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty factor list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mubforge", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build MUBs in dimension d and write them to a file")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=OUTPUT_TOL)
    c.add_argument("--out", type=Path, default=None, help="default: mub-d<dim>-s<seed>.txt")

    v = sub.add_parser("verify", help="check a MUB file for orthonormality and unbiasedness")
    v.add_argument("file", type=Path)
    v.add_argument("--tol", type=float, default=OUTPUT_TOL)

    for name, text in [
        ("search", "maximum family of trivially intersecting abelian subgroups, with bound checks"),
        ("net", "net from the cosets of a maximum family"),
    ]:
        s = sub.add_parser(name, help=text)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--factors", type=_factor_list, help="abelian group Z_f1 x ... x Z_fk")
        src.add_argument("--table", type=Path, help="group table file")
        mode = s.add_mutually_exclusive_group()
        mode.add_argument("--exhaustive", dest="heuristic", action="store_false")
        mode.add_argument("--heuristic", dest="heuristic", action="store_true")
        s.set_defaults(heuristic=False)
        s.add_argument("--normal-only", action="store_true")
        s.add_argument("--seed", type=int, default=0)
        if name == "net":
            s.add_argument("--out", type=Path, default=Path("net.txt"))
    return parser


def _load_group(args) -> groups.FiniteGroup:
    try:
        if args.factors is not None:
            return groups.group_from_invariant_factors(args.factors)
        return groups.read_group_file(args.table)
    except (ValueError, OSError) as exc:
        raise UsageError(f"cannot load group: {exc}") from exc


def _search(args, g: groups.FiniteGroup) -> groups.SearchResult:
    try:
        return groups.max_family_search(g, require_normal=args.normal_only, heuristic=args.heuristic)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_construct(args) -> int:
    d, seed, tol = args.dim, args.seed, args.tol
    if d < 2:
        raise UsageError(f"--dim must be at least 2, got {d}")
    out = args.out or Path(f"mub-d{d}-s{seed}.txt")
    print(f"# mubforge construct dim={d} seed={seed} tol={tol:g}")
    try:
        mc = mub.build_mubs(d, seed, tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    except (ConstructionError, EigenError) as exc:
        print(f"FAIL construction: {exc}")
        return EXIT_FAIL
    mub.write_mub_file(mc, out)
    rep = mub.verify_mubs(mc, tol)
    print(f"# provenance={mc.provenance}")
    print(f"# bases={len(mc)} expected={mub.n_of_d(d)}")
    print(f"# max_bias={rep.max_bias:.3e} max_orthonormality={rep.max_orthonormality:.3e}")
    print(f"# out={out}")
    for line in rep.lines():
        print(line)
    ok = rep.passed and len(mc) == mub.n_of_d(d)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    try:
        mc = mub.read_mub_file(args.file)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except mub.MubFormatError as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    rep = mub.verify_mubs(mc, args.tol)
    print(f"# mubforge verify file={args.file} dim={mc.dim} bases={len(mc)} seed={mc.seed} tol={args.tol:g}")
    print(f"# max_bias={rep.max_bias:.3e} max_orthonormality={rep.max_orthonormality:.3e}")
    for line in rep.lines():
        print(line)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def search_reports(g: groups.FiniteGroup, result: groups.SearchResult) -> list[Report]:
    """Every bound and structure check that applies to a search result."""
    fam = result.family
    d = fam.d
    reports = [groups.check_bounds(g, fam)]

    h = groups.half_factors(g)
    cor = Report("abelian index group bound")
    if h is None:
        cor.note("group is not abelian of the form H x H: bound not applicable")
    else:
        bound = groups.abelian_bound(h)
        cor.summary["H_factors"] = list(h)
        cor.summary["abelian_bound"] = bound
        cor.check(
            "size <= min_p p^nu_p(H) + 1",
            len(fam) <= bound,
            f"{len(fam)} <= {bound}" + (" (tight)" if len(fam) == bound else ""),
        )
    reports.append(cor)

    if len(fam) >= 2:
        reports.append(groups.check_decompose(g, fam.members[0], fam.members[1]))
        for p in sorted(groups.factorize(d)):
            reports.append(groups.check_reduce(g, fam, p))
    reports.append(groups.check_elementary_abelian(g, fam))
    if len(fam) > 2 and all(a.is_normal() for a in fam.members):
        reports.append(groups.check_normal_family(g, fam))
    return reports


def cmd_search(args) -> int:
    g = _load_group(args)
    result = _search(args, g)
    print(f"# mubforge search group={g.label or 'table'} order={g.order} seed={args.seed}")
    for line in result.lines():
        print(line)
    ok = True
    for rep in search_reports(g, result):
        print(rep.render())
        ok &= rep.passed
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_net(args) -> int:
    g = _load_group(args)
    result = _search(args, g)
    net = nets.net_from_subgroups(g, result.family)
    nets.write_net_file(net, args.out)
    rep = nets.verify_net(net)
    plane = nets.is_affine_plane(net)
    print(f"# mubforge net group={g.label or 'table'} order={g.order} seed={args.seed}")
    for line in result.lines():
        print(line)
    print(f"# net=({net.d},{net.k}) affine_plane={'yes' if plane else 'no'} out={args.out}")
    print(rep.render())
    return EXIT_PASS if rep.passed else EXIT_FAIL


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "search": cmd_search, "net": cmd_net}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mubforge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
