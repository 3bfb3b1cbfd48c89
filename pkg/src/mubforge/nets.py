"""(d, k)-nets from left cosets of trivially intersecting subgroups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mubforge.errors import ConstructionError
from mubforge.groups import FiniteGroup, SubgroupFamily
from mubforge.report import Report


@dataclass(frozen=True)
class Net:
    """``d*d`` points in ``k`` parallel classes of ``d`` blocks each (lambda = 1)."""

    d: int
    classes: tuple[tuple[tuple[int, ...], ...], ...]
    lam: int = 1

    def __post_init__(self):
        if self.lam != 1:
            raise ValueError(f"only nets with lambda = 1 are supported, got {self.lam}")

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def points(self) -> range:
        return range(self.lam * self.d * self.d)


def _canonical(classes) -> tuple[tuple[tuple[int, ...], ...], ...]:
    canon = [tuple(sorted(tuple(sorted(b)) for b in cls)) for cls in classes]
    return tuple(sorted(canon, key=lambda cls: cls[0]))


def net_from_subgroups(g: FiniteGroup, family: SubgroupFamily) -> Net:
    """Points are group elements, each member contributes the class of its left cosets."""
    family.validate(require_abelian=False)
    classes = []
    for a in family.members:
        cosets = {tuple(sorted(int(v) for v in g.mult[x, list(a.elements)])) for x in range(g.order)}
        classes.append(cosets)
    net = Net(family.d, _canonical(classes))
    rep = verify_net(net)
    if not rep.passed:
        raise ConstructionError(f"coset structure is not a net: {rep.failures()[0].line()}")
    return net


def verify_net(net: Net) -> Report:
    """Check the net axioms exhaustively; stops at the first violation."""
    d, lam = net.d, net.lam
    rep = Report(f"net axioms for a ({d},{net.k})-net")
    npts = lam * d * d
    for i, cls in enumerate(net.classes):
        if len(cls) != d:
            rep.check("class sizes", False, f"class {i} has {len(cls)} blocks, expected {d}")
            return rep
        for b in cls:
            if len(b) != lam * d:
                rep.check("block sizes", False, f"class {i} block {list(b)} has size {len(b)}, expected {lam * d}")
                return rep
        cover = np.zeros(npts, dtype=int)
        for b in cls:
            for x in b:
                if not 0 <= x < npts:
                    rep.check("parallel classes partition the points", False, f"class {i}: point {x} out of range")
                    return rep
                cover[x] += 1
        if not np.all(cover == 1):
            x = int(np.flatnonzero(cover != 1)[0])
            rep.check(
                "parallel classes partition the points",
                False,
                f"class {i} covers point {x} {cover[x]} times",
            )
            return rep
    rep.check("class and block sizes", True, f"{net.k} classes of {d} blocks of size {lam * d}")
    rep.check("parallel classes partition the points", True)
    sets = [[frozenset(b) for b in cls] for cls in net.classes]
    for (i, ci), (j, cj) in itertools.combinations(enumerate(sets), 2):
        for b1 in ci:
            for b2 in cj:
                if len(b1 & b2) != lam:
                    rep.check(
                        "non-parallel blocks meet in lambda points",
                        False,
                        f"classes {i},{j}: blocks {sorted(b1)} and {sorted(b2)} share {len(b1 & b2)}",
                    )
                    return rep
    rep.check("non-parallel blocks meet in lambda points", True)
    rep.summary["d"] = d
    rep.summary["k"] = net.k
    return rep


def is_affine_plane(net: Net) -> bool:
    return net.k == net.d + 1


# ---------------------------------------------------------------------------
# file format


def format_net_file(net: Net) -> str:
    out = [f"NET v1 d={net.d} k={net.k}"]
    for i, cls in enumerate(net.classes):
        out.append(f"class {i}")
        out += [" ".join(str(x) for x in b) for b in cls]
    return "\n".join(out) + "\n"


def write_net_file(net: Net, path: str | Path) -> None:
    Path(path).write_text(format_net_file(net))


def parse_net_file(text: str) -> Net:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty net file")
    head = lines[0].split()
    if head[:2] != ["NET", "v1"]:
        raise ValueError(f"line 1: expected 'NET v1' header, got {lines[0]!r}")
    try:
        fields = dict(tok.split("=", 1) for tok in head[2:])
        d, k = int(fields["d"]), int(fields["k"])
        lam = int(fields.get("lambda", 1))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"line 1: malformed header {lines[0]!r}") from exc
    if lam != 1:
        raise ValueError(f"line 1: only lambda = 1 nets are supported, got {lam}")
    if len(lines) != 1 + k * (d + 1):
        raise ValueError(f"expected {1 + k * (d + 1)} nonblank lines, found {len(lines)}")
    classes = []
    pos = 1
    for i in range(k):
        if lines[pos].split() != ["class", str(i)]:
            raise ValueError(f"expected 'class {i}', got {lines[pos]!r}")
        blocks = []
        for r in range(d):
            row = lines[pos + 1 + r]
            try:
                blocks.append(tuple(int(t) for t in row.split()))
            except ValueError as exc:
                raise ValueError(f"bad block line {row!r}") from exc
        classes.append(tuple(blocks))
        pos += d + 1
    return Net(d, tuple(classes))


def read_net_file(path: str | Path) -> Net:
    return parse_net_file(Path(path).read_text())
