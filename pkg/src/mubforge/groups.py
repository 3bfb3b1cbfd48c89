"""Small finite groups given by multiplication tables.

Maximum trivially intersecting families of abelian subgroups are found as
maximum cliques; the report functions check the bounds that tie such
families to the number of nice mutually unbiased bases.
Element 0 is always the identity.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mubforge.field import factorize
from mubforge.mub import n_of_d
from mubforge.report import Report

MAX_TABLE_ORDER = 4096
EXHAUSTIVE_ASSOC_ORDER = 256
SAMPLED_TRIPLES = 10**6
EXHAUSTIVE_SEARCH_ORDER = 1296


class GroupTableError(ValueError):
    """A multiplication table that does not define a group."""

    def __init__(self, message: str, witness: tuple[int, ...] | None = None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """A group on ``0..n-1`` with ``mult[a, b] = a*b``."""

    def __init__(self, mult: np.ndarray | Sequence[Sequence[int]], label: str | None = None):
        mult = np.asarray(mult, dtype=np.int64)
        _validate_table(mult)
        self.mult = mult
        self.mult.setflags(write=False)
        self.label = label
        self.order = mult.shape[0]
        self.inverse = np.argmin(mult, axis=1)  # the unique b with a*b = 0
        self.element_orders = _element_orders(mult)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, label={self.label!r})"

    def __len__(self) -> int:
        return self.order

    def power_map(self, k: int) -> np.ndarray:
        """``x -> x^k`` for every element, as an index array."""
        if k < 0:
            return self.power_map(-k)[self.inverse]
        result = np.zeros(self.order, dtype=np.int64)
        base = np.arange(self.order)
        while k:
            if k & 1:
                result = self.mult[result, base]
            base = self.mult[base, base]
            k >>= 1
        return result

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def whole(self) -> Subgroup:
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (0,))


def _element_orders(mult: np.ndarray) -> np.ndarray:
    n = mult.shape[0]
    idx = np.arange(n)
    orders = np.zeros(n, dtype=np.int64)
    cur = idx.copy()
    for k in range(1, n + 1):
        hit = (cur == 0) & (orders == 0)
        orders[hit] = k
        if orders.all():
            break
        cur = mult[cur, idx]
    return orders


def _validate_table(mult: np.ndarray, rng_seed: int = 0) -> None:
    if mult.ndim != 2 or mult.shape[0] != mult.shape[1] or mult.shape[0] == 0:
        raise GroupTableError(f"table must be square and nonempty, got shape {mult.shape}")
    n = mult.shape[0]
    if n > MAX_TABLE_ORDER:
        raise GroupTableError(f"order {n} exceeds {MAX_TABLE_ORDER}")
    if mult.min() < 0 or mult.max() >= n:
        r, c = np.argwhere((mult < 0) | (mult >= n))[0]
        raise GroupTableError("entry out of range", (int(r), int(c)))
    idx = np.arange(n)
    if not np.array_equal(mult[0], idx) or not np.array_equal(mult[:, 0], idx):
        bad = int(np.flatnonzero((mult[0] != idx) | (mult[:, 0] != idx))[0])
        raise GroupTableError("element 0 is not the identity", (0, bad))
    for a in range(n):
        row = np.bincount(mult[a], minlength=n)
        if row.max() > 1:
            v = int(np.argmax(row))
            b1, b2 = np.flatnonzero(mult[a] == v)[:2]
            raise GroupTableError(f"row {a} repeats {v} (not a Latin square)", (a, int(b1), int(b2)))
        col = np.bincount(mult[:, a], minlength=n)
        if col.max() > 1:
            v = int(np.argmax(col))
            b1, b2 = np.flatnonzero(mult[:, a] == v)[:2]
            raise GroupTableError(f"column {a} repeats {v} (not a Latin square)", (int(b1), int(b2), a))
    if n <= EXHAUSTIVE_ASSOC_ORDER:
        for a in range(n):
            left = mult[mult[a]]  # (a*b)*c over b, c
            right = mult[a][mult]  # a*(b*c)
            bad = np.argwhere(left != right)
            if bad.size:
                b, c = bad[0]
                raise GroupTableError("table is not associative", (a, int(b), int(c)))
    else:
        rng = np.random.default_rng(rng_seed)
        a, b, c = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
        bad = np.flatnonzero(mult[mult[a, b], c] != mult[a, mult[b, c]])
        if bad.size:
            i = bad[0]
            raise GroupTableError("table is not associative", (int(a[i]), int(b[i]), int(c[i])))


def group_from_invariant_factors(factors: Sequence[int]) -> FiniteGroup:
    """Direct product ``Z_f1 x ... x Z_fk``; index = mixed-radix coordinates, first most significant."""
    factors = [int(f) for f in factors]
    if not factors or any(f < 2 for f in factors):
        raise ValueError(f"factors must be integers >= 2, got {factors}")
    n = math.prod(factors)
    if n > MAX_TABLE_ORDER:
        raise ValueError(f"group order {n} exceeds {MAX_TABLE_ORDER}")
    coords = np.array(np.unravel_index(np.arange(n), factors))  # (k, n)
    summed = (coords[:, :, None] + coords[:, None, :]) % np.array(factors)[:, None, None]
    mult = np.ravel_multi_index(tuple(summed), factors)
    return FiniteGroup(mult, label=f"abelian invariant factors {factors}")


def element_from_coords(factors: Sequence[int], coords: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(c % f for c, f in zip(coords, factors)), tuple(factors)))


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """``g x h`` with element ``(a, b)`` at index ``a * |h| + b``."""
    m, n = g.order, h.order
    mult = g.mult[:, None, :, None] * n + h.mult[None, :, None, :]
    mult = mult.reshape(m * n, m * n)
    label = None if g.label is None or h.label is None else f"{g.label} x {h.label}"
    return FiniteGroup(mult, label)


def format_table(g: FiniteGroup) -> str:
    lines = [f"GROUP v1 order={g.order}"]
    lines += [" ".join(str(int(v)) for v in row) for row in g.mult]
    return "\n".join(lines) + "\n"


def group_from_table(text: str) -> FiniteGroup:
    """Parse ``GROUP v1 order=<n>`` followed by n rows of n indices."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GroupTableError("empty group table")
    head = lines[0].split()
    if head[:2] != ["GROUP", "v1"] or len(head) != 3 or not head[2].startswith("order="):
        raise GroupTableError(f"bad header {lines[0]!r}; expected 'GROUP v1 order=<n>'")
    try:
        n = int(head[2].split("=", 1)[1])
    except ValueError as exc:
        raise GroupTableError(f"bad order in header {lines[0]!r}") from exc
    if n < 1:
        raise GroupTableError(f"order must be positive, got {n}")
    if len(lines) - 1 != n:
        raise GroupTableError(f"expected {n} rows, got {len(lines) - 1}")
    try:
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise GroupTableError(f"non-integer entry: {exc}") from exc
    for i, row in enumerate(rows):
        if len(row) != n:
            raise GroupTableError(f"row {i} has {len(row)} entries, expected {n}")
    return FiniteGroup(rows)


def read_group_file(path: str | Path) -> FiniteGroup:
    g = group_from_table(Path(path).read_text())
    g.label = g.label or f"table {Path(path).name}"
    return g


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup = field(repr=False, compare=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted({int(x) for x in self.elements}))
        object.__setattr__(self, "elements", elems)
        # a finite nonempty subset closed under products is a subgroup
        e = np.array(elems)
        if not elems or elems[0] != 0 or not np.isin(self.group.mult[np.ix_(e, e)], e).all():
            raise ValueError(f"{list(elems)} is not a subgroup")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.as_set

    @property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def mask(self) -> int:
        return sum(1 << x for x in self.elements)

    def is_abelian(self) -> bool:
        e = np.array(self.elements)
        sub = self.group.mult[np.ix_(e, e)]
        return bool(np.array_equal(sub, sub.T))

    def is_normal(self) -> bool:
        g = self.group
        e = np.array(self.elements)
        conj = g.mult[g.mult[:, e], g.inverse[:, None]]  # x s x^-1
        return bool(np.isin(conj, e).all())

    def element_order_counts(self) -> dict[int, int]:
        orders = self.group.element_orders[list(self.elements)]
        vals, counts = np.unique(orders, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def intersection(self, other: Subgroup) -> Subgroup:
        return Subgroup(self.group, tuple(self.as_set & other.as_set))


def subgroup_generate(g: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Closure of ``gens`` under multiplication (finite, so inverses come free)."""
    gens = sorted({int(x) for x in gens} - {0})
    for x in gens:
        if not 0 <= x < g.order:
            raise ValueError(f"element {x} is not in a group of order {g.order}")
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = int(g.mult[a, s])
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return Subgroup(g, tuple(seen))


def _p_elements(sub: Subgroup, p: int) -> list[int]:
    orders = sub.group.element_orders
    return [x for x in sub.elements if _is_power_of(int(orders[x]), p)]


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def o_p(sub: Subgroup, p: int) -> Subgroup:
    """Largest normal p-subgroup of ``sub``: the elements whose normal closure is a p-group."""
    g = sub.group
    pel = _p_elements(sub, p)
    if sub.is_abelian():
        return Subgroup(g, tuple(pel))
    keep = []
    elems = np.array(sub.elements)
    for x in pel:
        conjugates = g.mult[g.mult[elems, x], g.inverse[elems]]
        closure = subgroup_generate(g, conjugates.tolist())
        if _is_power_of(closure.order, p):
            keep.append(x)
    return Subgroup(g, tuple(keep))


def e_p_count(sub: Subgroup, p: int) -> int:
    """Number of elements ``h`` of ``sub`` with ``h^p = 1``."""
    pw = sub.group.power_map(p)
    return int(sum(1 for x in sub.elements if pw[x] == 0))


def ebar_p_count(sub: Subgroup, p: int) -> int:
    """Size of ``{a^(p^(e-1)) : a in O_p(sub)}`` where ``p^e`` is the exponent of ``O_p(sub)``."""
    op = o_p(sub, p)
    if op.order == 1:
        raise ValueError(f"{p} does not divide the subgroup order {sub.order}")
    exponent = int(np.lcm.reduce(sub.group.element_orders[list(op.elements)]))
    pw = sub.group.power_map(exponent // p)
    return len({int(pw[x]) for x in op.elements})


def abelian_signature(sub: Subgroup) -> tuple[int, ...]:
    """Elementary divisors (sorted prime powers) of an abelian subgroup.

    For each prime the number of cyclic factors of order at least ``p^i`` is
    ``log_p(|Omega_i| / |Omega_(i-1)|)`` with ``Omega_i = {x : x^(p^i) = 1}``.
    """
    if not sub.is_abelian():
        raise ValueError("signature is only defined for abelian subgroups")
    g = sub.group
    elems = list(sub.elements)
    divisors = []
    for p, k in factorize(sub.order).items():
        at_least = []
        prev = 1
        for i in range(1, k + 1):
            pw = g.power_map(p**i)
            omega = int(np.count_nonzero(pw[elems] == 0))
            at_least.append(round(math.log(omega // prev, p)))
            prev = omega
            if omega == p**k:
                break
        at_least.append(0)
        for i in range(len(at_least) - 1):
            divisors += [p ** (i + 1)] * (at_least[i] - at_least[i + 1])
    return tuple(sorted(divisors))


def invariant_factors(elementary_divisors: Sequence[int]) -> tuple[int, ...]:
    """Combine prime-power divisors into ``d_1 | d_2 | ... | d_k``."""
    by_prime: dict[int, list[int]] = {}
    for q in elementary_divisors:
        (p,) = factorize(q)
        by_prime.setdefault(p, []).append(q)
    for v in by_prime.values():
        v.sort(reverse=True)
    k = max((len(v) for v in by_prime.values()), default=0)
    out = []
    for i in range(k):
        out.append(math.prod(v[i] for v in by_prime.values() if i < len(v)))
    return tuple(sorted(out))


def half_factors(g: FiniteGroup) -> tuple[int, ...] | None:
    """Prime-power factors of ``H`` when ``g`` is abelian and isomorphic to ``H x H``."""
    if not g.is_abelian():
        return None
    sig = abelian_signature(g.whole())
    counts: dict[int, int] = {}
    for q in sig:
        counts[q] = counts.get(q, 0) + 1
    if any(c % 2 for c in counts.values()):
        return None
    return tuple(sorted(q for q, c in counts.items() for _ in range(c // 2)))


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SubgroupFamily:
    group: FiniteGroup = field(repr=False)
    members: tuple[Subgroup, ...]

    def __len__(self) -> int:
        return len(self.members)

    @property
    def d(self) -> int:
        return math.isqrt(self.group.order)

    def problems(self, require_abelian: bool = True) -> list[str]:
        d = self.d
        out = []
        if d * d != self.group.order:
            out.append(f"group order {self.group.order} is not a perfect square")
        for i, a in enumerate(self.members):
            if a.order != d:
                out.append(f"member {i} has order {a.order}, expected {d}")
            if require_abelian and not a.is_abelian():
                out.append(f"member {i} is not abelian")
        for (i, a), (j, b) in itertools.combinations(enumerate(self.members), 2):
            if a.mask & b.mask != 1:
                out.append(f"members {i} and {j} intersect nontrivially")
        return out

    def validate(self, require_abelian: bool = True) -> None:
        probs = self.problems(require_abelian)
        if probs:
            raise ValueError("invalid subgroup family: " + "; ".join(probs))


@dataclass(frozen=True)
class SearchResult:
    family: SubgroupFamily
    exhaustive: bool
    candidates: int
    nodes: int

    @property
    def size(self) -> int:
        return len(self.family)

    def lines(self) -> list[str]:
        mode = "exhaustive" if self.exhaustive else "heuristic (first-fit greedy, NOT exhaustive)"
        out = [f"# mode={mode}", f"# candidate_subgroups={self.candidates}", f"# search_nodes={self.nodes}"]
        out.append(f"# family_size={self.size}")
        for i, a in enumerate(self.family.members):
            out.append(f"# member {i}: {list(a.elements)}")
        return out


def abelian_subgroups_of_order(g: FiniteGroup, d: int) -> list[Subgroup]:
    """All abelian subgroups of order ``d``, grown one commuting generator at a time.

    Every intermediate subgroup has order dividing ``d`` and every added
    element has order dividing ``d`` and centralises the current subgroup.
    """
    mult = g.mult
    candidates = [x for x in range(1, g.order) if d % int(g.element_orders[x]) == 0]
    if d == 1:
        return [g.trivial()]
    seen: set[frozenset[int]] = set()
    found: list[frozenset[int]] = []
    frontier = [frozenset({0})]
    while frontier:
        nxt = []
        for s in frontier:
            s_arr = np.fromiter(s, dtype=np.int64)
            for x in candidates:
                if x in s or not np.array_equal(mult[x, s_arr], mult[s_arr, x]):
                    continue
                powers = [0]
                y = x
                while y not in s:
                    powers.append(y)
                    y = int(mult[y, x])
                if len(s) * len(powers) > d or d % (len(s) * len(powers)):
                    continue
                t = frozenset(int(v) for v in mult[np.ix_(s_arr, np.array(powers))].ravel())
                if t in seen:
                    continue
                seen.add(t)
                if len(t) == d:
                    found.append(t)
                else:
                    nxt.append(t)
        frontier = nxt
    return sorted((Subgroup(g, tuple(t)) for t in found), key=lambda s: s.elements)


def max_clique(
    adj: Sequence[int], extra_bound: Callable[[list[int]], int] | None = None
) -> tuple[list[int], int]:
    """Maximum clique of a graph given as adjacency bitmasks.

    Branch and bound over vertices in degeneracy order with greedy
    colouring bounds.  ``extra_bound``, if given, receives the original
    vertex ids of a candidate set and returns an upper bound on any clique
    inside it.  Returns the clique (sorted) and the number of search nodes
    visited.
    """
    n = len(adj)
    if n == 0:
        return [], 0
    # degeneracy order: repeatedly remove a vertex of minimum remaining degree
    remaining = (1 << n) - 1
    removal = []
    deg = [bin(a).count("1") for a in adj]
    alive = [True] * n
    for _ in range(n):
        v = min((u for u in range(n) if alive[u]), key=lambda u: (deg[u], u))
        alive[v] = False
        removal.append(v)
        remaining &= ~(1 << v)
        m = adj[v] & remaining
        while m:
            u = (m & -m).bit_length() - 1
            deg[u] -= 1
            m &= m - 1
    order = removal[::-1]  # densest core first
    pos = {v: i for i, v in enumerate(order)}
    radj = [0] * n
    for v in range(n):
        m = adj[v]
        while m:
            u = (m & -m).bit_length() - 1
            radj[pos[v]] |= 1 << pos[u]
            m &= m - 1

    # greedy initial clique for a lower bound
    best: list[int] = []
    cand = (1 << n) - 1
    while cand:
        v = (cand & -cand).bit_length() - 1
        best.append(v)
        cand &= radj[v]
    nodes = 0

    def colour(p: int) -> list[tuple[int, int]]:
        out = []
        c = 0
        uncoloured = p
        while uncoloured:
            c += 1
            q = uncoloured
            while q:
                v = (q & -q).bit_length() - 1
                q &= ~radj[v] & ~(1 << v)
                uncoloured &= ~(1 << v)
                out.append((v, c))
        return out

    def members(p: int) -> list[int]:
        out = []
        while p:
            out.append(order[(p & -p).bit_length() - 1])
            p &= p - 1
        return out

    def expand(r: list[int], p: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if extra_bound is not None and len(r) + extra_bound(members(p)) <= len(best):
            return
        for v, c in reversed(colour(p)):
            if len(r) + c <= len(best):
                return
            nr = r + [v]
            np_ = p & radj[v]
            if np_:
                expand(nr, np_)
            elif len(nr) > len(best):
                best = nr
            p &= ~(1 << v)

    expand([], (1 << n) - 1)
    return sorted(order[v] for v in best), nodes


def max_family_search(
    g: FiniteGroup,
    require_normal: bool = False,
    heuristic: bool = False,
) -> SearchResult:
    """A maximum family of pairwise trivially intersecting abelian subgroups of order ``sqrt|g|``."""
    d = math.isqrt(g.order)
    if d * d != g.order:
        raise ValueError(f"group order {g.order} is not a perfect square")
    if g.order > EXHAUSTIVE_SEARCH_ORDER and not heuristic:
        raise ValueError(
            f"order {g.order} exceeds the exhaustive limit {EXHAUSTIVE_SEARCH_ORDER}; "
            "use heuristic mode"
        )
    subs = abelian_subgroups_of_order(g, d)
    if require_normal:
        subs = [s for s in subs if s.is_normal()]
    masks = [s.mask for s in subs]
    if heuristic:
        chosen: list[int] = []
        for i, m in enumerate(masks):
            if all(m & masks[j] == 1 for j in chosen):
                chosen.append(i)
        nodes = len(subs)
    else:
        adj = [0] * len(subs)
        for i, j in itertools.combinations(range(len(subs)), 2):
            if masks[i] & masks[j] == 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        # members share only the identity, so k more members need k(d-1)
        # uncovered elements
        def packing(cands: list[int]) -> int:
            union = 0
            for i in cands:
                union |= masks[i]
            return (bin(union).count("1") - 1) // max(d - 1, 1)

        chosen, nodes = max_clique(adj, packing)
    family = SubgroupFamily(g, tuple(subs[i] for i in chosen))
    family.validate()
    return SearchResult(family, not heuristic, len(subs), nodes)


# ---------------------------------------------------------------------------
# bound checks


def _primes(d: int) -> list[int]:
    return sorted(factorize(d)) if d > 1 else []


def _d_p(d: int, p: int) -> int:
    return p ** factorize(d).get(p, 0)


def check_bounds(g: FiniteGroup, family: SubgroupFamily) -> Report:
    """Family size against ``min_(p, A) |E_p(A)| + 1`` and against ``N(d)``."""
    d = family.d
    rep = Report(f"bounds for a family of {len(family)} in a group of order {g.order}")
    ep_min = None
    for p in _primes(d):
        for i, a in enumerate(family.members):
            cnt = e_p_count(a, p)
            rep.summary[f"E_{p}(member {i})"] = cnt
            ep_min = cnt if ep_min is None else min(ep_min, cnt)
    if ep_min is None:
        rep.note("d = 1: bounds are vacuous")
        return rep
    n = n_of_d(d)
    rep.check(
        "size <= min |E_p(A)| + 1",
        len(family) <= ep_min + 1,
        f"{len(family)} <= {ep_min + 1}" + (" (tight)" if len(family) == ep_min + 1 else ""),
    )
    rep.check(
        "size <= N(d) = min_p d_p + 1",
        len(family) <= n,
        f"{len(family)} <= {n}" + (" (tight)" if len(family) == n else ""),
    )
    rep.summary["family_size"] = len(family)
    rep.summary["ep_bound"] = ep_min + 1
    rep.summary["N(d)"] = n
    return rep


def _product_set(g: FiniteGroup, a: Subgroup, b: Subgroup) -> set[int]:
    return set(int(v) for v in g.mult[np.ix_(list(a.elements), list(b.elements))].ravel())


def _is_closed(g: FiniteGroup, s: set[int]) -> bool:
    arr = np.array(sorted(s))
    return bool(np.isin(g.mult[np.ix_(arr, arr)], arr).all())


def check_decompose(g: FiniteGroup, a: Subgroup, b: Subgroup) -> Report:
    """``G = AB`` and, for each prime, ``O_p(A) O_p(B)`` is a subgroup of order ``d_p^2``."""
    d = math.isqrt(g.order)
    rep = Report("product decomposition of two family members")
    prod = _product_set(g, a, b)
    rep.check("AB covers G", len(prod) == g.order, f"|AB| = {len(prod)}, |G| = {g.order}")
    for p in _primes(d):
        dp = _d_p(d, p)
        pp = _product_set(g, o_p(a, p), o_p(b, p))
        closed = _is_closed(g, pp)
        rep.check(
            f"O_{p}(A) O_{p}(B) is a Sylow {p}-subgroup",
            closed and len(pp) == dp * dp,
            f"order {len(pp)} (expected {dp * dp}), closed={closed}",
        )
    return rep


def check_reduce(g: FiniteGroup, family: SubgroupFamily, p: int) -> Report:
    """Replacing each member by its p-part gives a valid family of the same size in G_p."""
    d = family.d
    dp = _d_p(d, p)
    rep = Report(f"reduction to {p}-parts")
    if len(family) < 2:
        rep.note("fewer than two members: nothing to check")
        return rep
    parts = [o_p(a, p) for a in family.members]
    gp = subgroup_generate(g, itertools.chain.from_iterable(x.elements for x in parts))
    rep.check("|G_p| = d_p^2", gp.order == dp * dp, f"|G_p| = {gp.order}, d_p = {dp}")
    rep.check("each O_p(A) has order d_p", all(x.order == dp for x in parts), f"orders {[x.order for x in parts]}")
    trivial = all(x.mask & y.mask == 1 for x, y in itertools.combinations(parts, 2))
    rep.check("p-parts intersect trivially", trivial)
    rep.check("A -> O_p(A) is injective", len({x.elements for x in parts}) == len(parts))
    rep.summary[f"G_{p}_order"] = gp.order
    rep.summary[f"family_{p}_size"] = len(parts)
    return rep


def classify(g: FiniteGroup) -> str:
    orders = set(int(o) for o in g.element_orders) - {1}
    if not g.is_abelian():
        return "nonabelian"
    if len(orders) == 1 and next(iter(orders)) in _primes(g.order):
        return f"elementary abelian {next(iter(orders))}-group"
    if not orders:
        return "trivial"
    return "abelian, not elementary"


def check_elementary_abelian(g: FiniteGroup, family: SubgroupFamily) -> Report:
    """A complete family (size d+1) forces ``G`` to be elementary abelian."""
    d = family.d
    rep = Report("complete families force elementary abelian groups")
    kind = classify(g)
    rep.summary["classification"] = kind
    if len(family) != d + 1:
        rep.note(f"family size {len(family)} != d+1 = {d + 1}: claim is vacuous")
        return rep
    rep.check("G is elementary abelian", kind.startswith("elementary abelian"), kind)
    return rep


def check_normal_family(g: FiniteGroup, family: SubgroupFamily) -> Report:
    """Structure of a family of normal subgroups with more than two members."""
    rep = Report("families of normal subgroups")
    if len(family) <= 2:
        rep.note(f"family size {len(family)} <= 2: claim does not apply")
        return rep
    for i, a in enumerate(family.members):
        if not a.is_normal():
            raise ValueError(f"member {i} {list(a.elements)} is not normal in G")
    direct = True
    for a, b in itertools.combinations(family.members, 2):
        if a.mask & b.mask != 1 or len(_product_set(g, a, b)) != g.order:
            direct = False
    rep.check("G = A x B for all distinct members", direct)
    abelian = all(a.is_abelian() for a in family.members)
    rep.check("all members abelian", abelian)
    if abelian:
        sigs = {abelian_signature(a) for a in family.members}
        rep.check("members pairwise isomorphic", len(sigs) == 1, f"signatures {sorted(sigs)}")
    d = family.d
    for p in _primes(d):
        counts = [ebar_p_count(a, p) for a in family.members]
        rep.summary[f"Ebar_{p}"] = counts
        bound = min(counts) + 1
        rep.check(
            f"size <= |Ebar_{p}(A)| + 1",
            len(family) <= bound,
            f"{len(family)} <= {bound}" + (" (tight)" if len(family) == bound else ""),
        )
    return rep


def abelian_bound(factors: Sequence[int]) -> int:
    """``min_p p^(nu_p) + 1`` for ``H = Z_d1 x ... x Z_dk`` with prime-power ``d_j``.

    ``nu_p`` counts the factors equal to the largest power of ``p`` present.
    """
    by_prime: dict[int, list[int]] = {}
    for q in factors:
        f = factorize(int(q)) if q > 1 else {}
        if len(f) != 1:
            raise ValueError(f"factor {q} is not a prime power; split it into its primary parts")
        (p,) = f
        by_prime.setdefault(p, []).append(int(q))
    if not by_prime:
        raise ValueError("need at least one factor")
    best = None
    for p, qs in by_prime.items():
        mu = max(qs)
        nu = qs.count(mu)
        val = p**nu + 1
        best = val if best is None else min(best, val)
    return best
