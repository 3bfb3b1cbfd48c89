import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import d4_x_z2, quaternion, relabel, s3_x_s3
from mubforge.groups import (
    FiniteGroup,
    GroupTableError,
    Subgroup,
    SubgroupFamily,
    abelian_bound,
    abelian_signature,
    abelian_subgroups_of_order,
    check_bounds,
    check_decompose,
    check_elementary_abelian,
    check_normal_family,
    check_reduce,
    classify,
    e_p_count,
    ebar_p_count,
    element_from_coords,
    format_table,
    group_from_invariant_factors,
    group_from_table,
    half_factors,
    invariant_factors,
    max_clique,
    max_family_search,
    o_p,
    subgroup_generate,
)
from mubforge.mub import n_of_d

# all abelian H with |H| <= 8, as prime-power factors
SMALL_H = [[2], [3], [4], [2, 2], [5], [2, 3], [7], [8], [2, 4], [2, 2, 2]]


def gxg(h):
    return group_from_invariant_factors(list(h) + list(h))


def brute_abelian_subgroups(g, d):
    out = set()
    for rest in itertools.combinations(range(1, g.order), d - 1):
        s = (0,) + rest
        arr = np.array(s)
        block = g.mult[np.ix_(arr, arr)]
        if np.isin(block, arr).all() and np.array_equal(block, block.T):
            out.add(s)
    return out


def nx_max_family(g, subs):
    graph = nx.Graph()
    graph.add_nodes_from(range(len(subs)))
    for i, j in itertools.combinations(range(len(subs)), 2):
        if subs[i].mask & subs[j].mask == 1:
            graph.add_edge(i, j)
    return max((len(c) for c in nx.find_cliques(graph)), default=0)


# --- construction and tables -------------------------------------------------------


def test_klein_four():
    g = group_from_invariant_factors([2, 2])
    assert g.order == 4 and g.is_abelian()
    assert sorted(g.element_orders.tolist()) == [1, 2, 2, 2]
    assert g.label == "abelian invariant factors [2, 2]"


def test_z4_single_involution():
    g = group_from_invariant_factors([4])
    assert list(g.element_orders).count(2) == 1


def test_z6_squared():
    g = group_from_invariant_factors([6, 6])
    assert g.order == 36 and g.is_abelian()
    assert element_from_coords([6, 6], [1, 0]) == 6


def test_order_limit():
    with pytest.raises(ValueError):
        group_from_invariant_factors([64, 65])


def test_table_roundtrip_z2():
    g = group_from_table("GROUP v1 order=2\n0 1\n1 0\n")
    assert g.order == 2
    h = group_from_table(format_table(s3_x_s3()))
    assert np.array_equal(h.mult, s3_x_s3().mult)


def test_latin_violation_witness():
    with pytest.raises(GroupTableError) as exc:
        group_from_table("GROUP v1 order=2\n0 1\n1 1\n")
    assert exc.value.witness is not None


def test_non_associative_witness():
    # a Latin square with identity 0 that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupTableError, match="associative") as exc:
        FiniteGroup(loop)
    a, b, c = exc.value.witness
    m = np.array(loop)
    assert m[m[a, b], c] != m[a, m[b, c]]


def test_bad_header():
    with pytest.raises(ValueError):
        group_from_table("GROUP v2 order=2\n0 1\n1 0\n")


def test_quaternion_nonabelian():
    q = quaternion()
    assert q.order == 8 and not q.is_abelian()
    assert classify(q) == "nonabelian"
    assert list(q.element_orders).count(2) == 1
    with pytest.raises(ValueError, match="perfect square"):
        max_family_search(q)


# --- subgroups -------------------------------------------------------------------------


def test_generate():
    z4 = group_from_invariant_factors([4])
    assert subgroup_generate(z4, []).elements == (0,)
    assert subgroup_generate(z4, [2]).elements == (0, 2)
    g = group_from_invariant_factors([6, 6])
    s = subgroup_generate(g, [element_from_coords([6, 6], [1, 0])])
    assert s.order == 6 and s.is_abelian()
    assert s.element_order_counts() == {1: 1, 2: 1, 3: 2, 6: 2}


def test_subgroup_closure_validated():
    z4 = group_from_invariant_factors([4])
    with pytest.raises(ValueError):
        Subgroup(z4, (0, 1))


def test_e_p_and_ebar():
    k4 = group_from_invariant_factors([2, 2])
    assert e_p_count(k4.whole(), 2) == 4
    z4 = group_from_invariant_factors([4])
    assert e_p_count(z4.whole(), 2) == 2
    assert ebar_p_count(z4.whole(), 2) == 2
    assert ebar_p_count(k4.whole(), 2) == 4
    assert e_p_count(z4.whole(), 3) == 1
    with pytest.raises(ValueError):
        ebar_p_count(z4.whole(), 3)


def test_o_p_nonabelian():
    g = s3_x_s3()
    # S3 x S3 has O_3 = Z3 x Z3 and O_2 trivial
    assert o_p(g.whole(), 3).order == 9
    assert o_p(g.whole(), 2).order == 1
    d = d4_x_z2()
    assert o_p(d.whole(), 2).order == 16


@pytest.mark.parametrize(
    "factors,sig",
    [([6, 6], (2, 2, 3, 3)), ([4, 2], (2, 4)), ([12], (3, 4)), ([2, 2, 2], (2, 2, 2)), ([9, 3], (3, 9))],
)
def test_abelian_signature(factors, sig):
    assert abelian_signature(group_from_invariant_factors(factors).whole()) == sig


def test_invariant_factors():
    assert invariant_factors((2, 2, 3, 3)) == (6, 6)
    assert invariant_factors((2, 4, 3)) == (2, 12)


def test_half_factors():
    assert half_factors(group_from_invariant_factors([6, 6])) == (2, 3)
    assert half_factors(group_from_invariant_factors([2, 2, 2, 2])) == (2, 2)
    assert half_factors(group_from_invariant_factors([4, 2])) is None
    assert half_factors(s3_x_s3()) is None


# --- enumeration oracles ----------------------------------------------------------------


@pytest.mark.parametrize("h", [[2], [3], [4], [2, 2]])
def test_enumeration_matches_brute_force(h):
    g = gxg(h)
    d = math.isqrt(g.order)
    got = {s.elements for s in abelian_subgroups_of_order(g, d)}
    assert got == brute_abelian_subgroups(g, d)


def test_enumeration_d4_x_z2_brute_force():
    g = d4_x_z2()
    got = {s.elements for s in abelian_subgroups_of_order(g, 4)}
    assert got == brute_abelian_subgroups(g, 4)


@pytest.mark.parametrize("g", [gxg([2, 3]), s3_x_s3()], ids=["Z6xZ6", "S3xS3"])
def test_enumeration_order6_cyclic_oracle(g):
    # every abelian group of order 6 is cyclic
    cyclic = {subgroup_generate(g, [x]).elements for x in range(g.order) if g.element_orders[x] == 6}
    assert {s.elements for s in abelian_subgroups_of_order(g, 6)} == cyclic


# --- maximum families -------------------------------------------------------------------


@pytest.mark.parametrize(
    "factors,size",
    [([2, 2], 3), ([4], 1), ([6, 6], 3), ([3, 3], 4), ([4, 4], 3), ([2, 2, 2, 2], 5), ([5, 5], 6)],
)
def test_max_family_sizes(factors, size):
    res = max_family_search(group_from_invariant_factors(factors))
    assert res.size == size and res.exhaustive


@pytest.mark.parametrize("h", SMALL_H[:7])
def test_clique_matches_networkx(h):
    g = gxg(h)
    subs = abelian_subgroups_of_order(g, math.isqrt(g.order))
    assert max_family_search(g).size == nx_max_family(g, subs)


@pytest.mark.parametrize("make", [s3_x_s3, d4_x_z2], ids=["S3xS3", "D4xZ2"])
def test_nonabelian_clique_matches_networkx(make):
    g = make()
    subs = abelian_subgroups_of_order(g, math.isqrt(g.order))
    res = max_family_search(g)
    assert res.size == nx_max_family(g, subs)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 22), st.floats(0.1, 0.9), st.integers(0, 2**32 - 1))
def test_max_clique_random_graphs(n, dens, seed):
    graph = nx.gnp_random_graph(n, dens, seed=seed)
    adj = [0] * n
    for u, v in graph.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    clique, _ = max_clique(adj)
    assert all(adj[u] >> v & 1 for u, v in itertools.combinations(clique, 2))
    assert len(clique) == max(len(c) for c in nx.find_cliques(graph))


def test_non_square_rejected():
    with pytest.raises(ValueError, match="perfect square"):
        max_family_search(group_from_invariant_factors([2]))


def test_exhaustive_limit():
    g = group_from_invariant_factors([37, 37])
    with pytest.raises(ValueError, match="heuristic"):
        max_family_search(g)
    res = max_family_search(g, heuristic=True)
    assert not res.exhaustive
    assert "NOT exhaustive" in res.lines()[0]
    assert res.size == 38


def test_normal_only_filter():
    g = s3_x_s3()
    res = max_family_search(g, require_normal=True)
    assert all(a.is_normal() for a in res.family.members)
    assert res.size <= max_family_search(g).size


def test_relabeling_invariance():
    g = gxg([3])
    rng = np.random.default_rng(7)
    perm = np.concatenate([[0], 1 + rng.permutation(g.order - 1)])
    h = relabel(g, perm)
    res = max_family_search(g)
    assert max_family_search(h).size == res.size
    mapped = SubgroupFamily(h, tuple(Subgroup(h, tuple(sorted(int(perm[x]) for x in a.elements))) for a in res.family.members))
    assert mapped.problems() == []


@pytest.mark.parametrize("h", SMALL_H)
def test_family_bounds_abelian(h):
    g = gxg(h)
    d = math.isqrt(g.order)
    res = max_family_search(g)
    assert res.size <= n_of_d(d)
    assert check_bounds(g, res.family).passed


@pytest.mark.parametrize("make", [s3_x_s3, d4_x_z2], ids=["S3xS3", "D4xZ2"])
def test_family_bounds_nonabelian(make):
    g = make()
    res = max_family_search(g)
    rep = check_bounds(g, res.family)
    assert rep.passed
    assert res.size <= n_of_d(math.isqrt(g.order))


def test_q8_x_z2_bounds(nonabelian_square_groups):
    g = nonabelian_square_groups[2]
    res = max_family_search(g)
    assert check_bounds(g, res.family).passed


# --- bound checks -----------------------------------------------------------------------


def test_check_bounds_singleton():
    g = gxg([4])
    fam = SubgroupFamily(g, (abelian_subgroups_of_order(g, 4)[0],))
    assert check_bounds(g, fam).passed


def test_check_bounds_klein_tight():
    g = group_from_invariant_factors([2, 2])
    rep = check_bounds(g, max_family_search(g).family)
    assert rep.passed
    assert rep.summary["ep_bound"] == 3
    assert "(tight)" in rep.render()


def test_check_bounds_z6_tight():
    g = group_from_invariant_factors([6, 6])
    rep = check_bounds(g, max_family_search(g).family)
    assert rep.summary["N(d)"] == 3 and rep.summary["family_size"] == 3


def test_check_decompose():
    g = group_from_invariant_factors([2, 2])
    a = subgroup_generate(g, [element_from_coords([2, 2], [1, 0])])
    b = subgroup_generate(g, [element_from_coords([2, 2], [0, 1])])
    assert check_decompose(g, a, b).passed
    g6 = group_from_invariant_factors([6, 6])
    fam = max_family_search(g6).family
    rep = check_decompose(g6, fam.members[0], fam.members[1])
    assert rep.passed
    assert "order 4 (expected 4)" in rep.render()


def test_check_reduce_z6():
    g = group_from_invariant_factors([6, 6])
    fam = max_family_search(g).family
    r2 = check_reduce(g, fam, 2)
    r3 = check_reduce(g, fam, 3)
    assert r2.passed and r3.passed
    assert r2.summary["G_2_order"] == 4 and r3.summary["G_3_order"] == 9


def test_check_reduce_p_group_identity():
    g = group_from_invariant_factors([3, 3])
    fam = max_family_search(g).family
    assert all(o_p(a, 3) == a for a in fam.members)
    assert check_reduce(g, fam, 3).passed


def test_check_reduce_nonabelian():
    g = s3_x_s3()
    fam = max_family_search(g).family
    if len(fam) >= 2:
        for p in (2, 3):
            assert check_reduce(g, fam, p).passed


def test_elementary_abelian():
    for factors in ([2, 2], [3, 3]):
        g = group_from_invariant_factors(factors)
        rep = check_elementary_abelian(g, max_family_search(g).family)
        assert rep.passed and rep.checks
    z4 = group_from_invariant_factors([4])
    rep = check_elementary_abelian(z4, max_family_search(z4).family)
    assert rep.passed and not rep.checks


def test_normal_family_z4_squared():
    g = group_from_invariant_factors([4, 4])
    fam = max_family_search(g).family
    rep = check_normal_family(g, fam)
    assert rep.passed
    assert rep.summary["Ebar_2"] == [2, 2, 2]
    assert "3 <= 3 (tight)" in rep.render()


def test_normal_family_z2_4():
    g = group_from_invariant_factors([2, 2, 2, 2])
    fam = max_family_search(g).family
    assert len(fam) == 5
    rep = check_normal_family(g, fam)
    assert rep.passed and rep.summary["Ebar_2"] == [4] * 5


def test_normal_family_rejects_non_normal():
    g = s3_x_s3()
    subs = [s for s in abelian_subgroups_of_order(g, 6) if not s.is_normal()]
    assert subs
    # three members so the size precondition is met; the first is not normal
    others = [s for s in abelian_subgroups_of_order(g, 6) if s.mask & subs[0].mask == 1][:2]
    fam = SubgroupFamily(g, (subs[0], *others))
    with pytest.raises(ValueError, match="not normal"):
        check_normal_family(g, fam)


@pytest.mark.parametrize("h,bound", [([2, 3], 3), ([2, 2], 5), ([4], 3), ([2], 3), ([3], 4), ([5], 6), ([2, 4], 3), ([4, 4, 3], 4)])
def test_abelian_bound(h, bound):
    assert abelian_bound(h) == bound


def test_abelian_bound_rejects_composite_factor():
    with pytest.raises(ValueError, match="prime power"):
        abelian_bound([6])


@pytest.mark.slow
@pytest.mark.parametrize("h", SMALL_H)
def test_abelian_sweep_against_bounds(h):
    g = gxg(h)
    res = max_family_search(g)
    assert res.size <= abelian_bound(h)
    if len(res.family) > 2:
        assert check_normal_family(g, res.family).passed
