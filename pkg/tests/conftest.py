"""Shared fixtures: small nonabelian groups built from permutation generators."""

import numpy as np
import pytest

from mubforge.groups import FiniteGroup


def permutation_group(gens, label=""):
    """Close a set of permutations (tuples) under composition; the identity gets index 0."""
    n = len(gens[0])
    ident = tuple(range(n))
    elems = [ident]
    seen = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                c = tuple(a[s[i]] for i in range(n))
                if c not in seen:
                    seen[c] = len(elems)
                    elems.append(c)
                    nxt.append(c)
        frontier = nxt
    m = len(elems)
    mult = np.empty((m, m), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            mult[i, j] = seen[tuple(a[b[k]] for k in range(n))]
    return FiniteGroup(mult, label)


def relabel(g, perm):
    """Same group with element ``i`` renamed ``perm[i]``; ``perm[0]`` must be 0."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    mult = perm[g.mult[np.ix_(inv, inv)]]
    return FiniteGroup(mult, "relabeled")


def _shift(n, k, offset=0, size=None):
    size = size or n
    p = list(range(size))
    for i in range(n):
        p[offset + i] = offset + (i + k) % n
    return tuple(p)


def s3_x_s3():
    # S3 on {0,1,2} and a second copy on {3,4,5}
    gens = [(1, 0, 2, 3, 4, 5), (1, 2, 0, 3, 4, 5), (0, 1, 2, 4, 3, 5), (0, 1, 2, 4, 5, 3)]
    return permutation_group(gens, "S3 x S3")


def d4_x_z2():
    # dihedral group of the square on {0..3}, times a transposition on {4,5}
    gens = [(1, 2, 3, 0, 4, 5), (0, 3, 2, 1, 4, 5), (0, 1, 2, 3, 5, 4)]
    return permutation_group(gens, "D4 x Z2")


def quaternion():
    # regular representation of Q8 on {1,-1,i,-i,j,-j,k,-k} = 0..7
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    table = {
        ("i", "i"): "-1", ("j", "j"): "-1", ("k", "k"): "-1",
        ("i", "j"): "k", ("j", "k"): "i", ("k", "i"): "j",
        ("j", "i"): "-k", ("k", "j"): "-i", ("i", "k"): "-j",
    }

    def mul(a, b):
        sa, ua = (a[0] == "-"), a.lstrip("-")
        sb, ub = (b[0] == "-"), b.lstrip("-")
        if ua == "1":
            r = ub
        elif ub == "1":
            r = ua
        else:
            r = table[(ua, ub)]
        neg = (r[0] == "-") ^ sa ^ sb
        r = r.lstrip("-")
        return ("-" if neg else "") + r

    idx = {n: i for i, n in enumerate(names)}
    # left-regular action of i and j
    return permutation_group([tuple(idx[mul(g, n)] for n in names) for g in ("i", "j")], "Q8")


def q8_x_z2():
    q = quaternion()
    from mubforge.groups import direct_product, group_from_invariant_factors

    return direct_product(q, group_from_invariant_factors([2]))


@pytest.fixture(scope="session")
def nonabelian_square_groups():
    return [s3_x_s3(), d4_x_z2(), q8_x_z2()]
