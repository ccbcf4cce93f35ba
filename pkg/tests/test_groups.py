import numpy as np
import pytest

from o2reps import matspace as ms
from o2reps.config import BudgetExceeded
from o2reps.groups import (GroupSpec, centralizer, count_kernel, enumerate_group,
                           enumerate_residue_group, is_member, lift_elements, permutation_group,
                           reduce_mats, _all_matrices)
from o2reps.matspace import lie_space
from o2reps.rings import RingSpec

from conftest import spec


def _scan(S):
    """Brute-force C(O_1): every matrix over the residue field passing the membership test."""
    M = _all_matrices(S.field().q, S.N)
    return M[is_member(S, M, over_ring=False)]


def _keys(A, base):
    return set(ms.encode(A, base).tolist())


@pytest.mark.parametrize("family,n,p,order", [
    ("sl", 2, 3, 24), ("o", 2, 3, 8), ("o", 3, 3, 48), ("sp", 1, 3, 24), ("u", 2, 3, 96),
    ("sl", 2, 5, 120), ("o", 2, 5, 8), ("u", 1, 3, 4),
])
def test_residue_group_matches_scan(family, n, p, order):
    S = spec(family, n, p)
    G = enumerate_residue_group(S)
    assert G.order == order
    assert _keys(G.elements, G.T.size) == _keys(_scan(S), G.T.size)


def test_sp1_equals_sl2():
    a = enumerate_residue_group(spec("sp", 1, 3))
    b = enumerate_residue_group(spec("sl", 2, 3))
    assert np.array_equal(a.keys, b.keys)


@pytest.mark.parametrize("family,n,p,order", [("sl", 3, 3, 5616), ("sp", 2, 3, 51840), ("o", 3, 5, 240)])
def test_larger_residue_orders(family, n, p, order):
    assert enumerate_residue_group(spec(family, n, p)).order == order


def test_residue_budget_refusal():
    with pytest.raises(BudgetExceeded):
        enumerate_residue_group(spec("sl", 3, 3), budget=1000)
    with pytest.raises(BudgetExceeded):
        enumerate_residue_group(spec("o", 3, 3), budget=10)


@pytest.mark.parametrize("family,n,p", [("sl", 2, 3), ("o", 2, 3), ("o", 3, 3), ("sp", 1, 3), ("u", 2, 3),
                                        ("sl", 3, 3), ("sp", 2, 3)])
def test_lifts(family, n, p, kind):
    S = spec(family, n, p, kind)
    G = enumerate_residue_group(S)
    g = lift_elements(S, G.elements)
    assert np.all(is_member(S, g, over_ring=True))
    assert np.array_equal(reduce_mats(S, g), G.elements)
    assert np.array_equal(lift_elements(S, ms.identity(S.N)[None])[0], ms.identity(S.N))


def test_lift_rejects_nonmembers():
    S = spec("o", 2, 3)
    with pytest.raises(ValueError):
        lift_elements(S, np.array([[[1, 1], [0, 1]]]))


@pytest.mark.parametrize("family,n,p", [("sl", 2, 3), ("o", 2, 3), ("o", 3, 3), ("sp", 1, 3), ("u", 1, 3)])
def test_kernel_count_by_scan(family, n, p, kind):
    S = spec(family, n, p, kind)
    L = lie_space(S.family, n, S.field(), S.base_q)
    assert count_kernel(S, L) == L.size


@pytest.mark.parametrize("family,n,order,classes", [
    ("sl", 2, 648, 25), ("o", 2, 24, 9), ("o", 3, 1296, 28), ("u", 2, 7776, 156),
])
def test_full_group(family, n, order, classes, kind):
    S = spec(family, n, 3, kind)
    G = enumerate_group(S)
    assert G.order == order
    assert np.all(is_member(S, G.elements, over_ring=True))
    # surjective reduction onto C(O_1), fibres of equal size
    G1 = enumerate_residue_group(S)
    red = G1.index(reduce_mats(S, G.elements))
    assert np.all(np.bincount(red, minlength=G1.order) == order // G1.order)
    # closure on random pairs
    i, j = np.random.default_rng(0).integers(0, G.order, (2, 2000))
    G.mul(i, j)
    assert G.classes.count == classes
    assert sum(G.classes.sizes) == G.order
    assert all(G.order % s == 0 for s in G.classes.sizes)


def test_full_group_exhaustive_closure_o2():
    G = enumerate_group(spec("o", 2, 3, "ramified"))
    i, j = np.meshgrid(np.arange(G.order), np.arange(G.order))
    G.mul(i.ravel(), j.ravel())


def test_enumeration_budget_refusal():
    with pytest.raises(BudgetExceeded):
        enumerate_group(spec("sl", 3, 3))


def test_class_count_equal_across_rings_sl2():
    a = enumerate_group(spec("sl", 2, 3, "unramified")).classes
    b = enumerate_group(spec("sl", 2, 3, "ramified")).classes
    assert a.count == b.count
    assert sorted(a.sizes) == sorted(b.sizes)


def test_classes_sl2_f3():
    cd = enumerate_residue_group(spec("sl", 2, 3)).classes
    assert sorted(cd.sizes) == [1, 1, 4, 4, 4, 4, 6]


def test_centralizer_examples():
    G = enumerate_residue_group(spec("sl", 2, 3))
    assert len(centralizer(G, np.zeros((2, 2), dtype=np.int64))) == G.order
    Z = centralizer(G, np.diag([1, 2]))
    assert len(Z) == 2
    E = G.elements[Z]
    assert not np.any(E[:, 0, 1]) and not np.any(E[:, 1, 0])
    with pytest.raises(ValueError):
        centralizer(G, np.diag([1, 2]), mode="bogus")


def test_centralizer_scalar_class_strictly_larger_somewhere():
    G = enumerate_residue_group(spec("sl", 3, 3))
    A = np.diag([0, 1, 2])
    exact = set(centralizer(G, A).tolist())
    scal = set(centralizer(G, A, "scalar-class").tolist())
    assert exact < scal
    # containment for a sample of random parameters
    for B in np.random.default_rng(1).integers(0, 3, (10, 3, 3)):
        assert set(centralizer(G, B).tolist()) <= set(centralizer(G, B, "scalar-class").tolist())


def test_orbit_stabilizer_for_classes():
    G = enumerate_residue_group(spec("o", 3, 3))
    for r, s in zip(G.classes.reps, G.classes.sizes):
        assert s * len(centralizer(G, G.elements[r])) == G.order


def test_permutation_groups():
    c3 = permutation_group([(1, 2, 0)])
    s3 = permutation_group([(1, 0, 2), (1, 2, 0)])
    assert c3.order == 3 and c3.is_abelian()
    assert s3.order == 6 and sorted(s3.classes.sizes) == [1, 2, 3]


def test_group_spec():
    S = GroupSpec("u", 2, RingSpec("ramified", 3))
    assert S.ring.ext and S.base_q == 3 and S.field().q == 9
    assert GroupSpec("sp", 2, RingSpec("unramified", 3)).N == 4
    assert spec("sl", 3, 3).scalar_classes and not spec("sl", 2, 3).scalar_classes
    with pytest.raises(ValueError):
        GroupSpec("sl", 0, RingSpec("unramified", 3))
