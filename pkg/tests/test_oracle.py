from collections import Counter

import numpy as np
import pytest

from o2reps.config import BudgetExceeded
from o2reps.groups import enumerate_group, enumerate_residue_group, permutation_group
from o2reps.oracle import character_degrees, check_degrees, choose_prime, class_algebra
from o2reps.fields import is_prime

from conftest import spec


def _abelianization_order(G):
    """|G / [G, G]| from an explicit commutator-subgroup closure."""
    gens = G.generators()
    inv = G.inverses
    comms = {int(G.mul(G.mul(a, b), G.mul(inv[a], inv[b]))) for a in gens for b in gens}
    # normal closure: add conjugates until stable
    H = set(G.closure(sorted(comms)).tolist())
    while True:
        conj = {int(G.mul(G.mul(g, h), inv[g])) for g in gens for h in H}
        if conj <= H:
            break
        H = set(G.closure(sorted(H | conj)).tolist())
    # [G,G] is the normal closure of commutators of generators
    return G.order // len(H)


def test_c3():
    G = permutation_group([(1, 2, 0)])
    CA = class_algebra(G)
    assert CA.count == 3 and CA.check()
    # a_{jlk} for a cyclic group: one way per (j, l) with g_j^-1 g_k = g_l
    assert np.array_equal(CA.coeffs.sum(axis=0), np.ones((3, 3), dtype=np.int64))
    assert character_degrees(G) == [1, 1, 1]


def test_s3():
    G = permutation_group([(1, 0, 2), (1, 2, 0)])
    CA = class_algebra(G)
    assert sorted(CA.sizes.tolist()) == [1, 2, 3]
    assert CA.check()
    assert character_degrees(G) == [1, 1, 2]


def test_sl2_f3():
    G = enumerate_residue_group(spec("sl", 2, 3))
    CA = class_algebra(G)
    assert CA.count == 7 and sorted(CA.sizes.tolist()) == [1, 1, 4, 4, 4, 4, 6]
    degs = character_degrees(G, algebra=CA)
    assert degs == [1, 1, 1, 2, 2, 2, 3]
    assert all(check_degrees(G.order, CA.count, degs).values())


def test_sl2_z9_equals_sl2_f3t():
    out = {}
    for kind in ("unramified", "ramified"):
        G = enumerate_group(spec("sl", 2, 3, kind))
        CA = class_algebra(G)
        degs = character_degrees(G, algebra=CA)
        assert all(check_degrees(G.order, CA.count, degs).values())
        assert Counter(degs)[1] == _abelianization_order(G)
        out[kind] = degs
    assert out["unramified"] == out["ramified"]
    assert sum(d * d for d in out["ramified"]) == 648
    assert Counter(out["ramified"]) == {1: 3, 2: 3, 3: 1, 4: 12, 6: 4, 12: 2}


@pytest.mark.parametrize("family,n", [("o", 2), ("o", 3), ("u", 2)])
def test_linear_characters_match_abelianization(family, n):
    G = enumerate_group(spec(family, n, 3, "ramified"))
    degs = character_degrees(G)
    assert Counter(degs)[1] == _abelianization_order(G)


def test_abelian_shortcut():
    G = enumerate_residue_group(spec("o", 2, 3))  # O_2(F_3) is dihedral of order 8
    assert character_degrees(G) == [1, 1, 1, 1, 2]
    A = enumerate_residue_group(spec("u", 1, 3))
    assert character_degrees(A) == [1] * A.order


def test_prime_choice():
    ell = choose_prime(12, 648)
    assert is_prime(ell) and ell % 12 == 1 and ell > 2 * 648 ** 0.5
    assert choose_prime(12, 648, skip=1) > ell


def test_budget_refusal():
    G = enumerate_residue_group(spec("sl", 2, 3))
    with pytest.raises(BudgetExceeded):
        class_algebra(G, budget=10)


def test_seed_independence():
    G = enumerate_group(spec("o", 3, 3))
    assert character_degrees(G, seed=0) == character_degrees(G, seed=7)
