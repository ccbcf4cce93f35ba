import numpy as np
import pytest

from o2reps import jordan as jd_mod
from o2reps.fields import embedding, gf
from o2reps.jordan import SplitFailure, arrange_cycles, jordan_form, shift_group


def _check_similarity(jd, A):
    F = jd.field
    e = embedding(jd.base, F)
    Ab = [[e[x] for x in row] for row in np.asarray(A).tolist()]
    assert jd_mod.mat_mul(F, Ab, jd.P) == jd_mod.mat_mul(F, jd.P, jd.J)
    assert jd_mod.rank(F, jd.P) == jd.n


def test_zero_matrix():
    jd = jordan_form(np.zeros((3, 3), dtype=np.int64), gf(3))
    assert jd.spectrum() == {0: (1, 1, 1)}


def test_single_nilpotent_block():
    A = np.array([[0, 1], [0, 0]])
    jd = jordan_form(A, gf(3))
    assert jd.spectrum() == {0: (2,)}
    assert jd.J == [[0, 1], [0, 0]]


def test_irreducible_companion_is_split_failure():
    # x^2 + 1 has no root in F_3; with a field cap of 3 it cannot split
    A = np.array([[0, 2], [1, 0]])
    out = jordan_form(A, gf(3), max_field=3)
    assert isinstance(out, SplitFailure)
    assert out.splitting_degree == 2
    assert all(jd_mod.poly_eval(gf(3), list(out.charpoly), x) != 0 for x in range(3))
    # and over F_9 it splits
    jd = jordan_form(A, gf(3))
    assert jd.field.q == 9
    _check_similarity(jd, A)


def test_charpoly_matches_integer_model():
    F = gf(5)
    for A in np.random.default_rng(9).integers(0, 5, (30, 3, 3)):
        f = jd_mod.charpoly(F, A.tolist())
        # c_0 = (-1)^n det A and c_{n-1} = -tr A
        assert f[0] == (-round(np.linalg.det(A.astype(float)))) % 5
        assert f[2] == (-np.trace(A)) % 5
        assert f[3] == 1


@pytest.mark.parametrize("seed", range(6))
def test_jordan_form_random(seed):
    F = gf(3)
    rng = np.random.default_rng(seed)
    for A in rng.integers(0, 3, (40, 3, 3)):
        jd = jordan_form(A, F)
        if isinstance(jd, SplitFailure):
            assert jd.splitting_degree > 3
            continue
        _check_similarity(jd, A)


def test_jordan_form_over_f9_and_cap():
    F = gf(3, 2)
    for A in np.random.default_rng(10).integers(0, 9, (20, 3, 3)):
        jd = jordan_form(A, F)
        if isinstance(jd, SplitFailure):
            assert jd.splitting_degree * 2 > 3  # splits only beyond F_27
            continue
        _check_similarity(jd, A)


def test_arrange_cycles_diag012():
    A = np.diag([0, 1, 2])
    jd = arrange_cycles(jordan_form(A, gf(3)), 1)
    assert jd.cycles == [[0, 1, 2]]
    _check_similarity(jd, A)


def test_arrange_cycles_two_cycles():
    # J2(0) + J2(1) + J2(2) + J1(0) + J1(1) + J1(2)
    blocks = [(0, 2), (1, 2), (2, 2), (0, 1), (1, 1), (2, 1)]
    A = np.zeros((9, 9), dtype=np.int64)
    k = 0
    for lam, s in blocks:
        for i in range(s):
            A[k + i, k + i] = lam
            if i + 1 < s:
                A[k + i, k + i + 1] = 1
        k += s
    F = gf(3)
    jd = jordan_form(A, F)
    # brute-force conjugacy of A and A + I: equal Jordan data
    B = (A + np.eye(9, dtype=np.int64)) % 3
    assert jordan_form(B, F).spectrum() == jd.spectrum()
    arr = arrange_cycles(jd, 1)
    assert arr.cycles == [[0, 1, 2]]
    assert [s for _, s in arr.eigen] == [(2, 1)] * 3
    _check_similarity(arr, A)


def test_arrange_cycles_inconsistent():
    jd = jordan_form(np.diag([0, 1]), gf(3))
    with pytest.raises(ValueError):
        arrange_cycles(jd, 1)
    A = np.zeros((4, 4), dtype=np.int64)
    A[0, 1] = 1
    A[2, 2], A[3, 3] = 1, 2  # J2(0) + J1(1) + J1(2): sizes differ in the cycle
    with pytest.raises(ValueError):
        arrange_cycles(jordan_form(A, gf(3)), 1)


def test_shift_group():
    F = gf(3)
    assert shift_group(jordan_form(np.diag([0, 1, 2]), F)) == [0, 1, 2]
    assert shift_group(jordan_form(np.diag([0, 0, 1]), F)) == [0]
    assert shift_group(jordan_form(np.zeros((3, 3), dtype=np.int64), F)) == [0]


def test_factor_poly_roundtrip():
    F = gf(3)
    for A in np.random.default_rng(11).integers(0, 3, (30, 3, 3)):
        f = jd_mod.charpoly(F, A.tolist())
        prod = [1]
        for g, e in jd_mod.factor_poly(F, f):
            for _ in range(e):
                prod = jd_mod.poly_mul(F, prod, list(g))
        assert prod == f
