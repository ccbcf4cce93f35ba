"""Acceptance gate: seven criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

from collections import Counter
from functools import lru_cache

import numpy as np
import pytest

from o2reps.clifford import CliffordEngine, compare_rings
from o2reps.extension import SearchFallback, canonical_extension, verify_s_invariance
from o2reps.fields import gf
from o2reps.groups import GroupSpec, enumerate_group, enumerate_residue_group, permutation_group
from o2reps.matspace import lie_space, radical
from o2reps.oracle import character_degrees, check_degrees, class_algebra
from o2reps.rings import RingSpec

RESULTS: dict[int, tuple[bool, str]] = {}
KINDS = ("unramified", "ramified")

CRIT1_SPECS = [("sl", 2, 3), ("sl", 3, 3), ("o", 2, 3), ("o", 3, 3), ("u", 2, 3), ("sp", 1, 3), ("sl", 2, 5)]
CRIT2_SPECS = [("sl", 2, 3), ("o", 2, 3), ("o", 3, 3), ("u", 2, 3)]
ALL_SPECS = CRIT1_SPECS + [("sp", 2, 3)]


@lru_cache(maxsize=None)
def engine(family, n, p, kind) -> CliffordEngine:
    return CliffordEngine(GroupSpec(family, n, RingSpec(kind, p)))


def record(num: int, ok: bool, detail: str):
    RESULTS[num] = (ok, detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_cross_ring_equality():
    bad = []
    for family, n, p in CRIT1_SPECS:
        cmp = compare_rings(family, n, p)
        a = engine(family, n, p, "unramified").irr_multiset()
        b = engine(family, n, p, "ramified").irr_multiset()
        if not (cmp.equal and a == b and a == cmp.multisets["unramified"]):
            bad.append(f"{family}{n} p={p}")
    record(1, not bad, f"{len(CRIT1_SPECS)} specs, exact (dim,count) multisets; mismatches: {bad or 'none'}")


def test_criterion_2_oracle_equivalence():
    bad = []
    for family, n, p in CRIT2_SPECS:
        for kind in KINDS:
            eng = engine(family, n, p, kind)
            G = enumerate_group(eng.spec)
            CA = class_algebra(G)
            degs = character_degrees(G, algebra=CA)
            if eng.irr_multiset() != sorted(Counter(degs).items()) or eng.irrep_count() != CA.count:
                bad.append(f"{family}{n}/{kind}")
    record(2, not bad, f"{2 * len(CRIT2_SPECS)} groups, engine vs Dixon-Schneider and class count; failures: {bad or 'none'}")


def _expected_order(eng) -> int:
    S = eng.spec
    q = S.q
    N = S.N
    fq_dim = {"sl": N * N - 1, "o": N * (N - 1) // 2, "sp": S.n * (2 * S.n + 1), "u": N * N}[S.family.value]
    return eng.G1.order * q ** fq_dim


def test_criterion_3_sum_of_squares():
    bad = []
    for family, n, p in ALL_SPECS:
        for kind in KINDS:
            eng = engine(family, n, p, kind)
            total = sum(c * d * d for d, c in eng.irr_multiset())
            if not (total == _expected_order(eng) == eng.group_order):
                bad.append(f"{family}{n} p={p}/{kind}: {total}")
    record(3, not bad, f"{2 * len(ALL_SPECS)} engine runs incl. SL3 and Sp4 at p=3; failures: {bad or 'none'}")


def test_criterion_4_radicals():
    bad = []
    cases = [("o", n, p) for n in (1, 2, 3) for p in (3, 5)]
    cases += [("sp", n, 3) for n in (1, 2)] + [("sl", 2, 3), ("sl", 2, 5)]
    for family, n, p in cases:
        if len(radical(lie_space(family, n, gf(p)))) != 0:
            bad.append(f"{family}{n} p={p}")
    for n in (1, 2):
        for p in (3, 5):
            if len(radical(lie_space("u", n, gf(p, 2), p))) != 0:
                bad.append(f"u{n} p={p}")
    rad = radical(lie_space("sl", 3, gf(3)))
    scalar_line = len(rad) == 1 and np.array_equal(rad[0] % 3 != 0, np.eye(3, dtype=bool)) \
        and len(set(np.diagonal(rad[0]).tolist())) == 1
    if not scalar_line:
        bad.append("sl3 p=3 radical is not the scalar line")
    record(4, not bad, f"{len(cases) + 4} zero radicals plus the SL3 scalar line; failures: {bad or 'none'}")


def test_criterion_5_sl3_construction():
    bad, n_orbits, cycles = [], 0, 0
    keys = ("quotient_normal", "quotient_abelian", "quotient_exponent_p", "complement_trivial_intersection",
            "complement_product", "complement_order_identity", "chi_invariance", "chi_trivial_on_S",
            "restriction", "multiplicative")
    for kind in KINDS:
        eng = engine("sl", 3, 3, kind)
        for rec in eng.orbits:
            n_orbits += 1
            ext = canonical_extension(eng, rec.rep)
            if isinstance(ext, SearchFallback):
                bad.append(f"{kind} {rec.rep.tolist()}: {ext.reason}")
                continue
            cycles += ext.branch == "sl-cycle"
            r = verify_s_invariance(eng, rec, ext)
            failed = [k for k in keys if not r[k]]
            if failed or not r["ok"]:
                bad.append(f"{kind} {rec.rep.tolist()}: {failed}")
    record(5, not bad, f"{n_orbits} orbits over both rings, {cycles} with a nontrivial permutation complement; failures: {bad or 'none'}")


def test_criterion_6_structural_identities():
    bad = []
    for family, n, p in ALL_SPECS:
        for kind in KINDS:
            eng = engine(family, n, p, kind)
            c = eng.checks()
            failed = [k for k in ("partition", "parameter_map", "stabilizer_equals_centralizer",
                                  "stabilizer_order", "index") if not c[k]]
            want = 3 ** 8 if eng.scalar else eng.L.size
            if sum(r.size for r in eng.orbits) != want:
                failed.append("partition_size")
            if failed:
                bad.append(f"{family}{n} p={p}/{kind}: {failed}")
    record(6, not bad, f"partition, stabilizer-order and index identities on {2 * len(ALL_SPECS)} runs; failures: {bad or 'none'}")


def test_criterion_7_oracle_self_checks():
    groups = {
        "C3": permutation_group([(1, 2, 0)]),
        "S3": permutation_group([(1, 0, 2), (1, 2, 0)]),
        "SL2(F3)": enumerate_residue_group(GroupSpec("sl", 2, RingSpec("unramified", 3))),
        "SL2(Z/9)": enumerate_group(GroupSpec("sl", 2, RingSpec("unramified", 3))),
        "SL2(F3[t]/t^2)": enumerate_group(GroupSpec("sl", 2, RingSpec("ramified", 3))),
    }
    bad = []
    for name, G in groups.items():
        CA = class_algebra(G)
        degs = character_degrees(G, algebra=CA)
        chk = check_degrees(G.order, CA.count, degs)
        if not (chk["sum_squares"] and chk["count_equals_classes"] and CA.check()):
            bad.append(name)
    record(7, not bad, f"{len(groups)} regression groups, sum of squares and class count; failures: {bad or 'none'}")


if __name__ == "__main__":
    import sys

    status = 0
    for num, fn in enumerate([test_criterion_1_cross_ring_equality, test_criterion_2_oracle_equivalence,
                              test_criterion_3_sum_of_squares, test_criterion_4_radicals,
                              test_criterion_5_sl3_construction, test_criterion_6_structural_identities,
                              test_criterion_7_oracle_self_checks], start=1):
        try:
            fn()
        except AssertionError:
            status = 1
        except Exception as e:  # report and continue with the next criterion
            print(f"criterion {num}: FAIL (error: {e!r})")
            status = 1
    sys.exit(status)
