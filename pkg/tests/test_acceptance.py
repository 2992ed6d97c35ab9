"""Acceptance gate.

One test per release criterion; each prints a single line

    ACCEPTANCE CRITERION <n>: PASS|FAIL -- <detail>

and then asserts, so the verdicts are readable straight off the pytest
summary.  Criterion 3 is expected to stay red: it demands two
invariants at level 2, but at that level the orbifold construction
reproduces the diagonal invariant and the exhaustive commutant search
(criterion 9 cross-checks it against brute force) correctly finds a
single one.  The criterion is encoded literally rather than weakened.
"""

import os
import time
from math import gcd

import pytest
from mpmath import workdps

from bcft.characters import s_transform_residual
from bcft.fusion import verlinde
from bcft.invariants import (
    diagonal_invariant,
    enumerate_bruteforce,
    enumerate_physical,
)
from bcft.modular_data import build_minimal, build_su2
from bcft.nimreps import (
    enumerate_su2_nimreps,
    psi_matrix,
    regular_nimrep,
    spectrum_match,
    verify,
)
from bcft.report import annulus, heat_kernel_check, index_report


def _report(num: int, ok: bool, detail: str):
    print(
        "ACCEPTANCE CRITERION %d: %s -- %s"
        % (num, "PASS" if ok else "FAIL", detail)
    )
    assert ok, "criterion %d: %s" % (num, detail)


MINIMAL_PAIRS = tuple(
    (p, pp) for p in range(3, 13) for pp in range(2, p) if gcd(p, pp) == 1
)


@pytest.fixture(scope="module")
def fusion_sweep():
    """Every fusion ring named by criterion 1, with the total build time."""
    t0 = time.perf_counter()
    rings = {}
    for k in range(1, 31):
        rings["su2_%d" % k] = verlinde(build_su2(k))
    for p, pp in MINIMAL_PAIRS:
        rings["minimal_%d_%d" % (p, pp)] = verlinde(build_minimal(p, pp))
    return rings, time.perf_counter() - t0


def test_criterion_1_fusion_integrality(fusion_sweep):
    rings, elapsed = fusion_sweep
    worst = max(fr.max_residual for fr in rings.values())
    ok = worst < 1e-10 and elapsed < 60.0
    _report(
        1,
        ok,
        "%d models (su2 k<=30, minimal p<=12), worst integrality residual "
        "%.2e (tol 1e-10), %.1fs (budget 60s)" % (len(rings), worst, elapsed),
    )


def test_criterion_2_regular_nimreps_exact(fusion_sweep):
    rings, _ = fusion_sweep
    bad = [
        name
        for name, fr in rings.items()
        if not verify(regular_nimrep(fr), fr).ok
    ]
    _report(
        2,
        not bad,
        "exact integer representation law on %d regular nimreps%s"
        % (len(rings), "" if not bad else "; violated by " + ", ".join(bad)),
    )


def _expected_count(k: int) -> int:
    if k % 2 == 1:
        return 1
    if k in (10, 16):
        return 3
    return 2


def test_criterion_3_invariant_counts():
    t0 = time.perf_counter()
    mismatches = []
    e6_exponents = None
    for k in range(1, 17):
        invs = enumerate_physical(build_su2(k))
        if len(invs) != _expected_count(k):
            mismatches.append(
                "k=%d expected %d found %d" % (k, _expected_count(k), len(invs))
            )
        if k == 10:
            others = [z for z in invs if z.tag not in ("A11", "D7")]
            e6_exponents = set(others[0].exponents) if others else set()
    elapsed = time.perf_counter() - t0
    exponents_ok = e6_exponents == {0, 3, 4, 6, 7, 10}
    ok = not mismatches and exponents_ok and elapsed < 300.0
    detail = "levels 1..16 in %.1fs (budget 300s); k=10 exceptional exponents %s" % (
        elapsed,
        sorted(e6_exponents or ()),
    )
    if mismatches:
        detail += "; count mismatches: " + "; ".join(mismatches)
        detail += (
            " (at k=2 the orbifold invariant coincides with the diagonal"
            " one, so a single invariant is mathematically correct;"
            " criterion kept literal)"
        )
    _report(3, ok, detail)


@pytest.mark.skipif(
    not os.environ.get("BCFT_EXTENDED"),
    reason="extended half-hour budget; set BCFT_EXTENDED=1 to run",
)
def test_criterion_3_extended_level_28():
    t0 = time.perf_counter()
    invs = enumerate_physical(build_su2(28))
    elapsed = time.perf_counter() - t0
    tags = sorted(z.tag for z in invs)
    ok = len(invs) == 3 and "E8" in tags and elapsed < 1800.0
    _report(
        3,
        ok,
        "extended: level 28 gives %d invariants %s in %.1fs (budget 1800s)"
        % (len(invs), tags, elapsed),
    )


def test_criterion_4_nimrep_invariant_bijection():
    pairs = 0
    problems = []
    for k in range(1, 17):
        md = build_su2(k)
        invs = enumerate_physical(md)
        for size in sorted({z.size for z in invs}):
            at_size = [z for z in invs if z.size == size]
            nrs = enumerate_su2_nimreps(md, size)
            matches = {
                (i, j)
                for i, z in enumerate(at_size)
                for j, nr in enumerate(nrs)
                if spectrum_match(nr, z, md).ok
            }
            for i, z in enumerate(at_size):
                hits = [j for (a, j) in matches if a == i]
                if len(hits) != 1:
                    problems.append("k=%d %s has %d nimreps" % (k, z.tag, len(hits)))
            for j in range(len(nrs)):
                hits = [i for (i, b) in matches if b == j]
                if len(hits) != 1:
                    problems.append(
                        "k=%d size-%d nimrep %d matches %d invariants"
                        % (k, size, j, len(hits))
                    )
            pairs += len(at_size)
    _report(
        4,
        not problems,
        "one-to-one across %d invariants at levels 1..16%s"
        % (pairs, "" if not problems else "; " + "; ".join(problems)),
    )


def test_criterion_5_character_s_transform():
    models = {
        "ising": build_minimal(4, 3),
        "lee-yang": build_minimal(5, 2),
        "su2_1": build_su2(1),
        "su2_2": build_su2(2),
    }
    worst_2pi = 0.0
    worst_3 = 0.0
    for md in models.values():
        worst_2pi = max(worst_2pi, float(s_transform_residual(md, 400, None, 50)))
        worst_3 = max(worst_3, float(s_transform_residual(md, 400, 3, 50)))
    ok = worst_2pi < 1e-8 and worst_3 < 1e-6
    _report(
        5,
        ok,
        "worst residual %.2e at beta=2pi (tol 1e-8), %.2e at beta=3 (tol 1e-6)"
        % (worst_2pi, worst_3),
    )


@pytest.fixture(scope="module")
def checked_nimreps():
    """The (model, invariant, nimrep) triples named by criterion 6."""
    ising = build_minimal(4, 3)
    triples = [("ising", ising, diagonal_invariant(ising), regular_nimrep(verlinde(ising)))]
    md10 = build_su2(10)
    (e6_inv,) = [z for z in enumerate_physical(md10) if z.tag == "E6"]
    (e6_nr,) = enumerate_su2_nimreps(md10, 6)
    triples.append(("su2_10 E6", md10, e6_inv, e6_nr))
    return triples


def test_criterion_6_heat_kernel(checked_nimreps):
    worst = 0.0
    pairs = 0
    for _, md, Z, nr in checked_nimreps:
        psi = psi_matrix(nr, Z, md)
        for a in nr.labels:
            for b in nr.labels:
                res = heat_kernel_check(md, nr, Z, a, b, order=400, psi=psi)
                worst = max(worst, float(res))
                pairs += 1
    ok = worst < 1e-8 and pairs == 45
    _report(
        6,
        ok,
        "open/closed channels agree on %d boundary pairs, worst residual "
        "%.2e (tol 1e-8, beta=2pi, order 400)" % (pairs, worst),
    )


def test_criterion_7_vacuum_rule(checked_nimreps):
    extra = [
        ("su2_%d regular" % k, build_su2(k), None, regular_nimrep(verlinde(build_su2(k))))
        for k in range(1, 7)
    ]
    ly = build_minimal(5, 2)
    extra.append(("lee-yang regular", ly, None, regular_nimrep(verlinde(ly))))
    bad = 0
    pairs = 0
    for _, md, _, nr in list(checked_nimreps) + extra:
        for a in nr.labels:
            for b in nr.labels:
                spectrum = annulus(md, nr, a, b, order=20)
                pairs += 1
                if spectrum.multiplicities[0] != (1 if a == b else 0):
                    bad += 1
    _report(
        7,
        bad == 0,
        "vacuum multiplicity is delta_ab on all %d annulus spectra (%d wrong)"
        % (pairs, bad),
    )


def test_criterion_8_index_chain():
    md = build_minimal(4, 3)
    rep = index_report(md, (1, 0, 1))
    with workdps(60):
        errs = {
            "d_pi": abs(rep.d_pi - 2),
            "mu": abs(rep.mu - 4),
            "two_interval": abs(rep.two_interval - 16),
            "c8": abs(rep.c8_index - 4),
        }
        worst = max(float(v) for v in errs.values())
    _report(
        8,
        worst < 1e-12,
        "theta = vacuum + energy gives d_pi=2, mu=4, two-interval 16, "
        "C8 index 4; worst deviation %.2e (tol 1e-12)" % worst,
    )


def test_criterion_9_bruteforce_oracle():
    total = 0
    for k in range(1, 9):
        md = build_su2(k)
        fast = enumerate_physical(md)
        brute = enumerate_bruteforce(md)
        assert fast == brute, "level %d disagreement" % k
        total += len(fast)
    _report(
        9,
        True,
        "entrywise brute-force enumeration equals the commutant search "
        "at levels 1..8 (%d invariants)" % total,
    )
