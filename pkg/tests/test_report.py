"""Annulus spectra, heat-kernel consistency, and index chains."""

import pytest
from mpmath import mp, workdps

from bcft.characters import characters_for
from bcft.errors import ConvergenceWarning
from bcft.invariants import diagonal_invariant, enumerate_physical
from bcft.nimreps import enumerate_su2_nimreps, psi_matrix, regular_nimrep
from bcft.report import (
    annulus,
    annulus_document,
    full_report,
    heat_kernel_check,
    index_document,
    index_report,
    normalize_theta,
)
from conftest import fusion_minimal, fusion_su2, minimal, su2

ISING = lambda: minimal(4, 3)  # noqa: E731


# ---------------------------------------------------------------------------
# annulus coefficients


def test_annulus_multiplicities_follow_fusion_for_regular_boundaries():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    spin_spin = annulus(md, nr, 1, 1, order=100)
    assert spin_spin.multiplicities == (1, 0, 1)
    assert spin_spin.vacuum_present
    vac_spin = annulus(md, nr, 0, 1, order=100)
    assert vac_spin.multiplicities == (0, 1, 0)
    assert not vac_spin.vacuum_present
    eps_eps = annulus(md, nr, 2, 2, order=100)
    assert eps_eps.multiplicities == (1, 0, 0)
    assert eps_eps.vacuum_present


def test_annulus_series_is_the_sum_of_the_selected_characters():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    chis = characters_for(md, 100)
    assert annulus(md, nr, 1, 1, order=100).Z_ab == chis[0] + chis[2]
    assert annulus(md, nr, 0, 1, order=100).Z_ab == chis[1]


def test_annulus_rejects_unknown_labels():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    with pytest.raises(ValueError):
        annulus(md, nr, 0, 7)


def test_annulus_document_shape():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    doc = annulus_document(md, annulus(md, nr, 2, 2, order=60))
    assert doc["pair"] == [2, 2]
    assert doc["multiplicities"] == [1, 0, 0]
    assert doc["offset"] == "-1/48"
    assert doc["vacuum_present"] is True
    assert len(doc["coeffs"]) >= 60


def test_vacuum_multiplicity_is_one_exactly_on_the_diagonal():
    cases = [
        (su2(k), regular_nimrep(fusion_su2(k))) for k in range(1, 6)
    ]
    cases.append((ISING(), regular_nimrep(fusion_minimal(4, 3))))
    cases.append((minimal(5, 2), regular_nimrep(fusion_minimal(5, 2))))
    md10 = su2(10)
    cases.append((md10, enumerate_su2_nimreps(md10, 6)[0]))
    for md, nr in cases:
        for a in nr.labels:
            for b in nr.labels:
                spectrum = annulus(md, nr, a, b, order=20)
                assert spectrum.multiplicities[0] == (1 if a == b else 0)
                assert spectrum.vacuum_present == (a == b)


# ---------------------------------------------------------------------------
# heat-kernel channel comparison


def test_heat_kernel_ising_pair():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    res = heat_kernel_check(md, nr, diagonal_invariant(md), 1, 1)
    assert res < 1e-8


def test_heat_kernel_e6_pairs():
    md = su2(10)
    (e6,) = [z for z in enumerate_physical(md) if z.tag == "E6"]
    (nr,) = enumerate_su2_nimreps(md, 6)
    psi = psi_matrix(nr, e6, md)
    for pair in [(0, 0), (2, 3), (5, 1)]:
        res = heat_kernel_check(md, nr, e6, *pair, psi=psi)
        assert res < 1e-8


def test_heat_kernel_beta_must_be_positive():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    with pytest.raises(ValueError):
        heat_kernel_check(md, nr, diagonal_invariant(md), 0, 0, beta=0)


def test_heat_kernel_warns_when_truncation_dominates():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    with pytest.warns(ConvergenceWarning):
        res = heat_kernel_check(
            md, nr, diagonal_invariant(md), 1, 1, beta=0.5, order=400
        )
    assert res > 1e-8  # the reported value is the tail bound, not the raw gap


# ---------------------------------------------------------------------------
# index chains


def test_index_chain_for_free_fermion_extension():
    md = ISING()
    rep = index_report(md, (1, 0, 1))
    with workdps(60):
        assert abs(rep.d_pi - 2) < 1e-12
        assert abs(rep.mu - 4) < 1e-12
        assert abs(rep.two_interval - 16) < 1e-12
        assert abs(rep.c8_index - 4) < 1e-12


def test_index_chain_level_one():
    md = su2(1)
    rep = index_report(md, (1, 1))
    with workdps(60):
        assert abs(rep.d_pi - 2) < 1e-12
        assert abs(rep.mu - 2) < 1e-12
        assert abs(rep.two_interval - 8) < 1e-12
        assert abs(rep.c8_index - 2) < 1e-12


def test_two_interval_index_is_dpi_squared_times_mu():
    md = su2(3)
    rep = index_report(md, (1, 0, 0, 1))
    with workdps(60):
        assert abs(rep.two_interval - rep.d_pi**2 * rep.mu) < mp.mpf("1e-40")
        assert rep.c8_index == rep.mu


def test_theta_normalization_and_errors():
    md = ISING()
    assert normalize_theta(md, {"1,1": 1, "1,3": 1}) == (1, 0, 1)
    assert normalize_theta(md, {0: 2}) == (2, 0, 0)
    assert normalize_theta(md, [1, 1, 0]) == (1, 1, 0)
    with pytest.raises(ValueError):
        normalize_theta(md, [1, 0])  # wrong length
    with pytest.raises(KeyError):
        normalize_theta(md, {"sigma": 1})  # unknown name
    with pytest.raises(ValueError):
        index_report(md, (0, 1, 0))  # vacuum missing
    with pytest.raises(ValueError):
        index_report(md, (1, -1, 0))  # negative multiplicity


def test_index_document_strings():
    md = ISING()
    doc = index_document(md, index_report(md, (1, 0, 1)))
    assert doc["format"] == "bcft-index/1"
    assert doc["theta"] == [1, 0, 1]
    assert float(doc["d_pi"]) == pytest.approx(2.0, abs=1e-12)
    assert float(doc["two_interval"]) == pytest.approx(16.0, abs=1e-12)


# ---------------------------------------------------------------------------
# the bundled report


def test_full_report_ising_diagonal():
    md = ISING()
    nr = regular_nimrep(fusion_minimal(4, 3))
    doc = full_report(md, diagonal_invariant(md), nr, order=400)
    assert doc["format"] == "bcft-report/1"
    assert doc["vacuum_rule"] == {"ok": True}
    assert doc["psi"]["status"] == "ok"
    assert float(doc["psi"]["cardy_residual"]) < 1e-12
    assert doc["heat_kernel"]["status"] == "ok"
    assert float(doc["heat_kernel"]["max_residual"]) < 1e-8
    assert doc["s_transform"]["status"] == "ok"
    assert float(doc["s_transform"]["max_residual"]) < 1e-8
    assert doc["index"]["theta"] == [1, 0, 0]
    assert len(doc["annulus"]) == 9


def test_full_report_degenerate_exponents_are_reported_not_fatal():
    md = su2(4)
    (d4,) = [z for z in enumerate_physical(md) if z.tag == "D4"]
    (nr,) = enumerate_su2_nimreps(md, 4)
    doc = full_report(md, d4, nr, order=200)
    assert doc["psi"]["status"] == "degenerate-exponents"
    assert doc["heat_kernel"] == {"status": "skipped-degenerate-exponents"}
    assert doc["vacuum_rule"] == {"ok": True}
    assert doc["index"]["theta"] == [1, 0, 0, 0, 1]


def test_full_report_clamps_low_series_order():
    md = su2(1)
    nr = regular_nimrep(fusion_su2(1))
    doc = full_report(md, diagonal_invariant(md), nr, order=50)
    assert doc["s_transform"]["status"] == "ok"
    assert float(doc["s_transform"]["max_residual"]) < 1e-8
