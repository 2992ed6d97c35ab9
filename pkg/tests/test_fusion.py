"""Fusion coefficients: integrality, axioms, closed-form oracle."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from bcft.errors import IntegralityFailure
from bcft.fusion import (
    fusion_document,
    fusion_from_document,
    fusion_matrix,
    verify_axioms,
    verlinde,
)
from conftest import fusion_minimal, fusion_su2, minimal, su2


def test_ising_fusion_table():
    fr = fusion_minimal(4, 3)
    # order: 0 = vacuum, 1 = sigma (h=1/16), 2 = eps (h=1/2)
    assert fr.N[1][1][0] == 1  # sigma x sigma -> 1
    assert fr.N[1][1][2] == 1  # sigma x sigma -> eps
    assert fr.N[1][1][1] == 0
    assert fr.N[1][2][1] == 1  # sigma x eps -> sigma
    assert fr.N[2][2][0] == 1  # eps x eps -> 1
    assert fr.N[2][2][2] == 0
    assert fr.max_residual < 1e-50


def su2_closed_form(k: int) -> np.ndarray:
    """Independent truncated Clebsch-Gordan rule."""
    n = k + 1
    N = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if (a + b + c) % 2 == 0 and abs(a - b) <= c <= min(
                    a + b, 2 * k - a - b
                ):
                    N[a][b][c] = 1
    return N


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_su2_fusion_matches_closed_form(k):
    fr = fusion_su2(k)
    assert np.array_equal(fr.as_array(), su2_closed_form(k))


def test_axioms_hold_for_many_models():
    for fr in [fusion_su2(k) for k in range(1, 11)] + [
        fusion_minimal(4, 3),
        fusion_minimal(5, 4),
        fusion_minimal(5, 2),
        fusion_minimal(7, 3),
    ]:
        assert verify_axioms(fr).ok
        assert fr.max_residual < 1e-50


def test_conjugation_column():
    fr = fusion_minimal(7, 2)
    for s in range(fr.n):
        for r in range(fr.n):
            assert fr.N[s][r][0] == (1 if r == fr.conj[s] else 0)


def test_fusion_matrix_is_left_multiplication():
    fr = fusion_su2(4)
    for sigma in range(fr.n):
        mat = fusion_matrix(fr, sigma)
        for a in range(fr.n):
            for b in range(fr.n):
                assert mat[a][b] == fr.N[sigma][a][b]


def test_fusion_matrices_represent_the_ring():
    fr = fusion_su2(5)
    mats = [np.array(fusion_matrix(fr, s), dtype=np.int64) for s in range(fr.n)]
    A = fr.as_array()
    for s in range(fr.n):
        for r in range(fr.n):
            combo = sum(A[s][r][t] * mats[t] for t in range(fr.n))
            assert np.array_equal(mats[s] @ mats[r], combo)


def test_integrality_failure_on_perturbed_s():
    md = minimal(4, 3)
    rows = [list(row) for row in md.S]
    rows[1][1] += mpf("1e-6")
    bad = dataclasses.replace(md, S=tuple(tuple(r) for r in rows))
    with pytest.raises(IntegralityFailure) as exc:
        verlinde(bad)
    assert exc.value.residual > 1e-10


def test_document_round_trip():
    fr = fusion_minimal(5, 4)
    assert fusion_from_document(fusion_document(fr)) == fr


@settings(max_examples=12, deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_unit_and_commutativity_properties(k):
    fr = fusion_su2(k)
    A = fr.as_array()
    assert np.array_equal(A[0], np.eye(fr.n, dtype=np.int64))
    assert np.array_equal(A, A.transpose(1, 0, 2))
    assert A.min() >= 0
