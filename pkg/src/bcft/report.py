"""Boundary spectra, channel-duality checks and index bookkeeping.

The annulus spectrum between boundaries a, b is the exact character
combination picked out by the nimrep row n^rho_ab.  Its value at
q = exp(-beta) must agree with the closed-channel sum over boundary
states at the dual nome exp(-4 pi^2 / beta); the residual of that
identity is the main numerical certificate of every report.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from mpmath import mp, mpf, workdps

from .characters import (
    DEFAULT_ORDER,
    characters_for,
    s_transform_residual,
    truncation_tail,
)
from .errors import ConvergenceWarning, DegenerateExponents
from .hp import GUARD_DIGITS, kahan_sum, num_str
from .invariants import ModularInvariant, invariant_document
from .modular_data import (
    ModularData,
    global_index,
    model_name,
    model_to_document,
    quantum_dims,
)
from .nimreps import Nimrep, PsiMatrix, nimrep_document, psi_matrix

HEAT_KERNEL_TOL = 1e-8


@dataclass(frozen=True)
class AnnulusSpectrum:
    pair: tuple
    multiplicities: tuple
    Z_ab: object
    vacuum_present: bool


@dataclass(frozen=True)
class IndexReport:
    theta_mult: tuple
    d_pi: object
    mu: object
    two_interval: object
    c8_index: object


def annulus(
    md: ModularData,
    nr: Nimrep,
    a: int,
    b: int,
    order: int = DEFAULT_ORDER,
) -> AnnulusSpectrum:
    """Character content of the boundary pair (a, b)."""
    if a not in nr.labels or b not in nr.labels:
        raise ValueError("unknown boundary label in (%r, %r)" % (a, b))
    ai = nr.labels.index(a)
    bi = nr.labels.index(b)
    mults = tuple(int(nr.nmats[rho][ai][bi]) for rho in range(md.n))
    chis = characters_for(md, order)
    series = None
    for rho, mult in enumerate(mults):
        if mult == 0:
            continue
        term = chis[rho].scale(mult)
        series = term if series is None else series + term
    if series is None:
        series = chis[0].scale(0)
    return AnnulusSpectrum((a, b), mults, series, mults[0] >= 1)


def heat_kernel_check(
    md: ModularData,
    nr: Nimrep,
    Z: ModularInvariant,
    a: int,
    b: int,
    beta=None,
    order: int = DEFAULT_ORDER,
    precision: int | None = None,
    tol: float = HEAT_KERNEL_TOL,
    psi: PsiMatrix | None = None,
):
    """|open channel - closed channel| for the pair (a, b).

    Open channel: sum_rho n^rho_ab chi_rho(q) at q = exp(-beta).
    Closed channel: sum_lambda psi_a psi_b* chi_lambda(q~) / S_0lambda
    at q~ = exp(-4 pi^2 / beta).  The reported residual is raised to
    the truncation tail estimate when that is larger.
    """
    if psi is None:
        psi = psi_matrix(nr, Z, md)
    dps = precision if precision is not None else md.precision
    with workdps(dps + GUARD_DIGITS):
        beta = mpf(beta) if beta is not None else 2 * mp.pi
        if beta <= 0:
            raise ValueError("beta must be positive")
        q = mp.exp(-beta)
        qt = mp.exp(-4 * mp.pi ** 2 / beta)
        chis = characters_for(md, order)
        ai = nr.labels.index(a)
        bi = nr.labels.index(b)
        open_channel = kahan_sum(
            nr.nmats[rho][ai][bi] * chis[rho].evaluate(q, dps)
            for rho in range(md.n)
            if nr.nmats[rho][ai][bi]
        )
        closed_channel = kahan_sum(
            psi.psi[ai][i]
            * mp.conj(psi.psi[bi][i])
            * chis[lam].evaluate(qt, dps)
            / md.S[0][lam]
            for i, lam in enumerate(psi.exponents)
        )
        raw = abs(open_channel - closed_channel)

        offset_min = min(chi.offset for chi in chis)
        weight_open = sum(nr.nmats[rho][ai][bi] for rho in range(md.n))
        weight_closed = kahan_sum(
            abs(psi.psi[ai][i] * psi.psi[bi][i] / md.S[0][lam])
            for i, lam in enumerate(psi.exponents)
        )
        tail = max(
            weight_open * truncation_tail(order, q, offset_min, dps),
            weight_closed * truncation_tail(order, qt, offset_min, dps),
        )
        if tail > mpf(tol):
            warnings.warn(
                "truncation tail estimate %s exceeds tolerance %s"
                % (mp.nstr(tail, 5), tol),
                ConvergenceWarning,
                stacklevel=2,
            )
        return max(raw, tail)


def normalize_theta(md: ModularData, theta_mult) -> tuple:
    """Sector multiplicity vector from a mapping or sequence."""
    if isinstance(theta_mult, dict):
        mults = [0] * md.n
        for key, val in theta_mult.items():
            idx = key if isinstance(key, int) else md.sector_named(str(key))
            mults[idx] = int(val)
    else:
        mults = [int(x) for x in theta_mult]
        if len(mults) != md.n:
            raise ValueError(
                "need %d multiplicities, got %d" % (md.n, len(mults))
            )
    return tuple(mults)


def index_report(md: ModularData, theta_mult) -> IndexReport:
    """Index data of an extension with vacuum-sector content theta.

    d_pi = sum_rho m_rho d_rho; the two-interval index is d_pi^2 mu
    and the braided-product index equals mu itself.
    """
    mults = normalize_theta(md, theta_mult)
    if mults[0] < 1:
        raise ValueError("theta must contain the vacuum sector")
    if any(m < 0 for m in mults):
        raise ValueError("multiplicities must be non-negative")
    dps = md.precision
    with workdps(dps + GUARD_DIGITS):
        dims = quantum_dims(md)
        d_pi = kahan_sum(m * d for m, d in zip(mults, dims) if m)
        mu = global_index(md)
        two_interval = d_pi * d_pi * mu
        return IndexReport(mults, d_pi, mu, two_interval, mu)


def index_document(md: ModularData, rep: IndexReport) -> dict:
    dps = md.precision
    return {
        "format": "bcft-index/1",
        "theta": list(rep.theta_mult),
        "d_pi": num_str(rep.d_pi, dps),
        "mu": num_str(rep.mu, dps),
        "two_interval": num_str(rep.two_interval, dps),
        "c8_index": num_str(rep.c8_index, dps),
    }


def annulus_document(md: ModularData, spectrum: AnnulusSpectrum) -> dict:
    return {
        "pair": list(spectrum.pair),
        "multiplicities": list(spectrum.multiplicities),
        "offset": "%s/%s"
        % (spectrum.Z_ab.offset.numerator, spectrum.Z_ab.offset.denominator),
        "grid": spectrum.Z_ab.grid,
        "coeffs": list(spectrum.Z_ab.coeffs),
        "vacuum_present": spectrum.vacuum_present,
    }


def full_report(
    md: ModularData,
    Z: ModularInvariant,
    nr: Nimrep,
    order: int = DEFAULT_ORDER,
    beta=None,
    precision: int | None = None,
) -> dict:
    """Bundle of everything derived from one (model, Z, nimrep) triple.

    Deterministic field order; every residual is reported next to the
    tolerance it was held against.  theta is read off the vacuum row
    of Z, the sector content of the chiral extension behind Z.
    """
    dps = precision if precision is not None else md.precision
    with workdps(dps + GUARD_DIGITS):
        beta_v = mpf(beta) if beta is not None else 2 * mp.pi
        doc = {
            "format": "bcft-report/1",
            "model": model_to_document(md),
            "name": model_name(md),
            "order": order,
            "beta": num_str(beta_v, dps),
            "precision": dps,
            "invariant": invariant_document(Z),
            "nimrep": nimrep_document(nr),
        }

        try:
            psi = psi_matrix(nr, Z, md)
        except DegenerateExponents as exc:
            psi = None
            doc["psi"] = {"status": "degenerate-exponents", "detail": str(exc)}
        if psi is not None:
            doc["psi"] = {
                "status": "ok",
                "exponents": list(psi.exponents),
                "matrix": [
                    [num_str(x, dps) for x in row] for row in psi.psi
                ],
                "cardy_residual": num_str(psi.cardy_residual, dps),
                "cardy_tolerance": "1e-12",
            }

        pairs = []
        vacuum_ok = True
        for a in nr.labels:
            for b in nr.labels:
                spectrum = annulus(md, nr, a, b, order)
                pairs.append(annulus_document(md, spectrum))
                if spectrum.vacuum_present != (a == b):
                    vacuum_ok = False
                if spectrum.multiplicities[0] != (1 if a == b else 0):
                    vacuum_ok = False
        doc["annulus"] = pairs
        doc["vacuum_rule"] = {"ok": vacuum_ok}

        if psi is None:
            doc["heat_kernel"] = {"status": "skipped-degenerate-exponents"}
        else:
            worst = mpf(0)
            for a in nr.labels:
                for b in nr.labels:
                    res = heat_kernel_check(
                        md, nr, Z, a, b, beta_v, order, dps, psi=psi
                    )
                    worst = max(worst, res)
            doc["heat_kernel"] = {
                "status": "ok",
                "max_residual": num_str(worst, dps),
                "tolerance": "1e-8",
                "beta": num_str(beta_v, dps),
            }

        s_res = s_transform_residual(md, max(order, 200), beta_v, dps)
        doc["s_transform"] = {
            "status": "ok",
            "max_residual": num_str(s_res, dps),
            "tolerance": "1e-8",
        }

        theta = tuple(int(Z.Z[0][rho]) for rho in range(md.n))
        rep = index_report(md, theta)
        doc["index"] = index_document(md, rep)
        return doc
