"""Exact q-series and chiral characters.

A QSeries stores an exact rational offset plus integer coefficients on
an evenly spaced exponent grid: coefficient j multiplies
q^(offset + j/grid).  Characters of the built-in families live on the
integer grid (grid = 1); sums of characters from different sectors are
re-gridded to a common refinement automatically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, workdps

from .errors import ConvergenceWarning, DocumentFormatError, SeriesDivisionError
from .hp import GUARD_DIGITS, kahan_sum, mpf_from_fraction
from .modular_data import ModularData

DEFAULT_ORDER = 400

QSERIES_DOCUMENT_FORMAT = "bcft-qseries/1"


@dataclass(frozen=True)
class QSeries:
    offset: Fraction
    grid: int
    coeffs: tuple

    def __post_init__(self):
        if self.grid < 1:
            raise ValueError("grid must be a positive integer")

    @property
    def order(self) -> int:
        """Number of known coefficients (in grid steps)."""
        return len(self.coeffs)

    def exponent(self, j: int) -> Fraction:
        return self.offset + Fraction(j, self.grid)

    def known_through(self) -> Fraction:
        return self.offset + Fraction(len(self.coeffs) - 1, self.grid)

    def leading(self):
        """(exponent, coefficient) of the first nonzero term."""
        for j, cj in enumerate(self.coeffs):
            if cj:
                return self.exponent(j), cj
        return None, 0

    def regrid(self, new_grid: int) -> "QSeries":
        if new_grid == self.grid:
            return self
        if new_grid % self.grid:
            raise ValueError("new grid must refine the old one")
        f = new_grid // self.grid
        out = [0] * ((len(self.coeffs) - 1) * f + 1 if self.coeffs else 0)
        for j, cj in enumerate(self.coeffs):
            out[j * f] = cj
        return QSeries(self.offset, new_grid, tuple(out))

    def _aligned(self, other: "QSeries"):
        g = math.lcm(self.grid, other.grid)
        diff = other.offset - self.offset
        g = math.lcm(g, diff.denominator)
        a, b = self.regrid(g), other.regrid(g)
        if diff >= 0:
            off = a.offset
            shift_a, shift_b = 0, int(diff * g)
        else:
            off = b.offset
            shift_a, shift_b = int(-diff * g), 0
        return g, off, a, shift_a, b, shift_b

    def __add__(self, other):
        return self._addsub(other, 1)

    def __sub__(self, other):
        return self._addsub(other, -1)

    def _addsub(self, other: "QSeries", sign: int) -> "QSeries":
        g, off, a, sa, b, sb = self._aligned(other)
        upto = min(a.known_through(), b.known_through())
        length = int((upto - off) * g) + 1
        out = [0] * length
        for j, cj in enumerate(a.coeffs):
            if sa + j < length:
                out[sa + j] += cj
        for j, cj in enumerate(b.coeffs):
            if sb + j < length:
                out[sb + j] += sign * cj
        return QSeries(off, g, tuple(out))

    def scale(self, k: int) -> "QSeries":
        return QSeries(self.offset, self.grid, tuple(k * c for c in self.coeffs))

    def __mul__(self, other: "QSeries") -> "QSeries":
        g = math.lcm(self.grid, other.grid)
        a, b = self.regrid(g), other.regrid(g)
        la, lb = len(a.coeffs), len(b.coeffs)
        length = min(la, lb)
        out = [0] * length
        for i, ci in enumerate(a.coeffs):
            if ci == 0 or i >= length:
                continue
            for j in range(min(lb, length - i)):
                cj = b.coeffs[j]
                if cj:
                    out[i + j] += ci * cj
        return QSeries(a.offset + b.offset, g, tuple(out))

    def __truediv__(self, other: "QSeries") -> "QSeries":
        g = math.lcm(self.grid, other.grid)
        a, b = self.regrid(g), other.regrid(g)
        if not b.coeffs or b.coeffs[0] not in (1, -1):
            raise SeriesDivisionError("divisor must have unit leading coefficient")
        length = min(len(a.coeffs), len(b.coeffs))
        lead = b.coeffs[0]
        out = [0] * length
        for j in range(length):
            acc = a.coeffs[j]
            for i in range(j):
                bi = b.coeffs[j - i]
                if bi and out[i]:
                    acc -= out[i] * bi
            out[j] = acc * lead
        return QSeries(a.offset - b.offset, g, tuple(out))

    def evaluate(self, q, dps: int):
        """Numeric value at real 0 < q < 1 with compensated summation."""
        with workdps(dps + GUARD_DIGITS):
            q = mpf(q)
            step = q ** (mpf(1) / self.grid)
            terms = []
            power = q ** mpf_from_fraction(self.offset, dps)
            for cj in self.coeffs:
                if cj:
                    terms.append(cj * power)
                power *= step
            return kahan_sum(terms)

    def truncated(self, length: int) -> "QSeries":
        return QSeries(self.offset, self.grid, self.coeffs[:length])

    def head(self, k: int = 8) -> str:
        parts = []
        for j, cj in enumerate(self.coeffs):
            if cj:
                parts.append("%d q^(%s)" % (cj, self.exponent(j)))
            if len(parts) >= k:
                break
        return " + ".join(parts) if parts else "0"


def qseries_one(order: int) -> QSeries:
    return QSeries(Fraction(0), 1, (1,) + (0,) * order)


def euler_product(order: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) via the pentagonal number expansion."""
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    n = 1
    while True:
        g1 = n * (3 * n - 1) // 2
        g2 = n * (3 * n + 1) // 2
        if g1 > order and g2 > order:
            break
        sign = -1 if n % 2 else 1
        if g1 <= order:
            coeffs[g1] = sign
        if g2 <= order:
            coeffs[g2] = sign
        n += 1
    return QSeries(Fraction(0), 1, tuple(coeffs))


def eta_series(order: int) -> QSeries:
    """Dedekind eta: q^(1/24) prod (1 - q^n)."""
    e = euler_product(order)
    return QSeries(Fraction(1, 24), 1, e.coeffs)


def theta_prime_series(m: int, N: int, order: int) -> QSeries:
    """sum_{n in Z} (m + 2Nn) q^((m+2Nn)^2 / 4N), exponents relative to
    the n = 0 term (integer spaced)."""
    if not 0 < m < 2 * N:
        raise ValueError("need 0 < m < 2N")
    coeffs = [0] * (order + 1)
    n = 0
    while True:
        hit = False
        for nn in ((n, -n) if n else (0,)):
            j = N * nn * nn + m * nn
            if 0 <= j <= order:
                coeffs[j] += m + 2 * N * nn
                hit = True
        if not hit and n * (N * n - m) > order:
            break
        n += 1
    return QSeries(Fraction(m * m, 4 * N), 1, tuple(coeffs))


def char_su2(k: int, a: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Level-k character of sector a as a Weyl-Kac theta quotient.

    Leading coefficient is a+1 (the dimension of the ground multiplet)
    and the leading exponent is h_a - c/24.
    """
    if not 0 <= a <= k:
        raise ValueError("sector out of range")
    N = k + 2
    num = theta_prime_series(a + 1, N, order)
    den = theta_prime_series(1, 2, order)
    chi = num / den
    expo, lead = chi.leading()
    assert expo == Fraction(a * (a + 2), 4 * N) - Fraction(3 * k, 24 * N)
    assert lead == a + 1
    return chi


def char_minimal(p: int, pp: int, r: int, s: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Kac-label (r, s) character: alternating lattice sum over eta."""
    if not (1 <= r < pp and 1 <= s < p):
        raise ValueError("Kac label out of range")
    A = p * r - pp * s
    B = p * r + pp * s
    coeffs = [0] * (order + 1)
    n = 0
    while True:
        hit = False
        for nn in ((n, -n) if n else (0,)):
            ja = p * pp * nn * nn + A * nn
            jb = p * pp * nn * nn + B * nn + r * s
            if 0 <= ja <= order:
                coeffs[ja] += 1
                hit = True
            if 0 <= jb <= order:
                coeffs[jb] -= 1
                hit = True
        if not hit and n > 1:
            break
        n += 1
    num = QSeries(Fraction(A * A, 4 * p * pp), 1, tuple(coeffs))
    chi = num / eta_series(order)
    expo, lead = chi.leading()
    h = Fraction(A * A - (p - pp) ** 2, 4 * p * pp)
    c = Fraction(1) - Fraction(6 * (p - pp) ** 2, p * pp)
    assert expo == h - c / 24
    assert lead == 1
    return chi


def characters_for(md: ModularData, order: int = DEFAULT_ORDER) -> tuple:
    """Characters of every sector, in sector order."""
    if md.family == "su2":
        (k,) = md.params
        return tuple(char_su2(k, a, order) for a in range(md.n))
    if md.family == "minimal":
        p, pp = md.params
        out = []
        for sec in md.sectors:
            r, s = map(int, sec.name.split(","))
            out.append(char_minimal(p, pp, r, s, order))
        return tuple(out)
    raise ValueError("characters are only available for built-in families")


def truncation_tail(order: int, q_abs, offset_min: Fraction, dps: int):
    """Upper estimate for sum_{j > order} |c_j| |q|^(offset_min + j).

    Uses |c_j| <= 100 (j+1)^4 exp(pi sqrt(6 j)), which dominates the
    coefficient growth of every built-in character family.
    """
    with workdps(dps + GUARD_DIGITS):
        q_abs = mpf(q_abs)
        if q_abs <= 0 or q_abs >= 1:
            raise ValueError("need 0 < |q| < 1")

        def term(j):
            return 100 * mpf(j + 1) ** 4 * mp.exp(mp.pi * mp.sqrt(6 * j)) * q_abs ** j

        t1 = term(order + 1)
        ratio = term(order + 2) / t1
        if ratio >= 1:
            return mp.inf
        tail = t1 / (1 - ratio)
        return tail * q_abs ** mpf_from_fraction(offset_min, dps)


def s_transform_residual(
    md: ModularData,
    order: int = DEFAULT_ORDER,
    beta=None,
    precision: int | None = None,
    tol: float = 1e-8,
):
    """max_lambda |chi_lambda(q~) - sum_mu S_{lambda mu} chi_mu(q)|.

    q = exp(-beta), q~ = exp(-4 pi^2 / beta).  The reported value is
    raised to the analytic truncation tail estimate when that is
    larger, and a ConvergenceWarning fires if the estimate exceeds tol.
    """
    dps = precision if precision is not None else md.precision
    if order < 200:
        raise ValueError("order must be at least 200")
    with workdps(dps + GUARD_DIGITS):
        beta = mpf(beta) if beta is not None else 2 * mp.pi
        if beta <= 0:
            raise ValueError("beta must be positive")
        chis = characters_for(md, order)
        q = mp.exp(-beta)
        qt = mp.exp(-4 * mp.pi ** 2 / beta)
        vals_q = [chi.evaluate(q, dps) for chi in chis]
        vals_qt = [chi.evaluate(qt, dps) for chi in chis]
        raw = mpf(0)
        for lam in range(md.n):
            transformed = kahan_sum(
                md.S[lam][mu] * vals_q[mu] for mu in range(md.n)
            )
            raw = max(raw, abs(vals_qt[lam] - transformed))
        offset_min = min(chi.offset for chi in chis)
        tail = max(
            truncation_tail(order, q, offset_min, dps),
            truncation_tail(order, qt, offset_min, dps),
        )
        if tail > mpf(tol):
            warnings.warn(
                "truncation tail estimate %s exceeds tolerance %s"
                % (mp.nstr(tail, 5), tol),
                ConvergenceWarning,
                stacklevel=2,
            )
        return max(raw, tail)


def qseries_document(f: QSeries) -> dict:
    return {
        "format": QSERIES_DOCUMENT_FORMAT,
        "offset": "%d/%d" % (f.offset.numerator, f.offset.denominator),
        "grid": f.grid,
        "coeffs": list(f.coeffs),
    }


def qseries_from_document(doc: dict) -> QSeries:
    if doc.get("format") != QSERIES_DOCUMENT_FORMAT:
        raise DocumentFormatError(
            "expected a %s document" % QSERIES_DOCUMENT_FORMAT
        )
    return QSeries(
        Fraction(doc["offset"]),
        int(doc["grid"]),
        tuple(int(c) for c in doc["coeffs"]),
    )
