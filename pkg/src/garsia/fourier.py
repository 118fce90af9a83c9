"""Fourier transform of the self-similar measure on the real line.

nu_lambda is the law of sum_{j>=0} xi_j lambda^j with xi_j i.i.d. ~ mu, so

    nu_hat(v) = prod_{j>=0} P(e(v lambda^j)),   P(e(theta)) = E[e(theta xi)],

with e(x) = exp(-2 pi i x).  Since |1 - P(e(theta))| <= 2 pi E|xi| |theta|,
the factors with j >= J change the product by at most exp(S) - 1 where
S = 2 pi E|xi| |v| |lambda|^J / (1 - |lambda|).
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .algebra import IntPolynomial, poly_eval_angles, real_roots_in_unit_interval
from .errors import AmbiguousRoot, InvalidInput
from .measure import FiniteMeasure

DEFAULT_BITS = 128
DEFAULT_TAIL = 1e-12


@dataclass(frozen=True)
class NuHat:
    value: mpmath.mpc
    error: mpmath.mpf
    terms: int

    def __abs__(self):
        return abs(self.value)


def select_lambda(f: IntPolynomial, root_index: int | None = None, bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """A real root of the reversed polynomial with 0 < |lambda| < 1.

    Candidates are ordered by value.  More than one candidate without an
    explicit ``root_index`` is an error.
    """
    cands = real_roots_in_unit_interval(f.reversed(), precision=bits)
    if not cands:
        raise InvalidInput(f"the reversal of {f.text()} has no real root with 0 < |x| < 1")
    if root_index is None:
        if len(cands) > 1:
            listed = ", ".join(mpmath.nstr(c, 12) for c in cands)
            raise AmbiguousRoot(f"several real roots in (-1, 1): {listed}; pass a root index")
        return cands[0]
    if not 0 <= root_index < len(cands):
        raise InvalidInput(f"root index {root_index} out of range (0..{len(cands) - 1})")
    return cands[root_index]


def parse_lambda(text: str, bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """A literal contraction ratio: ``p/q`` or a decimal."""
    text = text.strip()
    with mpmath.workprec(bits):
        try:
            if "/" in text:
                q = Fraction(text)
                lam = mpmath.mpf(q.numerator) / q.denominator
            else:
                lam = mpmath.mpf(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad lambda {text!r}") from exc
    if not 0 < abs(lam) < 1:
        raise InvalidInput("lambda must satisfy 0 < |lambda| < 1")
    return lam


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _measure_coeffs(mu: FiniteMeasure, bits: int) -> tuple[list, int]:
    P = mu.fourier_polynomial()
    with mpmath.workprec(bits):
        coeffs = [_to_mpf(c) for c in P.coeffs]
    return coeffs, P.shift


def characteristic(mu: FiniteMeasure, theta, bits: int = DEFAULT_BITS) -> mpmath.mpc:
    """E[e(theta xi)] for xi ~ mu."""
    coeffs, shift = _measure_coeffs(mu, bits)
    with mpmath.workprec(bits):
        theta = _to_mpf(theta)
        return mpmath.expj(-2 * mpmath.pi * theta * shift) * poly_eval_angles(coeffs, theta)


def truncation_terms(lam, mean_abs, v, eps) -> tuple[int, float]:
    """Smallest J whose neglected tail perturbs the product by less than eps."""
    lam, v = abs(float(lam)), abs(float(v))
    c = 2 * math.pi * float(mean_abs) * v / (1 - lam)
    if c == 0:
        return 0, 0.0
    # exp(c lam^J) - 1 < eps  <=>  c lam^J < log1p(eps)
    J = max(0, math.ceil(math.log(math.log1p(eps) / c) / math.log(lam)))
    while math.expm1(c * lam ** J) >= eps:
        J += 1
    return J, math.expm1(c * lam ** J)


def nu_hat(lam, mu: FiniteMeasure, v, eps: float = DEFAULT_TAIL, bits: int = DEFAULT_BITS) -> NuHat:
    """nu_hat(v) truncated so the neglected tail is below eps."""
    if eps <= 0:
        raise InvalidInput("tail bound must be positive")
    coeffs, shift = _measure_coeffs(mu, bits)
    return _nu_hat(lam, coeffs, shift, float(mu.mean_abs()), v, eps, bits)


def _nu_hat(lam, coeffs, shift, mean_abs, v, eps, bits) -> NuHat:
    J, tail = truncation_terms(lam, mean_abs, v, eps)
    with mpmath.workprec(bits + 16):
        lam = _to_mpf(lam)
        theta = _to_mpf(v)
        acc = mpmath.mpc(1)
        for _ in range(J):
            z = poly_eval_angles(coeffs, theta)
            if shift:
                z *= mpmath.expj(-2 * mpmath.pi * theta * shift)
            acc *= z
            theta *= lam
        rounding = mpmath.mpf(2) ** (-bits + 8) * (J + 1)
        return NuHat(+acc, mpmath.mpf(tail) + rounding, J)


# -- decay scans ----------------------------------------------------------------


@dataclass
class DecayScan:
    lam: mpmath.mpf
    v: list[float]
    magnitudes: list[float]
    bounds: list[float]
    delta: float
    log_constant: float
    residual: float
    windows: list[tuple[float, float]] = field(default_factory=list)
    v_min: float = 0.0
    v_max: float = 0.0
    eps: float = DEFAULT_TAIL

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["v", "magnitude", "truncation_bound"])
        for v, m, b in zip(self.v, self.magnitudes, self.bounds):
            w.writerow([repr(v), repr(m), repr(b)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "lambda": mpmath.nstr(self.lam, 30),
            "delta": self.delta,
            "log_constant": self.log_constant,
            "residual": self.residual,
            "grid": {"v_min": self.v_min, "v_max": self.v_max, "points": len(self.v), "spacing": "log"},
            "tail_bound": self.eps,
            "windows": [{"v": v, "max_magnitude": m} for v, m in self.windows],
        }


def dyadic_envelope(v: np.ndarray, mags: np.ndarray, bounds: np.ndarray | None = None) -> list[tuple[float, float]]:
    """(argmax v, max magnitude) over each window [2^k, 2^(k+1)).

    Windows whose maximum does not exceed its truncation bound carry no
    information about the envelope and are dropped.
    """
    if bounds is None:
        bounds = np.zeros_like(mags)
    out = []
    ks = np.floor(np.log2(v)).astype(int)
    for k in np.unique(ks):
        sel = np.flatnonzero(ks == k)
        i = sel[np.argmax(mags[sel])]
        if mags[i] > bounds[i]:
            out.append((float(v[i]), float(mags[i])))
    return out


def fit_power_decay(windows: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Least squares of log|nu_hat| = c - delta log v; returns (delta, c, rms residual)."""
    if len(windows) < 2:
        return math.nan, math.nan, math.nan
    x = np.log([w[0] for w in windows])
    y = np.log([w[1] for w in windows])
    slope, c = np.polyfit(x, y, 1)
    resid = y - (slope * x + c)
    return float(-slope), float(c), float(np.sqrt(np.mean(resid ** 2)))


def _eval_chunk(args):
    lam, coeffs, shift, mean_abs, vs, eps, bits = args
    return [_nu_hat(lam, coeffs, shift, mean_abs, v, eps, bits) for v in vs]


def decay_scan(lam, mu: FiniteMeasure, v_min: float, v_max: float, points: int,
               eps: float = DEFAULT_TAIL, bits: int = DEFAULT_BITS, threads: int = 1) -> DecayScan:
    """Evaluate |nu_hat| on a log-spaced grid and fit the decay exponent."""
    if not 0 < v_min < v_max:
        raise InvalidInput("need 0 < v_min < v_max")
    if points < 2:
        raise InvalidInput("need at least 2 grid points")
    grid = np.geomspace(v_min, v_max, points)
    coeffs, shift = _measure_coeffs(mu, bits)
    mean_abs = float(mu.mean_abs())
    chunks = [grid[i::max(threads, 1)] for i in range(max(threads, 1))]
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            parts = list(pool.map(_eval_chunk, [(lam, coeffs, shift, mean_abs, list(c), eps, bits) for c in chunks]))
        vals = [None] * points
        for i, part in enumerate(parts):
            vals[i::threads] = part
    else:
        vals = _eval_chunk((lam, coeffs, shift, mean_abs, list(grid), eps, bits))
    mags = np.array([min(float(abs(r.value)), 1.0) for r in vals])
    errs = np.array([float(r.error) for r in vals])
    windows = dyadic_envelope(grid, mags, errs)
    delta, c, resid = fit_power_decay(windows)
    return DecayScan(mpmath.mpf(lam), [float(v) for v in grid], mags.tolist(), errs.tolist(),
                     delta, c, resid, windows, float(v_min), float(v_max), eps)


def orbit_magnitudes(lam, mu: FiniteMeasure, base, exponents, eps: float = DEFAULT_TAIL,
                     bits: int = DEFAULT_BITS) -> list[float]:
    """|nu_hat(base^n)| for n in exponents; base = 1/lambda probes Pisot non-decay."""
    with mpmath.workprec(bits):
        base = mpmath.mpf(base)
        return [float(abs(nu_hat(lam, mu, base ** n, eps, bits).value)) for n in exponents]
