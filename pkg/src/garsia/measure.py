"""Finitely supported probability measures on the integers.

A measure is either exact (``Fraction`` weights) or numeric (``mpmath.mpf``
weights carried at a fixed number of bits).  The two modes are never mixed:
the file loader rejects documents that combine ``p/q`` strings with decimals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Mapping

import mpmath

from .algebra import RationalAngle, cyclotomic_divides, poly_eval_angles
from .errors import InvalidMeasure

RATIONAL = "rational"
NUMERIC = "numeric"


@dataclass(frozen=True)
class FiniteMeasure:
    atoms: Mapping[int, object]
    mode: str = RATIONAL
    bits: int = 256

    def __post_init__(self):
        if not self.atoms:
            raise InvalidMeasure("measure has empty support")
        if self.mode not in (RATIONAL, NUMERIC):
            raise InvalidMeasure(f"unknown weight mode {self.mode!r}")
        if self.mode == NUMERIC and self.bits < 128:
            raise InvalidMeasure("numeric mode needs at least 128 bits")
        clean = {}
        with mpmath.workprec(self.bits):
            for a, w in sorted(self.atoms.items()):
                if self.mode == RATIONAL:
                    w = Fraction(w)
                elif isinstance(w, Fraction):
                    w = mpmath.mpf(w.numerator) / w.denominator
                else:
                    w = mpmath.mpf(w)
                if w <= 0:
                    raise InvalidMeasure(f"weight of atom {a} is not positive")
                clean[int(a)] = w
            total = sum(clean.values())
            if self.mode == RATIONAL:
                if total != 1:
                    raise InvalidMeasure(f"weights sum to {total}, not 1")
            elif abs(total - 1) > mpmath.mpf(2) ** (-self.bits + 8):
                raise InvalidMeasure(f"weights sum to {mpmath.nstr(total, 20)}, not 1")
        object.__setattr__(self, "atoms", clean)

    # constructors

    @classmethod
    def uniform(cls, support) -> "FiniteMeasure":
        support = sorted(set(support))
        return cls({a: Fraction(1, len(support)) for a in support})

    @classmethod
    def from_json(cls, doc: Mapping, bits: int = 256) -> "FiniteMeasure":
        raw = doc.get("atoms")
        if not isinstance(raw, Mapping) or not raw:
            raise InvalidMeasure('measure document needs a nonempty "atoms" object')
        kinds = set()
        parsed = {}
        for key, w in raw.items():
            try:
                atom = int(key)
            except ValueError as exc:
                raise InvalidMeasure(f"atom {key!r} is not an integer") from exc
            if isinstance(w, bool) or not isinstance(w, (str, int, float)):
                raise InvalidMeasure(f"weight of atom {key} must be a string or number")
            text = str(w).strip()
            numeric = isinstance(w, float) or any(ch in text for ch in ".eE")
            kinds.add(NUMERIC if numeric else RATIONAL)
            parsed[atom] = text
        if len(kinds) > 1:
            raise InvalidMeasure("rational (p/q) and decimal weights cannot be mixed")
        mode = kinds.pop()
        bits = int(doc.get("bits", bits))
        try:
            if mode == RATIONAL:
                atoms = {a: Fraction(t) for a, t in parsed.items()}
            else:
                with mpmath.workprec(bits):
                    atoms = {a: mpmath.mpf(t) for a, t in parsed.items()}
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidMeasure(f"bad weight: {exc}") from exc
        return cls(atoms, mode, bits)

    @classmethod
    def load(cls, path: str | Path, bits: int = 256) -> "FiniteMeasure":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidMeasure(f"{path}: {exc}") from exc
        return cls.from_json(doc, bits)

    def to_json(self) -> dict:
        if self.mode == RATIONAL:
            atoms = {str(a): str(w) for a, w in self.atoms.items()}
            return {"atoms": atoms}
        digits = int(self.bits * 0.30103) + 2
        atoms = {str(a): mpmath.nstr(w, digits) for a, w in self.atoms.items()}
        return {"atoms": atoms, "bits": self.bits}

    # structure

    @property
    def support(self) -> list[int]:
        return list(self.atoms)

    @property
    def interval(self) -> tuple[int, int]:
        return min(self.atoms), max(self.atoms)

    @property
    def interval_length(self) -> int:
        lo, hi = self.interval
        return hi - lo

    @property
    def exact(self) -> bool:
        return self.mode == RATIONAL

    def integer_weights(self) -> tuple[dict[int, int], int]:
        """Weights as integers over a common denominator (exact mode only)."""
        if not self.exact:
            raise InvalidMeasure("integer weights need an exact measure")
        Q = reduce(lambda a, b: a * b // math.gcd(a, b), (w.denominator for w in self.atoms.values()))
        return {a: int(w * Q) for a, w in self.atoms.items()}, Q

    def fourier_polynomial(self) -> "FourierPolynomial":
        lo, hi = self.interval
        zero = Fraction(0) if self.exact else mpmath.mpf(0)
        coeffs = [zero] * (hi - lo + 1)
        for a, w in self.atoms.items():
            coeffs[a - lo] = w
        return FourierPolynomial(tuple(coeffs), lo, self.mode, self.bits)

    def mean_abs(self):
        return sum(abs(a) * w for a, w in self.atoms.items())


@dataclass(frozen=True)
class FourierPolynomial:
    """P(z) = E[z^(xi - shift)], coefficients ascending from the support minimum."""

    coeffs: tuple
    shift: int
    mode: str
    bits: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, theta, bits: int | None = None) -> mpmath.mpc:
        """P(e(theta)) evaluated at ``bits`` (default: the measure's precision)."""
        with mpmath.workprec(bits or self.bits):
            if isinstance(theta, Fraction):
                theta = mpmath.mpf(theta.numerator) / theta.denominator
            return +poly_eval_angles(self.coeffs, theta)


def normalize_support(mu: FiniteMeasure) -> tuple[FiniteMeasure, int, int]:
    """Translate and rescale so the support starts at 0 with gcd 1.

    Returns ``(normalized, shift, scale)`` with original atom = shift + scale * new atom.
    """
    lo = min(mu.atoms)
    scale = reduce(math.gcd, (a - lo for a in mu.atoms), 0) or 1
    atoms = {(a - lo) // scale: w for a, w in mu.atoms.items()}
    return FiniteMeasure(atoms, mu.mode, mu.bits), lo, scale


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors_of_power(M: int, level: int) -> list[int]:
    """Sorted divisors of M**level."""
    divs = [1]
    for p, e in _factorize(M).items():
        divs = [d * p ** k for d in divs for k in range(e * level + 1)]
    return sorted(divs)


@dataclass(frozen=True)
class ZeroAngleSet:
    angles: frozenset
    base: int
    max_level: int
    heuristic: bool = False
    threshold_bits: int | None = None

    def __contains__(self, angle) -> bool:
        return angle in self.angles

    def __len__(self) -> int:
        return len(self.angles)

    def sorted(self) -> list[RationalAngle]:
        return sorted(self.angles, key=lambda a: (a.denominator, a.numerator))

    def to_json(self) -> dict:
        return {
            "angles": [str(a) for a in self.sorted()],
            "base": self.base,
            "max_level": self.max_level,
            "heuristic": self.heuristic,
        }


def _numeric_is_zero(P: FourierPolynomial, theta: Fraction, bits: int) -> bool:
    """|P(e(theta))| < 2^(-bits/2), confirmed once more at doubled precision."""
    thr = mpmath.mpf(2) ** (-(bits // 2))
    if abs(P(theta, bits)) >= thr:
        return False
    return abs(P(theta, 2 * bits)) < thr


def zero_angles(mu: FiniteMeasure, M: int, max_level: int) -> ZeroAngleSet:
    """Angles theta with denominator dividing M^max_level and P_mu(e(theta)) = 0.

    Exact measures use cyclotomic division, so the answer is Galois-closed.
    Numeric measures test each angle against 2^(-bits/2) and are flagged
    heuristic.
    """
    if M < 2 or max_level < 1:
        raise InvalidMeasure("need M >= 2 and max_level >= 1")
    P = mu.fourier_polynomial()
    found = set()
    if mu.exact:
        for q in divisors_of_power(M, max_level)[1:]:
            if cyclotomic_divides(P.coeffs, q):
                found.update(RationalAngle(k, q) for k in range(1, q) if math.gcd(k, q) == 1)
        return ZeroAngleSet(frozenset(found), M, max_level)
    N = M ** max_level
    for k in range(1, N):
        theta = Fraction(k, N)
        if _numeric_is_zero(P, theta, mu.bits):
            found.add(RationalAngle.of(theta))
    return ZeroAngleSet(frozenset(found), M, max_level, heuristic=True, threshold_bits=mu.bits // 2)


def is_equidistributed_mod(mu: FiniteMeasure, q: int) -> bool:
    if q < 1:
        raise InvalidMeasure("q must be positive")
    if mu.exact:
        mass = [Fraction(0)] * q
        for a, w in mu.atoms.items():
            mass[a % q] += w
        return all(m == Fraction(1, q) for m in mass)
    with mpmath.workprec(mu.bits):
        mass = [mpmath.mpf(0)] * q
        for a, w in mu.atoms.items():
            mass[a % q] += w
        tol = mpmath.mpf(2) ** (-(mu.bits // 2))
        return all(abs(m - mpmath.mpf(1) / q) < tol for m in mass)


def golden_ratio_measure(bits: int = 256) -> FiniteMeasure:
    """The 13-atom measure on {0..12} with P(z) = (z^2+phi z+1)(z^10+phi z^5+1)/(5 phi^2)."""
    with mpmath.workprec(bits + 32):
        phi = (1 + mpmath.sqrt(5)) / 2
        a, b, c = 1 / (5 * phi ** 2), 1 / (5 * phi), mpmath.mpf(1) / 5
        atoms = {j: a for j in (0, 2, 10, 12)}
        atoms.update({j: b for j in (1, 5, 7, 11)})
        atoms[6] = c
    with mpmath.workprec(bits):
        atoms = {k: +v for k, v in atoms.items()}
    return FiniteMeasure(atoms, NUMERIC, bits)
