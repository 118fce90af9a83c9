"""Exact polynomial and algebraic-number foundations.

The minimal polynomial of beta is stored degree-descending, the way it is
typed on the command line (``3,4,3,5`` is 3x^3 + 4x^2 + 3x + 5).  Internally
most routines want the ascending list ``a_0, a_1, ..., a_d`` and use
:attr:`IntPolynomial.ascending`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import mpmath

from .errors import (
    EmptyInput,
    InvalidInput,
    NonPrimitive,
    ZeroConstantTerm,
    ZeroLeadingCoefficient,
    ZeroPolynomial,
)

log = logging.getLogger(__name__)

PRECISION_CAP = 4096


@dataclass(frozen=True)
class IntPolynomial:
    """Primitive integer polynomial a_d x^d + ... + a_1 x + a_0."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise EmptyInput("a polynomial of degree >= 1 needs at least two coefficients")
        if c[0] == 0:
            raise ZeroLeadingCoefficient("leading coefficient is zero")
        if c[-1] == 0:
            raise ZeroConstantTerm("constant term is zero")
        if self.content != 1:
            raise NonPrimitive(f"content {self.content} != 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def ascending(self) -> tuple[int, ...]:
        return self.coeffs[::-1]

    @property
    def leading(self) -> int:
        return self.coeffs[0]

    @property
    def constant(self) -> int:
        return self.coeffs[-1]

    @property
    def M(self) -> int:
        """|a_0|, the Mahler measure whenever every root lies outside the unit circle."""
        return abs(self.coeffs[-1])

    @property
    def content(self) -> int:
        return reduce(math.gcd, self.coeffs)

    def coefficient(self, j: int) -> int:
        """Coefficient a_j of x^j (zero outside 0..d)."""
        if 0 <= j <= self.degree:
            return self.coeffs[self.degree - j]
        return 0

    def reversed(self) -> "IntPolynomial":
        """x^d f(1/x); its roots are the reciprocals 1/beta."""
        return IntPolynomial(self.coeffs[::-1])

    def text(self) -> str:
        return ",".join(str(a) for a in self.coeffs)

    def __str__(self) -> str:
        terms = []
        d = self.degree
        for i, a in enumerate(self.coeffs):
            p = d - i
            if a == 0:
                continue
            mono = "" if p == 0 else ("x" if p == 1 else f"x^{p}")
            if mono and abs(a) == 1:
                coef = "-" if a < 0 else ""
            else:
                coef = str(a)
            terms.append(f"{coef}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def parse_polynomial(text: str, divide_content: bool = False) -> IntPolynomial:
    """Parse comma-separated integers, highest degree first."""
    parts = [p.strip() for p in text.split(",")]
    parts = [p for p in parts if p]
    if len(parts) < 2:
        raise EmptyInput(f"need at least two coefficients, got {text!r}")
    try:
        coeffs = [int(p) for p in parts]
    except ValueError as exc:
        raise InvalidInput(f"not an integer coefficient list: {text!r}") from exc
    if coeffs[0] == 0:
        raise ZeroLeadingCoefficient("leading coefficient is zero")
    if coeffs[-1] == 0:
        raise ZeroConstantTerm("constant term is zero")
    g = reduce(math.gcd, coeffs)
    if g != 1:
        if not divide_content:
            raise NonPrimitive(f"coefficients share the factor {g}; pass --divide-content to divide it out")
        log.warning("dividing out content %d", g)
        coeffs = [a // g for a in coeffs]
    return IntPolynomial(tuple(coeffs))


# -- rational angles ---------------------------------------------------------


@dataclass(frozen=True)
class RationalAngle:
    """A point of Q/Z in lowest terms, 0 <= numerator < denominator."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise InvalidInput("angle denominator must be positive")
        n = self.numerator % self.denominator
        g = math.gcd(n, self.denominator)
        object.__setattr__(self, "numerator", n // g)
        object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def of(cls, x: Fraction | int) -> "RationalAngle":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @classmethod
    def parse(cls, text: str) -> "RationalAngle":
        return cls.of(Fraction(text.strip()))

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle(-self.numerator, self.denominator)

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle.of(self.value + other.value)

    def __sub__(self, other: "RationalAngle") -> "RationalAngle":
        return self + (-other)

    def __lt__(self, other: "RationalAngle") -> bool:
        return self.value < other.value

    def __bool__(self) -> bool:
        return self.numerator != 0

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


# -- arithmetic in Q(beta) ---------------------------------------------------


@dataclass(frozen=True)
class FieldElement:
    """sum_j coords[j] * beta^j in the power basis 1, beta, ..., beta^(d-1)."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def zero(cls, d: int) -> "FieldElement":
        return cls((Fraction(0),) * d)

    @classmethod
    def integer(cls, a: int, d: int) -> "FieldElement":
        return cls((Fraction(a),) + (Fraction(0),) * (d - 1))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c: Fraction | int) -> "FieldElement":
        return FieldElement(tuple(c * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def mul_by_beta(x: FieldElement, f: IntPolynomial) -> FieldElement:
    """Return beta * x, reducing beta^d = -(a_{d-1} beta^{d-1} + ... + a_0) / a_d."""
    d = f.degree
    if len(x.coords) != d:
        raise InvalidInput(f"element has {len(x.coords)} coordinates, field degree is {d}")
    top = x.coords[-1]
    shifted = (Fraction(0),) + x.coords[:-1]
    if top == 0:
        return FieldElement(shifted)
    asc = f.ascending
    ad = asc[d]
    return FieldElement(tuple(s - top * Fraction(asc[j], ad) for j, s in enumerate(shifted)))


def beta_powers(f: IntPolynomial, count: int) -> list[FieldElement]:
    out = [FieldElement.integer(1, f.degree)]
    for _ in range(count - 1):
        out.append(mul_by_beta(out[-1], f))
    return out


# -- cyclotomic polynomials --------------------------------------------------


def _divisors(q: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= q:
        if q % i == 0:
            small.append(i)
            if i * i != q:
                large.append(q // i)
        i += 1
    return small + large[::-1]


def euler_phi(q: int) -> int:
    result, n, p = q, q, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def _poly_divmod_monic(num: list, den: Sequence[int]) -> tuple[list, list]:
    """Divide ascending coefficient lists; ``den`` must be monic."""
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [0], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    return quot, num[:dn]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(q: int) -> tuple[int, ...]:
    """Ascending integer coefficients of the q-th cyclotomic polynomial."""
    if q < 1:
        raise InvalidInput("cyclotomic index must be positive")
    num = [-1] + [0] * (q - 1) + [1]
    for d in _divisors(q)[:-1]:
        num, rem = _poly_divmod_monic(num, cyclotomic_polynomial(d))
        assert not any(rem)
    return tuple(num)


def cyclotomic_divides(P: Sequence[int | Fraction], q: int) -> bool:
    """True iff Phi_q divides P (ascending coefficients) in Q[z].

    Equivalently: every primitive q-th root of unity is a zero of P.
    """
    if not any(P):
        raise ZeroPolynomial("P is identically zero")
    if q < 1:
        raise InvalidInput("q must be positive")
    deg = max(i for i, c in enumerate(P) if c)
    if deg < euler_phi(q):
        return False
    # Phi_q | z^q - 1, so fold P modulo z^q - 1 first.
    folded = [Fraction(0)] * q
    for i, c in enumerate(P):
        folded[i % q] += c
    _, rem = _poly_divmod_monic(folded, cyclotomic_polynomial(q))
    return not any(rem)


# -- conjugates and Mahler measure -------------------------------------------


class Classification(str, enum.Enum):
    ALL_OUTSIDE = "AllOutsideUnitCircle"
    ALL_INSIDE = "AllInsideUnitCircle"
    MIXED = "Mixed"
    UNIT_CIRCLE_SUSPECTED = "UnitCircleSuspected"


@dataclass(frozen=True)
class ConjugateProfile:
    roots: tuple[mpmath.mpc, ...]
    radii: tuple[mpmath.mpf, ...]
    classification: Classification
    mahler: mpmath.mpf
    mahler_error: mpmath.mpf
    mahler_exact: int | None
    precision: int

    @property
    def all_outside(self) -> bool:
        return self.classification is Classification.ALL_OUTSIDE

    def mahler_str(self, digits: int = 20) -> str:
        if self.mahler_exact is not None:
            return str(self.mahler_exact)
        return mpmath.nstr(self.mahler, digits)


def _root_disks(asc: Sequence[int], prec: int):
    """Approximate roots with a-posteriori inclusion radii.

    Radius of root i is d*|f(z_i)| / |a_d prod_{j != i}(z_i - z_j)| (the
    Weierstrass correction bound), inflated by an evaluation rounding term.
    Each connected component of the disk union holds as many roots as disks.
    """
    d = len(asc) - 1
    desc = list(asc[::-1])
    with mpmath.workprec(prec):
        steps = 50 + 10 * d
        while True:
            try:
                roots = mpmath.polyroots(desc, maxsteps=steps, extraprec=prec)
                break
            except mpmath.libmp.NoConvergence:
                steps *= 4
                if steps > 100000:
                    raise
        if d == 1:
            roots = [roots] if not isinstance(roots, list) else roots
        roots = [mpmath.mpc(z) for z in roots]
        eps = mpmath.mpf(2) ** (-prec + 4)
        ad = abs(mpmath.mpf(desc[0]))
        radii = []
        for i, z in enumerate(roots):
            val = mpmath.polyval(desc, z)
            rnd = eps * sum(abs(mpmath.mpf(a)) * abs(z) ** k for k, a in enumerate(asc))
            denom = ad
            for j, w in enumerate(roots):
                if j != i:
                    denom *= abs(z - w)
            if denom == 0:
                radii.append(mpmath.inf)
            else:
                radii.append(d * (abs(val) + rnd) / denom)
    return roots, radii


@lru_cache(maxsize=256)
def conjugate_profile(f: IntPolynomial, precision: int = 128) -> ConjugateProfile:
    """Locate the roots of f relative to the unit circle and compute M_beta.

    Precision doubles from ``precision`` up to :data:`PRECISION_CAP` until
    every root disk avoids the unit circle and the Mahler error is below
    2^(-precision/2).
    """
    asc = f.ascending
    prec = max(int(precision), 64)
    while True:
        roots, radii = _root_disks(asc, prec)
        with mpmath.workprec(prec):
            outside = [abs(z) - r > 1 for z, r in zip(roots, radii)]
            inside = [abs(z) + r < 1 for z, r in zip(roots, radii)]
            certified = all(o or i for o, i in zip(outside, inside))
            mahler = abs(mpmath.mpf(f.leading))
            rel_err = mpmath.mpf(0)
            for z, r, o in zip(roots, radii, outside):
                if o:
                    mahler *= abs(z)
                    rel_err += r / (abs(z) - r)
            err = mahler * (mpmath.exp(rel_err) - 1)
            target = mpmath.mpf(2) ** (-precision / 2)
        if certified and err <= target:
            break
        if prec >= PRECISION_CAP:
            return ConjugateProfile(
                tuple(roots), tuple(radii), Classification.UNIT_CIRCLE_SUSPECTED,
                mahler, err, None, prec,
            )
        prec = min(2 * prec, PRECISION_CAP)

    if all(outside):
        cls = Classification.ALL_OUTSIDE
        exact = f.M
    elif all(inside):
        cls = Classification.ALL_INSIDE
        exact = abs(f.leading)
    else:
        cls = Classification.MIXED
        exact = None
    if exact is not None:
        mahler, err = mpmath.mpf(exact), mpmath.mpf(0)
    return ConjugateProfile(tuple(roots), tuple(radii), cls, mahler, err, exact, prec)


def real_roots_in_unit_interval(f: IntPolynomial, precision: int = 128) -> list[mpmath.mpf]:
    """Real roots x of f with 0 < |x| < 1, ordered by value."""
    roots, radii = _root_disks(f.ascending, max(precision, 64))
    out = []
    with mpmath.workprec(max(precision, 64)):
        for z, r in zip(roots, radii):
            if abs(z.imag) <= r and 0 < abs(z.real) < 1:
                out.append(+z.real)
    return sorted(out)


def poly_eval_angles(P: Iterable, theta) -> mpmath.mpc:
    """Evaluate sum_k P[k] e(k theta) with e(x) = exp(-2 pi i x) at the current precision."""
    z = mpmath.expj(-2 * mpmath.pi * theta)
    acc = mpmath.mpc(0)
    for c in reversed(list(P)):
        acc = acc * z + c
    return acc
