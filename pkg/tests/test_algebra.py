import math
import random
from fractions import Fraction

import mpmath
import pytest

from garsia.algebra import (
    Classification,
    FieldElement,
    IntPolynomial,
    RationalAngle,
    beta_powers,
    conjugate_profile,
    cyclotomic_divides,
    cyclotomic_polynomial,
    mul_by_beta,
    parse_polynomial,
    poly_eval_angles,
)
from garsia.errors import (
    EmptyInput,
    InvalidInput,
    NonPrimitive,
    ZeroConstantTerm,
    ZeroLeadingCoefficient,
    ZeroPolynomial,
)


def test_parse_example_polynomial():
    f = parse_polynomial("3,4,3,5")
    assert f.degree == 3
    assert f.constant == 5 and f.M == 5
    assert f.leading == 3
    assert f.ascending == (5, 3, 4, 3)


def test_parse_golden_and_whitespace():
    f = parse_polynomial(" 1, -1 ,-1 ")
    assert f.coeffs == (1, -1, -1)
    assert str(f) == "x^2 - x - 1"


@pytest.mark.parametrize("text, err", [
    ("2,4", NonPrimitive),
    ("5", EmptyInput),
    ("", EmptyInput),
    ("0,1", ZeroLeadingCoefficient),
    ("1,0", ZeroConstantTerm),
    ("1,x", InvalidInput),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_polynomial(text)


def test_divide_content():
    assert parse_polynomial("2,4", divide_content=True).coeffs == (1, 2)


def test_profile_example():
    p = conjugate_profile(parse_polynomial("3,4,3,5"))
    assert p.classification is Classification.ALL_OUTSIDE
    assert p.mahler_exact == 5
    assert len(p.roots) == 3


def test_profile_linear():
    p = conjugate_profile(parse_polynomial("2,-3"))
    assert p.classification is Classification.ALL_OUTSIDE
    assert p.mahler_exact == 3


def test_profile_golden_mixed():
    p = conjugate_profile(parse_polynomial("1,-1,-1"))
    assert p.classification is Classification.MIXED
    with mpmath.workprec(128):
        phi = (1 + mpmath.sqrt(5)) / 2
        assert abs(p.mahler - phi) < 1e-30
    assert p.mahler_error < mpmath.mpf(2) ** -60


def test_profile_all_inside():
    # roots of 5x^2 + 1 have modulus 1/sqrt(5); Mahler measure is |a_d|
    p = conjugate_profile(parse_polynomial("5,0,1"))
    assert p.classification is Classification.ALL_INSIDE
    assert p.mahler_exact == 5


def test_profile_unit_circle():
    p = conjugate_profile(parse_polynomial("1,0,1"))
    assert p.classification is Classification.UNIT_CIRCLE_SUSPECTED


def test_mul_by_beta_examples():
    g = parse_polynomial("1,-1,-1")
    assert mul_by_beta(FieldElement((0, 1)), g).coords == (1, 1)
    h = parse_polynomial("2,-3")
    assert mul_by_beta(FieldElement((1,)), h).coords == (Fraction(3, 2),)
    f = parse_polynomial("3,4,3,5")
    assert mul_by_beta(FieldElement((0, 0, 1)), f).coords == (Fraction(-5, 3), -1, Fraction(-4, 3))


@pytest.mark.parametrize("text", ["3,4,3,5", "2,-3", "1,-1,-1", "7,0,-2,3,1"])
def test_minimal_equation(text):
    f = parse_polynomial(text)
    powers = beta_powers(f, f.degree + 1)
    total = FieldElement.zero(f.degree)
    for a, p in zip(f.ascending, powers):
        total = total + p.scale(a)
    assert total.is_zero()


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(25) == (1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1)


def test_cyclotomic_divides_examples():
    assert cyclotomic_divides([1, 1, 1, 1, 1], 5)
    assert cyclotomic_divides([1, 1], 2)
    assert not cyclotomic_divides([1, 1], 4)
    assert cyclotomic_divides([1, 1, 1], 3)
    assert cyclotomic_divides([Fraction(1, 3)] * 3, 3)
    with pytest.raises(ZeroPolynomial):
        cyclotomic_divides([0, 0], 3)


def test_cyclotomic_divides_matches_numeric():
    rng = random.Random(7)
    for _ in range(60):
        q = rng.choice([2, 3, 4, 5, 6, 8, 9, 10, 12, 25])
        if rng.random() < 0.4:
            base = list(cyclotomic_polynomial(q))
            mult = [rng.randint(-3, 3) for _ in range(rng.randint(1, 30 - len(base) + 2))]
            if not any(mult):
                mult[0] = 1
            P = [0] * (len(base) + len(mult) - 1)
            for i, a in enumerate(base):
                for j, b in enumerate(mult):
                    P[i + j] += a * b
        else:
            P = [rng.randint(-5, 5) for _ in range(rng.randint(2, 31))]
            if not any(P):
                P[0] = 1
        with mpmath.workprec(256):
            small = all(abs(poly_eval_angles(P, mpmath.mpf(k) / q)) < mpmath.mpf(2) ** -100
                        for k in range(1, q) if math.gcd(k, q) == 1)
        assert cyclotomic_divides(P, q) == small


def test_angle_reduction_and_negation():
    a = RationalAngle(6, 10)
    assert (a.numerator, a.denominator) == (3, 5)
    assert str(-a) == "2/5"
    assert -(-a) == a
    assert -RationalAngle(0, 7) == RationalAngle(0, 1)
    assert str(RationalAngle(-1, 4)) == "3/4"


def test_angle_group_laws():
    rng = random.Random(3)
    for _ in range(100):
        a, b, c = (RationalAngle(rng.randint(-50, 50), rng.randint(1, 30)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert a - a == RationalAngle(0, 1)


def test_reversed_polynomial():
    assert IntPolynomial((3, 4, 3, 5)).reversed().coeffs == (5, 3, 4, 3)
