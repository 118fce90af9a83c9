import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conftest import random_measure
from garsia.algebra import FieldElement, beta_powers, conjugate_profile, parse_polynomial
from garsia.entropy import (
    bound_schedule,
    conditional_entropy_step,
    distribution_Xn,
    distribution_Yn,
    entropy_from_weights,
    entropy_Yn,
    iter_distribution_Xn,
    sum_distribution,
)
from garsia.errors import AtomBudgetExceeded, InvalidInput
from garsia.group import build_group
from garsia.measure import FiniteMeasure

LOG2, LOG3, LOG5 = math.log(2), math.log(3), math.log(5)


def brute_force_Xn(f, mu, n):
    """Law of sum xi_j beta^j by enumerating every tuple."""
    powers = beta_powers(f, n)
    law = Counter()
    for tup in itertools.product(sorted(mu.atoms.items()), repeat=n):
        x = FieldElement.zero(f.degree)
        p = Fraction(1)
        for (a, w), b in zip(tup, powers):
            x = x + b.scale(a)
            p *= w
        law[x] += p
    return dict(law)


def plain_entropy(probs):
    return -sum(float(p) * math.log(float(p)) for p in probs if p)


def test_dyadic_x3(bernoulli):
    D = distribution_Xn(parse_polynomial("1,-2"), bernoulli, 3)
    assert D.atom_count == 8
    assert set(D.as_dict().values()) == {Fraction(1, 8)}
    assert D.entropy().close_to(3 * LOG2, 1e-15)


def test_golden_x3_collisions(golden_poly, bernoulli):
    D = distribution_Xn(golden_poly, bernoulli, 3)
    assert D.atom_count == 7
    law = D.as_dict()
    # beta^2 = beta + 1, so beta + beta^2 and 1 + ... collide on this atom
    assert law[FieldElement((1, 1))] == Fraction(1, 4)
    with mpmath.workprec(128):
        assert abs(D.entropy().value - mpmath.mpf(11) / 4 * mpmath.log(2)) < 1e-30


def test_three_halves_x4(three_halves):
    D = distribution_Xn(three_halves, FiniteMeasure.uniform([0, 1, 2]), 4)
    assert D.atom_count == 81
    assert D.entropy().close_to(4 * LOG3, 1e-14)


@pytest.mark.parametrize("text", ["3,4,3,5", "2,-3", "1,-1,-1", "2,2,3,4"])
def test_xn_matches_brute_force(text):
    f = parse_polynomial(text)
    rng = random.Random(hash(text) % 1000)
    for _ in range(4):
        mu = random_measure(rng, max_support=4, span=6)
        for n in (1, 2, 3, 4):
            expected = brute_force_Xn(f, mu, n)
            assert distribution_Xn(f, mu, n).as_dict() == expected


def test_iter_distribution_matches_single_calls(example_poly, uniform5):
    for D in iter_distribution_Xn(example_poly, uniform5, 4):
        assert D.as_dict() == distribution_Xn(example_poly, uniform5, D.n).as_dict()


def test_xn_budget(example_poly, uniform5):
    with pytest.raises(AtomBudgetExceeded):
        distribution_Xn(example_poly, uniform5, 5, budget=1000)
    with pytest.raises(InvalidInput):
        distribution_Xn(example_poly, uniform5, 0)


def test_yn_examples(example_poly, three_halves, golden_poly, uniform5):
    Y = distribution_Yn(example_poly, uniform5, 2)
    assert Y.atom_count == 25
    assert set(Y.as_dict().values()) == {Fraction(1, 25)}
    Z = distribution_Yn(three_halves, FiniteMeasure.uniform([0, 1, 2]), 3)
    assert Z.group.order == 27 and set(Z.as_dict().values()) == {Fraction(1, 27)}
    for n in (1, 3):
        T = distribution_Yn(golden_poly, random_measure(random.Random(n)), n)
        assert T.atom_count == 1 and T.entropy().value == 0


def test_yn_is_image_of_xn():
    rng = random.Random(11)
    for text in ("3,4,3,5", "2,-3", "2,2,3,4", "1,0,6"):
        f = parse_polynomial(text)
        for n in (1, 2, 3):
            mu = random_measure(rng, max_support=4, span=8)
            G = build_group(f, n)
            expected = Counter()
            for tup in itertools.product(sorted(mu.atoms.items()), repeat=n):
                g = G.embed([a for a, _ in tup])
                expected[g] += math.prod(w for _, w in tup)
            got = distribution_Yn(f, mu, n, group=G).as_dict()
            assert got == {g: p for g, p in expected.items() if p}


def test_pushforward_matches_lower_level(example_poly):
    mu = random_measure(random.Random(5))
    Y3 = distribution_Yn(example_poly, mu, 3)
    Y2 = distribution_Yn(example_poly, mu, 2)
    assert Y3.pushforward(Y2.group).as_dict() == Y2.as_dict()


def test_entropy_basic():
    assert entropy_from_weights([1] * 5, 5).close_to(LOG5, 1e-15)
    assert entropy_from_weights([7], 7).value == 0
    w = np.array([3, 1, 1, 1, 2], dtype=np.int64)
    assert entropy_from_weights(w, 8).close_to(plain_entropy([3 / 8, 1 / 8, 1 / 8, 1 / 8, 2 / 8]), 1e-14)


def test_entropy_float_path_matches_high_precision():
    # many distinct weights force the float64 path
    rng = np.random.default_rng(3)
    w = rng.integers(1, 10 ** 6, size=20000)
    D = int(w.sum())
    h = entropy_from_weights(w, D)
    with mpmath.workprec(128):
        ref = -mpmath.fsum(mpmath.mpf(int(x)) / D * mpmath.log(mpmath.mpf(int(x)) / D) for x in w)
    assert abs(h.value - ref) <= h.error
    assert h.error < 1e-12


def test_entropy_within_log_atoms():
    rng = random.Random(8)
    f = parse_polynomial("3,4,3,5")
    for _ in range(10):
        mu = random_measure(rng, max_support=5)
        for D in iter_distribution_Xn(f, mu, 4):
            h = D.entropy()
            assert -h.error <= h.value <= math.log(D.atom_count) + h.error


def test_conditional_step_examples(example_poly, golden_poly, uniform5, bernoulli, golden_measure):
    assert conditional_entropy_step(example_poly, uniform5, 2).close_to(LOG5, 1e-12)
    assert conditional_entropy_step(golden_poly, bernoulli, 3).value == 0
    step = conditional_entropy_step(example_poly, golden_measure, 3)
    with mpmath.workprec(256):
        assert abs(step.value - mpmath.log(5)) < 1e-12


def test_conditional_step_never_exceeds_log_m():
    rng = random.Random(21)
    for text in ("3,4,3,5", "2,-3", "2,2,3,4"):
        f = parse_polynomial(text)
        for _ in range(5):
            mu = random_measure(rng, max_support=5)
            for n in (1, 2, 3):
                s = conditional_entropy_step(f, mu, n)
                assert s.value <= math.log(f.M) + s.error + 1e-12


def test_schedule_examples(bernoulli, three_halves, example_poly, uniform5):
    S = bound_schedule(parse_polynomial("1,-2"), bernoulli, 6)
    assert S.lower_valid and len(S.rows) == 6
    for r in S.rows:
        assert abs(r.lower_rate - LOG2) < 1e-12 and abs(r.upper_rate - LOG2) < 1e-12
    S = bound_schedule(three_halves, FiniteMeasure.uniform([0, 1, 2]), 5)
    for r in S.rows:
        assert abs(r.lower_rate - LOG3) < 1e-12 and abs(r.upper_rate - LOG3) < 1e-12
    S = bound_schedule(example_poly, uniform5, 5)
    uppers = [r.upper_rate for r in S.rows]
    for r in S.rows:
        assert abs(r.lower_rate - LOG5) < 1e-12 and r.upper_rate >= LOG5 - 1e-12
    assert all(b <= a + 1e-12 for a, b in zip(uppers, uppers[1:]))


def test_schedule_flags_and_csv(golden_poly, bernoulli):
    S = bound_schedule(golden_poly, bernoulli, 4)
    assert not S.lower_valid
    text = S.to_csv().splitlines()
    assert text[0].startswith("n,lower_nats,upper_nats,gap,atoms_X,atoms_Y,lower_valid")
    assert len(text) == 5 and text[1].split(",")[6] == "false"


def test_schedule_skips_rows_over_budget(example_poly, uniform5):
    S = bound_schedule(example_poly, uniform5, 8, budget=3000)
    assert [r.n for r in S.rows] == [1, 2, 3, 4]


def test_golden_x_rate_decreasing(golden_poly, bernoulli):
    rates = [D.entropy().value / D.n for D in iter_distribution_Xn(golden_poly, bernoulli, 16)]
    assert all(b < a for a, b in zip(rates[2:], rates[3:]))


@pytest.mark.parametrize("text", ["3,4,3,5", "2,-3", "2,2,3,4"])
def test_sub_and_super_additivity(text):
    f = parse_polynomial(text)
    rng = random.Random(len(text))
    for _ in range(3):
        mu = random_measure(rng, max_support=3, span=5)
        HX = {D.n: D.entropy() for D in iter_distribution_Xn(f, mu, 5)}
        HY = {n: entropy_Yn(f, mu, n) for n in range(1, 7)}
        for n in range(1, 6):
            for m in range(1, 7 - n):
                tol = HY[n].error + HY[m].error + HY[n + m].error + 1e-12
                assert HY[n + m].value >= HY[n].value + HY[m].value - tol
                if n + m <= 5:
                    tol = HX[n].error + HX[m].error + HX[n + m].error + 1e-12
                    assert HX[n + m].value <= HX[n].value + HX[m].value + tol
        for n in range(1, 6):
            assert HY[n].value <= HX[n].value + 1e-12


def test_information_gain_instance():
    # U = sum_{j<n} xi_j beta^j, V = sum_{n<=j<n+m} xi_j beta^j in G_{n+m};
    # Z has the law of Y_m.  H(U + V) >= H(U mod beta^n) + H(Z).
    rng = random.Random(4)
    for text in ("3,4,3,5", "2,-3", "1,0,6"):
        f = parse_polynomial(text)
        for n, m in ((1, 1), (1, 2), (2, 1), (2, 2)):
            mu = random_measure(rng, max_support=4, span=7)
            G = build_group(f, n + m)
            whole = sum_distribution(G, mu, list(range(n + m))).entropy()
            U = sum_distribution(build_group(f, n), mu, list(range(n))).entropy()
            Z = entropy_Yn(f, mu, m)
            assert whole.value >= U.value + Z.value - 1e-12


@pytest.mark.parametrize("text, support", [
    ("1,-2", [0, 1]),
    ("1,-1,-1", [0, 1]),
    ("2,-3", [0, 1, 2]),
    ("3,4,3,5", [0, 1, 2, 3, 4]),
    ("3,4,3,5", [0, 2, 3]),
    ("2,-3", [0, 1]),
])
def test_support_growth(text, support):
    f = parse_polynomial(text)
    mahler = float(conjugate_profile(f).mahler)
    D = distribution_Xn(f, FiniteMeasure.uniform(support), 8)
    assert math.log(D.atom_count) / 8 <= math.log(mahler) + 0.15
