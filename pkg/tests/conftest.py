import random
from fractions import Fraction

import pytest

from garsia.algebra import parse_polynomial
from garsia.measure import FiniteMeasure, golden_ratio_measure

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def example_poly():
    return parse_polynomial("3,4,3,5")


@pytest.fixture(scope="session")
def golden_poly():
    return parse_polynomial("1,-1,-1")


@pytest.fixture(scope="session")
def three_halves():
    return parse_polynomial("2,-3")


@pytest.fixture(scope="session")
def bernoulli():
    return FiniteMeasure.uniform([0, 1])


@pytest.fixture(scope="session")
def uniform5():
    return FiniteMeasure.uniform(range(5))


@pytest.fixture(scope="session")
def uniform4():
    return FiniteMeasure.uniform(range(4))


@pytest.fixture(scope="session")
def golden_measure():
    return golden_ratio_measure(256)


def random_measure(rng: random.Random, max_support=8, max_denominator=60, span=10, equidistribute_mod=None):
    """Rational measure with at most max_support atoms and a common denominator <= max_denominator.

    With ``equidistribute_mod = q`` the measure puts mass 1/q on every residue
    class mod q (support <= max_support requires q <= max_support).
    """
    if equidistribute_mod:
        q = equidistribute_mod
        atoms = {}
        for r in range(q):
            atoms[r + q * rng.randrange(0, 3)] = Fraction(1, q)
        return FiniteMeasure(atoms)
    size = rng.randint(1, max_support)
    support = rng.sample(range(span + 1), size)
    Q = rng.randint(size, max_denominator)
    cuts = sorted(rng.sample(range(1, Q), size - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [Q])]
    return FiniteMeasure({a: Fraction(p, Q) for a, p in zip(support, parts)})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")
