"""Classification of maximal-entropy measures when G_n is cyclic.

Under the cyclic isomorphism a character new at level m is a residue x mod
M^m with M not dividing x, and its pairing with beta^j is
x * Phi(beta^j) / M^m.  Since Phi(beta^j) is M^j times a unit, this angle has
weight m - j and only depends on x mod M^(m-j).  The characters killed by one
angle therefore form a residue class, and a zero set achieving complete
vanishing at level m is a choice of residue classes (of mixed depths) that
partition the new characters.  Requiring the set to be closed under negation
and minimal leaves exactly the negation-symmetric "antichains" of the tree of
residue classes, which is what :func:`enumerate_minimal_families` walks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import IntPolynomial, RationalAngle, conjugate_profile
from .errors import (
    CombinatorialBudgetExceeded,
    DenominatorNotMPower,
    InternalConsistencyError,
    InvalidInput,
    NotCyclic,
    WrongConjugateProfile,
)
from .group import CyclicIsomorphism, build_group
from .measure import FiniteMeasure, zero_angles
from .vanishing import interval_level_bound

DEFAULT_NODE_BUDGET = 10 ** 6


def angle_weight(theta: RationalAngle, M: int) -> int:
    """Least w >= 0 with M^w * theta integral."""
    if M < 2:
        raise InvalidInput("M must be >= 2")
    d = theta.denominator
    g = d
    while g != 1:
        # strip the primes shared with M; anything left is foreign to M
        g = math.gcd(d, M)
        while g != 1 and d % g == 0:
            d //= g
        if d != 1 and math.gcd(d, M) == 1:
            raise DenominatorNotMPower(f"denominator of {theta} does not divide a power of {M}")
    w = 0
    while (M ** w) % theta.denominator:
        w += 1
    return w


# -- cyclic structure ---------------------------------------------------------


def _require_cyclic(f: IntPolynomial) -> None:
    if f.M < 2:
        raise InvalidInput("classification needs |a_0| >= 2")
    if math.gcd(f.coefficient(0), f.coefficient(1)) != 1:
        raise NotCyclic(f"gcd(a_0, a_1) = {math.gcd(f.coefficient(0), f.coefficient(1))}: G_n is not cyclic")


@dataclass(frozen=True)
class CyclicLevel:
    """Phi(beta^j) = M^j * k_j (mod M^m) at a fixed level m."""

    M: int
    m: int
    t: int
    k: tuple[int, ...]

    @property
    def N(self) -> int:
        return self.M ** self.m

    def angle_of(self, x: int, j: int) -> RationalAngle:
        """<psi_x, beta^j> as an angle."""
        return RationalAngle(x * pow(self.t, j, self.N), self.N)

    def node_angle(self, w: int, c: int) -> RationalAngle:
        """Angle killing exactly the new characters x = c mod M^w, at step j = m - w."""
        return RationalAngle(c * self.k[self.m - w], self.M ** w)


@lru_cache(maxsize=None)
def cyclic_level(f: IntPolynomial, m: int) -> CyclicLevel:
    _require_cyclic(f)
    iso = CyclicIsomorphism.of(build_group(f, m))
    M, N = f.M, f.M ** m
    ks = []
    for j in range(m):
        tj = pow(iso.t, j, N)
        if tj % (M ** j):
            raise InternalConsistencyError(f"Phi(beta^{j}) = {tj} is not divisible by {M}^{j}")
        kj = (tj // M ** j) % (M ** (m - j))
        if math.gcd(kj, M) != 1:
            raise InternalConsistencyError(f"Phi(beta^{j}) / {M}^{j} is not a unit mod {M}")
        ks.append(kj)
    return CyclicLevel(M, m, iso.t, tuple(ks))


# -- kill cosets ----------------------------------------------------------------


@dataclass(frozen=True)
class KillCoset:
    angle: RationalAngle
    weight: int
    level: int
    step: int | None
    residue: int | None
    modulus: int
    characters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def to_json(self) -> dict:
        return {
            "angle": str(self.angle),
            "weight": self.weight,
            "level": self.level,
            "step": self.step,
            "residue": self.residue,
            "modulus": self.modulus,
            "size": len(self.characters),
        }


def _solve_linear(a: int, b: int, n: int) -> tuple[int, int] | None:
    """Solutions of a*x = b (mod n) as (x0, step), or None."""
    g = math.gcd(a, n)
    if b % g:
        return None
    step = n // g
    x0 = (b // g) * pow(a // g, -1, step) % step if step > 1 else 0
    return x0, step


def kill_coset(f: IntPolynomial, m: int, e: RationalAngle) -> KillCoset:
    """New characters x of G_m (Psi-parameters, M not dividing x) killed by e."""
    _require_cyclic(f)
    M = f.M
    w = angle_weight(e, M)
    if w > m:
        raise InvalidInput(f"angle {e} has weight {w} > level {m}")
    N = M ** m
    if w == 0:
        return KillCoset(e, 0, m, None, None, N, ())
    lvl = cyclic_level(f, m)
    j = m - w
    # x * t^j / M^m = a / M^w  (mod 1)  <=>  x * t^j = a * M^j  (mod M^m)
    a = e.numerator * (M ** w // e.denominator)
    sol = _solve_linear(pow(lvl.t, j, N), a * M ** j, N)
    if sol is None:
        return KillCoset(e, w, m, j, None, N, ())
    x0, step = sol
    xs = tuple(x for x in range(x0, N, step) if x % M)
    return KillCoset(e, w, m, j, x0, step, xs)


# -- families -------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroSetFamily:
    level: int
    angles: frozenset
    provenance: tuple[str, ...] = ()
    label: str = ""

    def __len__(self) -> int:
        return len(self.angles)

    def sorted_angles(self) -> list[RationalAngle]:
        return sorted(self.angles, key=lambda a: (a.denominator, a.numerator))

    def sort_key(self):
        return len(self.angles), [(a.denominator, a.numerator) for a in self.sorted_angles()]

    def issubset(self, zeros) -> bool:
        return all(a in zeros for a in self.angles)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "size": len(self.angles),
            "angles": [str(a) for a in self.sorted_angles()],
            "provenance": list(self.provenance),
        }


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise CombinatorialBudgetExceeded(f"family enumeration exceeded {self.limit} nodes")


def _orbits(classes, mod: int) -> list[tuple[int, ...]]:
    """Negation orbits of residue classes mod `mod`, each listed representative first."""
    seen, out = set(), []
    for c in classes:
        if c in seen:
            continue
        neg = (-c) % mod
        seen.update((c, neg))
        out.append((c,) if neg == c else (c, neg))
    return out


def _orbit_options(lvl: CyclicLevel, w: int, orbit: tuple[int, ...], max_size: int | None,
                   budget: _Budget) -> list[tuple[frozenset, tuple[str, ...]]]:
    """Every symmetric antichain covering the subtrees rooted at the classes in `orbit`."""
    M, m = lvl.M, lvl.m
    mod = M ** w
    budget.tick()
    take = frozenset(lvl.node_angle(w, c) for c in orbit)
    options = [(take, (f"take {'+-' if len(orbit) == 2 else ''}{orbit[0]} mod {mod}",))]
    if w == m:
        return options
    child_mod = mod * M
    kids = [orbit[0] + i * mod for i in range(M)]
    if len(orbit) == 2:
        # children of -c are the negations of the children of c
        child_orbits = [(c, (-c) % child_mod) for c in kids]
    else:
        child_orbits = _orbits(kids, child_mod)
    per_child = [_orbit_options(lvl, w + 1, o, max_size, budget) for o in child_orbits]
    partial = [(frozenset(), (f"split {orbit[0]} mod {mod}",))]
    for opts in per_child:
        nxt = []
        for (s, prov), (s2, prov2) in itertools.product(partial, opts):
            if max_size is not None and len(s) + len(s2) > max_size:
                continue
            budget.tick()
            nxt.append((s | s2, prov + prov2))
        partial = nxt
    options.extend(partial)
    return options


def _covers_level(f: IntPolynomial, angles: frozenset, m: int) -> bool:
    """Do the angles kill every character new at level m?"""
    lvl = cyclic_level(f, m)
    return all(
        any(lvl.angle_of(x, j) in angles for j in range(m))
        for x in range(lvl.N) if x % lvl.M
    )


def is_rescaled(family: ZeroSetFamily, M: int) -> bool:
    """No angle of weight one: the zero set only sees the measure through a coarser lattice."""
    return family.level > 1 and not any(a.denominator == M for a in family.angles)


def enumerate_minimal_families(f: IntPolynomial, m: int, include_rescaled: bool = False,
                               max_size: int | None = None,
                               node_budget: int = DEFAULT_NODE_BUDGET) -> list[ZeroSetFamily]:
    """Minimal negation-closed zero sets giving complete vanishing first at level m.

    Families that already contain a set achieving vanishing at a smaller
    level are dropped.  Unless ``include_rescaled`` is set, families without
    any weight-one angle are dropped as well; they come from a measure
    supported on a coarser lattice.  ``max_size`` prunes families with more
    angles than that.
    """
    if m < 1:
        raise InvalidInput("level m must be >= 1")
    lvl = cyclic_level(f, m)
    M = lvl.M
    budget = _Budget(node_budget)
    roots = _orbits(range(1, M), M)
    combos = [(frozenset(), ())]
    for orbit in roots:
        opts = _orbit_options(lvl, 1, orbit, max_size, budget)
        nxt = []
        for (s, prov), (s2, prov2) in itertools.product(combos, opts):
            if max_size is not None and len(s) + len(s2) > max_size:
                continue
            budget.tick()
            nxt.append((s | s2, prov + prov2))
        combos = nxt
    families = {}
    for angles, prov in combos:
        fam = ZeroSetFamily(m, angles, prov)
        if not include_rescaled and is_rescaled(fam, M):
            continue
        if any(_covers_level(f, frozenset(a for a in angles if angle_weight(a, M) <= lower), lower)
               for lower in range(1, m)):
            continue
        families.setdefault(angles, fam)
    out = sorted(families.values(), key=ZeroSetFamily.sort_key)
    if len(out) == 1:
        return [ZeroSetFamily(m, out[0].angles, out[0].provenance, f"E_{m}")]
    return [ZeroSetFamily(m, fam.angles, fam.provenance, f"E_{m}^({i})") for i, fam in enumerate(out, 1)]


def min_interval_for_level(M: int, m: int) -> int:
    """Shortest support interval on which complete vanishing at level m can first occur."""
    if M < 2 or m < 1:
        raise InvalidInput("need M >= 2 and m >= 1")
    if M % 2 == 0 and m >= 2:
        return (2 * m - 2) * (M - 1)
    return (2 * m - 1) * (M - 1)


def classify_interval(f: IntPolynomial, k: int, node_budget: int = DEFAULT_NODE_BUDGET) -> list[ZeroSetFamily]:
    """Zero-set families of maximal-entropy measures supported on {0, ..., k}.

    A nonzero polynomial of degree k has at most k roots on the circle, so
    families with more than k angles are skipped.
    """
    _require_cyclic(f)
    if k < 0:
        raise InvalidInput("support length must be >= 0")
    out = []
    m = 1
    while min_interval_for_level(f.M, m) <= k:
        out.extend(enumerate_minimal_families(f, m, max_size=k, node_budget=node_budget))
        m += 1
    return out


# -- measures -------------------------------------------------------------------


CERTIFICATE = (
    "complete vanishing at level {m}: the Garsia entropy of the measure equals log M = log {M}, "
    "its self-similar measure on the real line is absolutely continuous with bounded density, "
    "and its Fourier transform decays like a negative power of the frequency"
)


@dataclass
class Classification:
    family: ZeroSetFamily | None
    level: int | None
    m_max: int
    heuristic: bool
    certificate: str = ""
    zero_angles: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.family is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "level": self.level,
            "m_max": self.m_max,
            "family": None if self.family is None else self.family.to_json(),
            "certificate": self.certificate,
            "zero_angles": self.zero_angles,
            "heuristic": self.heuristic,
        }


def classify_measure(f: IntPolynomial, mu: FiniteMeasure, m_max: int | None = None,
                     node_budget: int = DEFAULT_NODE_BUDGET) -> Classification:
    """First family (lowest level, then enumeration order) inside the zero set of P_mu."""
    _require_cyclic(f)
    if not conjugate_profile(f).all_outside:
        raise WrongConjugateProfile("classification needs every conjugate of beta outside the unit circle")
    M = f.M
    if m_max is None:
        m_max = interval_level_bound(mu.interval_length, M)
    if m_max < 1:
        return Classification(None, None, m_max, not mu.exact)
    zeros = zero_angles(mu, M, m_max)
    listed = [str(a) for a in zeros.sorted()]
    for m in range(1, m_max + 1):
        for fam in enumerate_minimal_families(f, m, include_rescaled=True, node_budget=node_budget):
            if fam.issubset(zeros):
                return Classification(fam, m, m_max, zeros.heuristic, CERTIFICATE.format(m=m, M=M), listed)
    return Classification(None, None, m_max, zeros.heuristic, "", listed)
