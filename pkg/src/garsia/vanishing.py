"""Complete vanishing at level m and the checks built on it.

A character psi of G_m that is new at level m is *killed* when some angle
<psi, beta^k> with k < m is a zero angle of P_mu.  Complete vanishing at
level m means every new character is killed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .algebra import IntPolynomial, RationalAngle, conjugate_profile
from .entropy import DEFAULT_ATOM_BUDGET, ZERO_ENTROPY, distribution_Yn
from .errors import (
    EquivalenceViolation,
    InvalidInput,
    NoBoundAvailable,
    VanishingNotVerified,
    WrongConjugateProfile,
)
from .group import Character, FiniteAbelianGroup, build_group
from .measure import FiniteMeasure, ZeroAngleSet, zero_angles

CHUNK = 1 << 16

ENTROPY_TOL_EXACT = 1e-9
ENTROPY_TOL_NUMERIC_PER_LEVEL = 1e-12


@dataclass(frozen=True)
class Witness:
    character: tuple[int, ...]
    k: int
    angle: RationalAngle


@dataclass
class VanishingReport:
    level: int
    verdict: bool
    new_characters: int
    witnesses: list[Witness] = field(default_factory=list)
    unkilled: tuple[int, ...] | None = None
    heuristic: bool = False

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "verdict": self.verdict,
            "new_characters": self.new_characters,
            "witnesses": [
                {"character": list(w.character), "k": w.k, "angle": str(w.angle)} for w in self.witnesses
            ],
            "unkilled": None if self.unkilled is None else list(self.unkilled),
            "heuristic": self.heuristic,
        }


def _zero_mask(G: FiniteAbelianGroup, zeros: ZeroAngleSet) -> np.ndarray:
    """mask[a] is True iff a / exponent is a zero angle."""
    E = G.exponent
    mask = np.zeros(E, dtype=bool)
    for a in zeros.angles:
        if E % a.denominator == 0:
            mask[a.numerator * (E // a.denominator)] = True
    return mask


def _pairing_numerators(G: FiniteAbelianGroup, coords: np.ndarray, k: int) -> np.ndarray:
    """Numerators of <psi, beta^k> over G.exponent for a block of characters."""
    E = G.exponent
    b = G.beta_powers[k]
    weights = [b.coords[i] * (E // G.invariants[i]) % E for i in G.active]
    dtype = np.int64 if E * E * max(len(weights), 1) < 2 ** 62 else object
    w = np.array(weights, dtype=dtype)
    return (coords.astype(dtype) @ w) % E


def scan_vanishing(G: FiniteAbelianGroup, zeros: ZeroAngleSet, full_witnesses: bool = False) -> VanishingReport:
    """Scan the characters of G new at its level, lexicographically, in chunks."""
    m = G.n
    report = VanishingReport(m, True, G.count_new_characters(), heuristic=zeros.heuristic)
    if G.order == 1:
        return report
    mask = _zero_mask(G, zeros)
    E = G.exponent
    table = G._coord_table()
    for start in range(0, G.order, CHUNK):
        block = table[start:start + CHUNK]
        nums = [_pairing_numerators(G, block, k) for k in range(m)]
        new = nums[m - 1] != 0
        killed_at = np.full(len(block), -1, dtype=np.int64)
        for k in range(m - 1, -1, -1):
            hit = mask[nums[k].astype(np.int64)]
            killed_at[hit] = k
        bad = np.flatnonzero(new & (killed_at < 0))
        if full_witnesses:
            for i in np.flatnonzero(new & (killed_at >= 0)):
                k = int(killed_at[i])
                report.witnesses.append(Witness(
                    G.character_at(start + int(i)).coords, k, RationalAngle(int(nums[k][i]), E)))
        if len(bad):
            report.verdict = False
            report.unkilled = G.character_at(start + int(bad[0])).coords
            return report
    return report


def is_complete_vanishing(f: IntPolynomial, mu: FiniteMeasure, m: int, full_witnesses: bool = False,
                          zeros: ZeroAngleSet | None = None, check_profile: bool = True) -> VanishingReport:
    if m < 1:
        raise InvalidInput("level m must be >= 1")
    if check_profile:
        profile = conjugate_profile(f)
        if not profile.all_outside:
            raise WrongConjugateProfile(
                f"complete vanishing needs every conjugate of beta outside the unit circle, got {profile.classification.value}")
    G = build_group(f, m)
    if zeros is None or zeros.max_level < m:
        zeros = zero_angles(mu, f.M, m) if f.M > 1 else ZeroAngleSet(frozenset(), f.M, m)
    return scan_vanishing(G, zeros, full_witnesses)


def interval_level_bound(interval_length: int, M: int) -> int:
    """Default search ceiling: floor((|I|/(M-1) + 1)/2) for M odd, floor(|I|/(2(M-1)) + 1) for M even."""
    if M < 2:
        raise InvalidInput("M must be >= 2")
    if interval_length < 0:
        raise InvalidInput("interval length must be >= 0")
    if M % 2:
        return (interval_length + M - 1) // (2 * (M - 1))
    return interval_length // (2 * (M - 1)) + 1


def search_vanishing(f: IntPolynomial, mu: FiniteMeasure, m_max: int | None = None) -> int | None:
    """Smallest m <= m_max with complete vanishing, or None."""
    if m_max is None:
        if math.gcd(f.coefficient(0), f.coefficient(1)) != 1:
            raise NoBoundAvailable("gcd(a_0, a_1) != 1: supply m_max explicitly")
        if f.M < 2:
            return 1
        m_max = interval_level_bound(mu.interval_length, f.M)
    if m_max < 1:
        return None
    zeros = zero_angles(mu, f.M, m_max) if f.M > 1 else None
    for m in range(1, m_max + 1):
        if is_complete_vanishing(f, mu, m, zeros=zeros).verdict:
            return m
    return None


# -- three-way equivalence ----------------------------------------------------


@dataclass
class CharequiResult:
    level: int
    entropy_cond: bool
    equidist_cond: bool
    character_cond: bool
    entropy_step: mpmath.mpf
    log_M: mpmath.mpf
    max_fiber_deviation: float
    max_new_character_sum: float
    unkilled: tuple[int, ...] | None
    heuristic: bool

    @property
    def agree(self) -> bool:
        return self.entropy_cond == self.equidist_cond == self.character_cond

    def as_tuple(self) -> tuple[bool, bool, bool]:
        return self.entropy_cond, self.equidist_cond, self.character_cond

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "entropy_cond": self.entropy_cond,
            "equidist_cond": self.equidist_cond,
            "character_cond": self.character_cond,
            "entropy_step_nats": mpmath.nstr(self.entropy_step, 20),
            "log_M": mpmath.nstr(self.log_M, 20),
            "max_fiber_deviation": self.max_fiber_deviation,
            "max_new_character_sum": self.max_new_character_sum,
            "unkilled": None if self.unkilled is None else list(self.unkilled),
            "heuristic": self.heuristic,
        }


def _character_sums(Y) -> np.ndarray:
    """E[psi(Y)] for every psi, indexed like the characters of Y.group."""
    arr = Y.flat()
    vals = np.array([float(x) for x in arr], dtype=np.float64) if arr.dtype == object else arr.astype(np.float64)
    vals = vals.reshape(Y.group.shape) / float(Y.denominator)
    return np.fft.fftn(vals).reshape(-1)


def charequi_check(f: IntPolynomial, mu: FiniteMeasure, n: int,
                   budget: int = DEFAULT_ATOM_BUDGET, strict: bool = True) -> CharequiResult:
    """Evaluate the entropy, fiber and character conditions independently at level n."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    M = f.M
    Gn = build_group(f, n)
    Yn = distribution_Yn(f, mu, n, budget, group=Gn)
    if n > 1:
        Gm = build_group(f, n - 1)
        Ym = distribution_Yn(f, mu, n - 1, budget, group=Gm)
        h_prev = Ym.entropy()
        fiber_of = Gn.projection_indices(Gm)
        # same denominator as Y_n, unlike the independently computed Ym
        lower_flat = Yn.pushforward(Gm).flat()
    else:
        h_prev = ZERO_ENTROPY
        fiber_of = np.zeros(Gn.order, dtype=np.int64)
        total = Yn.denominator if mu.exact else mpmath.mpf(1)
        lower_flat = np.array([total], dtype=object)
    step = Yn.entropy() - h_prev
    log_M = mpmath.log(M)
    tol = ENTROPY_TOL_EXACT if mu.exact else ENTROPY_TOL_NUMERIC_PER_LEVEL * n
    entropy_cond = abs(step.value - log_M) <= tol + step.error

    # fibers: M * P(Y_n = y) == P(Y_{n-1} = pi(y)) for every y
    upper = Yn.flat()
    target = lower_flat[fiber_of]
    if mu.exact:
        dev_num = max(abs(int(u) * M - int(t)) for u, t in zip(upper.tolist(), target.tolist()))
        max_dev = dev_num / (Yn.denominator * M)
        equidist_cond = dev_num == 0
    else:
        with mpmath.workprec(mu.bits):
            diffs = [abs(u * M - t) for u, t in zip(upper.tolist(), target.tolist())]
            max_dev = float(max(diffs, default=0)) / M
        equidist_cond = max_dev < 2.0 ** -(mu.bits // 2)

    # characters: every new character has a factor P_mu(psi(beta^k)) = 0
    zeros = zero_angles(mu, M, n) if M > 1 else ZeroAngleSet(frozenset(), M, n)
    report = scan_vanishing(Gn, zeros)
    character_cond = report.verdict

    max_sum = 0.0
    if Gn.order > 1:
        sums = np.abs(_character_sums(Yn))
        new = _pairing_numerators(Gn, Gn._coord_table(), n - 1) != 0
        max_sum = float(sums[new].max()) if new.any() else 0.0

    result = CharequiResult(n, bool(entropy_cond), bool(equidist_cond), bool(character_cond),
                            step.value, log_M, max_dev, max_sum, report.unkilled, zeros.heuristic)
    if strict and not result.agree:
        raise EquivalenceViolation(f"conditions disagree at level {n}: {result.as_tuple()}")
    return result


# -- spectrum -----------------------------------------------------------------


@dataclass
class SpectrumSupport:
    level: int
    vanishing_level: int
    characters: list[Character]
    magnitudes: list[float]
    threshold: float

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "vanishing_level": self.vanishing_level,
            "threshold": self.threshold,
            "support": [
                {"character": list(c.coords), "magnitude": m} for c, m in zip(self.characters, self.magnitudes)
            ],
        }


def spectrum_support(f: IntPolynomial, mu: FiniteMeasure, n: int, m: int, threshold: float = 1e-9,
                     budget: int = DEFAULT_ATOM_BUDGET) -> SpectrumSupport:
    """Characters psi of G_n with |E[psi(Y_n)]| > threshold.

    Given complete vanishing at level m <= n, every such psi is trivial on
    beta^(m-1) Z[beta] / beta^n Z[beta], i.e. lies in the dual of G_{m-1}.
    """
    if not 1 <= m <= n:
        raise InvalidInput("need 1 <= m <= n")
    # a statement about the finite group only, so no conjugate profile check
    if not is_complete_vanishing(f, mu, m, check_profile=False).verdict:
        raise VanishingNotVerified(f"no complete vanishing at level {m}")
    G = build_group(f, n)
    Y = distribution_Yn(f, mu, n, budget, group=G)
    if G.order == 1:
        return SpectrumSupport(n, m, [G.character([0] * n)], [1.0], threshold)
    sums = np.abs(_character_sums(Y))
    idx = np.flatnonzero(sums > threshold)
    chars = [G.character_at(int(i)) for i in idx]
    for psi in chars:
        for j in range(m - 1, n):
            if G.pairing_numerator(psi, G.beta_powers[j]):
                raise EquivalenceViolation(
                    f"character {psi.coords} has |E psi(Y_{n})| > {threshold} but is nontrivial on beta^{j}")
    return SpectrumSupport(n, m, chars, [float(sums[i]) for i in idx], threshold)
