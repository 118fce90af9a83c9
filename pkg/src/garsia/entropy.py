"""Exact laws of X'_n and Y_n, Shannon entropies and the bound schedule.

X'_n = sum_{j<n} xi_j beta^j lives in Q(beta).  Atoms are kept as integer
coordinate vectors over the fixed denominator a_d^(n-1), which makes atom
identity a plain tuple (or array row) comparison.  Y_n is the image of X'_n
in G_n and is stored as a dense array over the group.

Exact measures carry integer weights over the denominator Q^n, where Q is
the common denominator of the measure; numeric measures carry mpf weights.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import mpmath
import numpy as np

from .algebra import FieldElement, IntPolynomial, conjugate_profile
from .errors import AtomBudgetExceeded, InvalidInput
from .group import FiniteAbelianGroup, build_group
from .measure import FiniteMeasure

DEFAULT_ATOM_BUDGET = 2 ** 26
ENTROPY_PREC = 128
_INT64_SAFE = 2 ** 62
_MP_DISTINCT_LIMIT = 4096
_U = 2.0 ** -53


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in nats with an absolute error bound."""

    value: mpmath.mpf
    error: mpmath.mpf

    def __float__(self) -> float:
        return float(self.value)

    @property
    def bits(self) -> float:
        return float(self.value / mpmath.log(2))

    def __sub__(self, other: "EntropyValue") -> "EntropyValue":
        return EntropyValue(self.value - other.value, self.error + other.error)

    def __add__(self, other: "EntropyValue") -> "EntropyValue":
        return EntropyValue(self.value + other.value, self.error + other.error)

    def close_to(self, x, tol: float) -> bool:
        return abs(self.value - x) <= tol + self.error


ZERO_ENTROPY = EntropyValue(mpmath.mpf(0), mpmath.mpf(0))


def _weight_setup(mu: FiniteMeasure):
    """(atom, weight) pairs and the per-step denominator."""
    if mu.exact:
        w, Q = mu.integer_weights()
        return sorted(w.items()), Q
    return sorted(mu.atoms.items()), 1


def entropy_from_weights(weights, denominator: int = 1, exact: bool = True, bits: int = 256) -> EntropyValue:
    """-sum p log p for p = weight / denominator.

    Exact integer weights with few distinct values are summed at 128 bits;
    otherwise float64 is used and the returned error bound covers it.
    Numeric (mpf) weights are summed at their own precision.
    """
    if isinstance(weights, np.ndarray):
        weights = weights.ravel()
        nz = weights[weights != 0]
    else:
        nz = [w for w in weights if w != 0]
    if len(nz) <= 1:
        return ZERO_ENTROPY
    if not exact:
        with mpmath.workprec(bits):
            total = mpmath.mpf(0)
            for w in nz:
                total -= w * mpmath.log(w)
            err = mpmath.mpf(2) ** (-bits + 8) * len(nz) * (1 + abs(total))
            return EntropyValue(+total, err)
    if isinstance(nz, np.ndarray) and nz.dtype != object:
        vals, counts = np.unique(nz, return_counts=True)
        pairs = zip(vals.tolist(), counts.tolist())
        distinct = len(vals)
    else:
        c = Counter(int(w) for w in nz)
        pairs = c.items()
        distinct = len(c)
    if distinct <= _MP_DISTINCT_LIMIT or max(int(w) for w in (nz.tolist() if isinstance(nz, np.ndarray) else nz)) >= 2 ** 53:
        with mpmath.workprec(ENTROPY_PREC):
            D = mpmath.mpf(denominator)
            acc = mpmath.mpf(0)
            for w, cnt in pairs:
                acc += cnt * w * mpmath.log(w)
            value = mpmath.log(D) - acc / D
            err = mpmath.mpf(2) ** (-ENTROPY_PREC + 16) * (distinct + abs(value) + 1)
            return EntropyValue(value, err)
    p = np.asarray(nz, dtype=np.float64) / float(denominator)
    h = -math.fsum((p * np.log(p)).tolist())
    err = 8 * _U * (1 + 2 * h)
    return EntropyValue(mpmath.mpf(h), mpmath.mpf(err))


# -- X'_n ---------------------------------------------------------------------


class AtomDistribution:
    """Finitely supported law; subclasses fix the atom type."""

    exact: bool
    denominator: int

    @property
    def atom_count(self) -> int:
        raise NotImplementedError

    def entropy(self) -> EntropyValue:
        raise NotImplementedError


class FieldDistribution(AtomDistribution):
    """Law of sum_{j<n} xi_j beta^j; atom = keys / a_d^(n-1) coordinatewise."""

    def __init__(self, f: IntPolynomial, n: int, keys, weights, denominator: int, exact: bool, bits: int):
        self.f, self.n = f, n
        self.keys = keys  # (N, d) int64 array or list of int tuples
        self.weights = weights
        self.denominator = denominator
        self.exact = exact
        self.bits = bits

    @property
    def atom_count(self) -> int:
        return len(self.weights)

    @property
    def scale(self) -> int:
        return self.f.leading ** (self.n - 1)

    def entropy(self) -> EntropyValue:
        return entropy_from_weights(self.weights, self.denominator, self.exact, self.bits)

    def items(self) -> Iterator[tuple[FieldElement, object]]:
        """(atom, probability) pairs with exact Fraction atoms."""
        s = self.scale
        keys = self.keys.tolist() if isinstance(self.keys, np.ndarray) else self.keys
        ws = self.weights.tolist() if isinstance(self.weights, np.ndarray) else self.weights
        for k, w in zip(keys, ws):
            p = Fraction(int(w), self.denominator) if self.exact else w
            yield FieldElement(tuple(Fraction(int(c), s) for c in k)), p

    def as_dict(self) -> dict:
        return dict(self.items())


def _x_step_dict(state: dict, f: IntPolynomial, s: int, atoms, budget: int) -> dict:
    d = f.degree
    ad = f.leading
    low = f.ascending[:d]
    lift = ad ** (s + 1)
    out: dict = {}
    for v, w in state.items():
        top = v[-1]
        base = [ad * x for x in (0,) + v[:-1]]
        if top:
            base = [b - top * c for b, c in zip(base, low)]
        b0 = base[0]
        for a, wa in atoms:
            base[0] = b0 + a * lift
            key = tuple(base)
            out[key] = out.get(key, 0) + w * wa
        if len(out) > budget:
            raise AtomBudgetExceeded(f"more than {budget} atoms")
    return out


def _x_step_numpy(keys: np.ndarray, weights: np.ndarray, f: IntPolynomial, s: int, atoms, budget: int):
    d = f.degree
    ad = f.leading
    low = np.array(f.ascending[:d], dtype=np.int64)
    shifted = np.zeros_like(keys)
    shifted[:, 1:] = keys[:, :-1]
    base = ad * shifted - keys[:, d - 1:d] * low[None, :]
    if len(keys) * len(atoms) > 4 * budget:
        raise AtomBudgetExceeded(f"more than {budget} atoms")
    lift = ad ** (s + 1)
    blocks, wblocks = [], []
    for a, wa in atoms:
        b = base.copy()
        b[:, 0] += a * lift
        blocks.append(b)
        wblocks.append(weights * wa)
    allk = np.concatenate(blocks)
    allw = np.concatenate(wblocks)
    uniq, inv = np.unique(allk, axis=0, return_inverse=True)
    out = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(out, inv.ravel(), allw)
    if len(uniq) > budget:
        raise AtomBudgetExceeded(f"more than {budget} atoms")
    return uniq, out


def iter_distribution_Xn(f: IntPolynomial, mu: FiniteMeasure, n_max: int,
                         budget: int = DEFAULT_ATOM_BUDGET) -> Iterator[FieldDistribution]:
    """Yield the laws of X'_1, X'_2, ..., X'_{n_max} by Horner convolution.

    Step: D_{k+1}(beta x + a) += D_k(x) mu(a).
    """
    atoms, Q = _weight_setup(mu)
    d, ad = f.degree, f.leading
    low_max = max(abs(c) for c in f.ascending[:d])
    amax = max(abs(a) for a, _ in atoms)
    coord_bound = amax
    weight_bound = Q
    use_np = mu.exact
    if use_np:
        keys = np.zeros((len(atoms), d), dtype=np.int64)
        keys[:, 0] = [a for a, _ in atoms]
        weights = np.array([w for _, w in atoms], dtype=np.int64)
    else:
        state = {(a,) + (0,) * (d - 1): w for a, w in atoms}
    if len(atoms) > budget:
        raise AtomBudgetExceeded(f"more than {budget} atoms")
    for n in range(1, n_max + 1):
        if n > 1:
            s = n - 2
            coord_bound = (abs(ad) + low_max) * coord_bound + amax * abs(ad) ** (s + 1)
            weight_bound *= Q
            if use_np and (coord_bound >= _INT64_SAFE or weight_bound >= _INT64_SAFE):
                use_np = False
                state = {tuple(k): int(w) for k, w in zip(keys.tolist(), weights.tolist())}
            if use_np:
                keys, weights = _x_step_numpy(keys, weights, f, s, atoms, budget)
            else:
                state = _x_step_dict(state, f, s, atoms, budget)
        denom = Q ** n
        if use_np:
            yield FieldDistribution(f, n, keys, weights, denom, mu.exact, mu.bits)
        else:
            yield FieldDistribution(f, n, list(state), list(state.values()), denom, mu.exact, mu.bits)


def distribution_Xn(f: IntPolynomial, mu: FiniteMeasure, n: int,
                    budget: int = DEFAULT_ATOM_BUDGET) -> FieldDistribution:
    if n < 1:
        raise InvalidInput("n must be >= 1")
    for D in iter_distribution_Xn(f, mu, n, budget):
        pass
    return D


# -- Y_n ----------------------------------------------------------------------


class GroupDistribution(AtomDistribution):
    """Law on G_n as a dense array indexed like ``group.element_at``."""

    def __init__(self, group: FiniteAbelianGroup, array: np.ndarray, denominator: int, exact: bool, bits: int):
        self.group = group
        self.array = array
        self.denominator = denominator
        self.exact = exact
        self.bits = bits

    @property
    def atom_count(self) -> int:
        return int(np.count_nonzero(self.array != 0))

    def entropy(self) -> EntropyValue:
        return entropy_from_weights(self.array, self.denominator, self.exact, self.bits)

    def flat(self) -> np.ndarray:
        return self.array.reshape(-1)

    def probability(self, g) -> object:
        w = self.flat()[self.group.index_of(g)]
        return Fraction(int(w), self.denominator) if self.exact else w

    def items(self):
        flat = self.flat()
        for idx in np.flatnonzero(flat != 0):
            w = flat[idx]
            p = Fraction(int(w), self.denominator) if self.exact else w
            yield self.group.element_at(int(idx)), p

    def as_dict(self) -> dict:
        return dict(self.items())

    def pushforward(self, lower: FiniteAbelianGroup) -> "GroupDistribution":
        """Law of pi(Y) on the group one level down."""
        idx = self.group.projection_indices(lower)
        flat = self.flat()
        out = np.zeros(lower.order, dtype=flat.dtype)
        if flat.dtype == object:
            out[:] = 0 if self.exact else mpmath.mpf(0)
        with mpmath.workprec(self.bits):
            np.add.at(out, idx, flat)
        return GroupDistribution(lower, out.reshape(lower.shape), self.denominator, self.exact, self.bits)


def _empty_group_array(G: FiniteAbelianGroup, dtype, zero):
    arr = np.empty(G.shape, dtype=dtype) if dtype == object else np.zeros(G.shape, dtype=dtype)
    if dtype == object:
        arr[...] = zero
    return arr


def sum_distribution(G: FiniteAbelianGroup, mu: FiniteMeasure, powers: list[int],
                     budget: int = DEFAULT_ATOM_BUDGET) -> GroupDistribution:
    """Law of sum_{k in powers} xi_k beta^k in G (independent xi_k ~ mu)."""
    if G.order > budget:
        raise AtomBudgetExceeded(f"|G_{G.n}| = {G.order} exceeds the budget {budget}")
    atoms, Q = _weight_setup(mu)
    denom = Q ** len(powers)
    if mu.exact:
        dtype, zero, one = (np.int64 if denom < _INT64_SAFE else object), 0, 1
    else:
        dtype, zero, one = object, mpmath.mpf(0), mpmath.mpf(1)
    arr = _empty_group_array(G, dtype, zero)
    if not G.shape:
        arr[()] = one if not mu.exact else denom
        return GroupDistribution(G, arr, denom, mu.exact, mu.bits)
    arr[(0,) * len(G.shape)] = one
    axes = tuple(range(len(G.shape)))
    with mpmath.workprec(mu.bits):
        for k in powers:
            b = np.array(G.active_coords(G.beta_power(k)), dtype=object)
            new = _empty_group_array(G, dtype, zero)
            shifts = {}
            for a, w in atoms:
                sh = tuple(int(x) for x in (a * b) % np.array(G.shape, dtype=object))
                shifts[sh] = shifts.get(sh, zero) + w
            for sh, w in shifts.items():
                new = new + w * np.roll(arr, sh, axis=axes)
            arr = new
    return GroupDistribution(G, arr, denom, mu.exact, mu.bits)


def distribution_Yn(f: IntPolynomial, mu: FiniteMeasure, n: int, budget: int = DEFAULT_ATOM_BUDGET,
                    group: FiniteAbelianGroup | None = None) -> GroupDistribution:
    """Exact law of Y_n = sum_{j<n} xi_j beta^j mod beta^n Z[beta]."""
    G = group if group is not None else build_group(f, n)
    return sum_distribution(G, mu, list(range(n)), budget)


def entropy(D: AtomDistribution) -> EntropyValue:
    return D.entropy()


def entropy_Yn(f: IntPolynomial, mu: FiniteMeasure, n: int, budget: int = DEFAULT_ATOM_BUDGET) -> EntropyValue:
    if n == 0:
        return ZERO_ENTROPY
    return distribution_Yn(f, mu, n, budget).entropy()


def conditional_entropy_step(f: IntPolynomial, mu: FiniteMeasure, n: int,
                             budget: int = DEFAULT_ATOM_BUDGET) -> EntropyValue:
    """H(Y_n | Y_{n-1}) = H(Y_n) - H(Y_{n-1}) since Y_{n-1} = pi(Y_n)."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    return entropy_Yn(f, mu, n, budget) - entropy_Yn(f, mu, n - 1, budget)


# -- schedule -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundRow:
    n: int
    lower: EntropyValue
    upper: EntropyValue
    atoms_X: int
    atoms_Y: int

    @property
    def lower_rate(self):
        return self.lower.value / self.n

    @property
    def upper_rate(self):
        return self.upper.value / self.n

    @property
    def gap(self):
        return self.upper_rate - self.lower_rate

    @property
    def error(self):
        return (self.lower.error + self.upper.error) / self.n


@dataclass(frozen=True)
class BoundSchedule:
    rows: tuple[BoundRow, ...]
    lower_valid: bool
    log_M: mpmath.mpf

    CSV_FIELDS = ("n", "lower_nats", "upper_nats", "gap", "atoms_X", "atoms_Y", "lower_valid",
                  "lower_log2", "upper_log2")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_FIELDS)
        ln2 = mpmath.log(2)
        for r in self.rows:
            w.writerow([
                r.n, mpmath.nstr(r.lower_rate, 17), mpmath.nstr(r.upper_rate, 17), mpmath.nstr(r.gap, 17),
                r.atoms_X, r.atoms_Y, str(self.lower_valid).lower(),
                mpmath.nstr(r.lower_rate / ln2, 17), mpmath.nstr(r.upper_rate / ln2, 17),
            ])
        return buf.getvalue()


def bound_schedule(f: IntPolynomial, mu: FiniteMeasure, n_max: int,
                   budget: int = DEFAULT_ATOM_BUDGET) -> BoundSchedule:
    """Rows n = 1..n_max of H(Y_n)/n <= h <= H(X_n)/n.

    The lower column is only a valid bound when every conjugate of beta lies
    outside the unit circle; it is reported either way.  Rows whose laws
    exceed the atom budget are skipped.
    """
    if n_max < 1:
        raise InvalidInput("n_max must be >= 1")
    profile = conjugate_profile(f)
    rows = []
    xs = iter_distribution_Xn(f, mu, n_max, budget)
    for n in range(1, n_max + 1):
        try:
            X = next(xs)
        except AtomBudgetExceeded:
            break
        try:
            Y = distribution_Yn(f, mu, n, budget)
        except AtomBudgetExceeded:
            continue
        rows.append(BoundRow(n, Y.entropy(), X.entropy(), X.atom_count, Y.atom_count))
    return BoundSchedule(tuple(rows), profile.all_outside, mpmath.log(f.M))
