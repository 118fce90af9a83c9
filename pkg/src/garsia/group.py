"""The finite groups G_n = Z[X]/(f, X^n) and their duals.

Elements and characters are coordinate tuples with respect to the invariant
factors ``d_1 | d_2 | ... | d_n`` of the Smith normal form of the relation
matrix whose column j is X^j f(X) truncated mod X^n.  Factors equal to 1
carry the residue 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .algebra import IntPolynomial, RationalAngle
from .errors import CyclicButOneNotGenerator, InvalidInput, NotCyclic, OrderMismatch
from .snf import smith_normal_form

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class GroupElement:
    coords: tuple[int, ...]
    moduli: tuple[int, ...]

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(tuple((a + b) % d for a, b, d in zip(self.coords, other.coords, self.moduli)), self.moduli)

    def __neg__(self) -> "GroupElement":
        return GroupElement(tuple(-a % d for a, d in zip(self.coords, self.moduli)), self.moduli)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(tuple(k * a % d for a, d in zip(self.coords, self.moduli)), self.moduli)

    __rmul__ = __mul__

    def is_identity(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        o = 1
        for a, d in zip(self.coords, self.moduli):
            o = math.lcm(o, d // math.gcd(a, d))
        return o


@dataclass(frozen=True)
class Character:
    """psi(g) = e(sum_i coords_i * g_i / d_i)."""

    coords: tuple[int, ...]
    moduli: tuple[int, ...]

    def pair(self, g: GroupElement) -> RationalAngle:
        from fractions import Fraction

        return RationalAngle.of(sum(Fraction(c * x, d) for c, x, d in zip(self.coords, g.coords, self.moduli)))

    def __add__(self, other: "Character") -> "Character":
        return Character(tuple((a + b) % d for a, b, d in zip(self.coords, other.coords, self.moduli)), self.moduli)

    def is_trivial(self) -> bool:
        return not any(self.coords)


class FiniteAbelianGroup:
    """G_n for a fixed primitive integer polynomial f and level n >= 1."""

    def __init__(self, f: IntPolynomial, n: int):
        if n < 1:
            raise InvalidInput("level n must be >= 1")
        self.f = f
        self.n = n
        asc = f.ascending
        # column j holds X^j f(X) mod X^n
        R = [[asc[i - j] if 0 <= i - j <= f.degree else 0 for j in range(n)] for i in range(n)]
        self.relations = R
        snf = smith_normal_form(R)
        self.invariants: tuple[int, ...] = snf.diagonal
        self.U, self.V, self.U_inv = snf.U, snf.V, snf.U_inv
        self.order = math.prod(self.invariants)
        if self.order != f.M ** n:
            raise OrderMismatch(f"|G_{n}| = {self.order}, expected {f.M}^{n}")
        if any(self.invariants[i + 1] % self.invariants[i] for i in range(n - 1)):
            raise OrderMismatch(f"invariant factors {self.invariants} are not a divisibility chain")
        self.active = tuple(i for i, d in enumerate(self.invariants) if d > 1)
        self.shape = tuple(self.invariants[i] for i in self.active)
        self.exponent = self.invariants[-1]

    def __repr__(self) -> str:
        return f"FiniteAbelianGroup(f={self.f.text()!r}, n={self.n}, invariants={self.nontrivial_invariants})"

    @property
    def nontrivial_invariants(self) -> tuple[int, ...]:
        return self.shape

    def is_cyclic(self) -> bool:
        return len(self.active) <= 1

    # elements

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(tuple(c % d for c, d in zip(coords, self.invariants)), self.invariants)

    def identity(self) -> GroupElement:
        return self.element([0] * self.n)

    def embed(self, poly: Sequence[int]) -> GroupElement:
        """Class of sum_j poly[j] X^j (ascending; terms of degree >= n vanish)."""
        c = list(poly[: self.n]) + [0] * max(0, self.n - len(poly))
        return self.element([sum(u * x for u, x in zip(row, c)) for row in self.U])

    def lift(self, g: GroupElement) -> list[int]:
        """Coefficients c_0..c_{n-1} of some polynomial whose class is g."""
        return [sum(u * x for u, x in zip(row, g.coords)) for row in self.U_inv]

    def beta_power(self, k: int) -> GroupElement:
        if k < 0:
            raise InvalidInput("k must be >= 0")
        if k >= self.n:
            return self.identity()
        return self.embed([0] * k + [1])

    @cached_property
    def beta_powers(self) -> tuple[GroupElement, ...]:
        return tuple(self.beta_power(k) for k in range(self.n))

    def elements(self) -> Iterator[GroupElement]:
        for idx in range(self.order):
            yield self.element_at(idx)

    def element_at(self, index: int) -> GroupElement:
        coords = [0] * self.n
        for pos in reversed(self.active):
            index, coords[pos] = divmod(index, self.invariants[pos])
        return GroupElement(tuple(coords), self.invariants)

    def index_of(self, g: GroupElement) -> int:
        idx = 0
        for pos in self.active:
            idx = idx * self.invariants[pos] + g.coords[pos]
        return idx

    def active_coords(self, g: GroupElement) -> tuple[int, ...]:
        return tuple(g.coords[i] for i in self.active)

    # characters

    def character(self, coords: Sequence[int]) -> Character:
        return Character(tuple(c % d for c, d in zip(coords, self.invariants)), self.invariants)

    def character_at(self, index: int) -> Character:
        return Character(self.element_at(index).coords, self.invariants)

    def characters(self, start: int = 0, stop: int | None = None) -> Iterator[Character]:
        """Characters in lexicographic coordinate order; [start, stop) slices the stream."""
        stop = self.order if stop is None else min(stop, self.order)
        for idx in range(start, stop):
            yield self.character_at(idx)

    def pairing_numerator(self, psi: Character, g: GroupElement) -> int:
        """Integer a with <psi, g> = a / exponent mod 1."""
        E = self.exponent
        return sum(c * x * (E // d) for c, x, d in zip(psi.coords, g.coords, self.invariants)) % E

    def pair(self, psi: Character, g: GroupElement) -> RationalAngle:
        return RationalAngle(self.pairing_numerator(psi, g), self.exponent)

    def characters_new_at_level(self, start: int = 0, stop: int | None = None) -> Iterator[Character]:
        """Characters nontrivial on ker(G_n -> G_{n-1}), which is generated by X^(n-1)."""
        top = self.beta_powers[self.n - 1]
        for psi in self.characters(start, stop):
            if self.pairing_numerator(psi, top):
                yield psi

    def count_new_characters(self) -> int:
        return self.order - self.f.M ** (self.n - 1)

    # maps between levels

    def projection_matrix(self, lower: "FiniteAbelianGroup") -> list[list[int]]:
        """Matrix P with pi(g) = P g (mod lower invariants) in SNF coordinates."""
        if lower.n != self.n - 1 or lower.f != self.f:
            raise InvalidInput("projection needs the group one level down")
        m = lower.n
        return [
            [sum(urow[i] * self.U_inv[i][j] for i in range(m)) % d for j in range(self.n)]
            for urow, d in zip(lower.U, lower.invariants)
        ]

    def project(self, g: GroupElement, lower: "FiniteAbelianGroup") -> GroupElement:
        return lower.embed(self.lift(g)[: lower.n])

    def projection_indices(self, lower: "FiniteAbelianGroup") -> np.ndarray:
        """Flat index in ``lower`` of the image of each element of ``self``."""
        if lower.order == 1:
            return np.zeros(self.order, dtype=np.int64)
        P = self.projection_matrix(lower)
        P = [[row[i] for i in self.active] for row in P]
        P = [P[i] for i in lower.active]
        coords = self._coord_table()
        big = max(self.shape, default=1) * max(lower.shape) * max(len(self.shape), 1)
        dtype = np.int64 if big < _INT64_SAFE else object
        Pm = np.array(P, dtype=dtype)
        img = (coords.astype(dtype) @ Pm.T) % np.array(lower.shape, dtype=dtype)
        idx = np.zeros(self.order, dtype=np.int64)
        for k, d in enumerate(lower.shape):
            idx = idx * d + img[:, k].astype(np.int64)
        return idx

    def _coord_table(self) -> np.ndarray:
        """(order x rank) array of active coordinates in flat-index order."""
        if not self.shape:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.shape).reshape(len(self.shape), -1).T
        return grids.astype(np.int64)

    # cyclic case

    def cyclic_isomorphism(self) -> "CyclicIsomorphism":
        return CyclicIsomorphism.of(self)


@dataclass(frozen=True)
class CyclicIsomorphism:
    """Phi: G_n -> Z/N (N = M^n) with Phi(1) = 1, and the matching dual Psi.

    ``psi(y) = e(Psi(psi) * Phi(y) / N)``.
    """

    group: FiniteAbelianGroup
    N: int
    t: int
    generator_coord: int
    coprime_condition: bool

    @classmethod
    def of(cls, G: FiniteAbelianGroup) -> "CyclicIsomorphism":
        coprime = math.gcd(G.f.coefficient(0), G.f.coefficient(1)) == 1
        if G.order == 1:
            return cls(G, 1, 0, 0, coprime)
        if not G.is_cyclic():
            raise NotCyclic(f"G_{G.n} has invariant factors {G.shape}")
        pos = G.active[0]
        N = G.invariants[pos]
        g1 = G.embed([1]).coords[pos]
        if math.gcd(g1, N) != 1:
            raise CyclicButOneNotGenerator(f"G_{G.n} is cyclic of order {N} but 1 has order {N // math.gcd(g1, N)}")
        t = G.embed([0, 1]).coords[pos] * pow(g1, -1, N) % N
        return cls(G, N, t, g1, coprime)

    @property
    def _pos(self) -> int:
        return self.group.active[0]

    def phi(self, g: GroupElement) -> int:
        if self.N == 1:
            return 0
        return g.coords[self._pos] * pow(self.generator_coord, -1, self.N) % self.N

    def phi_inverse(self, s: int) -> GroupElement:
        return self.group.embed([s])

    def psi(self, chi: Character) -> int:
        if self.N == 1:
            return 0
        return chi.coords[self._pos] * self.generator_coord % self.N

    def character(self, x: int) -> Character:
        """The character with Psi-parameter x."""
        G = self.group
        coords = [0] * G.n
        if self.N > 1:
            coords[self._pos] = x * pow(self.generator_coord, -1, self.N) % self.N
        return G.character(coords)

    def beta_images(self) -> list[int]:
        """Phi(beta^k) for 0 <= k < n."""
        return [self.phi(b) for b in self.group.beta_powers]


def build_group(f: IntPolynomial, n: int) -> FiniteAbelianGroup:
    return FiniteAbelianGroup(f, n)


def subgroup_closure(G: FiniteAbelianGroup, gens: Sequence[GroupElement]) -> set[GroupElement]:
    seen = {G.identity()}
    frontier = [G.identity()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def generator_count(f: IntPolynomial) -> int:
    """r = min{j : gcd(a_0, ..., a_j) = 1}."""
    g = 0
    for j in range(f.degree + 1):
        g = math.gcd(g, f.coefficient(j))
        if g == 1:
            return j
    return f.degree


def group_info(f: IntPolynomial, n: int) -> dict:
    G = build_group(f, n)
    info = {
        "level": n,
        "invariant_factors": list(G.invariants),
        "order": G.order,
        "cyclic": G.is_cyclic(),
    }
    try:
        iso = G.cyclic_isomorphism()
    except NotCyclic as exc:
        info["phi"] = None
        info["phi_error"] = type(exc).__name__
    else:
        info["phi"] = {"t": iso.t, "modulus": iso.N, "beta_images": iso.beta_images(),
                       "gcd_a0_a1_is_1": iso.coprime_condition}
    return info
