"""Frobenius characteristics with motivic coefficients, in the power-sum basis.

An :class:`EquivariantClass` of shape ``(n_1, ..., n_p)`` is a virtual
representation of ``S_{n_1} x ... x S_{n_p}`` in Hodge structures, written as

    sum over multipartitions mu of c_mu * p_mu

with one set of power sums per factor.  The character at the class of cycle
type ``mu`` is ``z_mu * c_mu``.  Shape ``(n,)`` is the ordinary symmetric
function case; most helpers accept a bare partition there.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import factorial
from typing import Dict, Iterator, Sequence, Tuple

from .motives import ONE, ZERO, MotiveClass, adams

Partition = Tuple[int, ...]
MultiPartition = Tuple[Partition, ...]


def partitions(n: int, largest: int | None = None) -> Iterator[Partition]:
    """Partitions of n as weakly decreasing tuples, in reverse lex order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def as_partition(parts: Sequence[int]) -> Partition:
    return tuple(sorted((int(p) for p in parts if p), reverse=True))


@lru_cache(maxsize=None)
def z(mu: Partition) -> int:
    """Order of the centralizer of a permutation of cycle type mu."""
    out = 1
    for k, m in Counter(mu).items():
        out *= k ** m * factorial(m)
    return out


def z_multi(mu: MultiPartition) -> int:
    out = 1
    for part in mu:
        out *= z(part)
    return out


class EquivariantClass:
    __slots__ = ("shape", "_coeffs")

    def __init__(self, shape: Sequence[int], coeffs: Dict | None = None):
        self.shape = tuple(int(n) for n in shape)
        clean: Dict[MultiPartition, MotiveClass] = {}
        for key, c in (coeffs or {}).items():
            key = self._key(key)
            c = MotiveClass.coerce(c)
            if c:
                clean[key] = clean.get(key, ZERO) + c
                if not clean[key]:
                    del clean[key]
        self._coeffs = clean

    def _key(self, mu) -> MultiPartition:
        mu = tuple(mu)
        if len(self.shape) == 1 and all(isinstance(x, int) for x in mu):
            key = (as_partition(mu),)
        else:
            key = tuple(as_partition(part) for part in mu)
        if len(key) != len(self.shape) or any(
            sum(part) != n for part, n in zip(key, self.shape)
        ):
            raise ValueError(f"{mu!r} does not index a class of shape {self.shape}")
        return key

    @property
    def degree(self) -> int:
        return sum(self.shape)

    def coefficient(self, mu) -> MotiveClass:
        return self._coeffs.get(self._key(mu), ZERO)

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: kv[0])

    def support(self):
        return sorted(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, EquivariantClass):
            return NotImplemented
        return self.shape == other.shape and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.shape, frozenset(self._coeffs.items())))

    def __add__(self, other: "EquivariantClass"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return EquivariantClass(self.shape, out)

    def __neg__(self):
        return EquivariantClass(self.shape, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "EquivariantClass":
        c = MotiveClass.coerce(c)
        return EquivariantClass(self.shape, {k: v * c for k, v in self._coeffs.items()})

    def map_coefficients(self, fn) -> "EquivariantClass":
        return EquivariantClass(self.shape, {k: fn(v) for k, v in self._coeffs.items()})

    def __repr__(self):
        body = " + ".join(f"({c})*p{list(map(list, k))}" for k, c in self.items())
        return f"EquivariantClass{self.shape}[{body or '0'}]"

    # character table -------------------------------------------------
    def conjugacy_classes(self):
        return list(iproduct(*(list(partitions(n)) for n in self.shape)))

    def character_table(self) -> Dict[MultiPartition, MotiveClass]:
        return {mu: character_at(self, mu) for mu in self.conjugacy_classes()}

    def is_character_integral(self) -> bool:
        return all(
            (z_multi(k) * c).is_integral() for k, c in self._coeffs.items()
        )


# -- constructors -------------------------------------------------------

def power_sum(mu: Sequence[int], coeff=ONE) -> EquivariantClass:
    mu = as_partition(mu)
    return EquivariantClass((sum(mu),), {mu: coeff})


def h(n: int) -> EquivariantClass:
    """Complete homogeneous h_n: the trivial representation."""
    return EquivariantClass((n,), {mu: Fraction(1, z(mu)) for mu in partitions(n)})


def e(n: int) -> EquivariantClass:
    """Elementary e_n: the sign representation."""
    return EquivariantClass(
        (n,),
        {mu: Fraction((-1) ** (n - len(mu)), z(mu)) for mu in partitions(n)},
    )


def unit() -> EquivariantClass:
    return EquivariantClass((0,), {((),): ONE})


def from_characters(shape: Sequence[int], chars: Dict) -> EquivariantClass:
    """Build a class from its character values at each conjugacy class."""
    cls = EquivariantClass(shape)
    out = {}
    for mu, val in chars.items():
        key = cls._key(mu)
        out[key] = MotiveClass.coerce(val) * Fraction(1, z_multi(key))
    return EquivariantClass(shape, out)


# -- operations -----------------------------------------------------------

def character_at(F: EquivariantClass, mu) -> MotiveClass:
    key = F._key(mu)
    return F._coeffs.get(key, ZERO) * z_multi(key)


def product(F: EquivariantClass, G: EquivariantClass) -> EquivariantClass:
    """Induction product: p_mu * p_nu = p_{mu u nu} factorwise."""
    if len(F.shape) != len(G.shape):
        raise ValueError("factor count mismatch")
    shape = tuple(a + b for a, b in zip(F.shape, G.shape))
    out: Dict[MultiPartition, MotiveClass] = {}
    for k1, c1 in F._coeffs.items():
        for k2, c2 in G._coeffs.items():
            key = tuple(as_partition(a + b) for a, b in zip(k1, k2))
            out[key] = out.get(key, ZERO) + c1 * c2
    return EquivariantClass(shape, out)


def plethysm_cycle(r: int, F: EquivariantClass) -> EquivariantClass:
    """p_r o F: p_mu -> p_{r mu}, coefficients twisted by psi^r."""
    if r < 1:
        raise ValueError("r must be positive")
    if r == 1:
        return F
    shape = tuple(r * n for n in F.shape)
    out = {
        tuple(tuple(r * k for k in part) for part in key): adams(r, c)
        for key, c in F._coeffs.items()
    }
    return EquivariantClass(shape, out)


def invariants(F: EquivariantClass) -> MotiveClass:
    """Class of the invariant part (inner product with the trivial character)."""
    out = ZERO
    for _, c in F._coeffs.items():
        out = out + c
    return out


def _distribute(mu: Partition, shape: Sequence[int]):
    # assign each part of mu to one of the factors; keep assignments matching shape
    p = len(shape)
    for assignment in iproduct(range(p), repeat=len(mu)):
        sizes = [0] * p
        for part, j in zip(mu, assignment):
            sizes[j] += part
        if sizes == list(shape):
            groups = [[] for _ in range(p)]
            for part, j in zip(mu, assignment):
                groups[j].append(part)
            yield tuple(as_partition(g) for g in groups)


def restrict(F: EquivariantClass, shape: Sequence[int]) -> EquivariantClass:
    """Restriction from S_n to S_{n_1} x ... x S_{n_p} (power-sum coproduct)."""
    if len(F.shape) != 1:
        raise ValueError("restrict expects a single-factor class")
    shape = tuple(shape)
    if sum(shape) != F.shape[0]:
        raise ValueError("restriction shape must sum to the degree")
    out: Dict[MultiPartition, MotiveClass] = {}
    for (mu,), c in F._coeffs.items():
        for key in _distribute(mu, shape):
            out[key] = out.get(key, ZERO) + c
    return EquivariantClass(shape, out)


# -- irreducible characters (output formatting) --------------------------

def _mn_character(lam: Partition, mu: Partition) -> int:
    """Murnaghan-Nakayama rule via beta-sets."""
    if not mu:
        return 1 if sum(lam) == 0 else 0
    k, rest = mu[0], mu[1:]
    n = len(lam)
    beta = [lam[i] + (n - 1 - i) for i in range(n)]
    bset = set(beta)
    total = 0
    for b in beta:
        nb = b - k
        if nb < 0 or nb in bset:
            continue
        sign = (-1) ** sum(1 for x in beta if nb < x < b)
        new_beta = sorted([x for x in beta if x != b] + [nb], reverse=True)
        new_lam = as_partition(new_beta[i] - (n - 1 - i) for i in range(n))
        total += sign * _mn_character(new_lam, rest)
    return total


@lru_cache(maxsize=None)
def irreducible_character(lam: Partition, mu: Partition) -> int:
    return _mn_character(as_partition(lam), as_partition(mu))


def schur_multiplicities(F: EquivariantClass) -> Dict[MultiPartition, MotiveClass]:
    """Multiplicity of each irreducible (outer tensor of Specht modules)."""
    out = {}
    for lam in F.conjugacy_classes():
        total = ZERO
        for key, c in F._coeffs.items():
            chi = 1
            for l_part, m_part in zip(lam, key):
                chi *= irreducible_character(l_part, m_part)
            if chi:
                total = total + c * chi
        if total:
            out[lam] = total
    return out


def dimension_of(F: EquivariantClass) -> MotiveClass:
    """Non-equivariant class: the character at the identity."""
    ident = tuple((1,) * n for n in F.shape)
    return character_at(F, ident)

