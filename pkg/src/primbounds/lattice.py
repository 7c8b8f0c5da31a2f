"""Smooth-number divisibility lattices and their breakpoint structure.

``M_l(x)`` is the set of integers ``<= x`` whose prime factors are all among
the first ``l`` primes, ordered by divisibility.  Everything here is exact
integer arithmetic; counts built on top of these lattices only depend on
``i`` through the element set of ``M_l(i)`` and the cut ``{m : m*q > i}``,
which is what :func:`breakpoints` exploits.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "PrimeBasis",
    "SmoothLattice",
    "BreakpointPartition",
    "first_primes",
    "generate_lattice",
    "smooth_numbers",
    "max_antichain_size",
    "breakpoints",
    "telescoped_weight_sum",
    "count_at_most",
]


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeBasis:
    """The first ``l`` primes together with the next prime ``q``."""

    l: int
    primes: tuple[int, ...]
    q: int

    def __post_init__(self):
        if len(self.primes) != self.l:
            raise ValueError("primes must hold exactly l entries")

    @property
    def odd_primes(self) -> tuple[int, ...]:
        return self.primes[1:]

    def fingerprint(self) -> str:
        return f"{self.l};{','.join(map(str, self.primes))}"

    def density(self) -> Fraction:
        """prod_j (1 - 1/p_j), the density of integers coprime to the basis."""
        d = Fraction(1)
        for p in self.primes:
            d *= Fraction(p - 1, p)
        return d

    def is_smooth(self, m: int) -> bool:
        for p in self.primes:
            while m % p == 0:
                m //= p
        return m == 1


@lru_cache(maxsize=None)
def first_primes(l: int) -> PrimeBasis:
    if l < 0:
        raise ValueError("l must be nonnegative")
    found: list[int] = []
    k = 2
    while len(found) < l + 1:
        if _is_prime(k):
            found.append(k)
        k += 1
    return PrimeBasis(l, tuple(found[:l]), found[l])


@lru_cache(maxsize=4096)
def smooth_numbers(primes: tuple[int, ...], x: int) -> tuple[int, ...]:
    """Sorted tuple of all integers <= x built from ``primes``."""
    out = [1]
    for p in primes:
        grown = []
        for m in out:
            while m <= x:
                grown.append(m)
                m *= p
        out = grown
    return tuple(sorted(out)) if x >= 1 else ()


def count_at_most(primes: tuple[int, ...], x: int) -> int:
    """|M(x)| with the convention |M(x)| = 0 for x < 1."""
    if x < 1:
        return 0
    return len(smooth_numbers(primes, x))


def _exponents(m: int, primes: tuple[int, ...]) -> tuple[int, ...]:
    vec = []
    for p in primes:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        vec.append(e)
    return tuple(vec)


@dataclass(frozen=True)
class SmoothLattice:
    basis: PrimeBasis
    limit: int
    elements: tuple[int, ...]
    exponents: dict = field(repr=False, compare=False)
    # odd part -> (u, 2u, 4u, ...) restricted to the lattice
    chains: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    @property
    def odd_elements(self) -> tuple[int, ...]:
        return tuple(self.chains)

    def chain_length(self, u: int) -> int:
        return len(self.chains[u])


def generate_lattice(basis: PrimeBasis, x: int) -> SmoothLattice:
    if x < 1:
        raise ValueError("lattice limit must be a positive integer")
    elements = smooth_numbers(basis.primes, x)
    exponents = {m: _exponents(m, basis.primes) for m in elements}
    chains: dict[int, tuple[int, ...]] = {}
    if basis.l == 0:
        chains[1] = (1,)
    else:
        for m in elements:
            if m % 2:
                run = []
                v = m
                while v <= x:
                    run.append(v)
                    v *= 2
                chains[m] = tuple(run)
    return SmoothLattice(basis, x, elements, exponents, chains)


def max_antichain_size(lat: SmoothLattice) -> int:
    """Number of chains, i.e. the number of odd elements."""
    if not lat.elements:
        raise ValueError("empty lattice")
    return len(lat.chains)


@dataclass(frozen=True)
class BreakpointPartition:
    basis: PrimeBasis
    K: int
    segments: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)

    def locate(self, i: int) -> int:
        """Index of the segment containing ``i``."""
        if not 1 <= i <= self.K:
            raise IndexError(f"{i} outside [1, {self.K}]")
        starts = [lo for lo, _ in self.segments]
        return bisect.bisect_right(starts, i) - 1


def _boundaries(basis: PrimeBasis, K: int, truncated: bool) -> list[int]:
    ms = smooth_numbers(basis.primes, K)
    cuts = set(ms)
    if truncated:
        cuts.update(m * basis.q for m in smooth_numbers(basis.primes, K // basis.q))
    cuts.add(1)
    return sorted(c for c in cuts if c <= K)


def breakpoints(basis: PrimeBasis, K: int, truncated: bool = True) -> BreakpointPartition:
    """Partition [1, K] into maximal runs on which M_l(i) and its q-cut are fixed.

    With ``truncated=False`` only changes of M_l(i) are tracked, which is all
    the untruncated counts need.
    """
    if K < 1:
        raise ValueError("K must be positive")
    starts = _boundaries(basis, K, truncated)
    segs = [(a, b - 1) for a, b in zip(starts, starts[1:])]
    segs.append((starts[-1], K))
    return BreakpointPartition(basis, K, tuple(segs))


def telescoped_weight_sum(a: int, b: int) -> Fraction:
    """sum_{i=a}^{b} 1/(i(i+1)), exactly."""
    if a > b:
        if a == b + 1:
            return Fraction(0)
        raise ValueError("need a <= b")
    return Fraction(1, a) - Fraction(1, b + 1)
