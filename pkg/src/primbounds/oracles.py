"""Exact small-n ground truth for primitive and pairwise-coprime subsets.

Every quantity has two independent methods so they can be checked against
each other: a structured search (chains of the form u, 2u, 4u, ... or a
bitmask DP over primes) and a naive filter over all subsets, vectorised with
numpy.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator

import mpmath
import numpy as np

from .errors import ResourceLimitError
from .lattice import PrimeBasis


class OracleMethod(enum.Enum):
    CHAIN_BACKTRACKING = "ChainBacktracking"
    NAIVE_SUBSETS = "NaiveSubsets"
    MASK_DP = "MaskDP"


@dataclass(frozen=True)
class OracleResult:
    n: int
    value: int
    method: OracleMethod
    elapsed: float  # seconds

    def to_dict(self) -> dict:
        return {"n": self.n, "value": str(self.value), "method": self.method.value,
                "elapsed": self.elapsed}


F_CHAIN_CEILING = 24
F_NAIVE_CEILING = 10
G_CHAIN_CEILING = 40
G_NAIVE_CEILING = 20
FQ_CEILING = 20
COPRIME_DP_CEILING = 36
COPRIME_NAIVE_CEILING = 20


def _guard(n: int, ceiling: int, what: str):
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"{what}: n must be a positive integer, got {n!r}")
    if n > ceiling:
        raise ResourceLimitError(f"{what}: n = {n} exceeds the ceiling {ceiling}")


def _timed(n: int, method: OracleMethod, fn: Callable[[], int]) -> OracleResult:
    t0 = time.perf_counter()
    value = fn()
    return OracleResult(n, value, method, time.perf_counter() - t0)


def primitive_check(values: Iterable[int]) -> bool:
    """True iff no element divides a different element."""
    xs = sorted(set(values))
    for j, b in enumerate(xs):
        for a in xs[:j]:
            if b % a == 0:
                return False
    return True


def prime_count(n: int) -> int:
    """pi(n) by a sieve of Eratosthenes."""
    if n < 2:
        return 0
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return int(sieve.sum())


# -- chain search ---------------------------------------------------------

def _chains(top: int, keep: Callable[[int], bool]) -> list[list[int]]:
    """Chains {u, 2u, 4u, ...} within [1, top] for odd u, largest u first."""
    out = []
    for u in range(top if top % 2 else top - 1, 0, -2):
        chain = []
        m = u
        while m <= top:
            if keep(m):
                chain.append(m)
            m *= 2
        out.append(chain)
    return out


def _chain_count(chains: list[list[int]], exactly_one: bool) -> int:
    """Antichains choosing at most (or exactly) one element per chain.

    Elements are numbered consecutively; the memo key is the set of elements
    of unprocessed chains that are still compatible with the choices so far.
    """
    elems = [m for c in chains for m in c]
    index = {m: j for j, m in enumerate(elems)}
    comp = [0] * len(elems)
    for a in elems:
        for b in elems:
            if a != b and (a % b == 0 or b % a == 0):
                comp[index[a]] |= 1 << index[b]
    starts = []
    pos = 0
    for c in chains:
        starts.append(pos)
        pos += len(c)
    starts.append(pos)
    memo: dict[tuple[int, int], int] = {}

    def go(k: int, alive: int) -> int:
        if k == len(chains):
            return 1
        key = (k, alive)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = 0 if exactly_one else go(k + 1, alive)
        for j in range(starts[k], starts[k + 1]):
            if alive >> j & 1:
                total += go(k + 1, alive & ~comp[j])
        memo[key] = total
        return total

    return go(0, (1 << len(elems)) - 1)


def iter_f_sets(n: int) -> Iterator[tuple[int, ...]]:
    """Yield every n-element primitive subset of [2n] (one element per chain)."""
    _guard(n, F_NAIVE_CEILING, "iter_f_sets")
    chains = _chains(2 * n, lambda m: True)

    def rec(k: int, chosen: tuple[int, ...]):
        if k == len(chains):
            yield tuple(sorted(chosen))
            return
        for m in chains[k]:
            if all(m % c and c % m for c in chosen):
                yield from rec(k + 1, chosen + (m,))

    yield from rec(0, ())


# -- naive subset filters -------------------------------------------------

def _naive_filter(elems: list[int], bad: Callable[[int, int], bool], size: int | None) -> int:
    """Subsets of ``elems`` avoiding every bad pair, optionally of fixed size."""
    k = len(elems)
    masks = np.arange(1 << k, dtype=np.int64)
    ok = np.ones(1 << k, dtype=bool)
    for (i, a), (j, b) in itertools.combinations(enumerate(elems), 2):
        if bad(a, b):
            both = (1 << i) | (1 << j)
            ok &= (masks & both) != both
    if size is not None:
        pop = np.zeros(1 << k, dtype=np.int64)
        for i in range(k):
            pop += (masks >> i) & 1
        ok &= pop == size
    return int(ok.sum())


def _divides(a: int, b: int) -> bool:
    return a % b == 0 or b % a == 0


# -- f, g, f_q ------------------------------------------------------------

def f_exact(n: int, method: OracleMethod | str = OracleMethod.CHAIN_BACKTRACKING) -> OracleResult:
    """Number of n-element primitive subsets of [2n]."""
    method = OracleMethod(method)
    if method is OracleMethod.CHAIN_BACKTRACKING:
        _guard(n, F_CHAIN_CEILING, "f_exact")
        return _timed(n, method, lambda: _chain_count(_chains(2 * n, lambda m: True), True))
    if method is OracleMethod.NAIVE_SUBSETS:
        _guard(n, F_NAIVE_CEILING, "f_exact")
        return _timed(n, method, lambda: _naive_filter(list(range(1, 2 * n + 1)), _divides, n))
    raise ValueError(f"f_exact has no {method.value} method")


def g_exact(n: int, method: OracleMethod | str = OracleMethod.CHAIN_BACKTRACKING) -> OracleResult:
    """Number of primitive subsets of [n], the empty set included."""
    method = OracleMethod(method)
    if method is OracleMethod.CHAIN_BACKTRACKING:
        _guard(n, G_CHAIN_CEILING, "g_exact")
        return _timed(n, method, lambda: _chain_count(_chains(n, lambda m: True), False))
    if method is OracleMethod.NAIVE_SUBSETS:
        _guard(n, G_NAIVE_CEILING, "g_exact")
        return _timed(n, method, lambda: _naive_filter(list(range(1, n + 1)), _divides, None))
    raise ValueError(f"g_exact has no {method.value} method")


def fq_exact(n: int, basis: PrimeBasis,
             method: OracleMethod | str = OracleMethod.CHAIN_BACKTRACKING) -> OracleResult:
    """n-element primitive subsets of [2n] all of whose elements m have m*q > 2n."""
    method = OracleMethod(method)
    _guard(n, FQ_CEILING, "fq_exact")
    q, top = basis.q, 2 * n
    if method is OracleMethod.CHAIN_BACKTRACKING:
        return _timed(n, method,
                      lambda: _chain_count(_chains(top, lambda m: m * q > top), True))
    if method is OracleMethod.NAIVE_SUBSETS:
        _guard(n, F_NAIVE_CEILING, "fq_exact")
        elems = [m for m in range(1, top + 1) if m * q > top]
        return _timed(n, method, lambda: _naive_filter(elems, _divides, n))
    raise ValueError(f"fq_exact has no {method.value} method")


# -- pairwise coprime subsets ---------------------------------------------

def _primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def _coprime_dp(n: int) -> int:
    primes = _primes_upto(n)
    bit = {p: 1 << j for j, p in enumerate(primes)}
    ways = {0: 1}
    for m in range(2, n + 1):
        sig = 0
        for p in primes:
            if m % p == 0:
                sig |= bit[p]
        nxt = dict(ways)
        for used, c in ways.items():
            if not used & sig:
                nxt[used | sig] = nxt.get(used | sig, 0) + c
        ways = nxt
    return 2 * sum(ways.values())  # 1 may be added to any of them


def coprime_count_exact(n: int, method: OracleMethod | str = OracleMethod.MASK_DP) -> OracleResult:
    """Subsets of [n] (empty set included) whose elements are pairwise coprime."""
    method = OracleMethod(method)
    if method is OracleMethod.MASK_DP:
        _guard(n, COPRIME_DP_CEILING, "coprime_count_exact")
        return _timed(n, method, lambda: _coprime_dp(n))
    if method is OracleMethod.NAIVE_SUBSETS:
        _guard(n, COPRIME_NAIVE_CEILING, "coprime_count_exact")
        return _timed(n, method, lambda: _naive_filter(
            list(range(1, n + 1)), lambda a, b: gcd(a, b) > 1, None))
    raise ValueError(f"coprime_count_exact has no {method.value} method")


_MP = mpmath.mp.clone()
_MP.dps = 30


@dataclass(frozen=True)
class CoprimeReference:
    """Natural logs of 2^pi(n) * e^(c sqrt n) for c = 1/2, 2 and 1."""

    n: int
    pi: int
    lower: mpmath.mpf
    upper: mpmath.mpf
    mid: mpmath.mpf

    def residual(self, count: int) -> mpmath.mpf:
        """log(count / 2^pi(n)) / sqrt(n), the empirical exponent constant."""
        return (_MP.log(count) - self.pi * _MP.log(2)) / _MP.sqrt(self.n)


def coprime_bound_eval(n: int) -> CoprimeReference:
    if n < 2:
        raise ValueError("coprime_bound_eval needs n >= 2")
    pi = prime_count(n)
    base = pi * _MP.log(2)
    root = _MP.sqrt(n)
    return CoprimeReference(n, pi, base + root / 2, base + 2 * root, base + root)
