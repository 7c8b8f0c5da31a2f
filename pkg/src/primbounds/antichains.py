"""Antichain counts on smooth lattices.

Every antichain of ``M_l(i)`` is determined by the down-set it generates, and
a down-set is determined by how far it reaches up each chain ``u, 2u, 4u...``
(``u`` odd).  Writing ``h(u)`` for that height, down-sets are exactly the
maps ``h`` on the odd elements that are antitone under divisibility with
``0 <= h(u) <= len(u)``.  The other three kinds reduce to the same shape:

* truncated antichains (all elements ``> i/q``) are the down-sets containing
  the low part ``{m : m*q <= i}``, so ``h(u)`` gains a lower bound;
* a maximum antichain picks one position ``a(u)`` per chain with ``a``
  strictly decreasing along divisibility; ``b(u) = a(u) + rank(u)`` (rank =
  number of odd prime factors with multiplicity) turns that into a
  non-strict antitone map with shifted bounds.

So all four counts are "bounded antitone maps on the odd lattice", which the
schedule interpreters in :mod:`primbounds.kernel` evaluate by a frontier DP.
"""

from __future__ import annotations

import bisect
import enum
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations

from . import kernel
from .errors import BudgetExceeded, ResourceLimitError
from .lattice import PrimeBasis, SmoothLattice, breakpoints, first_primes, generate_lattice

DEFAULT_CEILING = 400
BRUTE_FORCE_CEILING = 32


class CountKind(enum.Enum):
    MaxAll = "r"
    MaxTruncated = "r'"
    AllAll = "R"
    AllTruncated = "R'"

    @property
    def truncated(self) -> bool:
        return self in (CountKind.MaxTruncated, CountKind.AllTruncated)

    @property
    def maximum(self) -> bool:
        return self in (CountKind.MaxAll, CountKind.MaxTruncated)

    @classmethod
    def parse(cls, text: str) -> "CountKind":
        for k in cls:
            if text in (k.name, k.value) or text.lower() == k.name.lower():
                return k
        aliases = {
            "max-all": cls.MaxAll,
            "max-truncated": cls.MaxTruncated,
            "all-all": cls.AllAll,
            "all-truncated": cls.AllTruncated,
        }
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown count kind {text!r}") from None


def _chain_bounds(lat: SmoothLattice, kind: CountKind, i: int):
    q = lat.basis.q
    odd_ps = lat.basis.odd_primes
    bounds = {}
    for u, chain in lat.chains.items():
        length = len(chain)
        cut = sum(1 for m in chain if m * q <= i) if kind.truncated else 0
        if kind.maximum:
            rank = sum(lat.exponents[u][1:]) if odd_ps else 0
            bounds[u] = (rank + cut, length - 1 + rank)
        else:
            bounds[u] = (cut, length)
    return bounds


def _orders(lat: SmoothLattice, perm: tuple[int, ...]):
    """Odd elements sorted lexicographically by exponents in ``perm`` order."""
    if len(perm) <= 1:
        return sorted(lat.chains)
    return sorted(lat.chains, key=lambda u: tuple(lat.exponents[u][1 + j] for j in perm))


def _permutations(lat: SmoothLattice):
    dims = len(lat.basis.odd_primes)
    return list(permutations(range(dims))) if dims >= 2 else [()]


def compile_schedule(order, bounds, odd_primes):
    """Turn an element order plus per-element bounds into interpreter steps.

    ``order`` must list every element after all of its lower covers.
    """
    pos = {u: k for k, u in enumerate(order)}
    ups = {u: [u * p for p in odd_primes if u * p in pos] for u in order}
    last = {u: max((pos[w] for w in ups[u]), default=-1) for u in order}
    live: list[int] = []
    steps = []
    for k, v in enumerate(order):
        lo, hi = bounds[v]
        index = {u: j for j, u in enumerate(live)}
        dpos = tuple(index[v // p] for p in odd_primes if v % p == 0)
        keep = tuple(j for j, u in enumerate(live) if last[u] > k)
        append = last[v] > k
        cap = max((bounds[w][1] for w in ups[v]), default=hi)
        steps.append((dpos, keep, append, lo, hi, max(cap, lo)))
        live = [u for u in live if last[u] > k] + ([v] if append else [])
    return steps


RACE_MIN_CHAINS = 30


@lru_cache(maxsize=None)
def _raced_perm(l: int, kind: CountKind, bucket: int) -> tuple[int, ...]:
    """Fastest element order for lattices with limit in [2^(bucket-1), 2^bucket).

    Every order is timed (by DP states produced, so deterministically) on a
    lattice two to four times smaller; the ranking carries over well.
    """
    basis = first_primes(l)
    ref = max(1, 1 << max(0, bucket - 2))
    lat = generate_lattice(basis, ref)
    perms = _permutations(lat)
    if len(perms) == 1 or len(lat.chains) < RACE_MIN_CHAINS:
        return perms[0]
    bounds = _chain_bounds(lat, kind, ref)
    if any(lo > hi for lo, hi in bounds.values()):
        return perms[0]
    best, best_work = perms[0], None
    for perm in perms:
        steps = compile_schedule(_orders(lat, perm), bounds, basis.odd_primes)
        try:
            _, work = kernel.run_schedule(steps, budget=best_work, with_work=True)
        except BudgetExceeded:
            continue
        if best_work is None or work < best_work:
            best, best_work = perm, work
    return best


def _schedule(lat: SmoothLattice, kind: CountKind, i: int, perm=None):
    bounds = _chain_bounds(lat, kind, i)
    if any(lo > hi for lo, hi in bounds.values()):
        return None
    if perm is None:
        if len(lat.chains) < RACE_MIN_CHAINS:
            perm = _permutations(lat)[0]
        else:
            perm = _raced_perm(lat.basis.l, kind, i.bit_length())
    return compile_schedule(_orders(lat, perm), bounds, lat.basis.odd_primes)


def _check_ceiling(lat: SmoothLattice, ceiling: int):
    if len(lat.elements) > ceiling:
        raise ResourceLimitError(
            f"M_{lat.basis.l}({lat.limit}) has {len(lat.elements)} elements, "
            f"above the ceiling of {ceiling}"
        )


def count_kind(lat: SmoothLattice, kind: CountKind, i: int | None = None,
               ceiling: int = DEFAULT_CEILING, backend: str | None = None) -> int:
    """Dispatch to the DP for ``kind``; ``i`` defaults to the lattice limit."""
    if i is None:
        i = lat.limit
    if i != lat.limit:
        raise ValueError(f"count requires the lattice M_l({i}), got limit {lat.limit}")
    _check_ceiling(lat, ceiling)
    steps = _schedule(lat, kind, i)
    if steps is None:
        return 0
    return kernel.run_schedule(steps, backend)


def count_all_antichains(lat: SmoothLattice, **kw) -> int:
    return count_kind(lat, CountKind.AllAll, **kw)


def count_truncated_antichains(lat: SmoothLattice, i: int, **kw) -> int:
    return count_kind(lat, CountKind.AllTruncated, i, **kw)


def count_max_antichains(lat: SmoothLattice, **kw) -> int:
    return count_kind(lat, CountKind.MaxAll, **kw)


def count_truncated_max_antichains(lat: SmoothLattice, i: int, **kw) -> int:
    """Max-size antichains of M_l(i) lying above i/q.

    The size is that of M_l(i)'s maximum antichain, not the truncated poset's.
    """
    return count_kind(lat, CountKind.MaxTruncated, i, **kw)


def _comparability(elems):
    comp = []
    for a in elems:
        mask = 0
        for j, b in enumerate(elems):
            if a != b and (a % b == 0 or b % a == 0):
                mask |= 1 << j
        comp.append(mask)
    return comp


def _size_histogram(elems) -> list[int]:
    """hist[k] = number of antichains of size k among ``elems``."""
    comp = _comparability(elems)
    hist = [0] * (len(elems) + 1)
    stack = [(0, 0, 0)]
    while stack:
        k, chosen, size = stack.pop()
        if k == len(elems):
            hist[size] += 1
            continue
        stack.append((k + 1, chosen, size))
        if not comp[k] & chosen:
            stack.append((k + 1, chosen | (1 << k), size + 1))
    return hist


def brute_force_count(lat: SmoothLattice, kind: CountKind, i: int | None = None) -> int:
    """Count by explicit enumeration of subsets, for validating the DP.

    Subsets are enumerated element by element; a branch is abandoned as soon
    as it contains a comparable pair, since no superset can be an antichain.
    The maximum antichain size is found the same way rather than assumed.
    """
    if i is None:
        i = lat.limit
    n = len(lat.elements)
    if n > BRUTE_FORCE_CEILING:
        raise ResourceLimitError(f"brute force refuses {n} > {BRUTE_FORCE_CEILING} elements")
    q = lat.basis.q
    elems = [m for m in lat.elements if not kind.truncated or m * q > i]
    hist = _size_histogram(elems)
    if not kind.maximum:
        return sum(hist)
    full = hist if not kind.truncated else _size_histogram(list(lat.elements))
    width = max(k for k, c in enumerate(full) if c)
    return hist[width] if width < len(hist) else 0


def recursive_antichain_count(lat: SmoothLattice, truncate_at: int | None = None) -> int:
    """Number of antichains via N(P) = N(P - x) + N(P - x - comparables(x)).

    Memoized on the bitmask of remaining elements; the pivot is the largest
    remaining element.  Independent of the schedule DP, used as a cross-check.
    """
    q = lat.basis.q
    elems = [m for m in lat.elements if truncate_at is None or m * q > truncate_at]
    comp = _comparability(elems)
    memo = {0: 1}

    def go(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        x = mask.bit_length() - 1
        rest = mask & ~(1 << x)
        val = go(rest) + go(rest & ~comp[x])
        memo[mask] = val
        return val

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(elems) + 100))
    try:
        return go((1 << len(elems)) - 1)
    finally:
        sys.setrecursionlimit(limit)


@dataclass(frozen=True)
class CountTable:
    """Piecewise-constant table of one count kind over [1, K]."""

    basis: PrimeBasis
    kind: CountKind
    K: int
    rows: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        expect = 1
        for lo, hi, _ in self.rows:
            if lo != expect or hi < lo:
                raise ValueError("table rows must cover [1, K] contiguously")
            expect = hi + 1
        if expect != self.K + 1:
            raise ValueError("table rows must end at K")

    def lookup(self, i: int) -> int:
        if not 1 <= i <= self.K:
            raise IndexError(f"{i} outside table range [1, {self.K}]")
        j = bisect.bisect_right(self._starts, i) - 1
        return self.rows[j][2]

    @property
    def _starts(self):
        starts = self.__dict__.get("_starts_cache")
        if starts is None:
            starts = [lo for lo, _, _ in self.rows]
            object.__setattr__(self, "_starts_cache", starts)
        return starts

    def __call__(self, i: int) -> int:
        return self.lookup(i) if i >= 1 else 0


def _segment_count(basis, kind, i, ceiling, backend):
    return count_kind(generate_lattice(basis, i), kind, i, ceiling=ceiling, backend=backend)


def build_table(basis: PrimeBasis, kind: CountKind, K: int, *, threads: int = 1,
                ceiling: int = DEFAULT_CEILING, backend: str | None = None,
                start: CountTable | None = None) -> CountTable:
    """Evaluate the DP once per breakpoint segment of [1, K].

    ``start`` may hold a shorter table for the same basis and kind; its rows
    are reused and only the remaining segments are computed.
    """
    if K < 1:
        raise ValueError("K must be positive")
    part = breakpoints(basis, K, truncated=kind.truncated)
    known = {}
    if start is not None:
        if start.basis != basis or start.kind != kind:
            raise ValueError("seed table does not match basis/kind")
        for lo, hi, c in start.rows:
            known[lo] = c
    todo = [lo for lo, _ in part if lo not in known]
    # largest lattices first so a ceiling refusal happens before the bulk of work
    if todo:
        _check_ceiling(generate_lattice(basis, max(todo)), ceiling)
    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda i: _segment_count(basis, kind, i, ceiling, backend), todo))
    else:
        values = [_segment_count(basis, kind, i, ceiling, backend) for i in todo]
    known.update(zip(todo, values))
    rows = tuple((lo, hi, known[lo]) for lo, hi in part)
    return CountTable(basis, kind, K, rows)
