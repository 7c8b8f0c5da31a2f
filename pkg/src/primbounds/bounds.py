"""Bounds on the growth constants alpha and beta.

alpha is the growth rate of the number of n-element primitive subsets of
[2n]; beta that of all primitive subsets of [n].  Every bound is a product
of counts raised to rational exponents, evaluated here as a sum of logs.
Exponents are exact :class:`~fractions.Fraction` objects until the final
multiply; sums over ``i`` are grouped by breakpoint segment and collapsed
with the telescoping identity.

The results are numerical estimates at ~50 significant digits of working
precision, not directed-rounding certified enclosures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .accumulator import LogAccumulator, make_context
from .antichains import CountKind, CountTable, build_table
from .errors import InvariantViolation
from .lattice import (
    PrimeBasis,
    breakpoints,
    count_at_most,
    first_primes,
    telescoped_weight_sum,
)


class Target(enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"

    @property
    def lead(self) -> int:
        # alpha lives on [2n], beta on [n]
        return 2 if self is Target.ALPHA else 1

    @property
    def truncated_kind(self) -> CountKind:
        return CountKind.MaxTruncated if self is Target.ALPHA else CountKind.AllTruncated

    @property
    def full_kind(self) -> CountKind:
        return CountKind.MaxAll if self is Target.ALPHA else CountKind.AllAll


class Flavor(enum.Enum):
    BASIC_LOWER = "basic-lower"
    BASIC_UPPER = "basic-upper"
    CRUDE_UPPER = "crude-upper"
    IMPROVED_LOWER = "improved-lower"
    IMPROVED_UPPER = "improved-upper"

    @property
    def is_lower(self) -> bool:
        return self in (Flavor.BASIC_LOWER, Flavor.IMPROVED_LOWER)


def _as_target(t) -> Target:
    return t if isinstance(t, Target) else Target(str(t).lower())


@dataclass(frozen=True)
class BoundConfig:
    target: Target
    flavor: Flavor
    l: int | None = None
    K: int | None = None
    Ks: tuple[int, ...] | None = None
    include_step0: bool = True
    K0: int | None = None
    leftover: "Leftover | str" = "exact"

    @property
    def S(self) -> int | None:
        return len(self.Ks) if self.Ks is not None else None

    def validate(self) -> None:
        improved = self.flavor in (Flavor.IMPROVED_LOWER, Flavor.IMPROVED_UPPER)
        if improved:
            if not self.Ks or any(k < 1 for k in self.Ks):
                raise ValueError("improved flavors need a nonempty vector of positive Ks")
        else:
            if self.l is None or self.K is None or self.l < 0 or self.K < 1:
                raise ValueError("basic flavors need l >= 0 and K >= 1")
        if self.flavor is Flavor.CRUDE_UPPER and self.target is not Target.ALPHA:
            raise ValueError("the crude chain bound applies to alpha only")
        _as_leftover(self.leftover)

    def to_dict(self) -> dict:
        return {
            "target": self.target.value,
            "flavor": self.flavor.value,
            "l": self.l,
            "K": self.K,
            "S": self.S,
            "Ks": list(self.Ks) if self.Ks is not None else None,
            "include_step0": self.include_step0,
            "K0": self.K0,
            "leftover": _as_leftover(self.leftover).value,
        }


@dataclass
class BoundReport:
    config: BoundConfig
    log_bound: object  # mpf
    direction: str
    steps: list = field(default_factory=list)
    tables_used: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def bound(self) -> str:
        ctx = self.log_bound.context
        return ctx.nstr(ctx.exp(self.log_bound), 12, strip_zeros=False)

    @property
    def value(self) -> float:
        return float(self.log_bound.context.exp(self.log_bound))

    def to_dict(self) -> dict:
        ctx = self.log_bound.context
        return {
            "config": self.config.to_dict(),
            "direction": self.direction,
            "bound": self.bound,
            "log_bound": ctx.nstr(self.log_bound, 30),
            "steps": [[label, ctx.nstr(v, 25)] for label, v in self.steps],
            "tables_used": [[l, k.value, K] for l, k, K in self.tables_used],
            "notes": list(self.notes),
            "precision": "numerical, not certified-rounded",
        }


TableGetter = Callable[[int, CountKind, int], CountTable]


class TableSource:
    """In-memory memo of count tables, built on demand.

    A table for a larger ``K`` serves every smaller request; growing a table
    reuses the rows already known.
    """

    def __init__(self, threads: int = 1, backend: str | None = None, store=None):
        self.threads = threads
        self.backend = backend
        self.store = store
        self._tables: dict[tuple[int, CountKind], CountTable] = {}

    def __call__(self, l: int, kind: CountKind, K: int) -> CountTable:
        key = (l, kind)
        have = self._tables.get(key)
        if have is None and self.store is not None:
            have = self.store.load(first_primes(l), kind)
        if have is not None and have.K >= K:
            self._tables[key] = have
            return have
        table = build_table(first_primes(l), kind, K, threads=self.threads,
                            backend=self.backend, start=have)
        self._tables[key] = table
        if self.store is not None:
            self.store.save(table)
        return table


_default_source = TableSource()


def _resolve(tables) -> TableGetter:
    return tables if tables is not None else _default_source


def _check_table(table: CountTable, basis: PrimeBasis, kind: CountKind, K: int):
    if table.basis != basis:
        raise ValueError(f"table basis l={table.basis.l} does not match l={basis.l}")
    if table.kind != kind:
        raise ValueError(f"expected a {kind.name} table, got {table.kind.name}")
    if table.K < K:
        raise ValueError(f"table covers [1, {table.K}] but K={K} was requested")


def _segments(table: CountTable, lo: int, hi: int):
    """Rows of ``table`` clipped to [lo, hi]."""
    for a, b, c in table.rows:
        a2, b2 = max(a, lo), min(b, hi)
        if a2 <= b2:
            yield a2, b2, c


def _product_log(acc: LogAccumulator, table: CountTable, coef: Fraction, lo: int, hi: int):
    before = acc.total()
    for a, b, c in _segments(table, lo, hi):
        w = coef * telescoped_weight_sum(a, b)
        if c == 0 and w != 0:
            raise InvariantViolation(f"zero count on [{a}, {b}] with positive weight")
        acc.add_log_power(c, w)
    return acc.total() - before


# ---------------------------------------------------------------------------
# basic bounds


def eta(target, basis: PrimeBasis, K: int, truncated: bool = False) -> Fraction:
    """Density of left-over elements after covering by lattices with i <= K.

    ``truncated`` selects the variant restricted to (n/q, n]-type windows,
    where each lattice only contributes its elements above i/q.
    """
    target = _as_target(target)
    lead = target.lead
    coef = lead * basis.density()
    if truncated:
        total = lead * Fraction(basis.q - 1, basis.q)
        part = breakpoints(basis, K, truncated=True)
        for a, b in part:
            size = count_at_most(basis.primes, a) - count_at_most(basis.primes, a // basis.q)
            total -= coef * telescoped_weight_sum(a, b) * size
    else:
        total = Fraction(lead)
        for a, b in breakpoints(basis, K, truncated=False):
            total -= coef * telescoped_weight_sum(a, b) * count_at_most(basis.primes, a)
    return total


def eta_termwise(target, basis: PrimeBasis, K: int, truncated: bool = False) -> Fraction:
    """Same quantity as :func:`eta`, one term per i (slow; for checking)."""
    target = _as_target(target)
    lead = target.lead
    coef = lead * basis.density()
    total = lead * Fraction(basis.q - 1, basis.q) if truncated else Fraction(lead)
    for i in range(1, K + 1):
        size = count_at_most(basis.primes, i)
        if truncated:
            size -= count_at_most(basis.primes, i // basis.q)
        total -= coef * Fraction(size, i * (i + 1))
    return total


def _basic_c(acc, target: Target, basis: PrimeBasis, K: int, table: CountTable):
    coef = target.lead * basis.density()
    return _product_log(acc, table, coef, 1, K)


def basic_lower(target, basis: PrimeBasis, K: int, table: CountTable | None = None,
                tables=None) -> BoundReport:
    target = _as_target(target)
    kind = target.truncated_kind
    if table is None:
        table = _resolve(tables)(basis.l, kind, K)
    _check_table(table, basis, kind, K)
    acc = LogAccumulator()
    contrib = _basic_c(acc, target, basis, K, table)
    cfg = BoundConfig(target, Flavor.BASIC_LOWER, l=basis.l, K=K)
    return BoundReport(cfg, acc.total(), "lower", [(f"c'_{basis.l},{K}", contrib)],
                       [(basis.l, kind, K)])


def basic_upper(target, basis: PrimeBasis, K: int, table: CountTable | None = None,
                tables=None) -> BoundReport:
    target = _as_target(target)
    kind = target.full_kind
    if table is None:
        table = _resolve(tables)(basis.l, kind, K)
    _check_table(table, basis, kind, K)
    acc = LogAccumulator()
    contrib = _basic_c(acc, target, basis, K, table)
    e = eta(target, basis, K)
    eta_term = acc.ctx.log(2) * acc._to_mpf(e)
    acc.add(eta_term)
    cfg = BoundConfig(target, Flavor.BASIC_UPPER, l=basis.l, K=K)
    return BoundReport(cfg, acc.total(), "upper",
                       [(f"c_{basis.l},{K}", contrib), ("eta*log2", eta_term)],
                       [(basis.l, kind, K)])


def chain_exponent(basis: PrimeBasis) -> Fraction:
    """(s+2)/2^s with s = floor(log2 q)."""
    s = basis.q.bit_length() - 1
    return Fraction(s + 2, 2 ** s)


def crude_upper_alpha(basis: PrimeBasis, K: int, table: CountTable | None = None,
                      tables=None) -> BoundReport:
    kind = CountKind.MaxTruncated
    if table is None:
        table = _resolve(tables)(basis.l, kind, K)
    _check_table(table, basis, kind, K)
    acc = LogAccumulator()
    contrib = _basic_c(acc, Target.ALPHA, basis, K, table)
    log2 = acc.ctx.log(2)
    e_term = log2 * acc._to_mpf(eta(Target.ALPHA, basis, K, truncated=True))
    acc.add(e_term)
    c_term = log2 * acc._to_mpf(chain_exponent(basis))
    acc.add(c_term)
    cfg = BoundConfig(Target.ALPHA, Flavor.CRUDE_UPPER, l=basis.l, K=K)
    return BoundReport(cfg, acc.total(), "upper",
                       [(f"c'_{basis.l},{K}", contrib), ("eta'*log2", e_term),
                        ("chain factor", c_term)],
                       [(basis.l, kind, K)])


@dataclass(frozen=True)
class EpsilonSchedule:
    l: int
    K: int | None
    log_K: float
    overflow: bool


K_PRACTICAL_LIMIT = 2 ** 63


def epsilon_schedule(eps: float) -> EpsilonSchedule:
    """Prime count and lattice range that guarantee a (1+eps) approximation."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    l = max(1, math.ceil(10 * math.log(1 / eps) / eps))
    if l < 3:
        # log log l <= 0 here, so the formula gives K <= 1
        log_K = 10 * l * math.log(math.log(l)) * math.log(l) if l > 1 else 0.0
        return EpsilonSchedule(l, 1, log_K, False)
    log_K = 10 * l * math.log(math.log(l)) * math.log(l)
    if log_K >= math.log(K_PRACTICAL_LIMIT):
        return EpsilonSchedule(l, None, log_K, True)
    return EpsilonSchedule(l, max(1, math.ceil(math.exp(log_K))), log_K, False)


# ---------------------------------------------------------------------------
# staged (improved) bounds


class Leftover(enum.Enum):
    """How much of a window (n/(i+1), n/i] counts as still uncovered.

    A lattice L_l(t) with floor(n/t) = i stays free at level v when
    n * P_v / t >= K_v + 1, i.e. when x = n/t is at least (K_v + 1) / P_v.
    ``EXACT`` integrates dx/x^2 over the part of [i, i+1) meeting that
    condition; ``INDICATOR`` keeps the whole window only when i itself does,
    which is smaller (never larger) and ignores partially covered windows.
    """

    EXACT = "exact"
    INDICATOR = "indicator"


def _as_leftover(mode) -> Leftover:
    return mode if isinstance(mode, Leftover) else Leftover(str(mode).lower())


_ZERO = Fraction(0)


def _window(a: int, b: int, theta: Fraction, mode: Leftover) -> Fraction:
    """Measure of {x in [a, b+1) : x >= theta} under dx/x^2 (per-integer for INDICATOR)."""
    if mode is Leftover.EXACT:
        lo = theta if theta > a else Fraction(a)
        return 1 / lo - Fraction(1, b + 1) if lo < b + 1 else _ZERO
    start = a if theta <= a else -((-theta.numerator) // theta.denominator)
    return telescoped_weight_sum(start, b) if start <= b else _ZERO


def _geometric_tail(primes: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for p in primes:
        out *= Fraction(p, p - 1)
    return out


def _nested_window(a, b, primes, Ks, v, P, theta, mode) -> Fraction:
    """sum over a_{v+1}, ..., a_S of prod p^-a times the free part of [a, b+1).

    ``v`` is 0-based (prime ``primes[v]`` goes with ``Ks[v]``); ``P`` is the
    product of the prime powers fixed so far and ``theta`` the largest
    threshold they impose.  Once every remaining threshold is at most ``a``
    the rest of the sum is a product of geometric series.
    """
    S = len(Ks)
    if v == S:
        return _window(a, b, theta, mode)
    p = primes[v]
    total, power, Pv = _ZERO, Fraction(1), P
    while any(Fraction(Ks[w] + 1, Pv) > a for w in range(v, S)):
        th = max(theta, Fraction(Ks[v] + 1, Pv))
        total += power * _nested_window(a, b, primes, Ks, v + 1, Pv, th, mode)
        Pv *= p
        power /= p
    return total + power * _geometric_tail(primes[v:S]) * _window(a, b, theta, mode)


def _density(primes: Sequence[int]) -> Fraction:
    d = Fraction(1)
    for p in primes:
        d *= Fraction(p - 1, p)
    return d


def _check_weight_args(basis, Ks, l):
    S = len(Ks)
    if not 0 <= l <= S:
        raise ValueError("need 0 <= l <= S")
    if len(basis.primes) < S:
        raise ValueError("basis too small for the K vector")


def segment_weight(target, basis: PrimeBasis, Ks: Sequence[int], l: int, a: int, b: int,
                   mode=Leftover.EXACT) -> Fraction:
    """sum_{i=a}^{b} w(l, i) in the general nested form, exactly.

    ``Ks[v-1]`` is K_v and ``basis`` must hold at least S = len(Ks) primes.
    """
    target, mode = _as_target(target), _as_leftover(mode)
    _check_weight_args(basis, Ks, l)
    S = len(Ks)
    base = target.lead * _density(basis.primes[:S])
    return base * _nested_window(a, b, basis.primes, Ks, l, 1, _ZERO, mode)


def segment_weight_simplified(target, basis: PrimeBasis, Ks: Sequence[int], l: int,
                              a: int, b: int, mode=Leftover.EXACT) -> Fraction:
    """Single-sum form of :func:`segment_weight`, valid for non-increasing Ks.

    Then the binding threshold is always the one from K_{l+1}, and the sums
    over deeper exponents are plain geometric series.
    """
    target, mode = _as_target(target), _as_leftover(mode)
    _check_weight_args(basis, Ks, l)
    S = len(Ks)
    if l == S:
        return target.lead * _density(basis.primes[:S]) * _window(a, b, _ZERO, mode)
    p, K_next = basis.primes[l], Ks[l]
    total, scale, pw = _ZERO, Fraction(1), 1
    while Fraction(K_next + 1, pw) > a:
        total += scale * _window(a, b, Fraction(K_next + 1, pw), mode)
        pw *= p
        scale /= p
    total += scale * Fraction(p, p - 1) * _window(a, b, _ZERO, mode)
    return target.lead * _density(basis.primes[: l + 1]) * total


def weight(target, basis: PrimeBasis, Ks: Sequence[int], l: int, i: int,
           mode=Leftover.EXACT) -> Fraction:
    """Share of the window (n/(i+1), n/i] whose l-lattices are still free."""
    return segment_weight(target, basis, Ks, l, i, i, mode)


def weight_simplified(target, basis: PrimeBasis, Ks: Sequence[int], l: int, i: int,
                      mode=Leftover.EXACT) -> Fraction:
    return segment_weight_simplified(target, basis, Ks, l, i, i, mode)


def _nonincreasing(Ks: Sequence[int]) -> bool:
    return all(a >= b for a, b in zip(Ks, Ks[1:]))


def _validate_Ks(Ks) -> tuple[int, ...]:
    Ks = tuple(int(k) for k in Ks)
    if not Ks or any(k < 1 for k in Ks):
        raise ValueError("K vector must be nonempty and positive")
    return Ks


def improved_lower(target, Ks: Sequence[int], tables=None, include_step0: bool = True,
                   K0: int | None = None, leftover=Leftover.EXACT) -> BoundReport:
    """Product of the staged lower-bound factors, largest lattices first.

    For beta the final step over l = 0 is included unless disabled; ``K0``
    defaults to K_1.
    """
    target = _as_target(target)
    Ks = _validate_Ks(Ks)
    S = len(Ks)
    basis_S = first_primes(S)
    get = _resolve(tables)
    leftover = _as_leftover(leftover)
    notes = []
    if _nonincreasing(Ks):
        seg_weight = segment_weight_simplified
    else:
        seg_weight = segment_weight
        notes.append("K vector is not non-increasing; general nested weights used")
    kind = target.truncated_kind
    acc = LogAccumulator()
    steps, used = [], []
    lows = range(S, -1, -1) if (target is Target.BETA and include_step0) else range(S, 0, -1)
    for l in lows:
        K_l = Ks[l - 1] if l >= 1 else (K0 if K0 is not None else Ks[0])
        basis = first_primes(l)
        table = get(l, kind, K_l)
        _check_table(table, basis, kind, K_l)
        used.append((l, kind, K_l))
        before = acc.total()
        for a, b, c in _segments(table, 1, K_l):
            w = seg_weight(target, basis_S, Ks, l, a, b, leftover)
            if c == 0 and w != 0:
                raise InvariantViolation(f"zero count for l={l} on [{a}, {b}]")
            acc.add_log_power(c, w)
        steps.append((f"lambda_{l}", acc.total() - before))
    cfg = BoundConfig(target, Flavor.IMPROVED_LOWER, Ks=Ks, include_step0=include_step0, K0=K0,
                      leftover=leftover)
    return BoundReport(cfg, acc.total(), "lower", steps, used, notes)


def improved_upper(target, Ks: Sequence[int], tables=None) -> BoundReport:
    """Staged merge bound starting from the trivial 4 (alpha) or 2 (beta)."""
    target = _as_target(target)
    Ks = _validate_Ks(Ks)
    S = len(Ks)
    get = _resolve(tables)
    kind = target.full_kind
    notes = []
    if not _nonincreasing(Ks):
        notes.append("K vector is not non-increasing")
    acc = LogAccumulator()
    ctx = acc.ctx
    log2 = ctx.log(2)
    acc.add(log2 * target.lead)
    steps = [("trivial", log2 * target.lead)]
    used = []
    for l in range(1, S + 1):
        basis = first_primes(l)
        p_l = basis.primes[-1]
        K_l = Ks[l - 1]
        before = acc.total()
        if target is Target.ALPHA and l == 1:
            # odd t only: the whole chain replaces its singletons at once
            table = get(1, kind, K_l)
            _check_table(table, basis, kind, K_l)
            used.append((1, kind, K_l))
            for a, b, c in _segments(table, 1, K_l):
                size = count_at_most(basis.primes, a)
                if c != size:
                    raise InvariantViolation(f"r_1({a}) = {c} but |M_1({a})| = {size}")
                w = telescoped_weight_sum(a, b)
                acc.add(ctx.mpf(w.numerator) / w.denominator
                        * (ctx.log(size) - size * log2))
            steps.append(("step 1", acc.total() - before))
            continue
        coef = Fraction(target.lead, 1)
        for p in basis.primes[:-1]:
            coef *= Fraction(p - 1, p)
        merged = get(l, kind, K_l)
        prev = get(l - 1, kind, K_l)
        _check_table(merged, basis, kind, K_l)
        _check_table(prev, first_primes(l - 1), kind, K_l)
        used += [(l, kind, K_l), (l - 1, kind, K_l)]
        cuts = breakpoints(basis, K_l, truncated=False)
        for a, b in cuts:
            a = max(a, p_l)
            if a > b:
                continue
            whole, left, right = merged(a), prev(a), merged(a // p_l)
            if whole > left * right:
                raise InvariantViolation(
                    f"merge ratio above 1 at l={l}, i={a}: {whole} > {left}*{right}")
            w = coef * telescoped_weight_sum(a, b)
            acc.add_log_power(whole, w)
            acc.add_log_power(left, -w)
            acc.add_log_power(right, -w)
        steps.append((f"step {l}", acc.total() - before))
    cfg = BoundConfig(target, Flavor.IMPROVED_UPPER, Ks=Ks)
    return BoundReport(cfg, acc.total(), "upper", steps, used, notes)


def compute(config: BoundConfig, tables=None) -> BoundReport:
    config.validate()
    t = config.target
    if config.flavor is Flavor.IMPROVED_LOWER:
        return improved_lower(t, config.Ks, tables, config.include_step0, config.K0,
                              config.leftover)
    if config.flavor is Flavor.IMPROVED_UPPER:
        return improved_upper(t, config.Ks, tables)
    basis = first_primes(config.l)
    if config.flavor is Flavor.BASIC_LOWER:
        return basic_lower(t, basis, config.K, tables=tables)
    if config.flavor is Flavor.BASIC_UPPER:
        return basic_upper(t, basis, config.K, tables=tables)
    return crude_upper_alpha(basis, config.K, tables=tables)
