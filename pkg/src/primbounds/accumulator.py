"""Compensated summation of logarithms in extended precision."""

from __future__ import annotations

from fractions import Fraction

import mpmath

DEFAULT_DPS = 50


def make_context(dps: int = DEFAULT_DPS) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


class LogAccumulator:
    """Running natural-log of a product, summed with Neumaier compensation.

    Terms are added in call order; with a fixed order the result is
    bit-identical from run to run.
    """

    def __init__(self, ctx=None):
        self.ctx = ctx or make_context()
        self.value = self.ctx.mpf(0)
        self.compensation = self.ctx.mpf(0)
        self.term_count = 0

    def _to_mpf(self, x):
        if isinstance(x, Fraction):
            return self.ctx.mpf(x.numerator) / x.denominator
        return self.ctx.mpf(x)

    def add(self, term) -> None:
        term = self._to_mpf(term)
        t = self.value + term
        if abs(self.value) >= abs(term):
            self.compensation += (self.value - t) + term
        else:
            self.compensation += (term - t) + self.value
        self.value = t
        self.term_count += 1

    def add_log_power(self, base: int, exponent: Fraction):
        """Add ``exponent * log(base)`` and return the added amount."""
        if exponent == 0 or base == 1:
            self.term_count += 1
            return self.ctx.mpf(0)
        if base <= 0:
            raise ValueError(f"log of nonpositive count {base}")
        term = self.ctx.log(self.ctx.mpf(base)) * self._to_mpf(exponent)
        self.add(term)
        return term

    def total(self):
        return self.value + self.compensation
