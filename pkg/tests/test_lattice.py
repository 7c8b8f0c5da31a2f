from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from primbounds.lattice import (
    breakpoints,
    count_at_most,
    first_primes,
    generate_lattice,
    max_antichain_size,
    smooth_numbers,
    telescoped_weight_sum,
)


def test_first_primes():
    b = first_primes(3)
    assert b.primes == (2, 3, 5) and b.q == 7
    assert first_primes(0).primes == () and first_primes(0).q == 2
    assert b.fingerprint() == "3;2,3,5"
    assert b.density() == Fraction(1, 2) * Fraction(2, 3) * Fraction(4, 5)
    with pytest.raises(ValueError):
        first_primes(-1)


def test_smooth_numbers_small():
    assert smooth_numbers((2, 3), 20) == (1, 2, 3, 4, 6, 8, 9, 12, 16, 18)
    assert smooth_numbers((), 10) == (1,)
    assert count_at_most((2, 3), 0) == 0


@given(st.integers(0, 4), st.integers(1, 3000))
@settings(max_examples=60, deadline=None)
def test_smooth_numbers_match_filter(l, x):
    b = first_primes(l)
    assert list(smooth_numbers(b.primes, x)) == [m for m in range(1, x + 1) if b.is_smooth(m)]


def test_lattice_chains_and_width():
    lat = generate_lattice(first_primes(2), 20)
    assert lat.chains[1] == (1, 2, 4, 8, 16)
    assert lat.chains[9] == (9, 18)
    assert max_antichain_size(lat) == len([m for m in lat.elements if m % 2])
    assert generate_lattice(first_primes(0), 50).elements == (1,)
    with pytest.raises(ValueError):
        generate_lattice(first_primes(1), 0)


@given(st.integers(0, 3), st.integers(1, 2000), st.booleans())
@settings(max_examples=60, deadline=None)
def test_breakpoint_segments_are_constant(l, K, truncated):
    b = first_primes(l)
    part = breakpoints(b, K, truncated)
    assert part.segments[0][0] == 1 and part.segments[-1][1] == K
    for (a, e), (a2, _) in zip(part.segments, part.segments[1:]):
        assert a2 == e + 1
    for a, e in part.segments:
        for i in (a, (a + e) // 2, e):
            assert count_at_most(b.primes, i) == count_at_most(b.primes, a)
            if truncated:
                assert count_at_most(b.primes, i // b.q) == count_at_most(b.primes, a // b.q)
    i = (K + 1) // 2
    a, e = part.segments[part.locate(i)]
    assert a <= i <= e


@given(st.integers(1, 400), st.integers(0, 400))
def test_telescoping(a, span):
    b = a + span
    assert telescoped_weight_sum(a, b) == sum(Fraction(1, i * (i + 1)) for i in range(a, b + 1))


def test_telescoping_empty_and_invalid():
    assert telescoped_weight_sum(5, 4) == 0
    with pytest.raises(ValueError):
        telescoped_weight_sum(5, 2)
