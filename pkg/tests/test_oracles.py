import pytest

from primbounds.errors import ResourceLimitError
from primbounds.lattice import first_primes
from primbounds.oracles import (
    OracleMethod,
    coprime_bound_eval,
    coprime_count_exact,
    f_exact,
    fq_exact,
    g_exact,
    iter_f_sets,
    prime_count,
    primitive_check,
)


def test_primitive_check():
    assert primitive_check([])
    assert primitive_check({2, 3, 5})
    assert not primitive_check({3, 6})
    assert primitive_check({1})
    assert not primitive_check({1, 7})


def test_f_known_values():
    assert [f_exact(n).value for n in (1, 2, 3)] == [2, 2, 3]
    assert f_exact(7).value == 12 and f_exact(8).value == 10
    res = f_exact(7)
    assert res.method is OracleMethod.CHAIN_BACKTRACKING and res.elapsed >= 0


def test_f_methods_agree():
    for n in range(1, 11):
        assert f_exact(n).value == f_exact(n, "NaiveSubsets").value


def test_f_witnesses_pick_one_per_chain():
    for n in range(1, 9):
        sets = list(iter_f_sets(n))
        assert len(sets) == f_exact(n).value
        for s in sets:
            assert primitive_check(s)
            odd_parts = sorted(m >> ((m & -m).bit_length() - 1) for m in s)
            assert odd_parts == list(range(1, 2 * n, 2))


def test_g_values_and_methods():
    assert g_exact(1).value == 2 and g_exact(3).value == 5
    vals = [g_exact(n).value for n in range(1, 21)]
    assert vals == [g_exact(n, "NaiveSubsets").value for n in range(1, 21)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert g_exact(40).value >= vals[-1]


def test_fq():
    b = first_primes(2)
    assert fq_exact(3, b).value == 3
    assert fq_exact(2, b).value == f_exact(2).value == 2
    for n in range(1, 11):
        for l in range(0, 4):
            basis = first_primes(l)
            v = fq_exact(n, basis).value
            assert v == fq_exact(n, basis, "NaiveSubsets").value
            assert v <= f_exact(n).value
    assert fq_exact(20, b).value <= f_exact(20).value


def test_coprime():
    assert coprime_count_exact(3).value == 8
    assert coprime_count_exact(4).value == 12
    for n in range(1, 21):
        assert coprime_count_exact(n).value == coprime_count_exact(n, "NaiveSubsets").value
    for n in range(2, 37):
        assert coprime_count_exact(n).value >= 2 ** (prime_count(n) + 1)


def test_prime_count_and_reference():
    assert [prime_count(n) for n in (0, 1, 2, 10, 25, 100)] == [0, 0, 1, 4, 9, 25]
    ref = coprime_bound_eval(4)
    assert ref.pi == 2
    assert ref.lower < ref.mid < ref.upper
    assert abs(ref.mid - (2 * ref.lower.context.log(2) + 2)) < 1e-25
    with pytest.raises(ValueError):
        coprime_bound_eval(1)


def test_ceilings_and_bad_input():
    with pytest.raises(ResourceLimitError):
        f_exact(25)
    with pytest.raises(ResourceLimitError):
        f_exact(11, "NaiveSubsets")
    with pytest.raises(ResourceLimitError):
        g_exact(41)
    with pytest.raises(ResourceLimitError):
        coprime_count_exact(37)
    with pytest.raises(ResourceLimitError):
        fq_exact(21, first_primes(2))
    with pytest.raises(ValueError):
        f_exact(0)
    with pytest.raises(ValueError):
        f_exact(3, "MaskDP")
