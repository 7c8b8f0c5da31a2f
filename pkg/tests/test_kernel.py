import os
import subprocess
import sys

import pytest

from primbounds import kernel
from primbounds.antichains import CountKind, _schedule
from primbounds.errors import BudgetExceeded
from primbounds.lattice import first_primes, generate_lattice

needs_compiled = pytest.mark.skipif("compiled" not in kernel.available_backends(),
                                    reason="compiled extension not built")


@needs_compiled
@pytest.mark.parametrize("l,kind,i", [
    (2, CountKind.AllAll, 5000), (3, CountKind.MaxTruncated, 3000),
    (3, CountKind.AllTruncated, 9000), (4, CountKind.MaxAll, 700), (5, CountKind.AllTruncated, 98),
])
def test_backends_agree(l, kind, i):
    steps = _schedule(generate_lattice(first_primes(l), i), kind, i)
    assert kernel.run_schedule(steps, "python") == kernel.run_schedule(steps, "compiled")


def _independent(n, hi):
    # n incomparable elements nobody reads later, each free in [0, hi]: (hi+1)^n
    return [((), (), False, 0, hi, hi)] * n


@needs_compiled
def test_packing_overflow_falls_back_to_python():
    steps = [((), (), True, 0, 100, 100), ((0,), (), False, 0, 100, 100)]  # 100 > 63 does not pack
    assert kernel.run_schedule(steps, "compiled") == kernel.run_schedule(steps, "python") == 101 * 102 // 2


@needs_compiled
def test_count_overflow_falls_back_to_python():
    assert kernel.run_schedule(_independent(21, 63), "compiled") == 64 ** 21
    assert kernel.run_schedule(_independent(22, 63), "compiled") == 64 ** 22  # 2^132


@pytest.mark.parametrize("backend", kernel.available_backends())
def test_budget(backend):
    steps = _schedule(generate_lattice(first_primes(3), 2000), CountKind.AllAll, 2000)
    total, work = kernel.run_schedule(steps, backend, with_work=True)
    with pytest.raises(BudgetExceeded):
        kernel.run_schedule(steps, backend, budget=work // 2)
    assert kernel.run_schedule(steps, backend, budget=work) == total


def test_pure_env_forces_python():
    env = dict(os.environ, PRIMBOUNDS_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from primbounds.kernel import BACKEND; print(BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
