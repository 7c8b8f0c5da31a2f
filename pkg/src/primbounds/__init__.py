"""Bounds on the growth constants of primitive subsets of [n] and [2n]."""

from .kernel import BACKEND
from .lattice import (
    BreakpointPartition,
    PrimeBasis,
    SmoothLattice,
    breakpoints,
    first_primes,
    generate_lattice,
    max_antichain_size,
    telescoped_weight_sum,
)
from .antichains import (
    CountKind,
    CountTable,
    brute_force_count,
    build_table,
    count_all_antichains,
    count_max_antichains,
    count_truncated_antichains,
    count_truncated_max_antichains,
)

__version__ = "0.1.0"
