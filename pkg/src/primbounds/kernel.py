"""Pick the schedule interpreter at import time.

The compiled extension is used when it was built; ``PRIMBOUNDS_PURE=1`` in
the environment forces the pure-Python interpreter.  Compiled runs that
overflow 128-bit counters are transparently redone in Python.
"""

import os

from . import _pykernel

BACKEND = "python"
_compiled = None

if not os.environ.get("PRIMBOUNDS_PURE"):
    try:
        from . import _ckernel as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        BACKEND = "compiled"


def run_schedule(steps, backend=None, budget=None, with_work=False):
    use = backend or BACKEND
    if use == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        try:
            return _compiled.run_schedule(steps, budget, with_work)
        except OverflowError:
            return _pykernel.run_schedule(steps, budget, with_work)
    return _pykernel.run_schedule(steps, budget, with_work)


def available_backends():
    return ["python"] + (["compiled"] if _compiled is not None else [])
