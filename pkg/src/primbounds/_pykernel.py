"""Reference interpreter for compiled counting schedules.

A schedule is a list of steps ``(dpos, keep, append, lo, hi, cap)``; see
:func:`primbounds.antichains.compile_schedule` for how one is produced.  The
state is a tuple of (clamped) values of the elements that later steps still
read, mapped to the number of partial assignments producing it.
"""

from operator import itemgetter

from .errors import BudgetExceeded


def _getter(keep):
    if not keep:
        return lambda st: ()
    if len(keep) == 1:
        j = keep[0]
        return lambda st: (st[j],)
    g = itemgetter(*keep)
    return g


def run_schedule(steps, budget=None, with_work=False):
    states = {(): 1}
    work = 0
    for dpos, keep, append, lo, hi, cap in steps:
        nxt = {}
        get = nxt.get
        gather = _getter(keep)
        for st, c in states.items():
            ub = hi
            for j in dpos:
                v = st[j]
                if v < ub:
                    ub = v
            if ub < lo:
                continue
            base = gather(st)
            if append:
                top = ub if ub < cap else cap
                if top < lo:
                    top = lo
                for x in range(lo, top):
                    key = base + (x,)
                    nxt[key] = get(key, 0) + c
                key = base + (top,)
                nxt[key] = get(key, 0) + c * (ub - top + 1)
            else:
                nxt[base] = get(base, 0) + c * (ub - lo + 1)
        states = nxt
        work += len(states)
        if budget is not None and work > budget:
            raise BudgetExceeded(work)
        if not states:
            break
    total = sum(states.values())
    return (total, work) if with_work else total
