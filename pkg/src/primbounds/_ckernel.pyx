# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled interpreter for counting schedules (see _pykernel for semantics).

States are packed six bits per value into a 128-bit key and kept in an
open-addressing table; counts are unsigned 128-bit.  Schedules that do not
fit (values above 63, more than 21 live values) or counts that overflow are
reported back so the caller can use the Python interpreter instead.
"""

from libcpp.vector cimport vector
from libc.stdint cimport uint64_t, int64_t

cdef extern from * nogil:
    """
    #include <algorithm>
    #include <cstdint>
    #include <cstring>
    #include <vector>

    typedef unsigned __int128 pb_u128;

    struct PbStep {
        std::vector<int> dpos;
        std::vector<int> keep;
        int append;
        int lo, hi, cap;
    };

    struct PbEntry {
        pb_u128 key;
        pb_u128 val;  // 0 marks an empty slot; stored counts are positive
    };

    struct PbTable {
        std::vector<PbEntry> slots;
        size_t mask = 0, count = 0;

        void reset(size_t expected) {
            size_t cap = 16;
            while (cap < expected * 2) cap <<= 1;
            slots.assign(cap, PbEntry{0, 0});
            mask = cap - 1;
            count = 0;
        }
        static inline uint64_t mix(pb_u128 k) {
            // splitmix64 finalizer over both halves
            uint64_t h = (uint64_t)k ^ ((uint64_t)(k >> 64) * 0x9E3779B97F4A7C15ULL);
            h ^= h >> 30; h *= 0xBF58476D1CE4E5B9ULL;
            h ^= h >> 27; h *= 0x94D049BB133111EBULL;
            h ^= h >> 31;
            return h;
        }
        void grow() {
            std::vector<PbEntry> old = std::move(slots);
            size_t cap = (mask + 1) * 2;
            slots.assign(cap, PbEntry{0, 0});
            mask = cap - 1;
            for (const PbEntry &e : old) {
                if (!e.val) continue;
                size_t h = mix(e.key) & mask;
                while (slots[h].val) h = (h + 1) & mask;
                slots[h] = e;
            }
        }
        // add v (> 0) to the count stored under k; true on overflow
        inline bool add(pb_u128 k, pb_u128 v) {
            if ((count + 1) * 2 > mask + 1) grow();
            size_t h = mix(k) & mask;
            for (;;) {
                PbEntry &e = slots[h];
                if (!e.val) {
                    e.key = k; e.val = v; ++count;
                    return false;
                }
                if (e.key == k) return __builtin_add_overflow(e.val, v, &e.val);
                h = (h + 1) & mask;
            }
        }
    };

    static inline int pb_get(pb_u128 st, int j) {
        return (int)((st >> (6 * j)) & 63);
    }

    /* 0 ok, 1 overflow, 2 budget exceeded */
    static int pb_run(const std::vector<PbStep> &steps, int64_t budget,
                      uint64_t *out_hi, uint64_t *out_lo, int64_t *work) {
        PbTable cur, nxt;
        cur.reset(1);
        cur.add(0, 1);
        *work = 0;
        for (const PbStep &s : steps) {
            nxt.reset(cur.count);
            const size_t w = s.keep.size();
            for (const PbEntry &e : cur.slots) {
                if (!e.val) continue;
                const pb_u128 st = e.key;
                const pb_u128 c = e.val;
                int ub = s.hi;
                for (int j : s.dpos) {
                    int v = pb_get(st, j);
                    if (v < ub) ub = v;
                }
                if (ub < s.lo) continue;
                pb_u128 base = 0;
                for (size_t k = 0; k < w; ++k)
                    base |= (pb_u128)pb_get(st, s.keep[k]) << (6 * k);
                pb_u128 m;
                if (s.append) {
                    int top = std::min(ub, s.cap);
                    if (top < s.lo) top = s.lo;
                    for (int x = s.lo; x < top; ++x) {
                        if (nxt.add(base | ((pb_u128)x << (6 * w)), c)) return 1;
                    }
                    if (__builtin_mul_overflow(c, (pb_u128)(ub - top + 1), &m)) return 1;
                    if (nxt.add(base | ((pb_u128)top << (6 * w)), m)) return 1;
                } else {
                    if (__builtin_mul_overflow(c, (pb_u128)(ub - s.lo + 1), &m)) return 1;
                    if (nxt.add(base, m)) return 1;
                }
            }
            std::swap(cur, nxt);
            *work += (int64_t)cur.count;
            if (budget >= 0 && *work > budget) return 2;
            if (cur.count == 0) break;
        }
        pb_u128 total = 0;
        for (const PbEntry &e : cur.slots)
            if (e.val && __builtin_add_overflow(total, e.val, &total)) return 1;
        *out_hi = (uint64_t)(total >> 64);
        *out_lo = (uint64_t)total;
        return 0;
    }
    """
    cdef cppclass PbStep:
        vector[int] dpos
        vector[int] keep
        int append
        int lo, hi, cap
    int pb_run(const vector[PbStep] &steps, int64_t budget,
               uint64_t *out_hi, uint64_t *out_lo, int64_t *work)


from primbounds.errors import BudgetExceeded


MAX_WIDTH = 21
MAX_VALUE = 63


def run_schedule(steps, budget=None, with_work=False):
    """Exact count for ``steps``.

    Raises OverflowError when the schedule cannot be packed or the count
    passes 128 bits, and BudgetExceeded once more than ``budget`` states
    have been produced.
    """
    cdef vector[PbStep] cs
    cdef PbStep st
    cdef uint64_t hi = 0, lo = 0
    cdef int64_t work = 0
    cdef int64_t cbudget = -1 if budget is None else budget
    cdef int rc
    for dpos, keep, append, vlo, vhi, cap in steps:
        if vhi > MAX_VALUE or cap > MAX_VALUE or len(keep) + (1 if append else 0) > MAX_WIDTH:
            raise OverflowError("schedule does not fit packed 128-bit states")
        st.dpos.clear()
        st.keep.clear()
        for j in dpos:
            st.dpos.push_back(j)
        for j in keep:
            st.keep.push_back(j)
        st.append = 1 if append else 0
        st.lo = vlo
        st.hi = vhi
        st.cap = cap
        cs.push_back(st)
    with nogil:
        rc = pb_run(cs, cbudget, &hi, &lo, &work)
    if rc == 2:
        raise BudgetExceeded(work)
    if rc:
        raise OverflowError("count exceeds 128 bits")
    total = (<object>hi << 64) | <object>lo
    return (total, work) if with_work else total
