# cython: language_level=3
"""Compiled fraction-free forward-elimination kernels.

Behavioural twin of ``lieforge._ffelim_py``; entries stay arbitrary-precision
Python ints (Bareiss intermediates overflow any fixed width), the speedup
comes from typed loop indexing.  Keep the two modules in lockstep.
"""

from math import gcd


def ff_forward_dense(list rows, Py_ssize_t ncols):
    """Bareiss elimination on dense integer rows.

    Mutates ``rows``.  Returns ``(pivot_cols, echelon_rows)`` where row ``r``
    has its leading nonzero entry in column ``pivot_cols[r]``.
    """
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t c, i, j, pr
    cdef list pivots = []
    cdef list prow, row
    prev = 1
    for c in range(ncols):
        pr = -1
        for i in range(r, nrows):
            if (<list>rows[i])[c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        prow = <list>rows[r]
        piv = prow[c]
        for i in range(r + 1, nrows):
            row = <list>rows[i]
            f = row[c]
            if f == 0 and prev == 1:
                # scaling by piv/1 with f=0 still required by Bareiss, but
                # piv*x//1 == piv*x, so only the multiply is needed
                for j in range(c + 1, ncols):
                    row[j] = piv * row[j]
            else:
                for j in range(c + 1, ncols):
                    row[j] = (piv * row[j] - f * prow[j]) // prev
            row[c] = 0
        pivots.append(c)
        prev = piv
        r += 1
        if r == nrows:
            break
    return pivots, rows[:r]


def ff_forward_sparse(list rows, Py_ssize_t ncols):
    """Sparse integer elimination with per-row gcd reduction.

    ``rows`` maps column index to nonzero integer entry.  Only rows with a
    nonzero entry in the pivot column are combined; each combined row is
    divided by the gcd of its entries to bound coefficient growth.
    """
    cdef list pending = [row for row in rows if row]
    cdef list done = []
    cdef list pivots = []
    cdef Py_ssize_t c, i, pr
    cdef dict prow, row, new
    for c in range(ncols):
        if not pending:
            break
        pr = -1
        for i in range(len(pending)):
            if c in <dict>pending[i]:
                pr = i
                break
        if pr < 0:
            continue
        prow = <dict>pending.pop(pr)
        piv = prow[c]
        for i in range(len(pending)):
            row = <dict>pending[i]
            f = row.get(c)
            if f is None:
                continue
            new = {}
            for j in sorted(set(row) | set(prow)):
                if j == c:
                    continue
                v = piv * row.get(j, 0) - f * prow.get(j, 0)
                if v:
                    new[j] = v
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                if g > 1:
                    new = {j: v // g for j, v in new.items()}
            pending[i] = new
        pending = [row for row in pending if row]
        done.append(prow)
        pivots.append(c)
    return pivots, done
