"""Pure-Python fraction-free forward-elimination kernels.

Both kernels take integer rows (every rational row is pre-scaled by the lcm
of its denominators, which changes neither rank nor nullspace) and return an
integer echelon form.  Pivoting is first-nonzero in the current row order,
columns scanned left to right, so the output is deterministic.

The compiled twin of this module is ``lieforge._ffelim`` (Cython); the two
must stay behaviourally identical.  ``lieforge.kernel`` picks one at import.
"""

from __future__ import annotations

from math import gcd


def ff_forward_dense(rows: list[list[int]], ncols: int):
    """Bareiss elimination on dense integer rows.

    Mutates ``rows``.  Returns ``(pivot_cols, echelon_rows)`` where row ``r``
    has its leading nonzero entry in column ``pivot_cols[r]``.
    """
    nrows = len(rows)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        pr = -1
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        piv = prow[c]
        for i in range(r + 1, nrows):
            row = rows[i]
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


def ff_forward_sparse(rows: list[dict[int, int]], ncols: int):
    """Sparse integer elimination with per-row gcd reduction.

    ``rows`` maps column index to nonzero integer entry.  Only rows with a
    nonzero entry in the pivot column are combined; each combined row is
    divided by the gcd of its entries to bound coefficient growth.
    """
    pending = [row for row in rows if row]
    done: list[dict[int, int]] = []
    pivots: list[int] = []
    for c in range(ncols):
        if not pending:
            break
        pr = -1
        for i, row in enumerate(pending):
            if c in row:
                pr = i
                break
        if pr < 0:
            continue
        prow = pending.pop(pr)
        piv = prow[c]
        for i, row in enumerate(pending):
            f = row.get(c)
            if f is None:
                continue
            new: dict[int, int] = {}
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
