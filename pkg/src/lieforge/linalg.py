"""Exact rational linear algebra: rank, nullspace, solve.

All scalars are ``fractions.Fraction``; nothing here ever rounds.  Two
elimination routes are provided and must agree (the reduced row echelon form
over the rationals is unique, so any correct route lands on the same answer):

* ``fraction_free`` (default): rows are scaled to integers and forward
  elimination runs on the integer kernel selected by :mod:`lieforge.kernel`
  (compiled when available).  Bareiss-style on dense rows, gcd-reduced
  cross-multiplication on sparse rows.
* ``rational``: plain Gaussian elimination on Fractions, pure Python.  Kept
  as an independent cross-check of the accelerated route.

Matrices below 64 rows/cols use dense lists; larger ones stay in sparse dict
rows throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from lieforge import kernel

Rational = Fraction

DENSE_LIMIT = 64

_METHODS = ("auto", "fraction_free", "rational")


def rat(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce ints, Fractions, and strings like ``-3/2`` to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


class SparseMatrix:
    """Immutable sparse rational matrix; zero entries are never stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(
        self,
        rows: int,
        cols: int,
        entries: Union[Mapping[tuple[int, int], object], Iterable] = (),
    ):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[tuple[int, int], Fraction] = {}
        for (r, c), v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) outside {rows}x{cols}")
            f = rat(v)
            if f:
                store[(r, c)] = f
        self.entries = store

    @classmethod
    def from_dense(cls, dense: list[list]) -> "SparseMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(
            rows,
            cols,
            {(r, c): v for r, row in enumerate(dense) for c, v in enumerate(row)},
        )

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            dense[r][c] = v
        return dense

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def nnz(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


class Echelon(NamedTuple):
    """Canonical reduced row echelon form: unit pivots, zeros above and below."""

    pivots: tuple[int, ...]
    rows: tuple  # tuple[dict[int, Fraction], ...], rows[i] pivoted at pivots[i]


def matvec(m: SparseMatrix, v: list) -> list[Fraction]:
    if len(v) != m.cols:
        raise ValueError("dimension mismatch")
    out = [Fraction(0)] * m.rows
    for (r, c), a in m.entries.items():
        out[r] += a * rat(v[c])
    return out


def _integer_rows(row_dicts: list[dict[int, Fraction]]) -> list[dict[int, int]]:
    out = []
    for row in row_dicts:
        if not row:
            out.append({})
            continue
        scale = lcm(*(v.denominator for v in row.values()))
        out.append({c: int(v * scale) for c, v in row.items()})
    return out


def _forward_rational(row_dicts: list[dict[int, Fraction]], ncols: int):
    """Gaussian forward elimination over Fractions; same pivot policy as the
    fraction-free kernels."""
    pending = [dict(r) for r in row_dicts if r]
    done: list[dict[int, Fraction]] = []
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
            factor = f / piv
            new: dict[int, Fraction] = {}
            for j in set(row) | set(prow):
                if j == c:
                    continue
                v = row.get(j, Fraction(0)) - factor * prow.get(j, Fraction(0))
                if v:
                    new[j] = v
            pending[i] = new
        pending = [row for row in pending if row]
        done.append(prow)
        pivots.append(c)
    return pivots, done


def _normalize(pivots: list[int], echelon_rows: list[dict[int, Fraction]]) -> Echelon:
    """Back-eliminate above pivots and scale pivots to 1 (canonical RREF)."""
    rows = [dict(r) for r in echelon_rows]
    for i in range(len(rows) - 1, -1, -1):
        c = pivots[i]
        piv = rows[i][c]
        if piv != 1:
            rows[i] = {j: v / piv for j, v in rows[i].items()}
        prow = rows[i]
        for k in range(i):
            f = rows[k].get(c)
            if f is None:
                continue
            row = rows[k]
            for j, v in prow.items():
                nv = row.get(j, Fraction(0)) - f * v
                if nv:
                    row[j] = nv
                elif j in row:
                    del row[j]
    return Echelon(tuple(pivots), tuple(rows))


def rref(m: SparseMatrix, method: str = "auto") -> Echelon:
    """Reduced row echelon form of ``m`` (unique over the rationals)."""
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    row_dicts = m.row_dicts()
    if method == "rational":
        pivots, rows = _forward_rational(row_dicts, m.cols)
        return _normalize(pivots, rows)
    int_rows = _integer_rows(row_dicts)
    if max(m.rows, m.cols) < DENSE_LIMIT:
        dense = [[0] * m.cols for _ in range(m.rows)]
        for r, row in enumerate(int_rows):
            for c, v in row.items():
                dense[r][c] = v
        pivots, ech = kernel.ff_forward_dense(dense, m.cols)
        ech_dicts = [
            {c: Fraction(v) for c, v in enumerate(row) if v} for row in ech
        ]
    else:
        pivots, ech = kernel.ff_forward_sparse(int_rows, m.cols)
        ech_dicts = [{c: Fraction(v) for c, v in row.items()} for row in ech]
    return _normalize(pivots, ech_dicts)


def rank(m: SparseMatrix, method: str = "auto") -> int:
    return len(rref(m, method).pivots)


def nullspace(m: SparseMatrix, method: str = "auto") -> list[list[Fraction]]:
    """Canonical nullspace basis, one vector per free column in ascending
    column order.  Every returned v satisfies m @ v = 0 exactly."""
    ech = rref(m, method)
    pivot_set = set(ech.pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for i, c in enumerate(ech.pivots):
            coeff = ech.rows[i].get(free)
            if coeff:
                v[c] = -coeff
        basis.append(v)
    return basis


def solve(
    m: SparseMatrix, b: list, method: str = "auto"
) -> Optional[list[Fraction]]:
    """Some exact solution of m x = b, or None when inconsistent.  Free
    variables are set to zero."""
    if len(b) != m.rows:
        raise ValueError("right-hand side length must equal row count")
    entries = dict(m.entries)
    for r, v in enumerate(b):
        f = rat(v)
        if f:
            entries[(r, m.cols)] = f
    aug = SparseMatrix(m.rows, m.cols + 1, entries)
    ech = rref(aug, method)
    if m.cols in ech.pivots:
        return None
    x = [Fraction(0)] * m.cols
    for i, c in enumerate(ech.pivots):
        x[c] = ech.rows[i].get(m.cols, Fraction(0))
    return x


def invert_dense(mat: list[list]) -> Optional[list[list[Fraction]]]:
    """Exact inverse of a small dense square matrix, or None if singular."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    entries: dict[tuple[int, int], Fraction] = {}
    for r in range(n):
        for c in range(n):
            entries[(r, c)] = rat(mat[r][c])
        entries[(r, n + r)] = Fraction(1)
    ech = rref(SparseMatrix(n, 2 * n, entries))
    if len(ech.pivots) < n or any(p >= n for p in ech.pivots):
        return None
    inv = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        row = ech.rows[i]
        for j in range(n):
            inv[i][j] = row.get(n + j, Fraction(0))
    return inv
