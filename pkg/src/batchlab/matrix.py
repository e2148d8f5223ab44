"""Dense matrices over GF(p) with exact Gaussian elimination."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from batchlab.errors import CodeError
from batchlab.field import Field, FieldElement


@dataclass(frozen=True)
class Matrix:
    """Row-major matrix of canonical field integers.

    ``cols`` is stored explicitly so that 0-row matrices keep their width.
    """

    field: Field
    rows: tuple[tuple[int, ...], ...]
    cols: int

    def __post_init__(self):
        p = self.field.p
        for r, row in enumerate(self.rows):
            if len(row) != self.cols:
                raise CodeError(f"row {r + 1} has {len(row)} entries, expected {self.cols}")
            for v in row:
                if not 0 <= v < p:
                    raise CodeError(f"entry {v} in row {r + 1} is not in [0, {p})")

    @classmethod
    def from_rows(cls, field: Field, rows: Iterable[Sequence[int]], cols: int | None = None) -> Matrix:
        p = field.p
        data = tuple(tuple(int(v) % p for v in row) for row in rows)
        if cols is None:
            if not data:
                raise CodeError("cannot infer the width of an empty matrix")
            cols = len(data[0])
        return cls(field, data, cols)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> Matrix:
        return cls(field, tuple((0,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> Matrix:
        return cls(field, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    def entry(self, i: int, j: int) -> FieldElement:
        """0-based element access returning a checked field element."""
        return FieldElement(self.rows[i][j], self.field)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def transpose(self) -> Matrix:
        return Matrix(self.field, tuple(zip(*self.rows)) if self.rows else tuple(() for _ in range(self.cols)), len(self.rows))

    def select_columns(self, cols: Sequence[int]) -> Matrix:
        return Matrix(self.field, tuple(tuple(row[j] for j in cols) for row in self.rows), len(cols))

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.rows)


def _rref_rows(field: Field, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    p = field.p
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        if inv != 1:
            rows[r] = [(v * inv) % p for v in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...], int]:
    """Reduced row echelon form, 0-based pivot columns, and rank."""
    rows, pivots = _rref_rows(m.field, [list(r) for r in m.rows], m.cols)
    return Matrix(m.field, tuple(tuple(r) for r in rows), m.cols), tuple(pivots), len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[2]


def rank_of_rows(field: Field, rows: Iterable[Sequence[int]], ncols: int) -> int:
    return len(_rref_rows(field, [list(r) for r in rows], ncols)[1])


def solve(field: Field, a: Sequence[Sequence[int]], b: Sequence[int], ncols: int) -> list[int] | None:
    """One solution x of ``a @ x = b``, free variables set to zero; None if inconsistent."""
    aug = [list(row) + [bv % field.p] for row, bv in zip(a, b)]
    rows, pivots = _rref_rows(field, aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][ncols]
    return x


def rank_mod_p(arr, p: int) -> int:
    """Rank of an integer numpy array over GF(p); vectorized elimination for large inputs."""
    a = np.array(arr, dtype=np.int64) % p
    if a.ndim != 2 or a.size == 0:
        return 0
    rows, cols = a.shape
    inv = [0] + [pow(v, p - 2, p) for v in range(1, p)]
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv[int(a[r, c])]) % p
        f = a[:, c].copy()
        f[r] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            a[hit] = (a[hit] - np.outer(f[hit], a[r])) % p
        r += 1
    return r
