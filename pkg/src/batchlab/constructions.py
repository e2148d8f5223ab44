"""Baseline systematic code families used as batch-code test subjects.

None of these carry a hard-coded batch number; the verifier computes them.
"""

from __future__ import annotations

import numpy as np

from batchlab.code import LinearCode, code_from_generator
from batchlab.errors import CodeError
from batchlab.field import Field
from batchlab.matrix import Matrix


def _systematic(field: Field, parity: list[list[int]], n: int) -> LinearCode:
    rows = [[int(r == c) for c in range(n)] + list(parity[r]) for r in range(n)]
    return code_from_generator(Matrix.from_rows(field, rows, n + (len(parity[0]) if parity else 0)))


def replication(n: int, m: int, q: int = 2) -> LinearCode:
    """Each message symbol stored ``m`` times; copy ``c`` of ``x_i`` sits at ``c*n + i``."""
    if n < 1 or m < 1:
        raise CodeError(f"replication needs n >= 1 and m >= 1, got n={n}, m={m}")
    parity = [[int(i == j) for _ in range(m - 1) for j in range(n)] for i in range(n)]
    return _systematic(Field(q), parity, n)


def single_parity(n: int, q: int = 2) -> LinearCode:
    """``N = n + 1``; the last symbol is ``x_1 + ... + x_n``."""
    if n < 1:
        raise CodeError(f"single_parity needs n >= 1, got {n}")
    return _systematic(Field(q), [[1] for _ in range(n)], n)


def grid_parity(s: int, q: int = 2) -> LinearCode:
    """Messages on an ``s x s`` grid (row-major) plus one parity per row, then per column.

    Row ``r`` parity sits at position ``s^2 + r + 1``, column ``c`` parity at
    ``s^2 + s + c + 1`` (0-based ``r``, ``c``).
    """
    if s < 2:
        raise CodeError(f"grid_parity needs s >= 2, got {s}")
    n = s * s
    parity = []
    for idx in range(n):
        r, c = divmod(idx, s)
        parity.append([int(a == r) for a in range(s)] + [int(b == c) for b in range(s)])
    return _systematic(Field(q), parity, n)


def random_systematic(n: int, r: int, q: int, seed: int) -> LinearCode:
    """``[I_n | A]`` with A uniform over GF(q).

    A is ``numpy.random.Generator(Philox(seed)).integers(0, q, size=(n, r))``,
    read row-major. Philox is counter-based, so the stream is portable.
    """
    if n < 1 or r < 0:
        raise CodeError(f"random_systematic needs n >= 1 and r >= 0, got n={n}, r={r}")
    field = Field(q)
    rng = np.random.Generator(np.random.Philox(seed))
    a = rng.integers(0, q, size=(n, r))
    return _systematic(field, a.tolist() if r else [[] for _ in range(n)], n)


def code_from_parity(q: int, parity: list[list[int]]) -> LinearCode:
    """Code with generator ``[I | parity]``; ``parity`` has one row per message symbol."""
    return _systematic(Field(q), parity, len(parity))
