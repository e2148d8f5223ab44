"""Systematic linear codes, their duals, and recovery-function duality.

Coordinates are 1-based everywhere in this module's interface: message
symbols are ``x_1..x_n`` and codeword positions are ``1..N``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from batchlab.errors import CapExceeded, CodeError, ParseError, RecoveryError
from batchlab.field import Field, FieldElement
from batchlab.matrix import Matrix, rref, solve

DISTANCE_CAP = 2**22
DUAL_CAP = 2**20


@dataclass(frozen=True)
class LinearCode:
    """A code ``C = rowspace([I_n | A])`` together with the dual basis ``[-A^T | I]``."""

    field: Field
    generator: Matrix
    dual_basis: Matrix

    def __post_init__(self):
        g, h = self.generator, self.dual_basis
        n, N = g.shape
        if n < 1:
            raise CodeError("a code needs at least one message symbol")
        if h.shape != (N - n, N):
            raise CodeError(f"dual basis has shape {h.shape}, expected {(N - n, N)}")
        for r in range(n):
            for c in range(n):
                if g.rows[r][c] != int(r == c):
                    raise CodeError(f"generator is not systematic: entry ({r + 1},{c + 1}) should be {int(r == c)}")
        for a, hrow in enumerate(h.rows):
            for b, grow in enumerate(g.rows):
                if self.field.dot(hrow, grow):
                    raise CodeError(f"dual row {a + 1} is not orthogonal to generator row {b + 1}")

    @property
    def q(self) -> int:
        return self.field.p

    @property
    def n(self) -> int:
        return self.generator.nrows

    @property
    def N(self) -> int:
        return self.generator.cols

    @property
    def redundancy(self) -> int:
        return self.N - self.n

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256(format_code(self).encode()).hexdigest()
        return h[:16]

    def encode(self, message: Sequence[int]) -> tuple[int, ...]:
        if len(message) != self.n:
            raise CodeError(f"message has length {len(message)}, expected {self.n}")
        p = self.q
        out = [0] * self.N
        for x, row in zip(message, self.generator.rows):
            if x % p:
                for j, v in enumerate(row):
                    out[j] += x * v
        return tuple(v % p for v in out)

    def is_dual_vector(self, vector: Sequence[int]) -> bool:
        return len(vector) == self.N and all(self.field.dot(vector, row) == 0 for row in self.generator.rows)

    def dual_codeword(self, vector: Sequence[int]) -> DualCodeword:
        d = DualCodeword(self.field, tuple(int(v) % self.q for v in vector))
        if not self.is_dual_vector(d.vector):
            raise CodeError(f"{list(d.vector)} is not a dual codeword")
        return d

    def __repr__(self) -> str:
        return f"LinearCode(q={self.q}, n={self.n}, N={self.N})"


@dataclass(frozen=True)
class DualCodeword:
    field: Field
    vector: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j + 1 for j, v in enumerate(self.vector) if v)

    def __getitem__(self, position: int) -> FieldElement:
        """1-based coordinate access."""
        return FieldElement(self.vector[position - 1], self.field)


def code_from_generator(g: Matrix) -> LinearCode:
    """Validate a systematic generator ``[I_n | A]`` and attach ``[-A^T | I]``."""
    field = g.field
    n, N = g.shape
    if n < 1:
        raise CodeError("generator must have at least one row")
    if N < n:
        raise CodeError(f"generator has {N} columns but {n} rows")
    for r in range(n):
        for c in range(n):
            if g.rows[r][c] != int(r == c):
                raise CodeError(
                    f"first {n} columns are not the identity (entry ({r + 1},{c + 1}) is {g.rows[r][c]});"
                    " use systematize() to bring the generator into [I | A] form"
                )
    r = N - n
    dual = tuple(
        tuple(field.neg(g.rows[i][n + a]) for i in range(n)) + tuple(int(a == b) for b in range(r))
        for a in range(r)
    )
    return LinearCode(field, g, Matrix(field, dual, N))


def systematize(g: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Row-reduce and permute columns into ``[I | A]``.

    Returns the new generator and ``perm`` with ``new column j = old column perm[j]``
    (both 1-based). Zero rows of a rank-deficient input are dropped.
    """
    red, pivots, rk = rref(g)
    if rk == 0:
        raise CodeError("generator has rank 0")
    rest = [c for c in range(g.cols) if c not in pivots]
    order = list(pivots) + rest
    rows = tuple(tuple(red.rows[i][c] for c in order) for i in range(rk))
    return Matrix(g.field, rows, g.cols), tuple(c + 1 for c in order)


def _enumerate_span(field: Field, rows: Sequence[Sequence[int]], ncols: int) -> np.ndarray:
    """All q^len(rows) linear combinations, as a uint8 array (first row varies slowest)."""
    q = field.p
    out = np.zeros((1, ncols), dtype=np.int16)
    for row in rows:
        v = np.asarray(row, dtype=np.int16)
        out = np.concatenate([(out + a * v) % q for a in range(q)], axis=0)
    return out.astype(np.uint8)


def min_distance(c: LinearCode, cap: int = DISTANCE_CAP) -> int:
    """Minimum Hamming weight of a nonzero codeword, by exhaustive enumeration."""
    q, n = c.q, c.n
    total = q**n
    if total > cap:
        raise CapExceeded(f"{q}^{n} = {total} codewords exceeds the enumeration cap {cap}; use a sampling estimate instead")
    rows = c.generator.rows
    head = 0
    while head < n and q ** (head + 1) <= 2**16:
        head += 1
    block = _enumerate_span(c.field, rows[n - head:], c.N).astype(np.int16)
    tail = _enumerate_span(c.field, rows[: n - head], c.N).astype(np.int16)
    best = c.N + 1
    for t_idx, t in enumerate(tail):
        words = (block + t) % q
        w = np.count_nonzero(words, axis=1)
        if t_idx == 0:
            w = w[1:]  # drop the zero codeword
        if w.size:
            best = min(best, int(w.min()))
    return best


def recoverable(c: LinearCode, i: int, S: Iterable[int]) -> tuple[int, ...] | None:
    """Coefficients ``g`` (aligned with ``sorted(S)``) with ``sum g_j c_j = x_i`` on C, or None.

    Solves ``G[:, S] g = e_i``: the message functional ``x_i`` must lie in the
    span of the coordinate functionals indexed by S.
    """
    positions = sorted(set(S))
    if not 1 <= i <= c.n:
        raise CodeError(f"message index {i} outside [1, {c.n}]")
    if any(not 1 <= j <= c.N for j in positions):
        raise CodeError(f"positions {positions} not within [1, {c.N}]")
    if i in positions:
        return tuple(int(j == i) for j in positions)
    if not positions:
        return None
    g = c.generator.rows
    a = [[g[r][j - 1] for j in positions] for r in range(c.n)]
    b = [int(r == i - 1) for r in range(c.n)]
    x = solve(c.field, a, b, len(positions))
    return None if x is None else tuple(x)


def check_recovery(c: LinearCode, i: int, positions: Sequence[int], coeffs: Sequence[int]) -> int | None:
    """First generator row (1-based) on which ``sum coeffs_j c_j != c_i``, or None if the identity holds.

    By linearity, holding on every generator row means it holds on all of C.
    """
    p = c.q
    for r, row in enumerate(c.generator.rows):
        lhs = sum(a * row[j - 1] for j, a in zip(positions, coeffs)) % p
        if lhs != row[i - 1]:
            return r + 1
    return None


def recovery_to_dual(c: LinearCode, i: int, R: Iterable[int], g: Sequence[int]) -> DualCodeword:
    """Turn a linear recovery ``c_i = sum_{j in R} g_j c_j`` into a dual codeword.

    The vector has ``-1`` at ``i`` and ``g_j`` at each ``j in R``.
    """
    positions = sorted(set(R))
    if len(g) != len(positions):
        raise RecoveryError(f"{len(g)} coefficients given for {len(positions)} positions")
    if not 1 <= i <= c.N or any(not 1 <= j <= c.N for j in positions):
        raise RecoveryError(f"indices must lie in [1, {c.N}]")
    if i in positions:
        raise RecoveryError(f"target {i} must not belong to its recovery set")
    coeffs = [int(a) % c.q for a in g]
    bad = check_recovery(c, i, positions, coeffs)
    if bad is not None:
        raise RecoveryError(f"recovery of c_{i} from {positions} fails on generator row {bad}")
    vec = [0] * c.N
    vec[i - 1] = c.field.neg(1)
    for j, a in zip(positions, coeffs):
        vec[j - 1] = a
    return DualCodeword(c.field, tuple(vec))


def dual_to_recovery(d: DualCodeword, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Positions ``supp(d) - {i}`` and coefficients ``-d_j / d_i`` recovering ``c_i``."""
    if not 1 <= i <= len(d.vector) or d.vector[i - 1] == 0:
        raise RecoveryError(f"index {i} is not in the support {list(d.support)}")
    f = d.field
    scale = f.neg(f.inv(d.vector[i - 1]))
    positions = tuple(j for j in d.support if j != i)
    return positions, tuple(f.mul(d.vector[j - 1], scale) for j in positions)


@lru_cache(maxsize=8)
def dual_codewords(c: LinearCode, cap: int = DUAL_CAP) -> np.ndarray:
    """Every element of the dual code as rows of a ``q^(N-n) x N`` uint8 array."""
    total = c.q**c.redundancy
    if total > cap:
        raise CapExceeded(
            f"{c.q}^{c.redundancy} = {total} dual codewords exceeds the enumeration cap {cap}; try a smaller code"
        )
    arr = _enumerate_span(c.field, c.dual_basis.rows, c.N)
    arr.setflags(write=False)
    return arr


def format_code(c: LinearCode) -> str:
    lines = [f"{c.q} {c.n} {c.N}"]
    lines += [" ".join(str(v) for v in row) for row in c.generator.rows]
    return "\n".join(lines) + "\n"


def parse_generator(text: str) -> Matrix:
    """Parse the ``q n N`` + n rows format into a matrix (no systematic check)."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty code file", 1)
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError(f"header must be 'q n N', got {len(header)} fields", 1)
    try:
        q, n, N = (int(tok) for tok in header)
    except ValueError:
        raise ParseError("header fields must be integers", 1) from None
    try:
        field = Field(q)
    except ValueError as exc:
        raise ParseError(str(exc), 1) from None
    if n < 1 or N < n:
        raise ParseError(f"need 1 <= n <= N, got n={n}, N={N}", 1)
    if len(lines) - 1 != n:
        where = len(lines) + 1 if len(lines) - 1 < n else n + 2
        raise ParseError(f"expected {n} generator rows, found {len(lines) - 1}", where)
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        toks = line.split()
        if len(toks) != N:
            raise ParseError(f"expected {N} entries, found {len(toks)}", ln)
        row = []
        col = 1
        for tok in toks:
            col = line.index(tok, col - 1) + 1
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"{tok!r} is not an integer", ln, col) from None
            if not 0 <= v < q:
                raise ParseError(f"value {v} not in [0, {q})", ln, col)
            row.append(v)
            col += len(tok)
        rows.append(tuple(row))
    return Matrix(field, tuple(rows), N)


def parse_code(text: str) -> LinearCode:
    return code_from_generator(parse_generator(text))
