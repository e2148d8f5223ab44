"""Exact verification of the k-batch property for systematic linear codes.

A request is a multiset of message indices. It is served when every index
gets its own recovery set, the sets are pairwise disjoint, and each set
recovers its symbol by a linear function.

Candidate recovery sets for ``x_i`` are the singleton ``{i}`` plus
``supp(d) - {i}`` for every dual codeword ``d`` with ``d_i != 0``, reduced to
the inclusion-minimal ones. Restricting to minimal sets never changes whether
a request is servable, since shrinking a set keeps the family disjoint.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from batchlab.code import DUAL_CAP, LinearCode, check_recovery, dual_codewords, recoverable
from batchlab.errors import CapExceeded, CodeError

log = logging.getLogger(__name__)

MULTISET_CAP = 2**22
ORACLE_MAX_N = 10
PARALLEL_THRESHOLD = 20_000
_FAIL_CACHE_LIMIT = 1_000_000


@dataclass(frozen=True)
class BatchRequest:
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(sorted(self.indices)))

    @classmethod
    def of(cls, *indices: int) -> BatchRequest:
        return cls(tuple(indices))

    @property
    def k(self) -> int:
        return len(self.indices)

    def check(self, c: LinearCode) -> None:
        if not self.indices:
            raise CodeError("request is empty")
        bad = [i for i in self.indices if not 1 <= i <= c.n]
        if bad:
            raise CodeError(f"request indices {bad} outside [1, {c.n}]")


@dataclass(frozen=True)
class RecoverySet:
    """``x_target = sum(coefficients[j] * c[positions[j]])`` on every codeword."""

    target: int
    positions: tuple[int, ...]
    coefficients: tuple[int, ...]

    @property
    def mask(self) -> int:
        m = 0
        for j in self.positions:
            m |= 1 << (j - 1)
        return m

    def __str__(self) -> str:
        pos = ",".join(str(j) for j in self.positions)
        return f"{self.target} <- {{{pos}}} : {' '.join(str(a) for a in self.coefficients)}"


@dataclass(frozen=True)
class RecoveryPlan:
    request: BatchRequest
    sets: tuple[RecoverySet, ...]

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.sets)


@dataclass(frozen=True)
class Check:
    """Boolean verdict carrying the first failed condition when false."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class BatchVerdict(NamedTuple):
    holds: bool
    witness: BatchRequest | None


class SampleVerdict(NamedTuple):
    witness: BatchRequest | None
    samples: int


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _positions(mask: int) -> tuple[int, ...]:
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def _row_masks(nz: np.ndarray) -> list[int]:
    packed = np.packbits(nz, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


@lru_cache(maxsize=16)
def recovery_candidates(c: LinearCode, cap: int = DUAL_CAP) -> dict[int, tuple[RecoverySet, ...]]:
    """Inclusion-minimal recovery sets for every message index, in canonical order."""
    duals = dual_codewords(c, cap)
    f = c.field
    nz = duals != 0
    out = {}
    for i in range(1, c.n + 1):
        rows = np.flatnonzero(nz[:, i - 1])
        sub = nz[rows].copy()
        sub[:, i - 1] = False
        # unique R-supports, remembering the first dual codeword that produced each
        _, first = np.unique(np.packbits(sub, axis=1, bitorder="little"), axis=0, return_index=True)
        masks = _row_masks(sub[first])
        cands = {1 << (i - 1): None}
        for m, r in zip(masks, rows[first]):
            if m:
                cands.setdefault(m, int(r))
        keyed = sorted(cands.items(), key=lambda kv: (_popcount(kv[0]), _positions(kv[0])))
        kept: list[tuple[int, int | None]] = []
        for m, r in keyed:
            if any(k & ~m == 0 for k, _ in kept):
                continue
            kept.append((m, r))
        sets = []
        for m, r in kept:
            pos = _positions(m)
            if r is None:
                sets.append(RecoverySet(i, pos, (1,)))
                continue
            d = duals[r]
            scale = f.neg(f.inv(int(d[i - 1])))
            sets.append(RecoverySet(i, pos, tuple(f.mul(int(d[j - 1]), scale) for j in pos)))
        out[i] = tuple(sets)
    return out


def minimal_recovery_sets(c: LinearCode, i: int, cap: int = DUAL_CAP) -> list[RecoverySet]:
    if not 1 <= i <= c.n:
        raise CodeError(f"message index {i} outside [1, {c.n}]")
    return list(recovery_candidates(c, cap)[i])


class _Packer:
    """Backtracking search for disjoint recovery sets; remembers failed sub-states."""

    def __init__(self, cands: dict[int, tuple[RecoverySet, ...]]):
        self.cands = cands
        self.masks = {t: [s.mask for s in sets] for t, sets in cands.items()}
        self.failed: set[tuple] = set()

    def serve(self, request: BatchRequest) -> RecoveryPlan | None:
        demand = tuple(sorted((t, m) for t, m in _counts(request.indices).items()))
        chosen = self._search(demand, 0)
        if chosen is None:
            return None
        queues = {t: list(idxs) for t, idxs in chosen.items()}
        sets = tuple(self.cands[t][queues[t].pop(0)] for t in request.indices)
        return RecoveryPlan(request, sets)

    def _search(self, demand: tuple[tuple[int, int], ...], used: int) -> dict[int, list[int]] | None:
        if not demand:
            return {}
        key = (demand, used)
        if key in self.failed:
            return None
        best = None
        for pos, (t, m) in enumerate(demand):
            avail = [idx for idx, mk in enumerate(self.masks[t]) if not mk & used]
            if len(avail) < m:
                self._fail(key)
                return None
            if best is None or len(avail) < len(best[2]):
                best = (pos, t, avail, m)
        pos, t, avail, m = best
        rest = demand[:pos] + demand[pos + 1:]
        masks = self.masks[t]
        for combo, union in _disjoint_combos(avail, masks, m, used):
            sub = self._search(rest, union)
            if sub is not None:
                sub[t] = combo
                return sub
        self._fail(key)
        return None

    def _fail(self, key: tuple) -> None:
        if len(self.failed) >= _FAIL_CACHE_LIMIT:
            self.failed.clear()
        self.failed.add(key)


def _disjoint_combos(avail: list[int], masks: list[int], m: int, used: int) -> Iterator[tuple[list[int], int]]:
    """Increasing m-subsets of ``avail`` whose masks are disjoint from each other and ``used``."""
    if m == 0:
        yield [], used
        return
    for pos in range(len(avail) - m + 1):
        idx = avail[pos]
        mk = masks[idx]
        if mk & used:
            continue
        for tail, union in _disjoint_combos(avail[pos + 1:], masks, m - 1, used | mk):
            yield [idx] + tail, union


def _counts(indices: Iterable[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for i in indices:
        out[i] = out.get(i, 0) + 1
    return out


def serve_request(c: LinearCode, r: BatchRequest, cap: int = DUAL_CAP) -> RecoveryPlan | None:
    """A plan serving ``r``, or None when no family of disjoint recovery sets exists."""
    r.check(c)
    if r.k > c.N:
        return None
    return _Packer(recovery_candidates(c, cap)).serve(r)


def multiset_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k)


def _workers() -> int:
    env = os.environ.get("BATCHLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer BATCHLAB_THREADS=%r", env)
    return os.cpu_count() or 1


def _first_failure(c: LinearCode, k: int, start: int, stop: int, cap: int) -> tuple[int, ...] | None:
    packer = _Packer(recovery_candidates(c, cap))
    combos = itertools.combinations_with_replacement(range(1, c.n + 1), k)
    for idx in itertools.islice(combos, start, stop):
        if packer.serve(BatchRequest(idx)) is None:
            return idx
    return None


def _chunk_failure(args: tuple) -> tuple[int, ...] | None:
    return _first_failure(*args)


def is_k_batch(
    c: LinearCode,
    k: int,
    cap: int = MULTISET_CAP,
    dual_cap: int = DUAL_CAP,
    workers: int | None = None,
) -> BatchVerdict:
    """Check every size-k multiset; the witness is the lexicographically first failure."""
    if k < 0:
        raise CodeError(f"k must be non-negative, got {k}")
    if k == 0:
        return BatchVerdict(True, None)
    if k > c.N:
        return BatchVerdict(False, BatchRequest((1,) * k))
    total = multiset_count(c.n, k)
    if total > cap:
        raise CapExceeded(f"{total} multisets of size {k} exceeds the cap {cap}; use sample mode instead")
    recovery_candidates(c, dual_cap)
    workers = _workers() if workers is None else workers
    if workers <= 1 or total < PARALLEL_THRESHOLD:
        bad = _first_failure(c, k, 0, total, dual_cap)
    else:
        bad = _parallel_first_failure(c, k, total, dual_cap, workers)
    return BatchVerdict(bad is None, None if bad is None else BatchRequest(bad))


def _parallel_first_failure(c: LinearCode, k: int, total: int, dual_cap: int, workers: int) -> tuple[int, ...] | None:
    nchunks = workers * 4
    step = -(-total // nchunks)
    jobs = [(c, k, s, min(s + step, total), dual_cap) for s in range(0, total, step)]
    log.debug("checking %d multisets in %d chunks on %d workers", total, len(jobs), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves chunk order, so the first hit is the lexicographic minimum
        for bad in pool.map(_chunk_failure, jobs):
            if bad is not None:
                pool.shutdown(wait=False, cancel_futures=True)
                return bad
    return None


def sample_k_batch(c: LinearCode, k: int, samples: int, seed: int = 0, dual_cap: int = DUAL_CAP) -> SampleVerdict:
    """Test ``samples`` random multisets. Finding no counterexample proves nothing."""
    if k > c.N:
        return SampleVerdict(BatchRequest((1,) * k), 0)
    rng = np.random.Generator(np.random.Philox(seed))
    packer = _Packer(recovery_candidates(c, dual_cap))
    for s in range(samples):
        req = BatchRequest(tuple(int(v) for v in rng.integers(1, c.n + 1, size=k)))
        if packer.serve(req) is None:
            return SampleVerdict(req, s + 1)
    return SampleVerdict(None, samples)


def batch_number(
    c: LinearCode,
    max_k: int | None = None,
    cap: int = MULTISET_CAP,
    dual_cap: int = DUAL_CAP,
    workers: int | None = None,
) -> int:
    """Largest k (up to ``max_k`` or N) for which the code is k-batch.

    Relies on monotonicity: a (k+1)-batch code is k-batch.
    """
    limit = c.N if max_k is None else min(max_k, c.N)
    best = 0
    for k in range(1, limit + 1):
        if not is_k_batch(c, k, cap, dual_cap, workers).holds:
            break
        best = k
    return best


def validate_plan(c: LinearCode, plan: RecoveryPlan) -> Check:
    req = plan.request.indices
    if len(plan.sets) != len(req):
        return Check(False, f"plan has {len(plan.sets)} sets for a request of size {len(req)}")
    used: dict[int, int] = {}
    for slot, (target, s) in enumerate(zip(req, plan.sets), start=1):
        if s.target != target:
            return Check(False, f"set {slot} recovers x_{s.target} but x_{target} was requested")
        if not s.positions:
            return Check(False, f"set {slot} is empty")
        if len(s.positions) != len(s.coefficients):
            return Check(False, f"set {slot} has {len(s.coefficients)} coefficients for {len(s.positions)} positions")
        for j in s.positions:
            if not 1 <= j <= c.N:
                return Check(False, f"set {slot} uses position {j} outside [1, {c.N}]")
            if j in used:
                return Check(False, f"sets {used[j]} and {slot} both use position {j}")
            used[j] = slot
        bad = check_recovery(c, target, s.positions, [a % c.q for a in s.coefficients])
        if bad is not None:
            return Check(False, f"set {slot} fails to recover x_{target} on generator row {bad}")
    return Check(True)


def batch_number_oracle(c: LinearCode, max_n: int = ORACLE_MAX_N) -> int:
    """Independent brute force: every subset passing the rank test is a candidate.

    No dual enumeration, no minimality filter; packing is an exhaustive
    slot-by-slot search.
    """
    if c.N > max_n:
        raise CapExceeded(f"oracle limited to N <= {max_n}, got N={c.N}")
    N = c.N
    cands: dict[int, list[int]] = {i: [] for i in range(1, c.n + 1)}
    for mask in range(1, 1 << N):
        S = _positions(mask)
        for i in cands:
            if recoverable(c, i, S) is not None:
                cands[i].append(mask)

    def packable(req: Sequence[int]) -> bool:
        failed: set[tuple[int, int]] = set()

        def go(slot: int, used: int) -> bool:
            if slot == len(req):
                return True
            if (slot, used) in failed:
                return False
            for m in cands[req[slot]]:
                if not m & used and go(slot + 1, used | m):
                    return True
            failed.add((slot, used))
            return False

        return go(0, 0)

    best = 0
    for k in range(1, N + 1):
        if not all(packable(req) for req in itertools.combinations_with_replacement(range(1, c.n + 1), k)):
            break
        best = k
    return best
