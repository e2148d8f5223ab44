"""Machine-checkable dimension certificates for the dual code's tensor powers.

For ``t = floor(k/3)`` and each decreasing tuple ``i_1 > ... > i_t`` of
message indices, a 3t-batch code serves the request with every ``x_{i_j}``
three times. Two of the three recovery sets for ``x_{i_j}`` avoid ``i_j``;
their dual codewords form a pair whose supports meet exactly in ``{i_j}``.

Tensoring the 2t dual codewords in the order given by a good map yields an
element ``w`` of ``V^{(x)2t}`` (``V`` the dual code) with at most ``3^t`` good
basis components, one of which is determined by the map. Greedily picking
unused good components gives a triangular, hence linearly independent,
family, so ``(N - n)^{2t}`` is at least its size.

Tensors stay factored: only their good components are ever expanded.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from batchlab.batch import BatchRequest, Check, RecoveryPlan, serve_request
from batchlab.code import DUAL_CAP, DualCodeword, LinearCode, recovery_to_dual
from batchlab.errors import CapExceeded, CertificateError, CodeError, NotBatchError
from batchlab.field import Field
from batchlab.matrix import Matrix, rank_mod_p, rank_of_rows

GOOD_COUNT_CAP = 2**20
EXPANSION_CAP = 2**22
POWER_DIM_CAP = 2**12
POWER_LEN_CAP = 2**18


@dataclass(frozen=True)
class GoodMap:
    """A bijection ``[2t] -> [t] x [2]`` stored as its two coordinate maps (1-based)."""

    pi1: tuple[int, ...]
    pi2: tuple[int, ...]

    @property
    def t(self) -> int:
        return len(self.pi1) // 2

    def is_valid(self, t: int) -> bool:
        if len(self.pi1) != 2 * t or len(self.pi2) != 2 * t:
            return False
        pairs = set(zip(self.pi1, self.pi2))
        return pairs == {(a, b) for a in range(1, t + 1) for b in (1, 2)}

    @classmethod
    def canonical(cls, pi1: Sequence[int]) -> GoodMap:
        """Pair ``pi1`` with the lexicographically least valid ``pi2``."""
        seen: set[int] = set()
        pi2 = []
        for a in pi1:
            pi2.append(2 if a in seen else 1)
            seen.add(a)
        return cls(tuple(pi1), tuple(pi2))


@dataclass(frozen=True)
class DualPairFamily:
    """Per index ``i_j`` two dual codewords whose supports meet exactly in ``{i_j}``."""

    indices: tuple[int, ...]
    pairs: tuple[tuple[DualCodeword, DualCodeword], ...]

    @property
    def t(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SparseTensorProduct:
    """``factors[0] (x) ... (x) factors[2t-1]``, kept in factored form."""

    factors: tuple[DualCodeword, ...]
    indices: tuple[int, ...]
    pi: GoodMap

    @property
    def field(self) -> Field:
        return self.factors[0].field

    def coefficient(self, ix: Sequence[int]) -> int:
        f = self.field
        out = 1
        for d, j in zip(self.factors, ix):
            out = f.mul(out, d.vector[j - 1])
        return out


@dataclass(frozen=True)
class Selection:
    e: tuple[int, ...]
    w: SparseTensorProduct
    good: tuple[tuple[tuple[int, ...], int], ...]


@dataclass(frozen=True)
class Certificate:
    q: int
    n: int
    N: int
    k: int
    t: int
    generator: tuple[tuple[int, ...], ...]
    families: tuple[DualPairFamily, ...]
    selections: tuple[Selection, ...]
    d_guarantee: int
    achieved: int
    rank: int

    def to_json(self) -> str:
        doc = {
            "q": self.q,
            "n": self.n,
            "N": self.N,
            "k": self.k,
            "t": self.t,
            "generator": [list(r) for r in self.generator],
            "families": [
                {"indices": list(fam.indices), "pairs": [[list(a.vector), list(b.vector)] for a, b in fam.pairs]}
                for fam in self.families
            ],
            "selections": [
                {
                    "e": list(s.e),
                    "pi1": list(s.w.pi.pi1),
                    "pi2": list(s.w.pi.pi2),
                    "good": [{"index": list(ix), "coeff": v} for ix, v in s.good],
                }
                for s in self.selections
            ],
            "d_guarantee": self.d_guarantee,
            "achieved": self.achieved,
            "rank": self.rank,
        }
        return json.dumps(doc, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        """Load a certificate; structural damage raises CertificateError, content is not checked."""
        try:
            doc = json.loads(text)
            field = Field(int(doc["q"]))
            families = tuple(
                DualPairFamily(
                    tuple(int(i) for i in fam["indices"]),
                    tuple((_dual(field, a), _dual(field, b)) for a, b in fam["pairs"]),
                )
                for fam in doc["families"]
            )
            by_indices = {fam.indices: fam for fam in families}
            selections = []
            for s in doc["selections"]:
                e = tuple(int(v) for v in s["e"])
                pi = GoodMap(tuple(int(v) for v in s["pi1"]), tuple(int(v) for v in s["pi2"]))
                fam = by_indices.get(tuple(sorted(set(e), reverse=True)))
                if fam is None:
                    raise CertificateError(f"no family for selection e={list(e)}")
                good = tuple((tuple(int(v) for v in g["index"]), int(g["coeff"])) for g in s["good"])
                selections.append(Selection(e, _assemble(fam, pi), good))
            return cls(
                q=field.p,
                n=int(doc["n"]),
                N=int(doc["N"]),
                k=int(doc["k"]),
                t=int(doc["t"]),
                generator=tuple(tuple(int(v) for v in row) for row in doc["generator"]),
                families=families,
                selections=tuple(selections),
                d_guarantee=int(doc["d_guarantee"]),
                achieved=int(doc["achieved"]),
                rank=int(doc["rank"]),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from None


def _dual(field: Field, vector: Sequence[int]) -> DualCodeword:
    return DualCodeword(field, tuple(int(v) for v in vector))


def is_good_index(ix: Sequence[int], t: int) -> bool:
    """Exactly t distinct entries, each appearing exactly twice."""
    if len(ix) != 2 * t:
        return False
    counts = Counter(ix)
    return len(counts) == t and all(v == 2 for v in counts.values())


def good_count(n: int, t: int) -> int:
    """``C(n, t) * (2t)! / 2^t``: distinct good tensors ``e_{i_1..i_t, pi}``."""
    if t < 0 or t > n:
        raise CodeError(f"need 0 <= t <= n, got t={t}, n={n}")
    return math.comb(n, t) * math.factorial(2 * t) // 2**t


def pi1_patterns(t: int) -> Iterator[tuple[int, ...]]:
    """Sequences over ``[t]`` using each value exactly twice, in lexicographic order."""
    counts = [2] * (t + 1)
    seq: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(seq) == 2 * t:
            yield tuple(seq)
            return
        for v in range(1, t + 1):
            if counts[v]:
                counts[v] -= 1
                seq.append(v)
                yield from rec()
                seq.pop()
                counts[v] += 1

    return rec()


def e_index(indices: Sequence[int], pi1: Sequence[int]) -> tuple[int, ...]:
    return tuple(indices[a - 1] for a in pi1)


def decreasing_tuples(n: int, t: int) -> list[tuple[int, ...]]:
    return sorted(tuple(reversed(c)) for c in itertools.combinations(range(1, n + 1), t))


def family_problem(c: LinearCode, fam: DualPairFamily) -> str | None:
    """First violated structural property of a dual-pair family, or None."""
    t = fam.t
    if t < 1 or len(fam.pairs) != t:
        return f"family {list(fam.indices)} has {len(fam.pairs)} pairs for t={t}"
    if any(not 1 <= i <= c.n for i in fam.indices):
        return f"family indices {list(fam.indices)} outside [1, {c.n}]"
    if any(a <= b for a, b in zip(fam.indices, fam.indices[1:])):
        return f"family indices {list(fam.indices)} are not strictly decreasing"
    targets = set(fam.indices)
    owner: dict[int, tuple[int, int]] = {}
    for j, (i, pair) in enumerate(zip(fam.indices, fam.pairs), start=1):
        for ell, d in enumerate(pair, start=1):
            if d.field.p != c.q or not all(0 <= v < c.q for v in d.vector):
                return f"family {list(fam.indices)}: c({j},{ell}) has entries outside GF({c.q})"
            if not c.is_dual_vector(d.vector):
                return f"family {list(fam.indices)}: c({j},{ell}) is not a dual codeword"
            for pos in d.support:
                if pos in targets:
                    continue
                if pos in owner:
                    return (
                        f"family {list(fam.indices)}: position {pos} lies in the supports of "
                        f"c{owner[pos]} and c({j},{ell})"
                    )
                owner[pos] = (j, ell)
        common = set(pair[0].support) & set(pair[1].support)
        if common != {i}:
            return f"family {list(fam.indices)}: supports of pair {j} meet in {sorted(common)}, expected [{i}]"
    return None


def dual_pairs_for(c: LinearCode, indices: Sequence[int], cap: int = DUAL_CAP) -> DualPairFamily:
    """Serve each ``x_{i_j}`` three times and keep, per index, the two sets avoiding ``i_j``."""
    indices = tuple(indices)
    t = len(indices)
    if t < 1 or any(a <= b for a, b in zip(indices, indices[1:])):
        raise CodeError(f"indices {list(indices)} must be a nonempty strictly decreasing tuple")
    request = BatchRequest(tuple(i for i in indices for _ in range(3)))
    plan = serve_request(c, request, cap)
    if plan is None:
        raise NotBatchError(f"code is not {3 * t}-batch for these indices: {list(request.indices)}", request.indices)
    return family_from_plan(c, plan)


def family_from_plan(c: LinearCode, plan: RecoveryPlan) -> DualPairFamily:
    """Dual-pair family from any plan serving each of ``i_1 > ... > i_t`` exactly three times.

    Per index, at most one of its three disjoint sets contains it; of the
    others the two smallest (then lexicographically first) are kept.
    """
    counts = Counter(plan.request.indices)
    if any(v != 3 for v in counts.values()):
        raise CodeError(f"plan request {list(plan.request.indices)} does not repeat each index three times")
    indices = tuple(sorted(counts, reverse=True))
    pairs = []
    for i in indices:
        avoiding = [s for s in plan.sets if s.target == i and i not in s.positions]
        avoiding.sort(key=lambda s: (len(s.positions), s.positions))
        a, b = (recovery_to_dual(c, i, s.positions, s.coefficients) for s in avoiding[:2])
        pairs.append((a, b))
    fam = DualPairFamily(indices, tuple(pairs))
    problem = family_problem(c, fam)
    if problem is not None:
        raise CertificateError(f"plan produced an invalid family: {problem}")
    return fam


def _assemble(fam: DualPairFamily, pi: GoodMap) -> SparseTensorProduct:
    factors = tuple(fam.pairs[a - 1][b - 1] for a, b in zip(pi.pi1, pi.pi2))
    return SparseTensorProduct(factors, fam.indices, pi)


def build_w(fam: DualPairFamily, pi: GoodMap) -> SparseTensorProduct:
    """The simple tensor whose slot j holds ``c^{(pi1(j), pi2(j))}``."""
    if not pi.is_valid(fam.t):
        raise CodeError(f"{pi} is not a good map for t={fam.t}")
    return _assemble(fam, pi)


def good_components(w: SparseTensorProduct, cap: int = EXPANSION_CAP) -> dict[tuple[int, ...], int]:
    """All good multi-indices where ``w`` is nonzero, mapped to their coefficients.

    Walks the product of factor supports, pruning as soon as some index
    repeats three times or more than t distinct indices appear.
    """
    f = w.field
    t = len(w.factors) // 2
    supports = [d.support for d in w.factors]
    vectors = [d.vector for d in w.factors]
    out: dict[tuple[int, ...], int] = {}
    counts: dict[int, int] = {}
    prefix: list[int] = []
    visited = 0

    def rec(slot: int, coeff: int) -> None:
        nonlocal visited
        visited += 1
        if visited > cap:
            raise CapExceeded(f"good-component expansion exceeded {cap} steps")
        if slot == len(supports):
            if len(counts) == t and all(v == 2 for v in counts.values()):
                out[tuple(prefix)] = coeff
            return
        for pos in supports[slot]:
            c = counts.get(pos, 0)
            if c == 2 or (c == 0 and len(counts) == t):
                continue
            counts[pos] = c + 1
            prefix.append(pos)
            rec(slot + 1, f.mul(coeff, vectors[slot][pos - 1]))
            prefix.pop()
            if c:
                counts[pos] = c
            else:
                del counts[pos]

    rec(0, 1)
    if len(out) > 3**t:
        raise CertificateError(f"tensor has {len(out)} good components, more than 3^{t}; its dual-pair family is invalid")
    return dict(sorted(out.items()))


def selection_rank(field: Field, tables: Sequence[Sequence[tuple[tuple[int, ...], int]]]) -> int:
    """Rank of the tensors restricted to the good coordinates they touch.

    Projection cannot raise rank, so this is a lower bound on the full rank.
    """
    cols = sorted({ix for table in tables for ix, _ in table})
    where = {ix: j for j, ix in enumerate(cols)}
    rows = []
    for table in tables:
        row = [0] * len(cols)
        for ix, v in table:
            row[where[ix]] = v % field.p
        rows.append(row)
    return rank_of_rows(field, rows, len(cols))


def greedy_family(
    c: LinearCode,
    k: int,
    cap: int = GOOD_COUNT_CAP,
    expansion_cap: int = EXPANSION_CAP,
    dual_cap: int = DUAL_CAP,
) -> Certificate:
    """Greedy triangular family of tensors in ``V^{(x)2t}`` with ``t = floor(k/3)``.

    Good tensors are visited by decreasing index tuple (lexicographic), then
    by ``pi1`` pattern (lexicographic); each unkilled one selects its ``w``
    with canonical ``pi2``, and every good component of that ``w`` is killed.
    """
    t = k // 3
    if t == 0:
        raise CodeError(f"k={k} gives t = 0: the certificate is vacuous")
    if t > c.n:
        raise CodeError(f"t={t} exceeds n={c.n}")
    total = good_count(c.n, t)
    if total > cap:
        raise CapExceeded(f"|E| = {total} good tensors exceeds the cap {cap}")
    killed: set[tuple[int, ...]] = set()
    families: list[DualPairFamily] = []
    selections: list[Selection] = []
    patterns = list(pi1_patterns(t))
    for indices in decreasing_tuples(c.n, t):
        fam = None
        for pi1 in patterns:
            e = e_index(indices, pi1)
            if e in killed:
                continue
            if fam is None:
                fam = dual_pairs_for(c, indices, dual_cap)
                families.append(fam)
            w = _assemble(fam, GoodMap.canonical(pi1))
            comps = good_components(w, expansion_cap)
            if not comps.get(e):
                raise CertificateError(f"w for e={list(e)} does not contain e")
            killed.update(comps)
            selections.append(Selection(e, w, tuple(comps.items())))
    d_guarantee = -(-total // 3**t)
    achieved = len(selections)
    if achieved < d_guarantee:
        raise CertificateError(f"greedy stopped at {achieved} < {d_guarantee} selections")
    rk = selection_rank(c.field, [s.good for s in selections])
    return Certificate(
        q=c.q,
        n=c.n,
        N=c.N,
        k=k,
        t=t,
        generator=c.generator.rows,
        families=tuple(families),
        selections=tuple(selections),
        d_guarantee=d_guarantee,
        achieved=achieved,
        rank=rk,
    )


def verify_certificate(cert: Certificate, c: LinearCode, expansion_cap: int = EXPANSION_CAP) -> Check:
    """Recheck a certificate from the code alone; the first failed condition is named."""
    if (cert.q, cert.n, cert.N) != (c.q, c.n, c.N) or tuple(map(tuple, cert.generator)) != c.generator.rows:
        return Check(False, "fingerprint: certificate was issued for a different code")
    t = cert.k // 3
    if cert.t != t or t < 1 or t > c.n:
        return Check(False, f"parameters: t={cert.t} inconsistent with k={cert.k}, n={c.n}")
    expected_d = -(-good_count(c.n, t) // 3**t)
    if cert.d_guarantee != expected_d:
        return Check(False, f"d_guarantee: recorded {cert.d_guarantee}, recomputed {expected_d}")
    by_indices = {}
    for fam in cert.families:
        if fam.t != t:
            return Check(False, f"family {list(fam.indices)}: expected {t} indices")
        if fam.indices in by_indices:
            return Check(False, f"family {list(fam.indices)} appears twice")
        problem = family_problem(c, fam)
        if problem is not None:
            return Check(False, problem)
        by_indices[fam.indices] = fam
    tables = []
    for r, sel in enumerate(cert.selections, start=1):
        pi = sel.w.pi
        if not pi.is_valid(t):
            return Check(False, f"selection {r}: not a good map")
        fam = by_indices.get(tuple(sorted(set(sel.e), reverse=True)))
        if fam is None:
            return Check(False, f"selection {r}: no family for e={list(sel.e)}")
        if not is_good_index(sel.e, t) or e_index(fam.indices, pi.pi1) != sel.e:
            return Check(False, f"selection {r}: e={list(sel.e)} does not match its good map")
        w = _assemble(fam, pi)
        if w.factors != sel.w.factors:
            return Check(False, f"selection {r}: tensor factors do not match the family")
        try:
            comps = good_components(w, expansion_cap)
        except CertificateError as exc:
            return Check(False, f"selection {r}: {exc}")
        if tuple(comps.items()) != tuple(sel.good):
            return Check(False, f"selection {r}: good-component table mismatch")
        if not comps.get(sel.e):
            return Check(False, f"selection {r}: w does not contain e")
        tables.append(sel.good)
    for r, sel in enumerate(cert.selections, start=1):
        table = dict(sel.good)
        for s in range(r, len(cert.selections)):
            later = cert.selections[s].e
            if later in table:
                return Check(False, f"triangularity: w({r}) contains e({s + 1})={list(later)}")
    count = len(cert.selections)
    if cert.achieved != count:
        return Check(False, f"achieved: recorded {cert.achieved}, certificate lists {count}")
    if count < expected_d:
        return Check(False, f"achieved {count} below the guarantee {expected_d}")
    rk = selection_rank(c.field, tables)
    if rk != count or cert.rank != rk:
        return Check(False, f"rank: recomputed {rk}, recorded {cert.rank}, selections {count}")
    if c.redundancy ** (2 * t) < count:
        return Check(False, f"dimension: (N - n)^{2 * t} = {c.redundancy ** (2 * t)} < {count}")
    return Check(True)


def tensor_power_dim_check(
    v_basis: Matrix, s: int, dim_cap: int = POWER_DIM_CAP, len_cap: int = POWER_LEN_CAP
) -> bool:
    """Materialize all s-fold products of the basis rows and compare the rank with ``dim(V)^s``."""
    if s < 1:
        raise CodeError(f"s must be positive, got {s}")
    p = v_basis.field.p
    rows = [np.asarray(r, dtype=np.int64) for r in v_basis.rows]
    m, N = len(rows), v_basis.cols
    if m**s > dim_cap or N**s > len_cap:
        raise CapExceeded(f"{m}^{s} products of length {N}^{s} exceed the caps ({dim_cap}, {len_cap})")
    dim = rank_mod_p(np.array(rows).reshape(m, N), p) if m else 0
    if m == 0:
        return dim == 0
    products = []
    for combo in itertools.product(range(m), repeat=s):
        v = np.ones(1, dtype=np.int64)
        for a in combo:
            v = np.kron(v, rows[a]) % p
        products.append(v)
    return rank_mod_p(np.array(products), p) == dim**s


@dataclass(frozen=True)
class TheoremBound:
    """Redundancy lower bounds for a k-batch code with the given parameters."""

    t: int
    explicit: float | None
    dimension: int | None
    fallback: float | None
    distance: int
    singleton: int


def theorem_bound(n: int, N: int, k: int) -> TheoremBound:
    """``sqrt(2 n t / (3 e^2))`` with ``t = floor(k/3)``, plus companions.

    ``dimension`` is the least r with ``r^{2t} >= ceil(|E| / 3^t)``, the exact
    integer form of the same counting argument. ``fallback`` is ``N/2`` and
    only applies when ``n <= N/2``. ``distance`` is k; ``singleton`` is k - 1,
    which is what minimum distance k actually forces.
    """
    t = k // 3
    explicit = dimension = None
    if t >= 1 and t <= n:
        explicit = math.sqrt(2 * n * t / (3 * math.e**2))
        need = -(-good_count(n, t) // 3**t)
        r = int(need ** (1 / (2 * t)))
        while r > 0 and (r - 1) ** (2 * t) >= need:
            r -= 1
        while r ** (2 * t) < need:
            r += 1
        dimension = r
    fallback = N / 2 if 2 * n <= N else None
    return TheoremBound(t, explicit, dimension, fallback, k, max(k - 1, 0))
