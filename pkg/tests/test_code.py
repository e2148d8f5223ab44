import itertools

import numpy as np
import pytest

from batchlab.code import (
    check_recovery,
    code_from_generator,
    dual_codewords,
    dual_to_recovery,
    format_code,
    min_distance,
    parse_code,
    parse_generator,
    recoverable,
    recovery_to_dual,
    systematize,
)
from batchlab.constructions import code_from_parity, random_systematic, replication, single_parity
from batchlab.errors import CapExceeded, CodeError, ParseError, RecoveryError
from batchlab.field import Field
from batchlab.matrix import Matrix, rank, rank_mod_p, rref

from conftest import all_codewords, all_dual_vectors

GF2, GF5 = Field(2), Field(5)


# ---------------------------------------------------------
# rref
# ---------------------------------------------------------


def test_rref_examples():
    m, piv, rk = rref(Matrix.from_rows(GF2, [[0, 1], [1, 1]]))
    assert m.tolist() == [[1, 0], [0, 1]] and rk == 2 and piv == (0, 1)

    z = Matrix.zeros(GF2, 2, 3)
    m, piv, rk = rref(z)
    assert m == z and rk == 0 and piv == ()

    m, piv, rk = rref(Matrix.from_rows(GF5, [[2, 4], [1, 2]]))
    assert m.tolist() == [[1, 2], [0, 0]] and rk == 1


def test_rank_agrees_with_numpy_route():
    rng = np.random.default_rng(3)
    for p in (2, 3, 5, 7):
        for _ in range(40):
            a = rng.integers(0, p, size=(rng.integers(1, 6), rng.integers(1, 7)))
            assert rank(Matrix.from_rows(Field(p), a.tolist())) == rank_mod_p(a, p)


# ---------------------------------------------------------
# code_from_generator
# ---------------------------------------------------------


def test_single_parity_dual():
    c = code_from_generator(Matrix.from_rows(GF2, [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]]))
    assert (c.n, c.N) == (3, 4)
    assert c.dual_basis.tolist() == [[1, 1, 1, 1]]


def test_identity_code_has_trivial_dual():
    c = code_from_generator(Matrix.identity(GF2, 3))
    assert c.dual_basis.nrows == 0 and c.redundancy == 0


def test_non_systematic_rejected():
    with pytest.raises(CodeError):
        code_from_generator(Matrix.from_rows(GF2, [[1, 1], [0, 1]]))


@pytest.mark.parametrize("seed", range(20))
def test_dual_dimension_and_orthogonality(seed):
    q = [2, 3, 5, 7][seed % 4]
    c = random_systematic(1 + seed % 4, seed % 5, q, seed)
    assert rank(c.generator) == c.n
    assert rank(c.dual_basis) == c.N - c.n
    for h in c.dual_basis.rows:
        for g in c.generator.rows:
            assert sum(a * b for a, b in zip(h, g)) % q == 0


def test_dual_enumeration_matches_brute_force():
    for c in [single_parity(3), replication(2, 2), random_systematic(2, 3, 3, 5)]:
        fast = {tuple(int(v) for v in row) for row in dual_codewords(c)}
        assert fast == set(all_dual_vectors(c))


def test_systematize_permutes_into_identity():
    g = Matrix.from_rows(GF2, [[1, 1, 0, 1], [1, 0, 1, 1]])
    s, perm = systematize(g)
    c = code_from_generator(s)
    assert perm == (1, 2, 3, 4)
    assert c.generator.tolist() == [[1, 0, 1, 1], [0, 1, 1, 0]]
    g = Matrix.from_rows(GF2, [[0, 1, 1], [0, 0, 1]])
    s, perm = systematize(g)
    assert perm == (2, 3, 1)
    assert s.tolist() == [[1, 0, 0], [0, 1, 0]]


# ---------------------------------------------------------
# min_distance
# ---------------------------------------------------------


def brute_distance(c):
    return min(sum(1 for v in w if v) for w in all_codewords(c) if any(w))


def test_min_distance_examples():
    assert min_distance(single_parity(3)) == 2
    assert min_distance(code_from_generator(Matrix.identity(GF2, 3))) == 1
    assert min_distance(replication(2, 3)) == 3


@pytest.mark.parametrize("seed", range(15))
def test_min_distance_brute_force(seed):
    q = [2, 3, 5][seed % 3]
    c = random_systematic(1 + seed % 4, 1 + seed % 3, q, 100 + seed)
    assert min_distance(c) == brute_distance(c)


def test_min_distance_large_message_space_is_chunked():
    c = random_systematic(18, 4, 2, 9)
    d = min_distance(c)
    assert 1 <= d <= 5


def test_min_distance_cap():
    with pytest.raises(CapExceeded):
        min_distance(random_systematic(23, 1, 2, 0))


# ---------------------------------------------------------
# recovery <-> dual correspondence
# ---------------------------------------------------------


def test_recovery_to_dual_examples():
    sp = single_parity(3)
    assert recovery_to_dual(sp, 1, {2, 3, 4}, (1, 1, 1)).vector == (1, 1, 1, 1)

    c = code_from_parity(5, [[2]])
    d = recovery_to_dual(c, 1, {2}, (3,))
    assert d.vector == (4, 3)
    assert c.is_dual_vector(d.vector)


def test_recovery_to_dual_rejects_wrong_function():
    sp = single_parity(3)
    with pytest.raises(RecoveryError, match="row 1"):
        recovery_to_dual(sp, 1, {2, 3}, (1, 1))
    with pytest.raises(RecoveryError):
        recovery_to_dual(sp, 1, {1, 2}, (1, 1))


def test_identity_code_has_no_nontrivial_recovery():
    c = code_from_generator(Matrix.identity(GF2, 3))
    for S in [{2}, {3}, {2, 3}]:
        assert recoverable(c, 1, S) is None


def test_dual_to_recovery_examples():
    sp = single_parity(3)
    d = sp.dual_codeword((1, 1, 1, 1))
    assert dual_to_recovery(d, 1) == ((2, 3, 4), (1, 1, 1))

    c = code_from_parity(5, [[2]])
    assert dual_to_recovery(c.dual_codeword((4, 3)), 1) == ((2,), (3,))
    with pytest.raises(RecoveryError):
        dual_to_recovery(sp.dual_codeword((0, 0, 0, 0)), 1)


def test_recoverable_examples():
    sp = single_parity(3)
    assert recoverable(sp, 1, {1}) == (1,)
    assert recoverable(sp, 1, {2, 3}) is None
    assert recoverable(sp, 1, {2, 3, 4}) == (1, 1, 1)


def brute_recoverable(c, i, S):
    """Search every coefficient vector on S against every codeword."""
    S = sorted(S)
    words = list(all_codewords(c))
    for g in itertools.product(range(c.q), repeat=len(S)):
        if all(sum(a * w[j - 1] for a, j in zip(g, S)) % c.q == w[i - 1] for w in words):
            return True
    return False


@pytest.mark.parametrize("seed", range(12))
def test_recoverable_matches_brute_force_and_dual_supports(seed):
    q = [2, 3][seed % 2]
    c = random_systematic(1 + seed % 3, 1 + seed % 3, q, 40 + seed)
    duals = list(all_dual_vectors(c))
    for i in range(1, c.n + 1):
        for r in range(0, c.N + 1):
            for S in itertools.combinations(range(1, c.N + 1), r):
                got = recoverable(c, i, S)
                assert (got is not None) == brute_recoverable(c, i, S)
                by_dual = i in S or any(
                    d[i - 1] and all(d[j] == 0 or (j + 1) in S or j + 1 == i for j in range(c.N)) for d in duals
                )
                assert (got is not None) == by_dual
                if got is not None:
                    assert check_recovery(c, i, sorted(S), got) is None


# ---------------------------------------------------------
# code file format
# ---------------------------------------------------------


def test_format_parse_roundtrip():
    c = random_systematic(3, 4, 5, 2)
    assert parse_code(format_code(c)) == c


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("2 2\n1 0\n0 1\n", 1),
        ("2 2 3\n1 0 1\n", 3),
        ("2 2 3\n1 0 1\n0 1 1\n1 1 1\n", 4),
        ("2 2 3\n1 0 1\n0 1\n", 3),
        ("2 2 3\n1 0 1\n0 1 2\n", 3),
        ("4 1 2\n1 0\n", 1),
        ("2 1 2\n1 x\n", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_generator(text)
    assert exc.value.line == line


def test_parse_error_column():
    with pytest.raises(ParseError) as exc:
        parse_generator("2 2 3\n1 0 1\n0 1 5\n")
    assert (exc.value.line, exc.value.column) == (3, 5)
