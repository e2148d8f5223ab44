import itertools

import numpy as np
import pytest

from batchlab import batch
from batchlab.batch import (
    BatchRequest,
    RecoveryPlan,
    RecoverySet,
    batch_number,
    batch_number_oracle,
    is_k_batch,
    minimal_recovery_sets,
    sample_k_batch,
    serve_request,
    validate_plan,
)
from batchlab.code import code_from_generator, recoverable
from batchlab.constructions import code_from_parity, grid_parity, random_systematic, replication, single_parity
from batchlab.errors import CapExceeded, CodeError
from batchlab.field import Field
from batchlab.matrix import Matrix


def positions(sets):
    return [set(s.positions) for s in sets]


def test_minimal_sets_examples():
    assert positions(minimal_recovery_sets(single_parity(3), 1)) == [{1}, {2, 3, 4}]
    assert positions(minimal_recovery_sets(replication(2, 3), 1)) == [{1}, {3}, {5}]
    ident = code_from_generator(Matrix.identity(Field(2), 2))
    assert positions(minimal_recovery_sets(ident, 1)) == [{1}]


@pytest.mark.parametrize("seed", range(10))
def test_minimal_sets_are_exactly_the_minimal_recovering_subsets(seed):
    q = [2, 3][seed % 2]
    c = random_systematic(1 + seed % 3, 2 + seed % 3, q, 300 + seed)
    for i in range(1, c.n + 1):
        recovering = [
            frozenset(S)
            for r in range(1, c.N + 1)
            for S in itertools.combinations(range(1, c.N + 1), r)
            if recoverable(c, i, S) is not None
        ]
        minimal = {S for S in recovering if not any(T < S for T in recovering)}
        got = minimal_recovery_sets(c, i)
        assert {frozenset(s.positions) for s in got} == minimal
        keys = [(len(s.positions), s.positions) for s in got]
        assert keys == sorted(keys)


def test_serve_request_examples():
    sp = single_parity(3)
    plan = serve_request(sp, BatchRequest.of(1, 1))
    assert positions(plan.sets) == [{1}, {2, 3, 4}]
    assert validate_plan(sp, plan)
    assert serve_request(sp, BatchRequest.of(1, 1, 1)) is None
    for c in [sp, replication(2, 3), grid_parity(2)]:
        for i in range(1, c.n + 1):
            plan = serve_request(c, BatchRequest.of(i))
            assert positions(plan.sets) == [{i}]


def test_serve_request_rejects_bad_indices():
    with pytest.raises(CodeError):
        serve_request(single_parity(3), BatchRequest.of(4))


def test_is_k_batch_examples():
    sp = single_parity(3)
    assert is_k_batch(sp, 2) == (True, None)
    holds, witness = is_k_batch(sp, 3)
    assert not holds and witness.indices == (1, 1, 1)
    assert is_k_batch(replication(2, 3), 3).holds


def test_degenerate_k():
    sp = single_parity(3)
    assert is_k_batch(sp, 0).holds
    v = is_k_batch(sp, 5)
    assert not v.holds and v.witness.k == 5


def test_batch_number_examples():
    ident = code_from_generator(Matrix.identity(Field(2), 2))
    assert batch_number(ident) == 1
    assert batch_number(replication(2, 3)) == 3
    assert batch_number(single_parity(3)) == 2
    assert batch_number(replication(2, 4), max_k=2) == 2


def test_oracle_examples():
    assert batch_number_oracle(single_parity(3)) == 2
    assert batch_number_oracle(replication(2, 2)) == 2
    assert batch_number_oracle(code_from_generator(Matrix.identity(Field(2), 3))) == 1
    with pytest.raises(CapExceeded):
        batch_number_oracle(replication(4, 3))


def test_validate_plan_failures():
    sp = single_parity(3)
    req = BatchRequest.of(1, 1)
    good = RecoverySet(1, (1,), (1,))
    assert validate_plan(sp, RecoveryPlan(req, (good, RecoverySet(1, (2, 3, 4), (1, 1, 1)))))
    overlap = validate_plan(sp, RecoveryPlan(req, (good, RecoverySet(1, (1, 2, 3, 4), (0, 1, 1, 1)))))
    assert not overlap and "position 1" in overlap.reason
    wrong = validate_plan(sp, RecoveryPlan(req, (good, RecoverySet(1, (2, 3, 4), (1, 0, 1)))))
    assert not wrong and "generator row 3" in wrong.reason
    short = validate_plan(sp, RecoveryPlan(req, (good,)))
    assert not short


def test_monotonicity_on_corpus(code_corpus):
    for c in code_corpus:
        b = batch_number(c, max_k=min(c.N, 6))
        for k in range(b + 1, min(c.N, 6) + 1):
            assert not is_k_batch(c, k).holds


@pytest.mark.parametrize("seed", range(12))
def test_permuting_redundancy_columns_keeps_batch_number(seed):
    c = random_systematic(2 + seed % 3, 3 + seed % 3, 2, 500 + seed)
    parity = [row[c.n:] for row in c.generator.rows]
    r = c.redundancy
    perm = np.random.default_rng(seed).permutation(r).tolist()
    permuted = code_from_parity(2, [[row[j] for j in perm] for row in parity])
    assert batch_number(permuted) == batch_number(c)


def test_every_returned_plan_validates(code_corpus):
    for c in code_corpus:
        for k in range(1, min(c.N, 5) + 1):
            for idx in itertools.combinations_with_replacement(range(1, c.n + 1), k):
                plan = serve_request(c, BatchRequest(idx))
                if plan is not None:
                    assert validate_plan(c, plan), (c, idx)


def test_multiset_cap():
    with pytest.raises(CapExceeded, match="sample"):
        is_k_batch(replication(6, 2), 4, cap=50)


def test_dual_cap():
    with pytest.raises(CapExceeded):
        minimal_recovery_sets(replication(4, 3), 1, cap=100)


def test_sample_mode():
    sp = single_parity(3)
    v = sample_k_batch(sp, 2, 50, seed=1)
    assert v.witness is None and v.samples == 50
    v = sample_k_batch(replication(2, 2), 3, 200, seed=1)
    assert v.witness is not None
    assert serve_request(replication(2, 2), v.witness) is None
    assert sample_k_batch(sp, 3, 50, seed=4) == sample_k_batch(sp, 3, 50, seed=4)


def test_parallel_path_matches_sequential(monkeypatch):
    monkeypatch.setattr(batch, "PARALLEL_THRESHOLD", 1)
    for c, k in [(grid_parity(2), 3), (grid_parity(2), 4), (random_systematic(4, 4, 2, 2), 3)]:
        assert is_k_batch(c, k, workers=2) == is_k_batch(c, k, workers=1)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("BATCHLAB_THREADS", "1")
    assert batch._workers() == 1
    monkeypatch.setenv("BATCHLAB_THREADS", "3")
    assert batch._workers() == 3


def test_plan_text_format():
    plan = serve_request(single_parity(3), BatchRequest.of(1, 1))
    assert str(plan) == "1 <- {1} : 1\n1 <- {2,3,4} : 1 1 1"
