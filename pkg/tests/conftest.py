import itertools

import numpy as np
import pytest

from batchlab.constructions import grid_parity, random_systematic, replication, single_parity

# ---------------------------------------------------------
# Independent brute-force helpers (no library shortcuts)
# ---------------------------------------------------------


def all_codewords(c):
    q = c.q
    for msg in itertools.product(range(q), repeat=c.n):
        yield tuple(sum(x * g for x, g in zip(msg, col)) % q for col in zip(*c.generator.rows))


def all_dual_vectors(c):
    """Every vector orthogonal to all codewords, found by scanning F^N."""
    q = c.q
    for v in itertools.product(range(q), repeat=c.N):
        if all(sum(a * b for a, b in zip(v, row)) % q == 0 for row in c.generator.rows):
            yield v


def dense_tensor(factors, q):
    """Full Kronecker product of the factor vectors, reshaped to an order-len(factors) array."""
    out = np.ones(1, dtype=np.int64)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=np.int64)) % q
    N = len(factors[0])
    return out.reshape((N,) * len(factors))


def corpus():
    codes = [single_parity(n) for n in range(1, 6)]
    codes += [replication(n, m) for n in range(1, 4) for m in range(1, 5)]
    codes += [grid_parity(2), single_parity(3, q=3), replication(2, 3, q=5)]
    codes += [random_systematic(n, r, q, seed) for seed, (n, r, q) in enumerate(
        [(2, 3, 2), (3, 4, 2), (3, 5, 2), (4, 4, 2), (2, 4, 3), (3, 3, 3), (4, 6, 2), (2, 2, 5)])]
    return codes


@pytest.fixture(scope="session")
def code_corpus():
    return corpus()


# ---------------------------------------------------------
# Acceptance summary: one line per criterion
# ---------------------------------------------------------

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    num, text = mark.args
    _ACCEPTANCE.append((num, text, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, ok in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {text}")
