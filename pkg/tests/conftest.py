import numpy as np
import pytest
from scipy.stats import unitary_group

from blockentropy.constraints import make_rng, random_state

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return make_rng(20261018)


def rand_state(dim, rng):
    return random_state(dim, rng)


def rand_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def pure(vec):
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
