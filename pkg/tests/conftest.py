import math

import numpy as np
import pytest

from qcsyn.gates import clifford_t
from qcsyn.quantum import QuantumState

R2 = 1 / math.sqrt(2)


@pytest.fixture(scope="session")
def gs():
    return clifford_t()


def random_state(rng: np.random.Generator, n: int) -> QuantumState:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return QuantumState.from_amplitudes(v, normalize=True)


def basis(n: int, index: int) -> QuantumState:
    v = np.zeros(2**n, dtype=complex)
    v[index] = 1
    return QuantumState(n, v)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
