import random

import numpy as np
import pytest
from hypothesis import settings

from cliffmeas.pauli import PauliOp
from cliffmeas.tableau import Tableau

# filled by the acceptance suite, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dense_pauli(p: PauliOp) -> np.ndarray:
    """``i^l X^x Z^z`` as a 2^n matrix; qubit j is bit j of the basis index."""
    out = np.array([[1]], dtype=complex)
    for j in range(p.n - 1, -1, -1):
        f = _I
        if (p.x >> j) & 1:
            f = _X
        if (p.z >> j) & 1:
            f = f @ _Z
        out = np.kron(out, f)
    return (1j ** p.phase_exp) * out


def dense_state(t: Tableau, seed: int = 0) -> np.ndarray:
    """State vector stabilized by the tableau, built by projecting a random vector."""
    rng = np.random.default_rng(seed)
    dim = 2 ** t.n
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    for g in t.stabilizers():
        v = (v + dense_pauli(g) @ v) / 2
    return v / np.linalg.norm(v)


def same_ray(a: np.ndarray, b: np.ndarray) -> bool:
    return abs(abs(np.vdot(a, b)) - 1) < 1e-9


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
