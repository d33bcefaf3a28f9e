import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cliffmeas.gf2 import BinMatrix, rank
from cliffmeas.pauli import symplectic_form
from cliffmeas.symplectic import (
    CNOT,
    H,
    P,
    CliffordGate,
    GateError,
    J_matrix,
    SymplecticMatrix,
    apply_gate_columns,
    circuit_to_symplectic,
    commuting_rows,
    gate_matrix,
    is_symplectic,
    random_clifford_circuit,
    random_symplectic,
    symplectic_partner,
)
from cliffmeas.tableau import Tableau

DISPLAY_6X6 = ["110000", "011000", "001000", "000100", "000110", "000111"]


def heisenberg_rows(gates, n):
    """Images of X_j, Z_j under the circuit, read off a tableau (independent oracle)."""
    t = Tableau.zero_state(n).apply_circuit(gates)
    rows = t.destabilizers() + t.stabilizers()
    return tuple(r.x | (r.z << n) for r in rows)


def test_two_cnot_display():
    m = circuit_to_symplectic([CNOT(1, 2), CNOT(0, 1)], 3)
    assert m.m.to_strings() == DISPLAY_6X6
    assert is_symplectic(m.m)


def test_two_cnot_other_order():
    m = circuit_to_symplectic([CNOT(0, 1), CNOT(1, 2)], 3)
    assert m.m.to_strings() == ["111000", "011000", "001000", "000100", "000110", "000011"]


def test_single_gate_columns():
    assert gate_matrix(H(0), 1).m.to_strings() == ["01", "10"]
    assert gate_matrix(P(0), 1).m.to_strings() == ["11", "01"]
    assert gate_matrix(CNOT(0, 1), 2).m.to_strings() == ["1100", "0100", "0010", "0011"]


def test_pauli_gates_do_not_change_matrix():
    gates = [CliffordGate("X", (0,)), CliffordGate("Z", (1,))]
    assert circuit_to_symplectic(gates, 2).m == BinMatrix.identity(4)


def test_sp2_has_six_elements():
    found = set()
    for rows in itertools.product(range(4), repeat=2):
        m = BinMatrix(rows, 2)
        if is_symplectic(m):
            found.add(rows)
    assert len(found) == 6
    for seed in range(30):
        assert random_symplectic(1, seed).m.rows in found


@given(st.integers(1, 5), st.integers(0, 10_000))
def test_circuit_matrix_matches_tableau(n, seed):
    gates = random_clifford_circuit(n, 30, random.Random(seed))
    assert circuit_to_symplectic(gates, n).m.rows == heisenberg_rows(gates, n)


@given(st.integers(1, 5), st.integers(0, 10_000))
def test_composition(n, seed):
    rng = random.Random(seed)
    c1 = random_clifford_circuit(n, 15, rng)
    c2 = random_clifford_circuit(n, 15, rng)
    whole = circuit_to_symplectic(c1 + c2, n)
    assert whole == circuit_to_symplectic(c1, n) @ circuit_to_symplectic(c2, n)
    assert is_symplectic(whole.m)


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_inverse(n, seed):
    m = random_symplectic(n, seed)
    assert (m @ m.inverse()).m == BinMatrix.identity(2 * n)


def test_random_symplectic_deterministic_and_valid():
    assert random_symplectic(4, 9) == random_symplectic(4, 9)
    for seed in range(100):
        assert is_symplectic(random_symplectic(8, seed).m)


def test_apply_gate_columns_closure():
    rng = random.Random(3)
    m = SymplecticMatrix.identity(4)
    for g in random_clifford_circuit(4, 50, rng):
        m = apply_gate_columns(m, g)
        assert is_symplectic(m.m)


def test_non_symplectic_rejected():
    with pytest.raises(ValueError):
        SymplecticMatrix.checked(BinMatrix.from_strings(["11", "11"]))


def test_gate_validation():
    with pytest.raises(GateError):
        CNOT(1, 1)
    with pytest.raises(GateError):
        CliffordGate("T", (0,))
    with pytest.raises(GateError):
        circuit_to_symplectic([H(3)], 2)


def test_partner_trivial_cases():
    assert symplectic_partner(BinMatrix.from_strings(["01"])).to_strings() == ["10"]
    n = 3
    ab = BinMatrix(tuple(1 << j for j in range(n)), 2 * n)
    ef = symplectic_partner(ab)
    assert ef.rows == tuple(1 << (n + j) for j in range(n))


def _j_product(a, b, n):
    mask = (1 << n) - 1
    return [[symplectic_form(r & mask, r >> n, s & mask, s >> n) for s in b] for r in a]


@given(st.integers(1, 8), st.integers(0, 10_000), st.data())
def test_partner_random_commuting_sets(n, seed, data):
    m = random_symplectic(n, seed)
    k = data.draw(st.integers(1, n))
    # stabilizer-like rows: images of Z_1..Z_k commute and are independent
    ab = BinMatrix(m.m.rows[n : n + k], 2 * n)
    ef = symplectic_partner(ab)
    assert commuting_rows(ef.rows, n)
    prod = _j_product(ab.rows, ef.rows, n)
    assert prod == [[int(i == j) for j in range(k)] for i in range(k)]
    assert symplectic_partner(ab) == ef


def test_partner_rejects_dependent_rows():
    with pytest.raises(ValueError):
        symplectic_partner(BinMatrix.from_strings(["1000", "1000"]))


def test_j_matrix():
    j = J_matrix(2)
    assert j.to_strings() == ["0010", "0001", "1000", "0100"]
    assert rank(j) == 4
