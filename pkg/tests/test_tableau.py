import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffmeas.pauli import PauliError, PauliOp
from cliffmeas.symplectic import CNOT, H, P, random_clifford_circuit
from cliffmeas.tableau import (
    DeterministicOutcomeError,
    StateError,
    Tableau,
    canonical_form,
    canonical_generators,
    init_state,
    measure_pauli,
    random_stabilizer_state,
)

from conftest import dense_pauli, dense_state, same_ray

S = PauliOp.from_string


def test_zero_and_plus():
    assert Tableau.zero_state(2).canonical_strings() == ["+Z1", "+Z2"]
    assert Tableau.plus_state(1).canonical_strings() == ["+X1"]
    assert init_state("all_plus", 2).canonical_strings() == ["+X1", "+X2"]
    with pytest.raises(StateError):
        init_state("bogus", 1)


def test_bell_presentations_agree():
    a = Tableau.from_generators([S("XX"), S("ZZ")])
    b = Tableau.from_generators([S("XX"), S("-YY")])
    assert a.canonical_strings() == b.canonical_strings()
    c = Tableau.zero_state(2).h(0).cnot(0, 1)
    assert c.same_state(a)


def test_sorted_z():
    t = Tableau.from_generators([S("IZ"), S("ZI")])
    assert t.canonical_strings() == ["+Z1", "+Z2"]


def test_measure_basic():
    t = Tableau.zero_state(1)
    assert t.measure(S("Z")) == 1
    assert t.canonical_strings() == ["+Z1"]
    assert t.measure(S("X"), forced=1) == 1
    assert t.canonical_strings() == ["+X1"]
    with pytest.raises(DeterministicOutcomeError):
        t.measure(S("X"), forced=-1)
    with pytest.raises(PauliError):
        t.measure(PauliOp(1, 1, 0, 1))


def test_from_generators_validation():
    with pytest.raises(StateError):
        Tableau.from_generators([S("X"), S("Z")][:1] + [S("Z")])
    with pytest.raises(StateError):
        Tableau.from_generators([S("ZI"), S("ZI")])


@given(st.integers(1, 3), st.integers(0, 10_000))
def test_gates_match_dense(n, seed):
    rng = random.Random(seed)
    t = random_stabilizer_state(n, rng, depth=10)
    psi = dense_state(t)
    gates = random_clifford_circuit(n, 12, rng)
    t2 = t.copy().apply_circuit(gates)
    # build the dense unitary gate by gate
    from conftest import _I, _X, _Z  # noqa: F401

    def one(g, q):
        ops = [np.eye(2)] * n
        ops[q] = g
        out = np.array([[1]], dtype=complex)
        for j in range(n - 1, -1, -1):
            out = np.kron(out, ops[j])
        return out

    hd = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    sd = np.diag([1, 1j])
    for g in gates:
        if g.kind == "H":
            psi = one(hd, g.qubits[0]) @ psi
        elif g.kind == "P":
            psi = one(sd, g.qubits[0]) @ psi
        else:
            c, tq = g.qubits
            u = np.zeros((2**n, 2**n))
            for b in range(2**n):
                u[b ^ (((b >> c) & 1) << tq), b] = 1
            psi = u @ psi
    assert same_ray(psi, dense_state(t2))


@given(st.integers(1, 3), st.integers(0, 10_000), st.sampled_from([1, -1]))
def test_measurement_matches_dense_projector(n, seed, forced):
    rng = random.Random(seed)
    t = random_stabilizer_state(n, rng)
    p = PauliOp.hermitian(rng.getrandbits(n), rng.getrandbits(n), n)
    if p.is_identity():
        return
    psi = dense_state(t)
    proj = (np.eye(2**n) + forced * dense_pauli(p)) / 2
    v = proj @ psi
    t2 = t.copy()
    if np.linalg.norm(v) < 1e-9:
        with pytest.raises(DeterministicOutcomeError):
            t2.measure(p, forced=forced)
        return
    out, t2 = measure_pauli(t2, p, forced=forced)
    assert out == forced
    assert same_ray(v / np.linalg.norm(v), dense_state(t2))


def test_random_outcomes_are_fair():
    rng = random.Random(99)
    trials = 10_000
    plus = sum(Tableau.zero_state(1).measure(S("X"), rng=rng) == 1 for _ in range(trials))
    # within 5 sigma of 1/2
    assert abs(plus - trials / 2) < 5 * np.sqrt(trials) / 2


def test_canonical_form_idempotent_and_matches_oracle():
    rng = random.Random(5)
    for _ in range(1000):
        n = rng.randint(1, 6)
        t = random_stabilizer_state(n, rng, depth=3 * n)
        cf = canonical_form(t)
        assert Tableau.from_generators(cf).canonical_form() == cf
        assert canonical_generators(t.stabilizers()) == cf


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_tableau_invariants(n, seed):
    t = random_stabilizer_state(n, random.Random(seed))
    stab, destab = t.stabilizers(), t.destabilizers()
    for i in range(n):
        for j in range(n):
            assert stab[i].commutes(stab[j])
            assert destab[i].commutes(stab[j]) == (i != j)


def test_tensor_and_reduce():
    a = Tableau.from_generators([S("XX"), S("ZZ")])
    b = Tableau.plus_state(1)
    t = a.tensor(b)
    assert t.canonical_strings() == ["+X1X2", "+Z1Z2", "+X3"]
    assert t.reduce_to([2]).canonical_strings() == ["+X1"]
    assert t.reduce_to([1, 0]).same_state(a)
    with pytest.raises(StateError):
        t.reduce_to([0])


def test_pauli_gates_flip_signs():
    t = Tableau.zero_state(2).pauli_x(0)
    assert t.canonical_strings() == ["-Z1", "+Z2"]
    t = Tableau.plus_state(1).pauli_z(0)
    assert t.canonical_strings() == ["-X1"]
    t = Tableau.plus_state(1)
    t.apply_gate(P(0))
    assert t.canonical_strings() == ["+Y1"]
    t = Tableau.zero_state(2).apply_circuit([H(0), CNOT(0, 1)])
    assert t.expectation(S("XX")) == 1 and t.expectation(S("YY")) == -1
