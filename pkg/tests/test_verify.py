import random

from hypothesis import given, strategies as st

from cliffmeas.compiler import compile_circuit, frame_correction, symbolic_check
from cliffmeas.pauli import PauliOp
from cliffmeas.symplectic import CNOT, H, P, CliffordGate, random_clifford_circuit
from cliffmeas.tableau import Tableau, random_stabilizer_state
from cliffmeas.verify import (
    apply_symplectic,
    end_to_end_check,
    equivalent_up_to_pauli_perm,
    permute,
    run_schedule,
)
from cliffmeas.symplectic import circuit_to_symplectic


def corrected_data(s, inp, seed):
    final, outcomes = run_schedule(s, inp, random.Random(seed))
    final.apply_pauli(frame_correction(s, outcomes))
    return final.reduce_to(s.final_perm[s.n :])


def test_identity_schedule_keeps_zero_state():
    s = compile_circuit([], 3)
    data = corrected_data(s, Tableau.zero_state(3), 0)
    assert data.canonical_strings() == ["+Z1", "+Z2", "+Z3"]


def test_phase_schedule_on_plus_gives_y():
    s = compile_circuit([P(0)], 1)
    for seed in range(10):
        assert corrected_data(s, Tableau.plus_state(1), seed).canonical_strings() == ["+Y1"]


def test_outcome_count_matches_schedule():
    s = compile_circuit([H(0), CNOT(0, 1)], 2)
    _, outcomes = run_schedule(s, Tableau.zero_state(2), random.Random(1))
    assert len(outcomes) == s.n_outcomes()


def test_equivalence_trivial_cases():
    t = random_stabilizer_state(3, random.Random(0))
    assert equivalent_up_to_pauli_perm(t, t.copy()).is_identity()
    t2 = t.copy().apply_pauli(PauliOp.from_string("X1", 3))
    w = equivalent_up_to_pauli_perm(t, t2)
    assert t.copy().apply_pauli(w).same_state(t2)


@given(st.integers(1, 5), st.integers(0, 100_000))
def test_equivalence_found_iff_pauli_related(n, seed):
    rng = random.Random(seed)
    t1 = random_stabilizer_state(n, rng)
    perm = list(range(n))
    rng.shuffle(perm)
    if rng.random() < 0.5:
        pauli = PauliOp.hermitian(rng.getrandbits(n), rng.getrandbits(n), n)
        t2 = permute(t1, perm).apply_pauli(pauli)
        related = True
    else:
        t2 = random_stabilizer_state(n, rng)
        related = [g.unsigned() for g in permute(t1, perm).canonical_form()] == [
            g.unsigned() for g in t2.canonical_form()
        ]
    w = equivalent_up_to_pauli_perm(t1, t2, perm)
    assert (w is not None) == related
    if w is not None:
        assert permute(t1, perm).apply_pauli(w).same_state(t2)


def test_apply_symplectic_matches_gates():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 5)
        gates = random_clifford_circuit(n, 20, rng) + [CliffordGate("X", (0,)), CliffordGate("Z", (n - 1,))]
        inp = random_stabilizer_state(n, rng)
        s = compile_circuit(gates, n, check=False)
        got = apply_symplectic(inp, circuit_to_symplectic(gates, n).m, s.signs)
        assert got.same_state(inp.copy().apply_circuit(gates))


def test_empty_circuit_passes():
    assert all(r.passed for r in end_to_end_check([], 2, seed=0, trials=3))


def test_two_cnot_circuit_both_orders():
    for gates in ([CNOT(0, 1), CNOT(1, 2)], [CNOT(1, 2), CNOT(0, 1)]):
        reports = end_to_end_check(gates, 3, seed=5, trials=4)
        assert all(r.passed for r in reports), [r.diagnostics for r in reports]


def test_reports_are_deterministic():
    gates = random_clifford_circuit(4, 30, random.Random(8))
    a = [r.to_json() for r in end_to_end_check(gates, 4, seed=11, trials=3)]
    b = [r.to_json() for r in end_to_end_check(gates, 4, seed=11, trials=3)]
    assert a == b
    c = [r.to_json() for r in end_to_end_check(gates, 4, seed=11, trials=3, workers=2)]
    assert a == c


def test_residual_reproducible_from_outcomes():
    gates = random_clifford_circuit(3, 25, random.Random(2))
    s = compile_circuit(gates, 3)
    for r in end_to_end_check(gates, 3, seed=1, trials=3, schedule=s):
        assert r.passed
        assert str(frame_correction(s, r.outcomes)) == r.residual_correction


def test_symbolic_and_concrete_agree():
    rng = random.Random(21)
    for _ in range(15):
        n = rng.randint(1, 6)
        gates = random_clifford_circuit(n, rng.randint(0, 40), rng)
        gates.append(CliffordGate(rng.choice("XZ"), (rng.randrange(n),)))
        s = compile_circuit(gates, n)
        sym = symbolic_check(s)
        conc = all(r.passed for r in end_to_end_check(gates, n, seed=rng.getrandbits(16), trials=2, schedule=s))
        assert sym and conc


def test_tampered_schedule_fails_concretely():
    gates = [H(0), CNOT(0, 1)]
    s = compile_circuit(gates, 2)
    s.signs = [1 - b for b in s.signs]
    reports = end_to_end_check(gates, 2, seed=0, trials=3, schedule=s)
    assert not any(r.passed for r in reports)


def test_eleven_stage_end_to_end():
    rng = random.Random(31)
    for _ in range(5):
        n = rng.randint(1, 5)
        gates = random_clifford_circuit(n, 30, rng)
        assert all(r.passed for r in end_to_end_check(gates, n, seed=2, trials=2, form=11))
