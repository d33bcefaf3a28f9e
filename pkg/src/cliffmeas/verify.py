"""Run compiled schedules on concrete stabilizer states and compare with direct gates."""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .compiler import Schedule, compile_circuit, frame_correction, symbolic_check
from .gadget import gadget_measure
from .gf2 import BinMatrix, solve
from .pauli import PauliOp
from .symplectic import CliffordGate
from .tableau import Tableau, random_stabilizer_state


class VerifyError(RuntimeError):
    pass


@dataclass
class TrialReport:
    seed: int
    n: int
    rounds_executed: int
    outcomes: list[int]
    residual_correction: str
    verdict: str
    diagnostics: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "n": self.n,
                "rounds_executed": self.rounds_executed,
                "outcomes": self.outcomes,
                "residual_correction": self.residual_correction,
                "verdict": self.verdict,
                "diagnostics": self.diagnostics,
            },
            sort_keys=True,
        )


def aux_state(bases: Sequence[str]) -> Tableau:
    n = len(bases)
    return Tableau.from_generators([PauliOp.single(b, j, n) for j, b in enumerate(bases)])


def run_schedule(s: Schedule, input_state: Tableau, rng: random.Random | None = None) -> tuple[Tableau, list[int]]:
    """Execute every round on ``A (x) input``; returns the 2n-qubit state and all outcomes."""
    if input_state.n != s.n:
        raise VerifyError(f"schedule is for {s.n} qubits, input has {input_state.n}")
    state = aux_state(s.initial_aux).tensor(input_state)
    outcomes: list[int] = []
    for r in s.rounds:
        if not r.operators:
            continue
        if r.ancilla is not None:
            res, state = gadget_measure(state, r.operators, rng, mode=r.ancilla.mode, ancilla=r.ancilla.state())
            outcomes += res
        else:
            for p in r.operators:
                outcomes.append(state.measure(p, rng=rng))
    return state, outcomes


def permute(t: Tableau, perm: Sequence[int]) -> Tableau:
    """New qubit ``i`` is old qubit ``perm[i]``."""
    idx = np.asarray(perm)
    return Tableau(t.x[:, idx].copy(), t.z[:, idx].copy(), t.phase.copy())


def equivalent_up_to_pauli_perm(t1: Tableau, t2: Tableau, perm: Sequence[int] | None = None) -> PauliOp | None:
    """Pauli ``W`` with ``W (perm t1) W^dag == t2``, or None if no such Pauli exists."""
    if t1.n != t2.n:
        raise VerifyError("states have different qubit counts")
    n = t1.n
    p1 = permute(t1, perm) if perm is not None else t1
    gens = t2.canonical_form()
    if [g.unsigned() for g in p1.canonical_form()] != [g.unsigned() for g in gens]:
        return None
    # W anticommutes with the generators whose signs differ
    flips = [0 if p1.expectation(g) == 1 else 1 for g in gens]
    a = BinMatrix(
        tuple(sum((((g.z if b < n else g.x) >> (b % n)) & 1) << i for i, g in enumerate(gens)) for b in range(2 * n)),
        len(gens),
    )
    w = solve(a, BinMatrix((sum(v << i for i, v in enumerate(flips)),), len(gens))).rows[0]
    return PauliOp.hermitian(w & ((1 << n) - 1), w >> n, n)


def clifford_image(p: PauliOp, matrix: BinMatrix, signs: Sequence[int]) -> PauliOp:
    """Conjugate ``p = i^l X^a Z^b`` by the Clifford with rows ``matrix`` and sign bits ``signs``."""
    n = p.n
    out = PauliOp(0, 0, p.phase_exp, n)
    mask = (1 << n) - 1
    for i, r in enumerate(matrix.rows):
        q = i % n
        if ((p.x if i < n else p.z) >> q) & 1:
            out = out * PauliOp.hermitian(r & mask, r >> n, n, -1 if signs[i] else 1)
    return out


def apply_symplectic(t: Tableau, matrix: BinMatrix, signs: Sequence[int]) -> Tableau:
    return Tableau.from_generators([clifford_image(g, matrix, signs) for g in t.stabilizers()])


def check_schedule_on(s: Schedule, gates: Sequence[CliffordGate], input_state: Tableau, rng: random.Random, seed: int) -> TrialReport:
    n = s.n
    expected = input_state.copy().apply_circuit(gates)
    final, outcomes = run_schedule(s, input_state, rng)
    diag: list[str] = []
    try:
        w = frame_correction(s, outcomes)
    except Exception as exc:  # reported, not raised: a failing trial is data
        return TrialReport(seed, n, len(s.rounds), outcomes, "", "fail", [f"frame correction: {exc}"])
    final.apply_pauli(w)
    final.phase %= 4
    for p, b in enumerate(s.final_aux):
        op = PauliOp.single(b, s.final_perm[p], 2 * n)
        if final.expectation(op) != 1:
            diag.append(f"auxiliary slot {p + 1} is not +{b}")
    try:
        data = final.reduce_to(s.final_perm[n:])
    except Exception as exc:
        diag.append(f"data not separable from auxiliary register: {exc}")
    else:
        got, want = data.canonical_strings(), expected.canonical_strings()
        if got != want:
            diag.append(f"data state {got} != expected {want}")
    return TrialReport(seed, n, len(s.rounds), outcomes, str(w), "fail" if diag else "pass", diag)


def _trial_seed(seed: int, trial: int) -> int:
    return seed * 1_000_003 + trial


def _run_trial(args) -> TrialReport:
    s, gates, seed, trial = args
    ts = _trial_seed(seed, trial)
    rng = random.Random(ts)
    inp = random_stabilizer_state(s.n, rng)
    return check_schedule_on(s, gates, inp, rng, ts)


def end_to_end_check(
    gates: Sequence[CliffordGate],
    n: int,
    seed: int,
    trials: int,
    form: int = 9,
    workers: int = 1,
    schedule: Schedule | None = None,
) -> list[TrialReport]:
    """Compile once, then run ``trials`` random stabilizer inputs through the schedule."""
    s = schedule if schedule is not None else compile_circuit(gates, n, form)
    if not symbolic_check(s):
        raise VerifyError("symbolic GSF check failed")
    jobs = [(s, list(gates), seed, t) for t in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial, jobs))
    return [_run_trial(j) for j in jobs]
