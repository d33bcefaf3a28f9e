"""Simultaneous measurement of commuting Paulis through a two-block ancilla.

For operators ``p_j = i^l X^(e_j) Z^(f_j)`` the ancilla starts as
``|0>^N (x) |+>^N`` and is projected onto the +1 eigenspace of
``i^l X^(e_j) Z^(g_j) (x) Z^(f_j)``. The block-1 factor ``Z^(g_j)`` only adds
phases on the ``|e_c>`` branches; choosing ``g_j . e_k = e_j . f_k`` makes each
branch carry exactly the phase of the matching product of the ``p_j``, and
makes the projectors Hermitian and commuting. For a single operator
``g = e & f``. Data qubits then receive ``Z^f`` from CNOTs onto block 2 and
``X^e`` from CNOTs out of block 1; block 1 is read in X and block 2 in Z.
"""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from .gf2 import BinMatrix, solve
from .pauli import PauliError, PauliOp, symplectic_form, symplectic_product
from .tableau import Tableau

MODES = ("two_block", "x_only", "z_only")


class GadgetError(ValueError):
    pass


def check_commuting_set(ops: Sequence[PauliOp]) -> int:
    """Validate a measurement set and return its qubit count."""
    if not ops:
        raise GadgetError("empty measurement set")
    n = ops[0].n
    for p in ops:
        if p.n != n:
            raise GadgetError("operators act on different qubit counts")
        if not p.is_hermitian():
            raise PauliError(f"operator {p} is not Hermitian")
    for i in range(len(ops)):
        for k in range(i + 1, len(ops)):
            if symplectic_product(ops[i], ops[k]):
                raise GadgetError(f"operators {ops[i]} and {ops[k]} do not commute")
    return n


def auto_mode(ops: Sequence[PauliOp]) -> str:
    if all(p.z == 0 for p in ops):
        return "x_only"
    if all(p.x == 0 for p in ops):
        return "z_only"
    return "two_block"


def ancilla_projectors(ops: Sequence[PauliOp], mode: str) -> list[PauliOp]:
    """Hermitian operators whose +1 projection of the base state gives the ancilla."""
    n = ops[0].n
    out = []
    if mode == "two_block":
        # columns of E as rows so that h @ et == c means h . e_k = c_k
        et = BinMatrix(tuple(sum(((p.x >> q) & 1) << k for k, p in enumerate(ops)) for q in range(n)), len(ops))
    for j, p in enumerate(ops):
        sign_l = (p.phase_exp - (p.x & p.z).bit_count()) % 4  # 0 or 2
        if mode == "two_block":
            g = p.x & p.z
            want = sum(((symplectic_form(p.x, 0, 0, q.z) ^ symplectic_form(g, 0, 0, q.x)) & 1) << k for k, q in enumerate(ops))
            if want:
                g ^= solve(et, BinMatrix((want,), len(ops))).rows[0]
            out.append(PauliOp(p.x, g | (p.z << n), p.phase_exp, 2 * n))
        elif mode == "x_only":
            if p.z:
                raise GadgetError(f"{p} has a Z part; x_only mode cannot measure it")
            out.append(PauliOp(p.x, 0, sign_l, n))
        elif mode == "z_only":
            if p.x:
                raise GadgetError(f"{p} has an X part; z_only mode cannot measure it")
            out.append(PauliOp(0, p.z, sign_l, n))
        else:
            raise GadgetError(f"unknown mode {mode!r}")
    return out


def base_state(n: int, mode: str) -> Tableau:
    if mode == "two_block":
        return Tableau.zero_state(n).tensor(Tableau.plus_state(n))
    if mode == "x_only":
        return Tableau.zero_state(n)
    return Tableau.plus_state(n)


def prepare_ancilla(ops: Sequence[PauliOp], mode: str | None = None) -> Tableau:
    check_commuting_set(ops)
    mode = mode or auto_mode(ops)
    n = ops[0].n
    t = base_state(n, mode)
    for proj in ancilla_projectors(ops, mode):
        t.measure(proj, forced=1)
    return t


def gadget_measure(
    t: Tableau,
    ops: Sequence[PauliOp],
    rng: random.Random | None = None,
    mode: str | None = None,
    ancilla: Tableau | None = None,
) -> tuple[list[int], Tableau]:
    """Measure ``ops`` on ``t`` via the ancilla circuit; returns outcomes and the data state.

    ``t`` is left untouched; the returned tableau covers the data qubits only.
    """
    n = check_commuting_set(ops)
    if t.n != n:
        raise GadgetError(f"state has {t.n} qubits, operators act on {n}")
    mode = mode or auto_mode(ops)
    anc = ancilla.copy() if ancilla is not None else prepare_ancilla(ops, mode)
    full = t.tensor(anc)
    data = np.arange(n)
    if mode == "two_block":
        b1, b2 = data + n, data + 2 * n
    elif mode == "x_only":
        b1, b2 = data + n, None
    else:
        b1, b2 = None, data + n
    # Z^f first (data controls onto block 2), then X^e (block 1 controls onto data)
    if b2 is not None:
        full.cnot(data, b2)
    if b1 is not None:
        full.cnot(b1, data)
    total = full.n
    vx = np.zeros(n, dtype=np.int64)
    vz = np.zeros(n, dtype=np.int64)
    if b1 is not None:
        for j in range(n):
            r = full.measure(PauliOp(1 << int(b1[j]), 0, 0, total), rng=rng)
            vx[j] = 0 if r == 1 else 1
    if b2 is not None:
        for j in range(n):
            r = full.measure(PauliOp(0, 1 << int(b2[j]), 0, total), rng=rng)
            vz[j] = 0 if r == 1 else 1
    outcomes = []
    for p in ops:
        parity = sum(int(vx[j]) for j in range(n) if (p.x >> j) & 1)
        parity += sum(int(vz[j]) for j in range(n) if (p.z >> j) & 1)
        outcomes.append(-1 if parity % 2 else 1)
    return outcomes, full.reduce_to(range(n))


def sequential_measure(
    t: Tableau, ops: Sequence[PauliOp], outcomes: Sequence[int] | None = None, rng: random.Random | None = None
) -> tuple[list[int], Tableau]:
    """Measure ``ops`` one at a time with ordinary projective measurements."""
    out = t.copy()
    res = []
    for i, p in enumerate(ops):
        res.append(out.measure(p, forced=None if outcomes is None else outcomes[i], rng=rng))
    return res, out
