"""Sign-tracking stabilizer simulation with destabilizer bookkeeping.

Rows are stored as ``i^l X^a Z^b`` (the same convention as :class:`PauliOp`).
Rows ``0..n-1`` are destabilizers and rows ``n..2n-1`` stabilizers.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

import numpy as np

from .gf2 import BinMatrix, rref
from .pauli import PauliError, PauliOp, canonical_generators, symplectic_form
from .symplectic import CliffordGate, commuting_rows, symplectic_partner


class StateError(ValueError):
    pass


class DeterministicOutcomeError(StateError):
    """A forced outcome contradicts a deterministic measurement."""


def _pack_bits(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def _unpack_bits(v: int, n: int) -> np.ndarray:
    nbytes = max((n + 7) // 8, 1)
    raw = np.frombuffer(v.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


class Tableau:
    def __init__(self, x: np.ndarray, z: np.ndarray, phase: np.ndarray):
        self.x = x
        self.z = z
        self.phase = phase

    @property
    def n(self) -> int:
        return self.x.shape[1]

    # construction -------------------------------------------------------
    @classmethod
    def zero_state(cls, n: int) -> "Tableau":
        eye = np.eye(n, dtype=np.uint8)
        zer = np.zeros((n, n), dtype=np.uint8)
        return cls(np.vstack([eye, zer]), np.vstack([zer, eye]), np.zeros(2 * n, dtype=np.int64))

    @classmethod
    def plus_state(cls, n: int) -> "Tableau":
        t = cls.zero_state(n)
        t.x, t.z = t.z, t.x
        return t

    @classmethod
    def from_generators(cls, gens: Sequence[PauliOp]) -> "Tableau":
        if not gens:
            raise StateError("need at least one generator")
        n = gens[0].n
        if len(gens) != n:
            raise StateError(f"need exactly {n} generators, got {len(gens)}")
        for g in gens:
            if g.n != n:
                raise StateError("generators act on different qubit counts")
            if not g.is_hermitian():
                raise StateError(f"generator {g} is not Hermitian")
        rows = [g.x | (g.z << n) for g in gens]
        if not commuting_rows(rows, n):
            raise StateError("generators do not commute")
        if len(rref(rows, 2 * n)[1]) < n:
            raise StateError("generators are not independent")
        destab = symplectic_partner(BinMatrix(tuple(rows), 2 * n)).rows
        mask = (1 << n) - 1
        x = np.zeros((2 * n, n), dtype=np.uint8)
        z = np.zeros((2 * n, n), dtype=np.uint8)
        phase = np.zeros(2 * n, dtype=np.int64)
        for i, d in enumerate(destab):
            x[i] = _unpack_bits(d & mask, n)
            z[i] = _unpack_bits(d >> n, n)
            phase[i] = (d & mask & (d >> n)).bit_count() % 4
        for i, g in enumerate(gens):
            x[n + i] = _unpack_bits(g.x, n)
            z[n + i] = _unpack_bits(g.z, n)
            phase[n + i] = g.phase_exp
        # independent + commuting + Hermitian; -I cannot be generated by
        # independent generators, so the state is valid.
        return cls(x, z, phase)

    def copy(self) -> "Tableau":
        return Tableau(self.x.copy(), self.z.copy(), self.phase.copy())

    def tensor(self, other: "Tableau") -> "Tableau":
        """State of ``self`` on the first qubits followed by ``other``."""
        n1, n2 = self.n, other.n
        n = n1 + n2

        def blockrows(t: "Tableau", lo: int, hi: int, left: bool):
            zx = np.zeros((hi - lo, n), dtype=np.uint8)
            zz = np.zeros((hi - lo, n), dtype=np.uint8)
            sl = slice(0, n1) if left else slice(n1, n)
            zx[:, sl] = t.x[lo:hi]
            zz[:, sl] = t.z[lo:hi]
            return zx, zz, t.phase[lo:hi]

        parts = [
            blockrows(self, 0, n1, True),
            blockrows(other, 0, n2, False),
            blockrows(self, n1, 2 * n1, True),
            blockrows(other, n2, 2 * n2, False),
        ]
        return Tableau(
            np.vstack([p[0] for p in parts]),
            np.vstack([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]),
        )

    # row access -----------------------------------------------------------
    def row(self, i: int) -> PauliOp:
        return PauliOp(_pack_bits(self.x[i]), _pack_bits(self.z[i]), int(self.phase[i]), self.n)

    def stabilizers(self) -> list[PauliOp]:
        return [self.row(self.n + i) for i in range(self.n)]

    def destabilizers(self) -> list[PauliOp]:
        return [self.row(i) for i in range(self.n)]

    # gates -----------------------------------------------------------------
    def h(self, j) -> "Tableau":
        self.phase += 2 * (self.x[:, j] & self.z[:, j]).reshape(len(self.phase), -1).sum(axis=1, dtype=np.int64)
        self.x[:, j], self.z[:, j] = self.z[:, j].copy(), self.x[:, j].copy()
        return self

    def s(self, j) -> "Tableau":
        self.phase += self.x[:, j].reshape(len(self.phase), -1).sum(axis=1, dtype=np.int64)
        self.z[:, j] ^= self.x[:, j]
        return self

    def cnot(self, c, t) -> "Tableau":
        """CNOT(s); ``c`` and ``t`` may be equal-length index arrays (transversal)."""
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]
        return self

    def pauli_x(self, j) -> "Tableau":
        self.phase += 2 * self.z[:, j].reshape(len(self.phase), -1).sum(axis=1, dtype=np.int64)
        return self

    def pauli_z(self, j) -> "Tableau":
        self.phase += 2 * self.x[:, j].reshape(len(self.phase), -1).sum(axis=1, dtype=np.int64)
        return self

    def apply_pauli(self, p: PauliOp) -> "Tableau":
        """Conjugate every row by the Pauli ``p`` (signs flip on anticommuting rows)."""
        if p.n != self.n:
            raise PauliError("size mismatch")
        px, pz = _unpack_bits(p.x, self.n), _unpack_bits(p.z, self.n)
        anti = ((self.x.astype(np.int64) @ pz) + (self.z.astype(np.int64) @ px)) & 1
        self.phase += 2 * anti.astype(np.int64)
        return self

    def apply_gate(self, g: CliffordGate) -> "Tableau":
        g.check_range(self.n)
        if g.kind == "H":
            self.h(g.qubits[0])
        elif g.kind == "P":
            self.s(g.qubits[0])
        elif g.kind == "CNOT":
            self.cnot(g.qubits[0], g.qubits[1])
        elif g.kind == "X":
            self.pauli_x(g.qubits[0])
        elif g.kind == "Z":
            self.pauli_z(g.qubits[0])
        self.phase %= 4
        return self

    def apply_circuit(self, gates: Iterable[CliffordGate]) -> "Tableau":
        for g in gates:
            self.apply_gate(g)
        return self

    # measurement -----------------------------------------------------------
    def _rowmult(self, targets: np.ndarray, src: int) -> None:
        """rows[targets] <- rows[targets] * rows[src]."""
        if targets.size == 0:
            return
        overlap = (self.z[targets] & self.x[src]).sum(axis=1, dtype=np.int64)
        self.phase[targets] = (self.phase[targets] + self.phase[src] + 2 * overlap) % 4
        self.x[targets] ^= self.x[src]
        self.z[targets] ^= self.z[src]

    def measure(self, p: PauliOp, forced: int | None = None, rng: random.Random | None = None) -> int:
        """Projectively measure the Hermitian Pauli ``p`` in place; returns +1 or -1."""
        if p.n != self.n:
            raise PauliError("size mismatch")
        if not p.is_hermitian():
            raise PauliError(f"cannot measure non-Hermitian {p}")
        n = self.n
        px, pz = _unpack_bits(p.x, n), _unpack_bits(p.z, n)
        anti = (((self.x.astype(np.int64) @ pz) + (self.z.astype(np.int64) @ px)) & 1).astype(bool)
        stab_anti = np.flatnonzero(anti[n:])
        if stab_anti.size:
            piv = n + int(stab_anti[0])
            others = np.flatnonzero(anti)
            others = others[others != piv]
            self._rowmult(others, piv)
            if forced is None:
                outcome = 1 if (rng or random).random() < 0.5 else -1
            else:
                outcome = forced
            self.x[piv - n] = self.x[piv]
            self.z[piv - n] = self.z[piv]
            self.phase[piv - n] = self.phase[piv]
            self.x[piv] = px
            self.z[piv] = pz
            self.phase[piv] = (p.phase_exp + (0 if outcome == 1 else 2)) % 4
            return outcome
        # deterministic: p = +- product of stabilizers flagged by destabilizers
        acc_x = np.zeros(n, dtype=np.uint8)
        acc_z = np.zeros(n, dtype=np.uint8)
        acc_l = 0
        for i in np.flatnonzero(anti[:n]):
            r = n + int(i)
            acc_l += int(self.phase[r]) + 2 * int((acc_z & self.x[r]).sum())
            acc_x ^= self.x[r]
            acc_z ^= self.z[r]
        if not (np.array_equal(acc_x, px) and np.array_equal(acc_z, pz)):
            raise StateError("tableau is inconsistent")
        outcome = 1 if (acc_l - p.phase_exp) % 4 == 0 else -1
        if forced is not None and forced != outcome:
            raise DeterministicOutcomeError(f"measurement of {p} is deterministic with outcome {outcome:+d}")
        return outcome

    def is_deterministic(self, p: PauliOp) -> bool:
        px, pz = _unpack_bits(p.x, self.n), _unpack_bits(p.z, self.n)
        anti = ((self.x[self.n:].astype(np.int64) @ pz) + (self.z[self.n:].astype(np.int64) @ px)) & 1
        return not anti.any()

    def expectation(self, p: PauliOp) -> int:
        """+1/-1 if ``p`` is (up to sign) a stabilizer, else 0."""
        if not self.is_deterministic(p):
            return 0
        return self.copy().measure(p)

    # canonical form ------------------------------------------------------
    def _eliminate(self, order: Sequence[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Signed row reduction of the stabilizer rows over columns in ``order``.

        Column ``c < n`` is the X part of qubit ``c``; ``c >= n`` the Z part of
        qubit ``c - n``. Returns the reduced (x, z, phase) arrays, pivot rows first.
        """
        n = self.n
        work = Tableau(self.x[n:].copy(), self.z[n:].copy(), self.phase[n:].copy())
        top = 0
        for c in order:
            col = work.x[:, c] if c < n else work.z[:, c - n]
            cand = np.flatnonzero(col[top:])
            if cand.size == 0:
                continue
            piv = top + int(cand[0])
            if piv != top:
                for arr in (work.x, work.z, work.phase):
                    arr[[top, piv]] = arr[[piv, top]]
            col = work.x[:, c] if c < n else work.z[:, c - n]
            targets = np.flatnonzero(col)
            work._rowmult(targets[targets != top], top)
            top += 1
            if top == n:
                break
        return work.x, work.z, work.phase % 4

    def canonical_form(self) -> list[PauliOp]:
        return canonical_generators(self.stabilizers())

    def canonical_strings(self) -> list[str]:
        return [str(g) for g in self.canonical_form()]

    def same_state(self, other: "Tableau") -> bool:
        return self.canonical_form() == other.canonical_form()

    def reduce_to(self, keep: Sequence[int]) -> "Tableau":
        """Tableau on ``keep`` when the other qubits are in a product state with them."""
        n = self.n
        keep = list(keep)
        kept = set(keep)
        drop = [q for q in range(n) if q not in kept]
        order = [c for q in drop for c in (q, n + q)] + [c for q in keep for c in (q, n + q)]
        x, z, ph = self._eliminate(order)
        local = ~(x[:, drop].any(axis=1) | z[:, drop].any(axis=1))
        if int(local.sum()) != len(keep):
            raise StateError("kept qubits are entangled with the discarded ones")
        gens = [
            PauliOp(_pack_bits(x[i, keep]), _pack_bits(z[i, keep]), int(ph[i]), len(keep))
            for i in np.flatnonzero(local)
        ]
        return Tableau.from_generators(gens)


def _signed_rref(gens: Sequence[PauliOp], order: Sequence[int]) -> list[PauliOp]:
    n = gens[0].n
    work = list(gens)
    top = 0
    for col in order:
        def has(g: PauliOp) -> int:
            return ((g.x | (g.z << n)) >> col) & 1

        piv = next((i for i in range(top, len(work)) if has(work[i])), None)
        if piv is None:
            continue
        work[top], work[piv] = work[piv], work[top]
        for i in range(len(work)):
            if i != top and has(work[i]):
                work[i] = work[i] * work[top]
        top += 1
        if top == len(work):
            break
    return work[:top]


def canonical_generators(gens: Sequence[PauliOp]) -> list[PauliOp]:
    """Reduced row echelon signed generators in qubit-major column order."""
    if not gens:
        return []
    n = gens[0].n
    order = []
    for q in range(n):
        order += [q, n + q]
    return _signed_rref(gens, order)


def init_state(kind: str | Sequence[PauliOp], n: int | None = None) -> Tableau:
    if kind == "all_zero":
        return Tableau.zero_state(n)
    if kind == "all_plus":
        return Tableau.plus_state(n)
    if isinstance(kind, str):
        raise StateError(f"unknown initial state {kind!r}")
    gens = list(kind)
    if n is not None and gens and gens[0].n != n:
        raise StateError("generator size does not match n")
    return Tableau.from_generators(gens)


def apply_clifford_gate(t: Tableau, g: CliffordGate) -> Tableau:
    return t.apply_gate(g)


def measure_pauli(t: Tableau, p: PauliOp, forced: int | None = None, rng: random.Random | None = None):
    outcome = t.measure(p, forced=forced, rng=rng)
    return outcome, t


def canonical_form(t: Tableau) -> list[PauliOp]:
    return t.canonical_form()


def random_stabilizer_state(n: int, rng: random.Random, depth: int | None = None) -> Tableau:
    from .symplectic import random_clifford_circuit

    t = Tableau.zero_state(n)
    t.apply_circuit(random_clifford_circuit(n, depth if depth is not None else 4 * n * n + 4, rng))
    for q in range(n):
        if rng.random() < 0.5:
            t.pauli_x(q)
        if rng.random() < 0.5:
            t.pauli_z(q)
    t.phase %= 4
    return t


def pauli_from_rows(x: int, z: int, n: int) -> PauliOp:
    return PauliOp.hermitian(x, z, n)


__all__ = [
    "Tableau",
    "StateError",
    "DeterministicOutcomeError",
    "init_state",
    "apply_clifford_gate",
    "measure_pauli",
    "canonical_form",
    "canonical_generators",
    "random_stabilizer_state",
    "symplectic_form",
]
