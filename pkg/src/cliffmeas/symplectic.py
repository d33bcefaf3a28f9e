"""Clifford circuits as binary symplectic matrices.

Row ``j`` of a ``2N x 2N`` matrix is the image of ``X_j`` (``j < N``) or
``Z_{j-N}`` (``j >= N``). Appending a gate to the end of a circuit acts on the
columns of the current matrix, so a circuit's matrix is the product of its
gate matrices in time order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf2 import BinMatrix, SingularMatrixError, mat_mul, rref
from .pauli import symplectic_form

GATE_KINDS = ("H", "P", "CNOT", "X", "Z")


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class CliffordGate:
    """A gate with 0-based qubit indices; ``str()`` prints the 1-based form."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise GateError(f"unknown gate {self.kind!r}")
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != arity:
            raise GateError(f"{self.kind} takes {arity} qubit(s)")
        if any(q < 0 for q in self.qubits):
            raise GateError("negative qubit index")
        if self.kind == "CNOT" and self.qubits[0] == self.qubits[1]:
            raise GateError("CNOT control and target must differ")

    def __str__(self) -> str:
        return " ".join([self.kind, *(str(q + 1) for q in self.qubits)])

    def check_range(self, n: int) -> None:
        if any(q >= n for q in self.qubits):
            raise GateError(f"gate {self} addresses a qubit beyond {n}")


def H(j: int) -> CliffordGate:
    return CliffordGate("H", (j,))


def P(j: int) -> CliffordGate:
    return CliffordGate("P", (j,))


def CNOT(c: int, t: int) -> CliffordGate:
    return CliffordGate("CNOT", (c, t))


def J_matrix(n: int) -> BinMatrix:
    return BinMatrix(tuple(1 << (n + i) for i in range(n)) + tuple(1 << i for i in range(n)), 2 * n)


@dataclass(frozen=True)
class SymplecticMatrix:
    m: BinMatrix
    n_qubits: int

    def __post_init__(self):
        if self.m.shape != (2 * self.n_qubits, 2 * self.n_qubits):
            raise ValueError("symplectic matrix must be 2N x 2N")

    @classmethod
    def checked(cls, m: BinMatrix) -> "SymplecticMatrix":
        if not is_symplectic(m):
            raise ValueError("matrix is not symplectic")
        return cls(m, m.nrows // 2)

    @classmethod
    def identity(cls, n: int) -> "SymplecticMatrix":
        return cls(BinMatrix.identity(2 * n), n)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(mat_mul(self.m, other.m), self.n_qubits)

    def blocks(self) -> tuple[BinMatrix, BinMatrix, BinMatrix, BinMatrix]:
        n = self.n_qubits
        m = self.m
        return (
            m.submatrix(0, n, 0, n),
            m.submatrix(0, n, n, 2 * n),
            m.submatrix(n, 2 * n, 0, n),
            m.submatrix(n, 2 * n, n, 2 * n),
        )

    def inverse(self) -> "SymplecticMatrix":
        # M^{-1} = J M^t J
        j = J_matrix(self.n_qubits)
        return SymplecticMatrix(j @ self.m.T @ j, self.n_qubits)


def _swap_cols(rows: Iterable[int], a: int, b: int) -> tuple[int, ...]:
    out = []
    for r in rows:
        ba, bb = (r >> a) & 1, (r >> b) & 1
        if ba != bb:
            r ^= (1 << a) | (1 << b)
        out.append(r)
    return tuple(out)


def _add_col(rows: Iterable[int], src: int, dst: int) -> tuple[int, ...]:
    return tuple(r ^ (((r >> src) & 1) << dst) for r in rows)


def apply_gate_columns(m: SymplecticMatrix, g: CliffordGate) -> SymplecticMatrix:
    n = m.n_qubits
    g.check_range(n)
    rows = m.m.rows
    if g.kind == "H":
        j = g.qubits[0]
        rows = _swap_cols(rows, j, n + j)
    elif g.kind == "P":
        j = g.qubits[0]
        rows = _add_col(rows, j, n + j)
    elif g.kind == "CNOT":
        j, l = g.qubits
        rows = _add_col(_add_col(rows, j, l), n + l, n + j)
    return SymplecticMatrix(BinMatrix(rows, 2 * n), n)


def circuit_to_symplectic(circuit: Sequence[CliffordGate], n: int) -> SymplecticMatrix:
    m = SymplecticMatrix.identity(n)
    for g in circuit:
        m = apply_gate_columns(m, g)
    return m


def gate_matrix(g: CliffordGate, n: int) -> SymplecticMatrix:
    return apply_gate_columns(SymplecticMatrix.identity(n), g)


def is_symplectic(m: BinMatrix) -> bool:
    if m.nrows != m.ncols:
        raise ValueError("matrix must be square")
    if m.nrows % 2:
        raise ValueError("symplectic matrices have even dimension")
    n = m.nrows // 2
    mask = (1 << n) - 1
    rows = [(r & mask, r >> n) for r in m.rows]
    for i, (xi, zi) in enumerate(rows):
        for k in range(i, len(rows)):
            xk, zk = rows[k]
            want = 1 if abs(i - k) == n else 0
            if symplectic_form(xi, zi, xk, zk) != want:
                return False
    return True


def commuting_rows(rows: Sequence[int], n: int) -> bool:
    mask = (1 << n) - 1
    for i in range(len(rows)):
        for k in range(i + 1, len(rows)):
            if symplectic_form(rows[i] & mask, rows[i] >> n, rows[k] & mask, rows[k] >> n):
                return False
    return True


def symplectic_partner(ab: BinMatrix) -> BinMatrix:
    """Return commuting rows ``EF`` with ``AB J EF^t = I``.

    Each partner row is the zero-free-variable solution of the linear system,
    then later rows are corrected by earlier stabilizer rows until the
    partner set commutes.
    """
    n2 = ab.ncols
    if n2 % 2:
        raise ValueError("row width must be even")
    n = n2 // 2
    s = ab.nrows
    if not commuting_rows(ab.rows, n):
        raise ValueError("input rows do not commute")
    mask = (1 << n) - 1
    # <row, v> = row J v^t; J swaps the halves, so solve (AB J) v = e_i
    abj = [((r & mask) << n) | (r >> n) for r in ab.rows]
    if len(rref(abj, n2)[1]) < s:
        raise SingularMatrixError("rows are linearly dependent; no symplectic partner exists")
    partners = _solve_partner(abj, n2, s)
    for i in range(s):
        xi, zi = partners[i] & mask, partners[i] >> n
        for k in range(i + 1, s):
            xk, zk = partners[k] & mask, partners[k] >> n
            if symplectic_form(xi, zi, xk, zk):
                partners[k] ^= ab.rows[i]
    return BinMatrix(tuple(partners), n2)


def _solve_partner(abj: Sequence[int], width: int, s: int) -> list[int]:
    """Solve ``abj[k] . v_i = delta_ik`` for each i (dot product over GF(2))."""
    aug = [r | (1 << (width + i)) for i, r in enumerate(abj)]
    red, piv = rref(aug, width, col_order=range(width))
    mask = (1 << width) - 1
    # red[t] = combo_t . abj and red[t] is zero on the other pivots, so
    # setting v[pivot_t] = combo_t[i] gives abj v = e_i.
    out = []
    for i in range(s):
        v = 0
        for r, c in zip(red, piv):
            if ((r >> width) >> i) & 1:
                v |= 1 << c
        out.append(v & mask)
    return out


def random_clifford_circuit(n: int, length: int, rng: random.Random) -> list[CliffordGate]:
    gates: list[CliffordGate] = []
    for _ in range(length):
        r = rng.random()
        if n >= 2 and r < 0.4:
            c, t = rng.sample(range(n), 2)
            gates.append(CNOT(c, t))
        elif r < 0.7:
            gates.append(H(rng.randrange(n)))
        else:
            gates.append(P(rng.randrange(n)))
    return gates


def random_symplectic(n: int, seed: int) -> SymplecticMatrix:
    """A seeded (not uniformly distributed) element of Sp(2n, Z2)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    circuit = random_clifford_circuit(n, max(5 * n * n, 5), rng)
    return circuit_to_symplectic(circuit, n)
