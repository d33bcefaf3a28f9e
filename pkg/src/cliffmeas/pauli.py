"""Pauli operators ``i^l X^a Z^b`` in binary form.

The X-part ``a`` and Z-part ``b`` are packed ints (bit ``j`` = qubit ``j``).
Because every operator is stored with all X factors to the left of all Z
factors, multiplication only needs the overlap of the left Z-part with the
right X-part to fix the phase.
"""

from __future__ import annotations

import re
from typing import Sequence
from dataclasses import dataclass

from .gf2 import BitVector, row_to_str, str_to_row


class PauliError(ValueError):
    pass


def symplectic_form(x1: int, z1: int, x2: int, z2: int) -> int:
    """``(a|b) J (e|f)^t`` for packed rows."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) & 1


def hermitian_phase(x: BitVector | int, z: BitVector | int) -> int:
    """Phase exponent making ``i^l X^x Z^z`` Hermitian with eigenvalues +-1."""
    if isinstance(x, BitVector) and isinstance(z, BitVector):
        if len(x) != len(z):
            raise PauliError("length mismatch")
        x, z = x.bits, z.bits
    return (x & z).bit_count() % 4


@dataclass(frozen=True)
class PauliOp:
    x: int
    z: int
    phase_exp: int
    n: int

    def __post_init__(self):
        if (self.x | self.z) >> self.n:
            raise PauliError("support exceeds qubit count")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(0, 0, 0, n)

    @classmethod
    def hermitian(cls, x: int, z: int, n: int, sign: int = 1) -> "PauliOp":
        """``sign * i^tau X^x Z^z``, the Hermitian operator on this support."""
        return cls(x, z, hermitian_phase(x, z) + (0 if sign > 0 else 2), n)

    @classmethod
    def single(cls, kind: str, qubit: int, n: int) -> "PauliOp":
        bit = 1 << qubit
        return cls.hermitian(bit if kind in "XY" else 0, bit if kind in "ZY" else 0, n)

    @classmethod
    def from_string(cls, text: str, n: int | None = None) -> "PauliOp":
        """Parse ``"+iX1Y2"``-style strings (1-based qubits, sparse).

        Dense strings like ``"-XIZ"`` are also accepted.
        """
        m = re.fullmatch(r"\s*([+-]?)(i?)(.*?)\s*", text)
        sign, imag, body = m.group(1), m.group(2), m.group(3)
        x = z = 0
        if re.fullmatch(r"[IXYZ]*", body) and (body == "" or not re.search(r"\d", body)):
            terms = [(c, j) for j, c in enumerate(body)]
            width = len(body)
        else:
            terms = []
            for c, num in re.findall(r"([XYZ])(\d+)", body):
                terms.append((c, int(num) - 1))
            if re.sub(r"[XYZ]\d+", "", body):
                raise PauliError(f"bad Pauli string {text!r}")
            width = max((j + 1 for _, j in terms), default=0)
        if n is None:
            n = max(width, 1)
        for c, j in terms:
            if j >= n:
                raise PauliError(f"qubit {j + 1} out of range")
            if c in "XY":
                x ^= 1 << j
            if c in "ZY":
                z ^= 1 << j
        # the string names the product of single-qubit Y = iXZ factors
        l = (x & z).bit_count() + (2 if sign == "-" else 0) + (1 if imag else 0)
        return cls(x, z, l, n)

    @classmethod
    def from_json(cls, obj: dict) -> "PauliOp":
        n = len(obj["x"])
        if len(obj["z"]) != n:
            raise PauliError("x and z strings differ in length")
        return cls(str_to_row(obj["x"]), str_to_row(obj["z"]), int(obj["phase_exp"]), n)

    # queries -------------------------------------------------------------
    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_hermitian(self) -> bool:
        return (self.phase_exp - (self.x & self.z).bit_count()) % 2 == 0

    def sign(self) -> int:
        """+1/-1 for Hermitian operators relative to ``i^tau X^a Z^b``."""
        if not self.is_hermitian():
            raise PauliError("sign is only defined for Hermitian operators")
        return 1 if (self.phase_exp - (self.x & self.z).bit_count()) % 4 == 0 else -1

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes(self, other: "PauliOp") -> bool:
        return symplectic_product(self, other) == 0

    def unsigned(self) -> tuple[int, int]:
        return (self.x, self.z)

    # algebra ------------------------------------------------------------
    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def negate(self) -> "PauliOp":
        return PauliOp(self.x, self.z, self.phase_exp + 2, self.n)

    def embed(self, positions, n: int) -> "PauliOp":
        """Place qubit ``j`` of this operator on qubit ``positions[j]`` of an n-qubit register."""
        x = z = 0
        for j, p in enumerate(positions):
            if (self.x >> j) & 1:
                x |= 1 << p
            if (self.z >> j) & 1:
                z |= 1 << p
        return PauliOp(x, z, self.phase_exp, n)

    # display ---------------------------------------------------------------
    def __str__(self) -> str:
        # re-express phase relative to Y factors
        l = (self.phase_exp - (self.x & self.z).bit_count()) % 4
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[l]
        parts = []
        for j in range(self.n):
            xb, zb = (self.x >> j) & 1, (self.z >> j) & 1
            if xb or zb:
                parts.append(("Y" if xb and zb else "X" if xb else "Z") + str(j + 1))
        return prefix + ("".join(parts) if parts else "I")

    def dense(self) -> str:
        l = (self.phase_exp - (self.x & self.z).bit_count()) % 4
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[l]
        return prefix + "".join(
            "IXZY"[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)] for j in range(self.n)
        )

    def to_json(self) -> dict:
        return {"x": row_to_str(self.x, self.n), "z": row_to_str(self.z, self.n), "phase_exp": self.phase_exp}


def _check(p: PauliOp, q: PauliOp) -> None:
    if p.n != q.n:
        raise PauliError(f"length mismatch: {p.n} vs {q.n}")


def symplectic_product(p: PauliOp, q: PauliOp) -> int:
    _check(p, q)
    return symplectic_form(p.x, p.z, q.x, q.z)


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    _check(p, q)
    # Z^b1 X^a2 = (-1)^{b1.a2} X^a2 Z^b1
    l = p.phase_exp + q.phase_exp + 2 * (p.z & q.x).bit_count()
    return PauliOp(p.x ^ q.x, p.z ^ q.z, l, p.n)


def canonical_generators(gens: Sequence[PauliOp]) -> list[PauliOp]:
    """Signed reduced echelon form of a stabilizer generating set.

    Columns are visited as X then Z of qubit 0, then of qubit 1, and so on.
    Two generating sets of the same group give identical output.
    """
    if not gens:
        return []
    n = gens[0].n
    rows = [(g.x, g.z, g.phase_exp) for g in gens]
    top = 0
    for q in range(n):
        bit = 1 << q
        for part in (0, 1):
            piv = next((i for i in range(top, len(rows)) if rows[i][part] & bit), None)
            if piv is None:
                continue
            rows[top], rows[piv] = rows[piv], rows[top]
            sx, sz, sl = rows[top]
            for i, (x, z, l) in enumerate(rows):
                if i != top and (x, z)[part] & bit:
                    rows[i] = (x ^ sx, z ^ sz, (l + sl + 2 * (z & sx).bit_count()) % 4)
            top += 1
    return [PauliOp(x, z, l, n) for x, z, l in rows]


def project_forced(gens: Sequence[PauliOp], p: PauliOp) -> list[PauliOp] | None:
    """Stabilizers after a +1 projection onto ``p``.

    Returns None when ``p`` commutes with every generator; the outcome is then
    deterministic and needs the full group to decide.
    """
    anti = [i for i, g in enumerate(gens) if symplectic_form(g.x, g.z, p.x, p.z)]
    if not anti:
        return None
    piv = anti[0]
    out = list(gens)
    for i in anti[1:]:
        out[i] = multiply(out[i], gens[piv])
    out[piv] = p
    return out
