"""Phase-free generalized stabilizer forms and their update under measurement.

A GSF on ``N`` qubits lists ``k`` logical-X rows, ``k`` logical-Z rows and
``N - k`` stabilizer rows, each a packed ``(x|z)`` int of width ``2N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gf2 import BinMatrix, rank, rref, row_to_str, str_to_row
from .pauli import symplectic_form


class GSFError(ValueError):
    pass


class LemmaConditionError(GSFError):
    """One of the four preconditions of the simultaneous-measurement update failed."""

    MESSAGES = {
        1: "measured operators do not pairwise commute",
        2: "measured operators are not symplectic partners of the stabilizer rows",
        3: "measured operators do not commute with the logical X rows",
        4: "measured operators do not commute with the logical Z rows",
    }

    def __init__(self, condition: int, detail: str = ""):
        self.condition = condition
        msg = f"condition {condition} violated: {self.MESSAGES[condition]}"
        super().__init__(msg + (f" ({detail})" if detail else ""))


def _sp(n: int, r1: int, r2: int) -> int:
    mask = (1 << n) - 1
    return symplectic_form(r1 & mask, r1 >> n, r2 & mask, r2 >> n)


def row_from_halves(x: str, z: str) -> int:
    n = len(x)
    return str_to_row(x) | (str_to_row(z) << n)


@dataclass(frozen=True)
class GSF:
    logical_x: tuple[int, ...]
    logical_z: tuple[int, ...]
    stabilizer: tuple[int, ...]
    n: int

    @classmethod
    def from_rows(cls, rows: Sequence[str], k: int) -> "GSF":
        """Build from ``"x bits|z bits"`` strings: k logical X, k logical Z, then stabilizers."""
        parsed = []
        for r in rows:
            x, z = r.replace(" ", "").split("|")
            parsed.append(row_from_halves(x, z))
        n = len(rows[0].replace(" ", "").split("|")[0])
        return cls(tuple(parsed[:k]), tuple(parsed[k : 2 * k]), tuple(parsed[2 * k :]), n)

    def to_rows(self) -> list[str]:
        mask = (1 << self.n) - 1
        return [row_to_str(r & mask, self.n) + "|" + row_to_str(r >> self.n, self.n) for r in self.all_rows()]

    def all_rows(self) -> tuple[int, ...]:
        return self.logical_x + self.logical_z + self.stabilizer

    @property
    def k(self) -> int:
        return len(self.logical_x)

    def validate(self) -> None:
        n = self.n
        s = self.stabilizer
        for i in range(len(s)):
            for j in range(i + 1, len(s)):
                if _sp(n, s[i], s[j]):
                    raise GSFError("stabilizer rows do not commute")
        for lx in self.logical_x + self.logical_z:
            if any(_sp(n, lx, r) for r in s):
                raise GSFError("logical row does not commute with the stabilizers")
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                if _sp(n, lx, lz) != (i == j):
                    raise GSFError("logical X and Z rows are not partners")
        for blk in (self.logical_x, self.logical_z):
            for i in range(len(blk)):
                for j in range(i + 1, len(blk)):
                    if _sp(n, blk[i], blk[j]):
                        raise GSFError("logical rows of one kind do not commute")
        if len(rref(list(self.all_rows()), 2 * n)[1]) != len(self.all_rows()):
            raise GSFError("rows are not independent")

    # row operations (each gives an equivalent GSF) --------------------------
    def add_stabilizer_to(self, block: str, i: int, stab: int) -> "GSF":
        """Add stabilizer row ``stab`` to row ``i`` of ``block`` ('x', 'z' or 's')."""
        src = self.stabilizer[stab]
        lx, lz, st = list(self.logical_x), list(self.logical_z), list(self.stabilizer)
        target = {"x": lx, "z": lz, "s": st}[block]
        if block == "s" and i == stab:
            raise GSFError("cannot add a stabilizer row to itself")
        target[i] ^= src
        return GSF(tuple(lx), tuple(lz), tuple(st), self.n)

    def replace_stabilizers(self, rows: Sequence[int]) -> "GSF":
        """Swap in another basis of the same stabilizer span."""
        rows = tuple(rows)
        if rank(BinMatrix(rows, 2 * self.n)) != len(self.stabilizer) or not same_span(rows, self.stabilizer, self.n):
            raise GSFError("rows do not span the same stabilizer group")
        return GSF(self.logical_x, self.logical_z, rows, self.n)

    def equivalent(self, other: "GSF") -> bool:
        """Same circuit: equal stabilizer spans and logical rows equal modulo stabilizers."""
        if self.n != other.n or self.k != other.k:
            return False
        if not same_span(self.stabilizer, other.stabilizer, self.n):
            return False
        red, piv = rref(list(self.stabilizer), 2 * self.n)
        for a, b in zip(self.logical_x + self.logical_z, other.logical_x + other.logical_z):
            if _reduce(a ^ b, red, piv):
                return False
        return True


def _reduce(v: int, red: Sequence[int], piv: Sequence[int]) -> int:
    for r, c in zip(red, piv):
        if (v >> c) & 1:
            v ^= r
    return v


def same_span(a: Sequence[int], b: Sequence[int], n: int) -> bool:
    ra, pa = rref(list(a), 2 * n)
    rb, pb = rref(list(b), 2 * n)
    return ra == rb and pa == pb


def check_lemma_conditions(g: GSF, ef: Sequence[int]) -> None:
    n = g.n
    for i in range(len(ef)):
        for j in range(i + 1, len(ef)):
            if _sp(n, ef[i], ef[j]):
                raise LemmaConditionError(1, f"rows {i + 1} and {j + 1}")
    if len(ef) != len(g.stabilizer):
        raise LemmaConditionError(2, f"{len(ef)} operators for {len(g.stabilizer)} stabilizer rows")
    for i, a in enumerate(g.stabilizer):
        for j, e in enumerate(ef):
            if _sp(n, a, e) != (i == j):
                raise LemmaConditionError(2, f"stabilizer row {i + 1} vs operator {j + 1}")
    for cond, blk in ((3, g.logical_x), (4, g.logical_z)):
        for i, l in enumerate(blk):
            for j, e in enumerate(ef):
                if _sp(n, l, e):
                    raise LemmaConditionError(cond, f"logical row {i + 1} vs operator {j + 1}")


def gsf_measure_update(g: GSF, ef: Sequence[int]) -> GSF:
    """Measure ``N - k`` operators meeting all four preconditions; they become the stabilizers."""
    ef = tuple(ef)
    check_lemma_conditions(g, ef)
    return GSF(g.logical_x, g.logical_z, ef, g.n)


def gsf_measure_partial(g: GSF, ef: Sequence[int]) -> GSF:
    """Measure ``d`` commuting operators, rebasing rows so the preconditions hold locally.

    Operators already in the stabilizer span are skipped. For the rest, the
    stabilizers are rebased so that ``d`` of them pair with the operators and
    the remainder commute with them, and each logical row that anticommutes
    with an operator is multiplied by the paired stabilizer. The paired
    stabilizers are then replaced by the operators.
    """
    n = g.n
    ef = list(ef)
    for i in range(len(ef)):
        for j in range(i + 1, len(ef)):
            if _sp(n, ef[i], ef[j]):
                raise LemmaConditionError(1, f"rows {i + 1} and {j + 1}")
    stab = list(g.stabilizer)
    lx, lz = list(g.logical_x), list(g.logical_z)
    red, piv = rref(stab, 2 * n)
    active = []
    for e in ef:
        if _reduce(e, red, piv) == 0:
            continue
        if any(_sp(n, e, s) for s in stab):
            active.append(e)
        else:
            raise GSFError("operator commutes with every stabilizer but is not one: it would measure a logical")
    if not active:
        return g
    # rebase: pivot elimination so that stab[p_i] is the unique partner of active[i]
    pairs = []
    free = list(range(len(stab)))
    for e in active:
        cand = [i for i in free if _sp(n, stab[i], e)]
        if not cand:
            raise LemmaConditionError(2, "an operator commutes with every remaining stabilizer")
        p = cand[0]
        free.remove(p)
        for i in range(len(stab)):
            if i != p and _sp(n, stab[i], e):
                stab[i] ^= stab[p]
        pairs.append((p, e))
    # the active operators must be independent partners of the chosen rows
    for p, e in pairs:
        for q, f in pairs:
            if _sp(n, stab[p], f) != (p == q):
                raise LemmaConditionError(2, "operators are not independent modulo the stabilizers")
    for blk in (lx, lz):
        for i in range(len(blk)):
            for p, e in pairs:
                if _sp(n, blk[i], e):
                    blk[i] ^= stab[p]
    for cond, blk in ((3, lx), (4, lz)):
        for l in blk:
            if any(_sp(n, l, e) for _, e in pairs):
                raise LemmaConditionError(cond)
    for p, e in pairs:
        stab[p] = e
    return GSF(tuple(lx), tuple(lz), tuple(stab), n)
