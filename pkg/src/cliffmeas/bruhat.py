"""Factor symplectic matrices into the nine-stage C-P-C-P-H-P-C-P-C template.

Ordering columns as ``x_1..x_n, z_n..z_1`` (and rows the same way) turns the
Borel subgroup of Sp(2n) into upper-triangular matrices. Eliminating the Z
rows from the bottom up with Borel row operations on the left and Borel column
operations on the right leaves a monomial matrix ``H_S * Pi``, so
``M = b1 * H_S * Pi * b2``. Each Borel factor then splits into C and P stages
using ``C(A) P(L) C(A^-1) = [[I, A L A^t], [0, I]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .gf2 import BinMatrix, inverse, mat_mul, perm_inverse, perm_matrix, plu_factor
from .symplectic import SymplecticMatrix, is_symplectic

TEMPLATE_9 = ("C", "P", "C", "P", "H", "P", "C", "P", "C", "Perm")
TEMPLATE_11 = ("H", "C", "P", "C", "P", "C", "H", "P", "C", "P", "C", "Perm")


class StageShapeError(ValueError):
    pass


class DecompositionError(ValueError):
    pass


def _identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


@dataclass(frozen=True)
class Stage:
    """One stage. ``u`` is set for C, ``lam`` for P, ``subset`` for H, ``perm`` for Perm.

    ``conj`` conjugates C and H stages by a qubit permutation.
    """

    kind: str
    n: int
    u: BinMatrix | None = None
    lam: tuple[int, ...] = ()
    subset: tuple[int, ...] = ()
    perm: tuple[int, ...] = ()
    conj: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.conj:
            object.__setattr__(self, "conj", _identity_perm(self.n))
        if self.kind == "Perm" and not self.perm:
            object.__setattr__(self, "perm", _identity_perm(self.n))
        if self.kind == "P" and not self.lam:
            object.__setattr__(self, "lam", (0,) * self.n)
        if self.kind == "C" and self.u is None:
            object.__setattr__(self, "u", BinMatrix.identity(self.n))

    @classmethod
    def c(cls, u: BinMatrix, conj: Sequence[int] | None = None) -> "Stage":
        return cls("C", u.nrows, u=u, conj=tuple(conj) if conj is not None else ())

    @classmethod
    def p(cls, lam: Sequence[int]) -> "Stage":
        return cls("P", len(lam), lam=tuple(int(b) & 1 for b in lam))

    @classmethod
    def h(cls, subset: Sequence[int], n: int, conj: Sequence[int] | None = None) -> "Stage":
        return cls("H", n, subset=tuple(sorted(subset)), conj=tuple(conj) if conj is not None else ())

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "Stage":
        return cls("Perm", len(perm), perm=tuple(perm))

    def validate(self) -> None:
        n = self.n
        if sorted(self.conj) != list(range(n)):
            raise StageShapeError("conjugating permutation is not a permutation")
        if self.kind == "C":
            if self.u.shape != (n, n):
                raise StageShapeError("C stage matrix has the wrong shape")
            if not (self.u.is_upper_triangular() and self.u.is_unit_diagonal()):
                raise StageShapeError("C stage matrix must be upper triangular with unit diagonal")
        elif self.kind == "P":
            if len(self.lam) != n or any(b not in (0, 1) for b in self.lam):
                raise StageShapeError("P stage needs one bit per qubit")
        elif self.kind == "H":
            if any(not 0 <= q < n for q in self.subset) or len(set(self.subset)) != len(self.subset):
                raise StageShapeError("H stage subset is out of range")
        elif self.kind == "Perm":
            if sorted(self.perm) != list(range(n)):
                raise StageShapeError("Perm stage is not a permutation")
        else:
            raise StageShapeError(f"unknown stage kind {self.kind!r}")

    def is_identity(self) -> bool:
        if self.kind == "C":
            return self.u == BinMatrix.identity(self.n)
        if self.kind == "P":
            return not any(self.lam)
        if self.kind == "H":
            return not self.subset
        return self.perm == _identity_perm(self.n)

    def effective_u(self) -> BinMatrix:
        """The X block of a C stage after conjugation: ``Pi U Pi^t``."""
        pm = perm_matrix(self.conj)
        return mat_mul(mat_mul(pm, self.u), pm.T)

    def to_json(self) -> dict:
        payload: dict = {}
        if self.kind == "C":
            payload["U"] = self.u.to_strings()
        elif self.kind == "P":
            payload["lambda"] = list(self.lam)
        elif self.kind == "H":
            payload["subset"] = [q + 1 for q in self.subset]
        else:
            payload["perm"] = [q + 1 for q in self.perm]
        if self.kind in ("C", "H"):
            payload["conj"] = [q + 1 for q in self.conj]
        return {"kind": self.kind, "payload": payload}

    @classmethod
    def from_json(cls, obj: dict, n: int) -> "Stage":
        kind, pl = obj["kind"], obj["payload"]
        conj = [q - 1 for q in pl.get("conj", range(1, n + 1))]
        if kind == "C":
            return cls.c(BinMatrix.from_strings(pl["U"]), conj)
        if kind == "P":
            return cls.p(pl["lambda"])
        if kind == "H":
            return cls.h([q - 1 for q in pl["subset"]], n, conj)
        if kind == "Perm":
            return cls.permutation([q - 1 for q in pl["perm"]])
        raise StageShapeError(f"unknown stage kind {kind!r}")


def _blockdiag(a: BinMatrix, d: BinMatrix) -> BinMatrix:
    n = a.nrows
    z = BinMatrix.zeros(n, n)
    return BinMatrix.block([[a, z], [z, d]])


def stage_to_matrix(s: Stage, n: int | None = None) -> SymplecticMatrix:
    s.validate()
    n = s.n if n is None else n
    if n != s.n:
        raise StageShapeError("stage size does not match n")
    eye = BinMatrix.identity(n)
    if s.kind == "C":
        u = s.effective_u()
        m = _blockdiag(u, inverse(u).T)
    elif s.kind == "P":
        m = BinMatrix.block([[eye, BinMatrix.diag(s.lam)], [BinMatrix.zeros(n, n), eye]])
    elif s.kind == "H":
        sub = {s.conj[q] for q in s.subset}
        rows = []
        for j in range(2 * n):
            q = j % n
            if q in sub:
                rows.append(1 << ((j + n) % (2 * n)))
            else:
                rows.append(1 << j)
        m = BinMatrix(tuple(rows), 2 * n)
    else:
        pm = perm_matrix(s.perm)
        m = _blockdiag(pm, pm)
    return SymplecticMatrix(m, n)


@dataclass
class StageSequence:
    n: int
    stages: list[Stage]
    form: int = 9
    pivots: list[int] = field(default_factory=list)

    @property
    def final_perm(self) -> tuple[int, ...]:
        return self.stages[-1].perm

    def kinds(self) -> tuple[str, ...]:
        return tuple(s.kind for s in self.stages)

    def validate(self) -> None:
        template = TEMPLATE_9 if self.form == 9 else TEMPLATE_11
        if self.kinds() != template:
            raise StageShapeError(f"stage kinds {self.kinds()} do not follow the template")
        for s in self.stages:
            s.validate()
        pi = self.final_perm
        c_stages = [s for s in self.stages if s.kind == "C"]
        for s in c_stages[-2:]:
            if s.conj != pi:
                raise StageShapeError("the last two C stages must be conjugated by the final permutation")

    def product(self) -> SymplecticMatrix:
        acc = SymplecticMatrix.identity(self.n)
        for s in self.stages:
            acc = acc @ stage_to_matrix(s, self.n)
        return acc

    def to_json(self) -> dict:
        return {"n": self.n, "form": self.form, "stages": [s.to_json() for s in self.stages]}

    @classmethod
    def from_json(cls, obj: dict) -> "StageSequence":
        n = obj["n"]
        return cls(n, [Stage.from_json(s, n) for s in obj["stages"]], obj.get("form", 9))


# --------------------------------------------------------------------------
# elimination


class _Reducer:
    """Mutable ``L * M * R`` bookkeeping with paired symplectic row/column operations."""

    def __init__(self, m: BinMatrix, n: int):
        self.n = n
        self.m = list(m.rows)
        self.left = [1 << i for i in range(2 * n)]
        self.right = [1 << i for i in range(2 * n)]

    # left: Z-row j += Z-row k together with X-row k += X-row j (k < j)
    def lcnot(self, k: int, j: int) -> None:
        n = self.n
        for rows in (self.m, self.left):
            rows[n + j] ^= rows[n + k]
            rows[k] ^= rows[j]

    def _addcol(self, src: int, dst: int) -> None:
        for rows in (self.m, self.right):
            for i, r in enumerate(rows):
                if (r >> src) & 1:
                    rows[i] = r ^ (1 << dst)

    def rcnot(self, p: int, l: int) -> None:
        n = self.n
        self._addcol(p, l)
        self._addcol(n + l, n + p)

    def rcz(self, p: int, l: int) -> None:
        n = self.n
        self._addcol(p, n + l)
        self._addcol(l, n + p)

    def rphase(self, p: int) -> None:
        self._addcol(p, self.n + p)


def _split_symmetric(s: BinMatrix) -> tuple[BinMatrix, list[int], list[int]]:
    """Write symmetric ``s`` as ``diag(d) + K diag(lam) K^t`` with ``K`` unit upper triangular."""
    n = s.nrows
    res = [list(r) for r in s.to_lists()]
    kcols = [[1 if i == k else 0 for i in range(n)] for k in range(n)]
    lam = [0] * n
    for k in range(n - 1, -1, -1):
        col = [res[i][k] for i in range(k)]
        if any(col):
            lam[k] = 1
            v = col + [1] + [0] * (n - k - 1)
            kcols[k] = v
            for a in range(n):
                if v[a]:
                    for b in range(n):
                        if v[b]:
                            res[a][b] ^= 1
    for a in range(n):
        for b in range(n):
            if a != b and res[a][b]:
                raise DecompositionError("matrix is not symmetric")
    d = [res[i][i] for i in range(n)]
    kmat = BinMatrix.from_lists([[kcols[c][r] for c in range(n)] for r in range(n)], n)
    return kmat, lam, d


def _blocks(m: BinMatrix, n: int):
    return (
        m.submatrix(0, n, 0, n),
        m.submatrix(0, n, n, 2 * n),
        m.submatrix(n, 2 * n, 0, n),
        m.submatrix(n, 2 * n, n, 2 * n),
    )


def bruhat_decompose(m: SymplecticMatrix | BinMatrix, form: int = 9) -> StageSequence:
    mat = m.m if isinstance(m, SymplecticMatrix) else m
    if not is_symplectic(mat):
        raise DecompositionError("input matrix is not symplectic")
    n = mat.nrows // 2
    red = _Reducer(mat, n)

    def ordpos(c: int) -> int:
        return c if c < n else n + (2 * n - 1 - c)

    pivots: list[int] = []
    for j in range(n):
        for k, c in enumerate(pivots):
            if (red.m[n + j] >> c) & 1:
                red.lcnot(k, j)
        row = red.m[n + j]
        c = min((b for b in range(2 * n) if (row >> b) & 1), key=ordpos)
        if c < n:
            p = c
            for l in range(n):
                if l != p and (red.m[n + j] >> l) & 1:
                    red.rcnot(p, l)
            for l in range(n):
                if l != p and (red.m[n + j] >> (n + l)) & 1:
                    red.rcz(p, l)
            if (red.m[n + j] >> (n + p)) & 1:
                red.rphase(p)
        else:
            l = c - n
            for q in range(l):
                if (red.m[n + j] >> (n + q)) & 1:
                    red.rcnot(q, l)
        if red.m[n + j] != 1 << c:
            raise DecompositionError("elimination failed to isolate a pivot")
        pivots.append(c)

    pi = tuple(c % n for c in pivots)
    hset = [j for j, c in enumerate(pivots) if c < n]
    # X rows: partner bit plus entries on pivot columns of other rows
    sigma = [[(red.m[j] >> pivots[k]) & 1 for k in range(n)] for j in range(n)]
    sig = BinMatrix.from_lists(sigma, n)
    if sig != sig.T:
        raise DecompositionError("off-pivot block is not symmetric")

    linv = SymplecticMatrix(BinMatrix(tuple(red.left), 2 * n), n).inverse().m
    w1, x1, _, _ = _blocks(linv, n)
    # b1 = L^-1 [[I, Sigma], [0, I]] = [[W1, W1 Sigma], ...] = C(W1) [[I, Sigma], [0, I]]
    k1, lam1, d1 = _split_symmetric(sig)
    if not x1.is_zero():
        raise DecompositionError("left factor has an unexpected off-diagonal block")

    rinv = SymplecticMatrix(BinMatrix(tuple(red.right), 2 * n), n).inverse().m
    w2, x2, _, _ = _blocks(rinv, n)
    s2 = mat_mul(x2, w2.T)
    k2, lam4p, lam3p = _split_symmetric(s2)

    eye_perm = _identity_perm(n)
    stages = [
        Stage.c(mat_mul(w1, k1)),
        Stage.p(lam1),
        Stage.c(inverse(k1)),
        Stage.p(d1),
        Stage.h(hset, n),
        Stage.p([lam3p[pi[j]] for j in range(n)]),
        Stage.c(k2, pi),
        Stage.p([lam4p[pi[j]] for j in range(n)]),
        Stage.c(mat_mul(inverse(k2), w2), pi),
        Stage.permutation(pi),
    ]
    if form == 11:
        stages = [Stage.h([], n, eye_perm)] + stages[:4] + [Stage.c(BinMatrix.identity(n))] + stages[4:]
    elif form != 9:
        raise ValueError("stage form must be 9 or 11")
    seq = StageSequence(n, stages, form, pivots)
    seq.validate()
    return seq


def normalize_cstage(v: BinMatrix) -> tuple[tuple[int, ...], BinMatrix, BinMatrix]:
    """Split invertible ``v`` as ``perm_matrix(conj) @ rho U1 rho @ U2``.

    ``rho`` reverses qubit order, so ``rho U1 rho`` is the unit lower factor
    of a PLU factorization and both ``U1`` and ``U2`` are unit upper
    triangular C-stage matrices.
    """
    conj, low, up = plu_factor(v)
    n = v.nrows
    rho = perm_matrix(tuple(range(n - 1, -1, -1)))
    u1 = mat_mul(mat_mul(rho, low), rho)
    return conj, u1, up


def reverse_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


__all__ = [
    "Stage",
    "StageSequence",
    "StageShapeError",
    "DecompositionError",
    "bruhat_decompose",
    "stage_to_matrix",
    "normalize_cstage",
    "reverse_perm",
    "perm_inverse",
]
