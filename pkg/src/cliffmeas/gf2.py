"""Exact linear algebra over GF(2) with rows packed into Python integers.

Bit ``j`` of a row integer holds column ``j`` (0-based). Indices are 0-based
everywhere in the API; the JSON literal form writes column 1 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class SingularMatrixError(ValueError):
    """Raised when an operation needs a full-rank matrix."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


@dataclass(frozen=True)
class BitVector:
    bits: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("BitVector length must be positive")
        if self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVector":
        return cls(_pack(values), len(values))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        return cls.from_list([int(c) for c in text])

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.bits ^ other.bits, self.length)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __len__(self) -> int:
        return self.length

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def __str__(self) -> str:
        return "".join(map(str, self.to_list()))


def _pack(values: Iterable[int]) -> int:
    out = 0
    for j, v in enumerate(values):
        if v & 1:
            out |= 1 << j
    return out


def row_to_str(row: int, ncols: int) -> str:
    return "".join("1" if (row >> j) & 1 else "0" for j in range(ncols))


def str_to_row(text: str) -> int:
    if any(c not in "01" for c in text):
        raise ValueError(f"not a bit string: {text!r}")
    return _pack(int(c) for c in text)


@dataclass(frozen=True)
class BinMatrix:
    """Immutable binary matrix; ``rows[i]`` is the packed bit row ``i``."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        mask = ~((1 << self.ncols) - 1)
        for r in self.rows:
            if r & mask:
                raise ValueError("row has bits beyond ncols")

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BinMatrix":
        return cls((0,) * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], ncols: int | None = None) -> "BinMatrix":
        if ncols is None:
            ncols = len(data[0]) if len(data) else 0
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix literal")
        return cls(tuple(_pack(r) for r in data), ncols)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BinMatrix":
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix literal")
        return cls(tuple(str_to_row(r) for r in rows), ncols)

    @classmethod
    def from_numpy(cls, arr) -> "BinMatrix":
        arr = np.asarray(arr, dtype=np.uint8) & 1
        return cls.from_lists(arr.tolist(), arr.shape[1])

    @classmethod
    def diag(cls, bits: Sequence[int]) -> "BinMatrix":
        return cls(tuple((1 << i) if b & 1 else 0 for i, b in enumerate(bits)), len(bits))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["BinMatrix"]]) -> "BinMatrix":
        rows: list[int] = []
        for brow in blocks:
            h = brow[0].nrows
            for i in range(h):
                acc, shift = 0, 0
                for b in brow:
                    if b.nrows != h:
                        raise ValueError("block row heights differ")
                    acc |= b.rows[i] << shift
                    shift += b.ncols
                rows.append(acc)
        ncols = sum(b.ncols for b in blocks[0])
        return cls(tuple(rows), ncols)

    # views --------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not 0 <= j < self.ncols:
            raise IndexError(ij)
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_lists(), dtype=np.uint8).reshape(self.nrows, self.ncols)

    def to_strings(self) -> list[str]:
        return [row_to_str(r, self.ncols) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.to_strings())

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "BinMatrix":
        mask = (1 << (c1 - c0)) - 1
        return BinMatrix(tuple((r >> c0) & mask for r in self.rows[r0:r1]), c1 - c0)

    def column(self, j: int) -> int:
        return _pack((r >> j) & 1 for r in self.rows)

    # algebra ------------------------------------------------------------
    def __add__(self, other: "BinMatrix") -> "BinMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BinMatrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.ncols)

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        return mat_mul(self, other)

    @property
    def T(self) -> "BinMatrix":
        return transpose(self)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def is_upper_triangular(self) -> bool:
        return all(r & ((1 << i) - 1) == 0 for i, r in enumerate(self.rows))

    def is_lower_triangular(self) -> bool:
        return all(r >> (i + 1) == 0 for i, r in enumerate(self.rows))

    def is_unit_diagonal(self) -> bool:
        return all((r >> i) & 1 for i, r in enumerate(self.rows))

    def is_diagonal(self) -> bool:
        return all(r & ~(1 << i) == 0 for i, r in enumerate(self.rows))

    def diagonal(self) -> list[int]:
        return [(r >> i) & 1 for i, r in enumerate(self.rows)]


def mat_vec(rows: Sequence[int], v: int) -> int:
    """Multiply a matrix (packed rows) by a column vector packed as an int."""
    out = 0
    for i, r in enumerate(rows):
        if (r & v).bit_count() & 1:
            out |= 1 << i
    return out


def vec_mat(v: int, rows: Sequence[int]) -> int:
    """Row vector times matrix: XOR of the rows selected by ``v``."""
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= rows[i]
        v >>= 1
        i += 1
    return out


def mat_mul(a: BinMatrix, b: BinMatrix) -> BinMatrix:
    if a.ncols != b.nrows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return BinMatrix(tuple(vec_mat(r, b.rows) for r in a.rows), b.ncols)


def transpose(a: BinMatrix) -> BinMatrix:
    return BinMatrix(tuple(a.column(j) for j in range(a.ncols)), a.nrows)


def rref(rows: Sequence[int], ncols: int, col_order: Sequence[int] | None = None):
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``; zero rows are dropped. Pivots are
    searched following ``col_order`` (default: increasing column index).
    """
    work = [r for r in rows]
    order = range(ncols) if col_order is None else col_order
    pivots: list[int] = []
    top = 0
    for col in order:
        bit = 1 << col
        piv = next((i for i in range(top, len(work)) if work[i] & bit), None)
        if piv is None:
            continue
        work[top], work[piv] = work[piv], work[top]
        p = work[top]
        for i in range(len(work)):
            if i != top and work[i] & bit:
                work[i] ^= p
        pivots.append(col)
        top += 1
        if top == len(work):
            break
    return work[:top], pivots


def rank(a: BinMatrix | Sequence[int], ncols: int | None = None) -> int:
    if isinstance(a, BinMatrix):
        rows, ncols = a.rows, a.ncols
    else:
        rows = a
        ncols = ncols if ncols is not None else max((r.bit_length() for r in rows), default=0)
    return len(rref(rows, ncols)[1])


def in_row_span(v: int, rows: Sequence[int], ncols: int) -> bool:
    red, piv = rref(rows, ncols)
    for r, c in zip(red, piv):
        if (v >> c) & 1:
            v ^= r
    return v == 0


def inverse(a: BinMatrix) -> BinMatrix:
    n = a.nrows
    if a.ncols != n:
        raise ValueError("inverse needs a square matrix")
    # augment with identity in the high bits
    work = [r | (1 << (n + i)) for i, r in enumerate(a.rows)]
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(col, n) if work[i] & bit), None)
        if piv is None:
            dep = _first_dependent_row(a.rows, n)
            raise SingularMatrixError(f"matrix is singular; row {dep} is linearly dependent on earlier rows", dep)
        work[col], work[piv] = work[piv], work[col]
        p = work[col]
        for i in range(n):
            if i != col and work[i] & bit:
                work[i] ^= p
    return BinMatrix(tuple(r >> n for r in work), n)


def _first_dependent_row(rows: Sequence[int], ncols: int) -> int:
    basis: dict[int, int] = {}
    for i, r in enumerate(rows):
        v = r
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                break
        if v == 0:
            return i
    return -1


def solve(a: BinMatrix, b: BinMatrix) -> BinMatrix:
    """Return X with ``X @ a == b`` (rows of b expressed in the row space of a).

    Free variables are set to zero, so the solution is deterministic.
    """
    if a.ncols != b.ncols:
        raise ValueError("column mismatch")
    m = a.nrows
    # track combinations in high bits
    work = [r | (1 << (a.ncols + i)) for i, r in enumerate(a.rows)]
    red, piv = rref(work, a.ncols, col_order=range(a.ncols))
    mask = (1 << a.ncols) - 1
    out = []
    for i, v in enumerate(b.rows):
        acc = 0
        for r, c in zip(red, piv):
            if (v >> c) & 1:
                v ^= r & mask
                acc ^= r >> a.ncols
        if v:
            raise SingularMatrixError(f"row {i} of the right-hand side is not in the row space", i)
        out.append(acc)
    return BinMatrix(tuple(out), m)


# permutations -------------------------------------------------------------

def perm_matrix(perm: Sequence[int]) -> BinMatrix:
    """Matrix with a one at ``(j, perm[j])``: row vector ``e_j`` maps to ``e_perm[j]``."""
    return BinMatrix(tuple(1 << p for p in perm), len(perm))


def perm_inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def perm_compose(first: Sequence[int], then: Sequence[int]) -> tuple[int, ...]:
    """Permutation applying ``first`` and then ``then``."""
    return tuple(then[first[i]] for i in range(len(first)))


def plu_factor(a: BinMatrix) -> tuple[tuple[int, ...], BinMatrix, BinMatrix]:
    """Factor ``a == perm_matrix(perm) @ L @ U``.

    ``L`` is unit lower triangular and ``U`` unit upper triangular.
    """
    n = a.nrows
    if a.ncols != n:
        raise ValueError("plu_factor needs a square matrix")
    # Gaussian elimination with row pivoting on B = P^{-1} A, tracking L.
    work = list(a.rows)
    order = list(range(n))  # work[i] is row order[i] of a
    lcols = [[0] * n for _ in range(n)]
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(col, n) if work[i] & bit), None)
        if piv is None:
            dep = _first_dependent_row(a.rows, n)
            raise SingularMatrixError(f"matrix is singular; row {dep} is linearly dependent on earlier rows", dep)
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            order[col], order[piv] = order[piv], order[col]
            lcols[col], lcols[piv] = lcols[piv], lcols[col]
        for i in range(col + 1, n):
            if work[i] & bit:
                work[i] ^= work[col]
                lcols[i][col] = 1
    lower = BinMatrix.from_lists([[1 if j == i else lcols[i][j] for j in range(n)] for i in range(n)], n)
    upper = BinMatrix(tuple(work), n)
    # row i of (L U) is row order[i] of a, so a = P L U with P[order[i], i] = 1
    perm = perm_inverse(order)
    return perm, lower, upper
