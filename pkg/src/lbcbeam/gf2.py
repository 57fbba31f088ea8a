"""Bit-packed binary matrices and GF(2) linear algebra.

Each row is stored as a Python int; bit ``j`` of a row holds column ``j``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class BinMatrix:
    """Immutable matrix over GF(2) with rows packed into ints."""

    __slots__ = ("rows", "cols", "_bits", "_hash")

    def __init__(self, bits: Sequence[int], cols: int):
        if cols < 0:
            raise ValueError("cols must be non-negative")
        mask = (1 << cols) - 1
        packed = tuple(int(r) for r in bits)
        for r in packed:
            if r < 0 or r & ~mask:
                raise ValueError(f"row {r:#x} has bits outside {cols} columns")
        set_ = object.__setattr__
        set_(self, "_bits", packed)
        set_(self, "rows", len(packed))
        set_(self, "cols", cols)
        set_(self, "_hash", hash((packed, cols)))

    def __setattr__(self, name, value):
        raise AttributeError("BinMatrix is immutable")

    # construction -----------------------------------------------------

    @classmethod
    def from_array(cls, arr) -> "BinMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("entries must be 0 or 1")
        rows = []
        for row in a.astype(np.uint8):
            v = 0
            for j in np.flatnonzero(row):
                v |= 1 << int(j)
            rows.append(v)
        return cls(rows, a.shape[1])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinMatrix":
        return cls([0] * rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def parse(cls, text: str) -> "BinMatrix":
        """Read an ASCII 0/1 grid, one row per line; whitespace is ignored."""
        lines = ["".join(ln.split()) for ln in text.strip().splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            return cls([], 0)
        return cls.from_array([[int(c) for c in ln] for ln in lines])

    # access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def bits(self) -> tuple[int, ...]:
        return self._bits

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= j < self.cols):
            raise IndexError(j)
        return (self._bits[i] >> j) & 1

    def row(self, i: int) -> np.ndarray:
        return self.to_array()[i]

    def row_weight(self, i: int) -> int:
        return bin(self._bits[i]).count("1")

    def column_masks(self) -> list[int]:
        """Columns packed as ints (bit ``i`` = row ``i``)."""
        out = []
        for j in range(self.cols):
            v = 0
            for i, r in enumerate(self._bits):
                if (r >> j) & 1:
                    v |= 1 << i
            out.append(v)
        return out

    def to_array(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self._bits):
            for j in range(self.cols):
                if (r >> j) & 1:
                    a[i, j] = 1
        return a

    def to_text(self) -> str:
        return "\n".join(
            "".join(str((r >> j) & 1) for j in range(self.cols)) for r in self._bits
        )

    @property
    def T(self) -> "BinMatrix":
        return BinMatrix(self.column_masks(), self.rows)

    def select_columns(self, idx: Iterable[int]) -> "BinMatrix":
        idx = list(idx)
        rows = [sum(((r >> c) & 1) << j for j, c in enumerate(idx)) for r in self._bits]
        return BinMatrix(rows, len(idx))

    def vstack(self, other: "BinMatrix") -> "BinMatrix":
        if other.cols != self.cols:
            raise ValueError("column count mismatch")
        return BinMatrix(self._bits + other._bits, self.cols)

    def hstack(self, other: "BinMatrix") -> "BinMatrix":
        if other.rows != self.rows:
            raise ValueError("row count mismatch")
        rows = [a | (b << self.cols) for a, b in zip(self._bits, other._bits)]
        return BinMatrix(rows, self.cols + other.cols)

    # dunder -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.cols == other.cols and self._bits == other._bits

    def __hash__(self) -> int:
        return self._hash

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        return matmul_gf2(self, other)

    def __repr__(self) -> str:
        return f"BinMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return self.to_text()


def matmul_gf2(a: BinMatrix, b: BinMatrix) -> BinMatrix:
    """Matrix product over GF(2)."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    out = []
    for r in a.bits:
        acc = 0
        t = 0
        while r:
            if r & 1:
                acc ^= b.bits[t]
            r >>= 1
            t += 1
        out.append(acc)
    return BinMatrix(out, b.cols)


def _eliminate(rows: list[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    work = list(rows)
    pivots = []
    r = 0
    for c in range(cols):
        bit = 1 << c
        p = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work, pivots


def rank_gf2(m: BinMatrix) -> int:
    return len(_eliminate(list(m.bits), m.cols)[1])


def rref_gf2(m: BinMatrix) -> tuple[BinMatrix, list[int]]:
    work, pivots = _eliminate(list(m.bits), m.cols)
    return BinMatrix(work, m.cols), pivots


def null_space_gf2(m: BinMatrix) -> BinMatrix:
    """Basis of {x : m x = 0}, one basis vector per row."""
    work, pivots = _eliminate(list(m.bits), m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = 1 << f
        for i, p in enumerate(pivots):
            if (work[i] >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return BinMatrix(basis, m.cols)


def permute_columns(m: BinMatrix, perm: Sequence[int]) -> BinMatrix:
    """Column ``j`` of the result is column ``perm[j]`` of ``m``."""
    return m.select_columns(perm)


def standard_form(g: BinMatrix) -> tuple[BinMatrix, list[int]]:
    """Bring a full-row-rank generator to ``[I | P]``.

    Returns the systematic matrix and the column permutation ``perm`` such
    that the result spans ``permute_columns(code(g), perm)``.
    """
    k, n = g.shape
    work, pivots = _eliminate(list(g.bits), n)
    if len(pivots) < k:
        raise ValueError("generator is rank deficient")
    perm = pivots + [c for c in range(n) if c not in pivots]
    return permute_columns(BinMatrix(work, n), perm), perm


def lift_to_real(m: BinMatrix) -> np.ndarray:
    """Interpret the 0/1 entries as real numbers."""
    return m.to_array().astype(float)


def is_systematic(g: BinMatrix) -> bool:
    k = g.rows
    return k <= g.cols and all((r & ((1 << k) - 1)) == 1 << i for i, r in enumerate(g.bits))
