"""Linear block codes whose parity-check rows drive the measurement design."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .gf2 import (
    BinMatrix,
    matmul_gf2,
    null_space_gf2,
    rank_gf2,
    standard_form,
)

# Brute-force budget for verify_correction: sum_{i<=e} C(n, i).
DEFAULT_PATTERN_CAP = 10**6

# (15,11,3) Hamming parity-check matrix, column order fixed so that the
# 16-entry syndrome table reproduces bit for bit.
HAMMING_15_11_H = BinMatrix.parse(
    """
    100010011010111
    010011010111100
    001001101011110
    000100110101111
    """
)

# First matrix returned by search_code(8, 2); frozen for reproducibility.
SEARCHED_8_2_H = BinMatrix.parse(
    """
    10000011
    01000011
    00100010
    00010010
    00001001
    00000101
    """
)


class NoCodeFound(RuntimeError):
    pass


class PatternCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearCode:
    n: int
    k: int
    e_n: int
    H: BinMatrix
    G: Optional[BinMatrix] = None
    d: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        if self.H.shape != (self.n - self.k, self.n):
            raise ValueError(f"H has shape {self.H.shape}, expected {(self.n - self.k, self.n)}")
        if rank_gf2(self.H) != self.n - self.k:
            raise ValueError("H must have full row rank")
        if self.G is not None:
            if self.G.shape != (self.k, self.n):
                raise ValueError("G has the wrong shape")
            if any(matmul_gf2(self.G, self.H.T).bits):
                raise ValueError("G H^T != 0")
        if self.d is not None and self.e_n != (self.d - 1) // 2:
            raise ValueError("e_n inconsistent with d")

    @property
    def m(self) -> int:
        """Number of measurements (parity bits)."""
        return self.n - self.k

    def __str__(self):
        d = self.d if self.d is not None else "?"
        return f"({self.n},{self.k},{d}) e_n={self.e_n}"


def generator_from_parity(h: BinMatrix) -> BinMatrix:
    return null_space_gf2(h)


def minimum_distance(g: BinMatrix, max_k: int = 22) -> Optional[int]:
    """Minimum Hamming weight over nonzero codewords (Gray-code walk)."""
    k = g.rows
    if k == 0:
        return None
    if k > max_k:
        return None
    best = g.cols
    word = 0
    for i in range(1, 1 << k):
        flip = (i & -i).bit_length() - 1
        word ^= g.bits[flip]
        w = bin(word).count("1")
        if w < best:
            best = w
    return best


def _n_patterns(n: int, e_n: int) -> int:
    return sum(math.comb(n, i) for i in range(e_n + 1))


def verify_correction(h: BinMatrix, e_n: int, cap: int = DEFAULT_PATTERN_CAP) -> bool:
    """True iff every error pattern of weight <= e_n has its own syndrome."""
    n = h.cols
    total = _n_patterns(n, e_n)
    if total > cap:
        raise PatternCapExceeded(f"{total} patterns exceed cap {cap}")
    cols = h.column_masks()
    seen = set()
    for w in range(e_n + 1):
        for support in itertools.combinations(range(n), w):
            s = 0
            for j in support:
                s ^= cols[j]
            if s in seen:
                return False
            seen.add(s)
    return True


def encoded_parity(h: BinMatrix, g_c: BinMatrix) -> BinMatrix:
    """G_c^T H over GF(2); G_c is m x m_c for an m x n parity matrix H."""
    if g_c.rows != h.rows:
        raise ValueError(f"G_c has {g_c.rows} rows, H has {h.rows}")
    return matmul_gf2(g_c.T, h)


# -- families ---------------------------------------------------------------


def _systematic_hamming(r: int) -> tuple[BinMatrix, BinMatrix]:
    """H = [A | I_r] and G = [I_k | A^T] with A the weight>=2 columns in order."""
    a_cols = [v for v in range(1, 1 << r) if bin(v).count("1") >= 2]
    k = len(a_cols)
    h_cols = a_cols + [1 << i for i in range(r)]
    h = BinMatrix([sum(((c >> i) & 1) << j for j, c in enumerate(h_cols)) for i in range(r)], k + r)
    g_rows = [(1 << i) | (a_cols[i] << k) for i in range(k)]
    return h, BinMatrix(g_rows, k + r)


def hamming_code(r: int) -> LinearCode:
    if r < 2:
        raise ValueError("r must be >= 2")
    n = (1 << r) - 1
    if r == 4:
        h = HAMMING_15_11_H
        g = generator_from_parity(h)
    else:
        h, g = _systematic_hamming(r)
    return LinearCode(n, n - r, 1, h, g, d=3, name=f"hamming-{n}-{n - r}")


def shortened_hamming(r: int, s: int) -> LinearCode:
    """Drop the last ``s`` information positions of the systematic Hamming code."""
    n0 = (1 << r) - 1
    k0 = n0 - r
    if not 0 <= s < k0:
        raise ValueError("need 0 <= s < 2^r - 1 - r")
    h, g = _systematic_hamming(r)
    keep = list(range(k0 - s)) + list(range(k0, n0))
    h_s = h.select_columns(keep)
    g_s = BinMatrix(g.bits[: k0 - s], n0).select_columns(keep)
    n, k = n0 - s, k0 - s
    d = minimum_distance(g_s)
    return LinearCode(n, k, (d - 1) // 2, h_s, g_s, d=d, name=f"short-hamming-{n}-{k}")


def _rm_generator(r: int, m: int) -> BinMatrix:
    n = 1 << m
    rows = []
    for deg in range(r + 1):
        for vars_ in itertools.combinations(range(m), deg):
            v = 0
            for p in range(n):
                if all((p >> i) & 1 for i in vars_):
                    v |= 1 << p
            rows.append(v)
    return BinMatrix(rows, n)


def reed_muller(r: int, m: int) -> LinearCode:
    if not 0 <= r <= m:
        raise ValueError("need 0 <= r <= m")
    n = 1 << m
    g = _rm_generator(r, m)
    if r == m:
        h = BinMatrix([], n)
    else:
        # dual of RM(r, m) is RM(m - r - 1, m)
        h = _rm_generator(m - r - 1, m)
    d = 1 << (m - r)
    return LinearCode(n, g.rows, (d - 1) // 2, h, g, d=d, name=f"rm-{n}-{g.rows}")


def search_code(n: int, e_n: int, max_nodes: int = 2_000_000) -> LinearCode:
    """Smallest-redundancy parity-check matrix found by backtracking.

    Columns are chosen so that no nonzero combination of at most ``2 e_n``
    of them vanishes, which makes every weight-<=e_n syndrome distinct.
    The identity block is fixed first (row operations make this WLOG) and
    the remaining columns are taken in increasing integer order, so the
    result is deterministic.
    """
    if n < 1 or e_n < 0:
        raise ValueError("need n >= 1 and e_n >= 0")
    depth = 2 * e_n - 1
    r = 0
    while (1 << r) < _n_patterns(n, e_n):
        r += 1
    nodes = 0
    for r in range(max(r, 1), n + 1):
        units = [1 << i for i in range(r)]
        pool = [v for v in range(1, 1 << r) if v & (v - 1)]

        def sums_after(sums, c):
            # sums[t]: XORs of exactly t chosen columns, t <= depth
            new = [set(s) for s in sums]
            for t in range(1, len(sums)):
                new[t] |= {x ^ c for x in sums[t - 1]}
            return new

        sums = [{0}] + [set() for _ in range(max(depth, 0))]
        ok = True
        for u in units:
            if any(u in s for s in sums):
                ok = False
                break
            sums = sums_after(sums, u)
        if not ok:
            continue

        def dfs(chosen, start, sums):
            nonlocal nodes
            if len(chosen) == n - r:
                return chosen
            for idx in range(start, len(pool)):
                nodes += 1
                if nodes > max_nodes:
                    raise NoCodeFound(f"search budget exhausted at r={r}")
                if len(pool) - idx < n - r - len(chosen):
                    return None
                c = pool[idx]
                if any(c in s for s in sums):
                    continue
                found = dfs(chosen + [c], idx + 1, sums_after(sums, c))
                if found is not None:
                    return found
            return None

        extra = dfs([], 0, sums)
        if extra is None:
            continue
        cols = units + extra
        h = BinMatrix([sum(((c >> i) & 1) << j for j, c in enumerate(cols)) for i in range(r)], n)
        g = generator_from_parity(h) if r < n else None
        d = minimum_distance(g) if g is not None and g.rows else None
        e = e_n if d is None else (d - 1) // 2
        return LinearCode(n, n - r, e, h, g, d=d, name=f"searched-{n}-{n - r}")
    raise NoCodeFound(f"no code with n={n}, e_n={e_n}")


def identity_code(n: int) -> LinearCode:
    """Trivial k=0 code: identity rows reproduce per-bin scanning."""
    return LinearCode(n, 0, n, BinMatrix.identity(n), None, d=None, name=f"identity-{n}")


# -- registry ---------------------------------------------------------------


def _searched_8_2() -> LinearCode:
    h = SEARCHED_8_2_H
    g = generator_from_parity(h)
    d = minimum_distance(g)
    return LinearCode(8, 2, (d - 1) // 2, h, g, d=d, name="searched-8-2")


_REGISTRY = {
    "hamming-7-4": lambda: hamming_code(3),
    "hamming-15-11": lambda: hamming_code(4),
    "hamming-31-26": lambda: hamming_code(5),
    "rm-32-16": lambda: reed_muller(2, 5),
    "searched-8-2": _searched_8_2,
    "short-hamming-21-16": lambda: shortened_hamming(5, 10),
}


# (measurement code, correction code) pairs used for encoded syndromes
ERROR_CORRECTION_PAIRS = (
    ("hamming-15-11", "hamming-7-4"),
    ("rm-32-16", "short-hamming-21-16"),
)


def registry_keys() -> list[str]:
    return list(_REGISTRY)


@lru_cache(maxsize=None)
def get_code(key: str) -> LinearCode:
    """Look up a registered code; ``identity-<n>`` gives the scanning baseline."""
    m = re.fullmatch(r"identity-(\d+)", key)
    if m:
        return identity_code(int(m.group(1)))
    try:
        return _REGISTRY[key]()
    except KeyError:
        raise KeyError(f"unknown code {key!r}; known: {', '.join(_REGISTRY)}") from None


def systematic_generator(code: LinearCode) -> BinMatrix:
    """Generator of ``code`` in standard form [I | P] (G_c role)."""
    if code.G is None:
        raise ValueError(f"{code.name} has no generator")
    # a column reordering only yields an equivalent code
    return standard_form(code.G)[0]
