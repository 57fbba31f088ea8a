"""Syndrome-to-channel mapping: exhaustive support search and look-up table."""

from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .gf2 import BinMatrix, lift_to_real

SUPPORT_CAP = 10**6
LUT_CAP = 10**6
COND_WARN = 1e8
# components below this fraction of ||u|| are treated as numerical zeros
REL_FLOOR = 1e-9


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class CapacityError(RuntimeError):
    pass


class SyndromeCollision(RuntimeError):
    pass


def pseudo_inverse(c: np.ndarray) -> np.ndarray:
    """Left inverse (C^T C)^-1 C^T of a full-column-rank real matrix."""
    c = np.atleast_2d(np.asarray(c, dtype=float))
    if c.shape[1] == 0:
        return np.zeros((0, c.shape[0]))
    if np.linalg.matrix_rank(c) < c.shape[1]:
        raise SingularMatrixError("C does not have full column rank")
    gram = c.T @ c
    if np.linalg.cond(gram) > COND_WARN:
        warnings.warn("ill-conditioned normal equations", RuntimeWarning, stacklevel=2)
    return np.linalg.solve(gram, c.T)


@dataclass(frozen=True)
class SupportCandidate:
    indices: tuple[int, ...]
    c_matrix: np.ndarray
    pinv: np.ndarray


@dataclass
class SparseEstimate:
    entries: list[tuple[int, complex]] = field(default_factory=list)
    residual: float = 0.0

    @property
    def support(self) -> list[int]:
        return [i for i, _ in self.entries]

    def dense(self, n: int) -> np.ndarray:
        q = np.zeros(n, dtype=complex)
        for i, g in self.entries:
            q[i] = g
        return q

    def __len__(self):
        return len(self.entries)


class SearchDecoder:
    """Precomputed projections for every size-L column subset of lift(H)."""

    def __init__(self, h: BinMatrix, L: int, cap: int = SUPPORT_CAP):
        m, n = h.shape
        if L < 0 or L > n:
            raise ValueError(f"L={L} invalid for n={n}")
        total = math.comb(n, L)
        if total > cap:
            raise CapacityError(f"C({n},{L})={total} supports exceed cap {cap}")
        self.h = h
        self.L = L
        self.n = n
        self.m = m
        hr = lift_to_real(h)
        self.supports = np.array(list(itertools.combinations(range(n), L)), dtype=int).reshape(total, L)
        c = hr[:, self.supports].transpose(1, 0, 2)  # (S, m, L)
        if L:
            if L > m:
                raise SingularMatrixError(f"L={L} columns cannot be independent in {m} rows")
            gram = np.einsum("sml,smk->slk", c, c)
            sv = np.linalg.svd(c, compute_uv=False)
            if np.any(sv[:, -1] < 1e-10 * sv[:, 0]):
                bad = self.supports[int(np.argmin(sv[:, -1] / sv[:, 0]))]
                raise SingularMatrixError(f"columns {tuple(bad)} of H are linearly dependent")
            if np.max((sv[:, 0] / sv[:, -1]) ** 2) > COND_WARN:
                warnings.warn("ill-conditioned support in decoder", RuntimeWarning, stacklevel=2)
            self.pinv = np.linalg.solve(gram, c.transpose(0, 2, 1))  # (S, L, m)
            self.basis = np.linalg.qr(c)[0]  # (S, m, L)
        else:
            self.pinv = np.zeros((1, 0, m))
            self.basis = np.zeros((1, m, 0))
        self.c = c
        # stacked basis rows so projections are a single matmul
        self._bt = self.basis.transpose(0, 2, 1).reshape(-1, m)

    def candidate(self, j: int) -> SupportCandidate:
        return SupportCandidate(tuple(int(i) for i in self.supports[j]), self.c[j], self.pinv[j])

    def residuals(self, u: np.ndarray) -> np.ndarray:
        """||beta_j - u||^2 for every support j; u is (m,) or (m, B)."""
        u = np.asarray(u, dtype=complex)
        s = len(self.supports)
        proj = (self._bt @ u).reshape((s, self.L) + u.shape[1:])
        return np.sum(np.abs(u) ** 2, axis=0) - np.sum(proj.real**2 + proj.imag**2, axis=1)

    def best(self, u: np.ndarray) -> np.ndarray:
        """Index of the minimizing support; near-ties go to the lowest index."""
        res = self.residuals(u)
        energy = np.sum(np.abs(np.asarray(u)) ** 2, axis=0)
        lo = res.min(axis=0)
        tied = res <= lo + 1e-9 * energy + 1e-300
        return np.argmax(tied, axis=0)

    def decode(self, u: np.ndarray, threshold: float = 0.0) -> SparseEstimate:
        u = np.asarray(u, dtype=complex).reshape(self.m)
        j = int(self.best(u))
        gains = self.pinv[j] @ u
        beta = self.c[j] @ gains
        floor = REL_FLOOR * np.linalg.norm(u)
        keep = (np.abs(gains) >= threshold) & (np.abs(gains) > floor)
        entries = [(int(i), complex(g)) for i, g, k in zip(self.supports[j], gains, keep) if k]
        return SparseEstimate(entries, float(np.linalg.norm(beta - u)))

    def decode_many(self, u: np.ndarray, threshold: float = 0.0, prune: bool = True) -> np.ndarray:
        """Decode each column of u (m, B); returns dense (n, B) estimates.

        With ``prune=False`` the least-squares gains on the chosen support are
        returned as is (only exact numerical zeros are dropped).
        """
        u = np.asarray(u, dtype=complex)
        j = self.best(u)
        b = np.arange(u.shape[1])
        gains = np.einsum("blm,mb->lb", self.pinv[j], u)
        floor = REL_FLOOR * np.linalg.norm(u, axis=0)
        gains[np.abs(gains) <= floor] = 0
        if prune:
            gains[np.abs(gains) < threshold] = 0
        out = np.zeros((self.n, u.shape[1]), dtype=complex)
        if self.L:
            out[self.supports[j].T, b[None, :]] = gains
        return out


@lru_cache(maxsize=64)
def get_decoder(h: BinMatrix, L: int) -> SearchDecoder:
    return SearchDecoder(h, L)


def search_decode(u_s, h: BinMatrix, L: int, threshold: float = 0.0) -> SparseEstimate:
    """Least-squares fit over all C(n, L) supports; keep the best one."""
    vals = getattr(u_s, "values", u_s)
    return get_decoder(h, L).decode(vals, threshold)


# -- look-up table ------------------------------------------------------------


@dataclass(frozen=True)
class LookupTable:
    h: BinMatrix
    syndromes: np.ndarray  # (N, m) complex
    channels: tuple[tuple[tuple[int, complex], ...], ...]

    def __len__(self):
        return len(self.channels)

    def to_csv(self) -> str:
        buf = io.StringIO()
        m, n = self.h.shape
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"y{i}" for i in range(m)] + ["support", "gains", "channel"])
        for syn, ch in zip(self.syndromes, self.channels):
            dense = np.zeros(n, dtype=complex)
            for i, g in ch:
                dense[i] = g
            writer.writerow(
                [_fmt(v) for v in syn]
                + [
                    " ".join(str(i) for i, _ in ch),
                    " ".join(_fmt(g) for _, g in ch),
                    " ".join(_fmt(v) for v in dense),
                ]
            )
        return buf.getvalue()


def _fmt(v: complex) -> str:
    v = complex(v)
    if abs(v.imag) < 1e-12:
        r = v.real
        return str(int(round(r))) if abs(r - round(r)) < 1e-12 else repr(r)
    return repr(v)


def lut_build(
    h: BinMatrix, gain_alphabet: Sequence[complex], L: int, cap: int = LUT_CAP
) -> LookupTable:
    """Tabulate the syndrome of every <=L-sparse channel over the alphabet."""
    m, n = h.shape
    alphabet = [complex(a) for a in gain_alphabet]
    if any(a == 0 for a in alphabet):
        raise ValueError("alphabet entries must be nonzero")
    size = sum(math.comb(n, t) * len(alphabet) ** t for t in range(L + 1))
    if size > cap:
        raise CapacityError(f"table would hold {size} entries (cap {cap})")
    hr = lift_to_real(h)
    syndromes = np.zeros((size, m), dtype=complex)
    channels = []
    row = 0
    for t in range(L + 1):
        for support in itertools.combinations(range(n), t):
            cols = hr[:, list(support)]
            for gains in itertools.product(alphabet, repeat=t):
                syndromes[row] = cols @ np.array(gains, dtype=complex) if t else 0
                channels.append(tuple(zip(support, gains)))
                row += 1
    _check_distinct(syndromes)
    return LookupTable(h, syndromes, tuple(channels))


def _check_distinct(syndromes: np.ndarray, tol: float = 1e-9) -> None:
    pts = np.hstack([syndromes.real, syndromes.imag])
    pairs = cKDTree(pts).query_pairs(r=tol)
    if pairs:
        i, j = min(pairs)
        raise SyndromeCollision(f"table entries {i} and {j} share a syndrome")


def lut_decode(u_s, table: LookupTable) -> SparseEstimate:
    """Nearest table syndrome in l2 distance; first-inserted wins ties."""
    if len(table) == 0:
        raise ValueError("empty table")
    u = np.asarray(getattr(u_s, "values", u_s), dtype=complex)
    dist = np.linalg.norm(table.syndromes - u[None, :], axis=1)
    k = int(np.argmin(dist))
    return SparseEstimate([(int(i), g) for i, g in table.channels[k]], float(dist[k]))


def syndromes_distinct(h: BinMatrix, gain_alphabet: Iterable[complex], L: int) -> bool:
    try:
        lut_build(h, list(gain_alphabet), L)
    except SyndromeCollision:
        return False
    return True
