"""Angular-domain channel model for uniform linear arrays."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    n: int
    delta: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def l_norm(self) -> float:
        return self.n * self.delta


@dataclass(frozen=True)
class PathCluster:
    tx_bin: int
    rx_bin: int
    gain: complex


@dataclass(frozen=True)
class AngularChannel:
    """Sparse Q^a: rows are RX bins, columns TX bins."""

    n_r: int
    n_t: int
    clusters: tuple[PathCluster, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        seen = set()
        for c in self.clusters:
            if not (0 <= c.rx_bin < self.n_r and 0 <= c.tx_bin < self.n_t):
                raise ValueError(f"cluster {c} out of range")
            key = (c.rx_bin, c.tx_bin)
            if key in seen:
                raise ValueError(f"duplicate bin pair {key}")
            if c.gain == 0:
                raise ValueError("stored clusters must have nonzero gain")
            seen.add(key)

    @classmethod
    def from_dense(cls, qa: np.ndarray, tol: float = 0.0) -> "AngularChannel":
        qa = np.atleast_2d(qa)
        rx, tx = np.nonzero(np.abs(qa) > tol)
        clusters = [PathCluster(int(t), int(r), complex(qa[r, t])) for r, t in zip(rx, tx)]
        return cls(qa.shape[0], qa.shape[1], tuple(clusters))

    def dense(self) -> np.ndarray:
        qa = np.zeros((self.n_r, self.n_t), dtype=complex)
        for c in self.clusters:
            qa[c.rx_bin, c.tx_bin] = c.gain
        return qa

    @property
    def support(self) -> frozenset[tuple[int, int]]:
        """Set of (tx_bin, rx_bin) pairs."""
        return frozenset((c.tx_bin, c.rx_bin) for c in self.clusters)

    def __len__(self):
        return len(self.clusters)

    def to_record(self) -> dict:
        return {
            "n_r": self.n_r,
            "n_t": self.n_t,
            "clusters": [
                [c.tx_bin, c.rx_bin, float(np.real(c.gain)), float(np.imag(c.gain))]
                for c in self.clusters
            ],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "AngularChannel":
        return cls(
            rec["n_r"],
            rec["n_t"],
            tuple(PathCluster(int(t), int(r), complex(re, im)) for t, r, re, im in rec["clusters"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_record())


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray


def spatial_signature(omega: float, geom: ArrayGeometry) -> np.ndarray:
    p = np.arange(geom.n)
    return np.exp(-2j * np.pi * p * geom.delta * omega) / np.sqrt(geom.n)


def dft_matrix(geom: ArrayGeometry) -> np.ndarray:
    """Columns are spatial signatures at omega = i / l_norm."""
    p = np.arange(geom.n)[:, None]
    i = np.arange(geom.n)[None, :]
    return np.exp(-2j * np.pi * p * geom.delta * i / geom.l_norm) / np.sqrt(geom.n)


def sample_channel(
    rng: np.random.Generator,
    n_t: int,
    n_r: int,
    L: int,
    loss_window_db: float = 14.0,
    *,
    ref_amplitude: float = 1.0,
    presence: float | None = None,
) -> AngularChannel:
    """Draw L clusters on distinct RX and distinct TX bins.

    Magnitudes are ``ref_amplitude * 10**(-x/20)`` with ``x`` uniform in
    ``[0, loss_window_db]``; phases are uniform. With ``presence`` set, each
    of the L slots is kept independently with that probability.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    if L > min(n_t, n_r):
        raise ValueError(f"L={L} too large for distinct bins in a {n_r}x{n_t} channel")
    rx = rng.choice(n_r, size=L, replace=False)
    tx = rng.choice(n_t, size=L, replace=False)
    loss = rng.uniform(0.0, loss_window_db, size=L)
    phase = rng.uniform(0.0, 2 * np.pi, size=L)
    keep = np.ones(L, dtype=bool) if presence is None else rng.random(L) < presence
    gains = ref_amplitude * 10 ** (-loss / 20) * np.exp(1j * phase)
    clusters = tuple(
        PathCluster(int(t), int(r), complex(g)) for t, r, g, k in zip(tx, rx, gains, keep) if k
    )
    return AngularChannel(n_r, n_t, clusters)


def to_physical(a: AngularChannel, u_r: np.ndarray, u_t: np.ndarray) -> ChannelMatrix:
    if u_r.shape != (a.n_r, a.n_r) or u_t.shape != (a.n_t, a.n_t):
        raise ValueError("DFT matrices do not match channel dimensions")
    return ChannelMatrix(u_r @ a.dense() @ u_t.conj().T)


def to_angular(q: ChannelMatrix, u_r: np.ndarray, u_t: np.ndarray) -> np.ndarray:
    return u_r.conj().T @ q.entries @ u_t


def snr_per_path(p: float, n0: float, gain: complex) -> float:
    if p <= 0 or n0 <= 0:
        raise ValueError("P and N0 must be positive")
    return p / n0 * abs(gain) ** 2


def db2lin(x):
    return 10 ** (np.asarray(x, dtype=float) / 10)


def lin2db(x):
    return 10 * np.log10(x)


def dbm2watt(x):
    return 10 ** ((np.asarray(x, dtype=float) - 30) / 10)
