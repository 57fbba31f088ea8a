"""Multi-armed beamformers built from parity-check rows, and syndrome acquisition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channel import ChannelMatrix
from .codes import encoded_parity
from .gf2 import BinMatrix, lift_to_real


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray
    arm_count: int


@dataclass(frozen=True)
class QuantizerSpec:
    """Mid-tread ADC with 2**b + 1 levels per I/Q rail."""

    b: int = 8
    full_scale: float = 1.0
    enabled: bool = True

    def __post_init__(self):
        if self.enabled:
            if self.b < 1:
                raise ValueError("b must be >= 1")
            if self.full_scale <= 0:
                raise ValueError("full_scale must be positive")

    @classmethod
    def perfect(cls) -> "QuantizerSpec":
        return cls(b=0, full_scale=1.0, enabled=False)

    @property
    def max_level(self) -> int:
        return 2 ** (self.b - 1)

    @property
    def step(self) -> float:
        return self.full_scale / self.max_level


@dataclass(frozen=True)
class Syndrome:
    values: np.ndarray
    kind: Literal["ideal", "observed"] = "observed"

    def __len__(self):
        return len(self.values)


def _row_bits(h_row) -> np.ndarray:
    a = np.asarray(h_row)
    if not np.all((a == 0) | (a == 1)):
        raise ValueError("row must be 0/1")
    return a.astype(float)


def combiner_from_row(h_row, u: np.ndarray) -> Beamformer:
    """Sum of the DFT columns selected by a parity-check row."""
    h = _row_bits(h_row)
    if h.shape[0] != u.shape[1]:
        raise ValueError(f"row length {h.shape[0]} != {u.shape[1]} directions")
    arms = int(h.sum())
    if arms == 0:
        raise ValueError("all-zero row: a measurement must combine at least one direction")
    return Beamformer(u @ h, arms)


def beamformers(rows: BinMatrix, u: np.ndarray) -> list[Beamformer]:
    return [combiner_from_row(r, u) for r in rows.to_array()]


def measure(
    q: ChannelMatrix,
    w: Beamformer,
    f: Beamformer,
    s: complex,
    n0: float,
    rng: np.random.Generator | None = None,
) -> complex:
    """One unquantized measurement w^H Q f s + w^H n with n ~ CN(0, N0 I)."""
    qm = q.entries
    if qm.shape != (w.weights.shape[0], f.weights.shape[0]):
        raise ValueError("beamformer sizes do not match the channel")
    y = w.weights.conj() @ qm @ f.weights * s
    if n0 > 0:
        if rng is None:
            raise ValueError("rng required when N0 > 0")
        n_r = qm.shape[0]
        n = np.sqrt(n0 / 2) * (rng.standard_normal(n_r) + 1j * rng.standard_normal(n_r))
        y = y + w.weights.conj() @ n
    return complex(y)


def quantize_midtread(u, spec: QuantizerSpec):
    """Round each rail to the nearest level and clamp; returns amplitudes."""
    if not spec.enabled:
        return u
    arr = np.asarray(u)
    top = spec.max_level

    def rail(x):
        return np.clip(np.round(x / spec.step), -top, top) * spec.step

    out = rail(arr.real) + 1j * rail(arr.imag)
    return complex(out) if np.ndim(u) == 0 else out


def acquire_syndrome(
    q: ChannelMatrix,
    rows: BinMatrix,
    u_rx: np.ndarray,
    f: Beamformer,
    s: complex,
    n0: float,
    spec: QuantizerSpec,
    rng: np.random.Generator | None = None,
) -> Syndrome:
    vals = [
        quantize_midtread(measure(q, combiner_from_row(r, u_rx), f, s, n0, rng), spec)
        for r in rows.to_array()
    ]
    return Syndrome(np.array(vals, dtype=complex), "observed")


def acquire_block(
    q: ChannelMatrix,
    rx_rows: BinMatrix,
    tx_rows: BinMatrix,
    u_rx: np.ndarray,
    u_tx: np.ndarray,
    s: complex,
    n0: float,
    spec: QuantizerSpec,
    rng: np.random.Generator | None = None,
    noise_model: str = "combined",
) -> np.ndarray:
    """All m1 x m2 measurements at once; column j is the syndrome under precoder j.

    With ``noise_model="combined"`` each entry has the distribution of
    :func:`measure`: w_i^H n is drawn directly as CN(0, ||w_i||^2 N0),
    independently per slot. ``"normalized"`` draws CN(0, N0) instead, i.e.
    the noise term (w_i / ||w_i||)^H n with the signal left unscaled.
    """
    h1 = lift_to_real(rx_rows)
    h2 = lift_to_real(tx_rows)
    if np.any(h1.sum(axis=1) == 0) or np.any(h2.sum(axis=1) == 0):
        raise ValueError("all-zero measurement row")
    w = u_rx @ h1.T
    f = u_tx @ h2.T
    y = w.conj().T @ q.entries @ f * s
    if n0 > 0:
        if rng is None:
            raise ValueError("rng required when N0 > 0")
        if noise_model == "combined":
            var = n0 * np.sum(np.abs(w) ** 2, axis=0)
        elif noise_model == "normalized":
            var = np.full(w.shape[1], float(n0))
        else:
            raise ValueError(f"unknown noise model {noise_model!r}")
        sigma = np.sqrt(var / 2)[:, None]
        y = y + sigma * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return quantize_midtread(y, spec)


def ideal_syndrome(rows: BinMatrix, qa: np.ndarray) -> Syndrome:
    return Syndrome(lift_to_real(rows) @ qa, "ideal")


def encoded_measurement_rows(h: BinMatrix, g_c: BinMatrix) -> BinMatrix:
    return encoded_parity(h, g_c)


def beam_pattern(w: Beamformer, geom_delta: float = 0.5, n_points: int = 721):
    """|w^H e(omega)| sampled over omega in [-1, 1] (debug helper)."""
    n = w.weights.shape[0]
    omega = np.linspace(-1.0, 1.0, n_points)
    p = np.arange(n)[:, None]
    e = np.exp(-2j * np.pi * p * geom_delta * omega[None, :]) / np.sqrt(n)
    return omega, np.abs(w.weights.conj() @ e)
