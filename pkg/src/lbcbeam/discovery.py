"""Two-sided beam discovery: precoder sweep, RX decoding, then TX decoding per RX bin."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import AngularChannel, ArrayGeometry, ChannelMatrix, dft_matrix
from .codes import LinearCode, encoded_parity, get_code, registry_keys, systematic_generator
from .gf2 import BinMatrix
from .mapping import REL_FLOOR, SparseEstimate, get_decoder, search_decode
from .measurement import Beamformer, QuantizerSpec, acquire_block, acquire_syndrome


class PlanError(ValueError):
    pass


class NoSuitableCode(PlanError):
    pass


class CapabilityTooLow(PlanError):
    pass


@dataclass(frozen=True)
class DiscoveryPlan:
    rx_code: LinearCode
    tx_code: LinearCode
    rx_rows: BinMatrix
    tx_rows: BinMatrix
    L: int
    error_correction: Optional[tuple[BinMatrix, BinMatrix]] = None

    @property
    def n_r(self) -> int:
        return self.rx_rows.cols

    @property
    def n_t(self) -> int:
        return self.tx_rows.cols

    @property
    def m1(self) -> int:
        return self.rx_rows.rows

    @property
    def m2(self) -> int:
        return self.tx_rows.rows

    @property
    def measurement_count(self) -> int:
        return self.m1 * self.m2

    def rx_arm_counts(self) -> list[int]:
        return [self.rx_rows.row_weight(i) for i in range(self.m1)]

    def tx_arm_counts(self) -> list[int]:
        return [self.tx_rows.row_weight(j) for j in range(self.m2)]


@dataclass
class DiscoveryResult:
    q_hat: AngularChannel
    measurement_count: int
    energy: float
    per_precoder_channels: np.ndarray  # (n_r, m2): column j is q^a(j)
    threshold: float

    def to_record(self) -> dict:
        return {
            "estimate": self.q_hat.to_record(),
            "measurement_count": self.measurement_count,
            "energy": self.energy,
            "threshold": self.threshold,
        }


def _pick_code(n: int, L: int) -> LinearCode:
    best = None
    for key in registry_keys():
        code = get_code(key)
        if code.n == n and code.e_n >= L and (best is None or code.m < best.m):
            best = code
    if best is None:
        raise NoSuitableCode(f"no registered code with n={n} and e_n>={L}")
    return best


def _resolve(key: Optional[str], n: int, L: int, side: str) -> LinearCode:
    if key is None:
        return _pick_code(n, L)
    try:
        code = get_code(key)
    except KeyError as exc:
        raise NoSuitableCode(str(exc)) from None
    if code.n != n:
        raise NoSuitableCode(f"{side} code {key} has n={code.n}, need {n}")
    if code.e_n < L:
        raise CapabilityTooLow(f"{side} code {key} corrects {code.e_n} < L={L}")
    return code


def plan(
    n_t: int,
    n_r: int,
    L: int,
    code_keys: Sequence[Optional[str]] | str | None = None,
    error_correction_keys: Sequence[Optional[str]] | str | None = None,
) -> DiscoveryPlan:
    """Validate a code pair (RX, TX) and derive the acquisition rows."""
    if isinstance(code_keys, str) or code_keys is None:
        code_keys = (code_keys, code_keys)
    rx = _resolve(code_keys[0], n_r, L, "rx")
    tx = _resolve(code_keys[1], n_t, L, "tx")
    rx_rows, tx_rows = rx.H, tx.H
    ec = None
    if error_correction_keys is not None:
        if isinstance(error_correction_keys, str):
            error_correction_keys = (error_correction_keys, error_correction_keys)
        gcs = []
        for key, code, side in zip(error_correction_keys, (rx, tx), ("rx", "tx")):
            if key is None:
                gcs.append(BinMatrix.identity(code.m))
                continue
            g_c = systematic_generator(get_code(key))
            if g_c.rows != code.m:
                raise PlanError(f"{side} correction code {key} encodes {g_c.rows} symbols, need {code.m}")
            gcs.append(g_c)
        rx_rows = encoded_parity(rx.H, gcs[0])
        tx_rows = encoded_parity(tx.H, gcs[1])
        ec = (gcs[0], gcs[1])
    for rows, side in ((rx_rows, "rx"), (tx_rows, "tx")):
        if any(r == 0 for r in rows.bits):
            raise PlanError(f"{side} acquisition matrix has an all-zero row")
    return DiscoveryPlan(rx, tx, rx_rows, tx_rows, L, ec)


def default_threshold(
    plan: DiscoveryPlan, p: float, n0: float, sigma: float = 3.0, noise_model: str = "combined"
) -> float:
    """sigma times the per-measurement noise std, in channel-gain units."""
    w2 = max(plan.rx_arm_counts()) if noise_model == "combined" else 1
    return sigma * np.sqrt(n0 * w2 / p)


def energy_of(
    plan: DiscoveryPlan, p: float, tx_rows: BinMatrix | None = None, count_rx_arms: bool = False
) -> float:
    """Total pilot energy with tau = 1: each transmit arm carries power P."""
    tx_rows = plan.tx_rows if tx_rows is None else tx_rows
    tx_w = np.array([tx_rows.row_weight(j) for j in range(tx_rows.rows)], dtype=float)
    if count_rx_arms:
        rx_total = float(sum(plan.rx_arm_counts()))
    else:
        rx_total = float(plan.m1)
    return float(rx_total * p * tx_w.sum())


def normalized_energy(energy: float, n0: float, min_amplitude: float) -> float:
    """E / N0 * |alpha_min / mu|^2."""
    return energy / n0 * min_amplitude**2


def discover(
    q: ChannelMatrix,
    plan: DiscoveryPlan,
    p: float,
    n0: float,
    spec: QuantizerSpec,
    rng: np.random.Generator | None = None,
    threshold: float | None = None,
    count_rx_arms: bool = False,
    noise_model: str = "combined",
    prune_stage1: bool = False,
) -> DiscoveryResult:
    if q.entries.shape != (plan.n_r, plan.n_t):
        raise ValueError(f"channel is {q.entries.shape}, plan expects {(plan.n_r, plan.n_t)}")
    if threshold is None:
        threshold = default_threshold(plan, p, n0, noise_model=noise_model)
    u_r = dft_matrix(ArrayGeometry(plan.n_r))
    u_t = dft_matrix(ArrayGeometry(plan.n_t))
    s = np.sqrt(p)
    y = acquire_block(q, plan.rx_rows, plan.tx_rows, u_r, u_t, s, n0, spec, rng, noise_model) / s

    # stage 1: one RX syndrome per precoder. Gains are kept unpruned so that a
    # weak path near the threshold still yields a consistent TX syndrome; the
    # threshold only gates which RX bins go on to stage 2.
    per_precoder = get_decoder(plan.rx_rows, plan.L).decode_many(y, threshold, prune=prune_stage1)

    # stage 2: TX syndromes, decoded only for RX bins that saw something
    mags = np.abs(per_precoder)
    floor = REL_FLOOR * max(np.linalg.norm(y), 1e-300)
    active = np.flatnonzero(np.any((mags >= threshold) & (mags > floor), axis=1))
    qa_hat = np.zeros((plan.n_r, plan.n_t), dtype=complex)
    if active.size:
        rows = get_decoder(plan.tx_rows, plan.L).decode_many(per_precoder[active].T, threshold)
        qa_hat[active] = rows.T
    est = AngularChannel.from_dense(qa_hat)
    return DiscoveryResult(
        est,
        plan.measurement_count,
        energy_of(plan, p, count_rx_arms=count_rx_arms),
        per_precoder,
        float(threshold),
    )


def single_rx_discover(
    q: ChannelMatrix,
    rx_rows: BinMatrix,
    L: int,
    p: float = 1.0,
    n0: float = 0.0,
    spec: QuantizerSpec | None = None,
    rng: np.random.Generator | None = None,
    threshold: float | None = None,
) -> SparseEstimate:
    """n_r x 1 special case: no precoding (f = 1), one syndrome of m1 entries."""
    spec = QuantizerSpec.perfect() if spec is None else spec
    n_r = rx_rows.cols
    if q.entries.shape != (n_r, 1):
        raise ValueError("expected an n_r x 1 channel")
    if threshold is None:
        weights = [rx_rows.row_weight(i) for i in range(rx_rows.rows)]
        threshold = 3.0 * np.sqrt(n0 * max(weights) / p)
    u_r = dft_matrix(ArrayGeometry(n_r))
    s = np.sqrt(p)
    f = Beamformer(np.ones(1, dtype=complex), 1)
    syn = acquire_syndrome(q, rx_rows, u_r, f, s, n0, spec, rng)
    return search_decode(syn.values / s, rx_rows, L, threshold)
