"""Monte Carlo runner: scenario config, per-trial scoring, aggregation and export."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import AngularChannel, ArrayGeometry, dbm2watt, dft_matrix, sample_channel, to_physical
from .discovery import DiscoveryPlan, default_threshold, discover, energy_of, normalized_energy, plan
from .measurement import QuantizerSpec

METRICS = ("perfect", "all", "p_incorrect", "mean_incorrect", "max_incorrect", "nmse", "m")


@dataclass(frozen=True)
class ScenarioConfig:
    n_t: int = 15
    n_r: int = 15
    L: int = 1
    rx_code: Optional[str] = None
    tx_code: Optional[str] = None
    rx_ec: Optional[str] = None
    tx_ec: Optional[str] = None
    snr_db: tuple[float, ...] = (-10.0,)
    adc_bits: Optional[int] = None  # None = perfect ADC
    full_scale: Optional[float] = None
    runs: int = 10_000
    seed: int = 0
    n0_dbm: float = -95.0
    mu_db: float = 136.0
    window_db: float = 14.0
    metrics: tuple[str, ...] = METRICS
    noise_model: str = "normalized"
    threshold_sigma: float = 3.0
    # fraction of the weakest admissible path amplitude used as a threshold floor
    threshold_floor: float = 0.5
    count_rx_arms: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.snr_db:
            raise ValueError("SNR grid is empty")
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ValueError(f"unknown metrics {sorted(bad)}")
        if self.noise_model not in ("combined", "normalized"):
            raise ValueError(f"unknown noise model {self.noise_model!r}")

    def make_plan(self) -> DiscoveryPlan:
        ec = None
        if self.rx_ec is not None or self.tx_ec is not None:
            ec = (self.rx_ec, self.tx_ec)
        return plan(self.n_t, self.n_r, self.L, (self.rx_code, self.tx_code), ec)

    @property
    def n0(self) -> float:
        return float(dbm2watt(self.n0_dbm))

    @property
    def alpha_min(self) -> float:
        """|alpha_min / mu| at the bottom of the loss window (no array gain)."""
        return 10 ** (-(self.mu_db + self.window_db / 2) / 20)

    @property
    def alpha_max(self) -> float:
        return 10 ** (-(self.mu_db - self.window_db / 2) / 20)

    @property
    def array_gain(self) -> float:
        return math.sqrt(self.n_t * self.n_r)

    def power(self, snr_db: float) -> float:
        """Per-path transmit power P that puts the weakest admissible path at snr_db."""
        return 10 ** (snr_db / 10) * self.n0 / self.alpha_min**2

    def quantizer(self, p: float, pl: DiscoveryPlan) -> QuantizerSpec:
        if self.adc_bits is None:
            return QuantizerSpec.perfect()
        fs = self.full_scale
        if fs is None:
            w = max(max(pl.rx_arm_counts()), max(pl.tx_arm_counts()))
            fs = w * self.array_gain * self.alpha_max * math.sqrt(p)
        return QuantizerSpec(self.adc_bits, fs)

    def threshold(self, p: float, pl: DiscoveryPlan) -> float:
        t = default_threshold(pl, p, self.n0, self.threshold_sigma, self.noise_model)
        return max(t, self.threshold_floor * self.array_gain * self.alpha_min)


_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _convert(key: str, raw: str):
    t = _TYPES[key]
    raw = raw.strip()
    if "Optional" in t:
        if raw.lower() in ("", "none", "perfect"):
            return None
        t = t.replace("Optional[", "")[:-1]
    if t.startswith("tuple"):
        inner = float if "float" in t else str
        return tuple(inner(x.strip()) for x in raw.split(",") if x.strip())
    if t == "bool":
        return raw.lower() in ("1", "true", "yes", "on")
    return {"int": int, "float": float, "str": str}[t](raw)


def parse_config(text: str) -> ScenarioConfig:
    """Flat ``key = value`` text; ``#`` starts a comment, lists are comma-separated."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[scenario]\n" + text)
    kw = {}
    for key, raw in cp["scenario"].items():
        if key not in _TYPES:
            raise ValueError(f"unknown config key {key!r}")
        kw[key] = _convert(key, raw)
    return ScenarioConfig(**kw)


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config(fh.read())


# -- scoring -----------------------------------------------------------------


@dataclass(frozen=True)
class TrialScore:
    all_k: tuple[bool, ...]
    perfect_k: tuple[bool, ...]
    incorrect: int


def score(truth: AngularChannel, estimate: AngularChannel, k: int) -> TrialScore:
    """Success flags for k' = 1..k and the number of spurious estimated bins."""
    if (truth.n_r, truth.n_t) != (estimate.n_r, estimate.n_t):
        raise ValueError("dimension mismatch")
    ranked = sorted(truth.clusters, key=lambda c: -abs(c.gain))
    est = estimate.support
    incorrect = len(est - truth.support)
    all_k = []
    for kk in range(1, k + 1):
        want = ranked[:kk]
        all_k.append(bool(want) and all((c.tx_bin, c.rx_bin) in est for c in want))
    perfect = tuple(a and incorrect == 0 for a in all_k)
    return TrialScore(tuple(all_k), perfect, incorrect)


def normalized_mse(truth, estimate) -> float:
    t = truth.dense() if isinstance(truth, AngularChannel) else np.asarray(truth)
    e = estimate.dense() if isinstance(estimate, AngularChannel) else np.asarray(estimate)
    den = np.sum(np.abs(t) ** 2)
    if den == 0:
        raise ZeroDivisionError("normalized MSE undefined for an all-zero channel")
    return float(np.sum(np.abs(t - e) ** 2) / den)


# -- runner ------------------------------------------------------------------


@dataclass
class MetricsRecord:
    snr_db: float
    e_t_db: float
    measurement_count: int
    runs: int
    p_err_perfect: list[float] = field(default_factory=list)
    p_err_all: list[float] = field(default_factory=list)
    mean_incorrect: float = 0.0
    max_incorrect: int = 0
    p_incorrect: float = 0.0
    nmse: float = float("nan")
    nmse_excluded: int = 0


def _trials(cfg: ScenarioConfig, snr_idx: int, start: int, stop: int) -> np.ndarray:
    """Rows of [all_1..all_L, perfect_1..perfect_L, incorrect, nmse] (nmse NaN if excluded)."""
    pl = cfg.make_plan()
    p = cfg.power(cfg.snr_db[snr_idx])
    spec = cfg.quantizer(p, pl)
    thr = cfg.threshold(p, pl)
    u_r = dft_matrix(ArrayGeometry(cfg.n_r))
    u_t = dft_matrix(ArrayGeometry(cfg.n_t))
    ref = cfg.array_gain * cfg.alpha_max
    out = np.zeros((stop - start, 2 * cfg.L + 2))
    for row, t in enumerate(range(start, stop)):
        rng = np.random.default_rng([cfg.seed, snr_idx, t])
        truth = sample_channel(rng, cfg.n_t, cfg.n_r, cfg.L, cfg.window_db, ref_amplitude=ref)
        q = to_physical(truth, u_r, u_t)
        res = discover(q, pl, p, cfg.n0, spec, rng, threshold=thr, noise_model=cfg.noise_model)
        s = score(truth, res.q_hat, cfg.L)
        try:
            mse = normalized_mse(truth, res.q_hat)
        except ZeroDivisionError:
            mse = np.nan
        out[row] = [*s.all_k, *s.perfect_k, s.incorrect, mse]
    return out


def _chunks(runs: int, parts: int):
    step = max(1, math.ceil(runs / parts))
    return [(a, min(a + step, runs)) for a in range(0, runs, step)]


def run_scenario(cfg: ScenarioConfig) -> list[MetricsRecord]:
    pl = cfg.make_plan()  # surfaces plan errors before any trial
    L = cfg.L
    records = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for i, snr in enumerate(cfg.snr_db):
            if pool is None:
                rows = _trials(cfg, i, 0, cfg.runs)
            else:
                jobs = [pool.submit(_trials, cfg, i, a, b) for a, b in _chunks(cfg.runs, 4 * cfg.workers)]
                rows = np.vstack([j.result() for j in jobs])
            p = cfg.power(snr)
            energy = energy_of(pl, p, count_rx_arms=cfg.count_rx_arms)
            e_t = normalized_energy(energy, cfg.n0, cfg.alpha_min)
            inc = rows[:, 2 * L]
            mse = rows[:, 2 * L + 1]
            ok = ~np.isnan(mse)
            records.append(
                MetricsRecord(
                    snr_db=float(snr),
                    e_t_db=float(10 * np.log10(e_t)),
                    measurement_count=pl.measurement_count,
                    runs=cfg.runs,
                    p_err_perfect=[float(np.sum(rows[:, L + k] == 0) / cfg.runs) for k in range(L)],
                    p_err_all=[float(np.sum(rows[:, k] == 0) / cfg.runs) for k in range(L)],
                    mean_incorrect=float(inc.mean()),
                    max_incorrect=int(inc.max()),
                    p_incorrect=float(np.mean(inc > 0)),
                    nmse=float(mse[ok].mean()) if ok.any() else float("nan"),
                    nmse_excluded=int((~ok).sum()),
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return records


# -- export ------------------------------------------------------------------

def _finite(d: dict) -> dict:
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}


CSV_HEADER = ["snr_db", "e_t_db", "metric", "k", "value"]


def _csv_rows(rec: MetricsRecord, metrics):
    base = [repr(rec.snr_db), repr(rec.e_t_db)]
    for name in metrics:
        if name == "perfect":
            for k, v in enumerate(rec.p_err_perfect, 1):
                yield base + ["p_err_perfect", k, repr(v)]
        elif name == "all":
            for k, v in enumerate(rec.p_err_all, 1):
                yield base + ["p_err_all", k, repr(v)]
        elif name == "m":
            yield base + ["measurement_count", "", rec.measurement_count]
        else:
            yield base + [name, "", repr(getattr(rec, name))]


def emit(records, fmt: str = "csv", cfg: Optional[ScenarioConfig] = None) -> str:
    """Serialize records as CSV (one row per SNR point and metric) or JSON."""
    metrics = cfg.metrics if cfg is not None else METRICS
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec in records:
            w.writerows(_csv_rows(rec, metrics))
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "config": dataclasses.asdict(cfg) if cfg is not None else None,
            "seed": cfg.seed if cfg is not None else None,
            "records": [_finite(dataclasses.asdict(r)) for r in records],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
