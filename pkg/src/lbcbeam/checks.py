"""Invariant suites shared by the ``verify`` subcommand and the tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, dft_matrix, sample_channel, to_physical
from .codes import (
    ERROR_CORRECTION_PAIRS,
    PatternCapExceeded,
    encoded_parity,
    get_code,
    registry_keys,
    systematic_generator,
    verify_correction,
)
from .discovery import discover, plan
from .gf2 import BinMatrix, lift_to_real, rank_gf2
from .harness import score
from .measurement import QuantizerSpec

# (n, L, code key, correction key or None)
SCENARIOS = (
    (15, 1, "hamming-15-11", None),
    (15, 1, "hamming-15-11", "hamming-7-4"),
    (8, 2, "searched-8-2", None),
    (32, 3, "rm-32-16", None),
    (32, 3, "rm-32-16", "short-hamming-21-16"),
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def check_codes() -> list[CheckResult]:
    out = []
    for key in registry_keys():
        code = get_code(key)
        try:
            ok = verify_correction(code.H, code.e_n)
            detail = f"{code} verified"
        except PatternCapExceeded as exc:
            ok, detail = True, f"skipped: {exc}"
        out.append(CheckResult(f"correction {key}", ok, detail))
    return out


def columns_independent(h: BinMatrix, size: int) -> bool:
    """Every ``size`` columns are independent over GF(2) and, lifted, over the reals."""
    hr = lift_to_real(h)
    for sup in itertools.combinations(range(h.cols), size):
        if rank_gf2(h.select_columns(sup)) < size:
            return False
        if np.linalg.matrix_rank(hr[:, list(sup)]) < size:
            return False
    return True


def real_rank_dominates(h: BinMatrix, rng: np.random.Generator, trials: int = 200) -> bool:
    """GF(2)-independent column subsets stay independent after lifting."""
    hr = lift_to_real(h)
    for _ in range(trials):
        size = int(rng.integers(1, min(h.rows, h.cols) + 1))
        sup = sorted(rng.choice(h.cols, size=size, replace=False).tolist())
        if np.linalg.matrix_rank(hr[:, sup]) < rank_gf2(h.select_columns(sup)):
            return False
    return True


def check_ranks(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    mats = [(k, get_code(k).H, get_code(k).e_n) for k in registry_keys()]
    for key, ec in ERROR_CORRECTION_PAIRS:
        code = get_code(key)
        mats.append((f"{key}+{ec}", encoded_parity(code.H, systematic_generator(get_code(ec))), code.e_n))
    for name, h, e in mats:
        ok = columns_independent(h, e) and real_rank_dominates(h, rng)
        out.append(CheckResult(f"rank {name}", ok))
    return out


def gram_identity(h: BinMatrix, g_c: BinMatrix) -> bool:
    """lift(H_nu)^T lift(H_nu) - lift(H)^T lift(H) == P_m^T P_m with P_m = P^T H mod 2."""
    m = h.rows
    if g_c.to_array()[:, :m].tolist() != np.eye(m, dtype=int).tolist():
        raise ValueError("G_c is not in standard form")
    hv = lift_to_real(encoded_parity(h, g_c))
    hr = lift_to_real(h)
    p = BinMatrix.from_array(g_c.to_array()[:, m:])
    pm = lift_to_real(encoded_parity(h, p))
    return bool(np.array_equal(hv.T @ hv - hr.T @ hr, pm.T @ pm))


def distance_never_shrinks(h: BinMatrix, g_c: BinMatrix, rng: np.random.Generator, count: int) -> bool:
    hr = lift_to_real(h)
    hv = lift_to_real(encoded_parity(h, g_c))
    v = rng.standard_normal((h.cols, count)) + 1j * rng.standard_normal((h.cols, count))
    a = np.linalg.norm(hv @ v, axis=0)
    b = np.linalg.norm(hr @ v, axis=0)
    return bool(np.all(a >= b * (1 - 1e-12)))


def check_gram(count: int = 10_000, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for key, ec in ERROR_CORRECTION_PAIRS:
        h = get_code(key).H
        g_c = systematic_generator(get_code(ec))
        ok = gram_identity(h, g_c) and distance_never_shrinks(h, g_c, rng, count)
        out.append(CheckResult(f"encoded distance {key}+{ec}", ok))
    return out


def noiseless_trials(n: int, L: int, key: str, ec, trials: int, seed: int = 0) -> tuple[int, float]:
    """Returns (failures, worst relative error) over ``trials`` noiseless runs."""
    pl = plan(n, n, L, key, ec)
    u = dft_matrix(ArrayGeometry(n))
    spec = QuantizerSpec.perfect()
    bad, worst = 0, 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        truth = sample_channel(rng, n, n, L, ref_amplitude=np.sqrt(n * n))
        res = discover(to_physical(truth, u, u), pl, 1.0, 0.0, spec)
        est = res.q_hat.dense()
        q = truth.dense()
        rel = float(np.linalg.norm(est - q) / np.linalg.norm(q))
        worst = max(worst, rel)
        s = score(truth, res.q_hat, L)
        if rel >= 1e-6 or s.incorrect or not all(s.perfect_k):
            bad += 1
    return bad, worst


def check_noiseless(trials: int = 1000, seed: int = 0) -> list[CheckResult]:
    out = []
    for n, L, key, ec in SCENARIOS:
        bad, worst = noiseless_trials(n, L, key, ec, trials, seed)
        label = f"noiseless {n}x{n} L={L} {key}" + (f"+{ec}" if ec else "")
        out.append(CheckResult(label, bad == 0, f"{bad} failures, max rel err {worst:.1e}"))
    return out


def run_all(trials: int = 1000) -> list[CheckResult]:
    return check_codes() + check_ranks() + check_gram() + check_noiseless(trials)
