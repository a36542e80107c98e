"""Monte-Carlo symbol-error-rate estimation.

Trials run in fixed-size batches.  Batch ``i`` of point ``point_id`` draws
from ``SeedSequence(seed, spawn_key=(point_id, i))``, and the stopping rule
is applied to batches in index order, so the estimate does not depend on how
many worker processes computed the batches.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..channel import draw_fading
from ..detectors import detect
from ..transceiver import generate_block_dpsk, generate_block_fsk
from .config import ScenarioConfig, _parse_diagnostic

CLAMP_GAMMA = 1e8


@dataclass(frozen=True)
class SerEstimate:
    trials: int
    errors: int
    ser: float
    stderr: float
    seed: int
    point_id: int = 0
    wall_time: float = 0.0

    @classmethod
    def from_counts(cls, trials, errors, seed, point_id=0, wall_time=0.0):
        ser = errors / trials if trials else math.nan
        stderr = math.sqrt(ser * (1 - ser) / trials) if trials else math.nan
        return cls(int(trials), int(errors), ser, stderr, int(seed), int(point_id), wall_time)


def batch_rng(seed: int, point_id: int, batch_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point_id, batch_index)))


def simulate_batch(config: ScenarioConfig, snr_db: float, n: int, rng: np.random.Generator):
    """Draw ``n`` blocks at one SNR and return (sent, detected) message arrays."""
    budget = config.link_budget(snr_db)
    mode, p = _parse_diagnostic(config.diagnostic) if config.diagnostic else (None, None)
    if mode == "clamp":
        budget = budget.clamped(CLAMP_GAMMA)
    M = config.M
    m = rng.integers(0, M, n)
    fading = draw_fading(config.geometry(), rng, n)
    if config.modulation == "dpsk":
        block = generate_block_dpsk(m, budget, fading, rng)
    else:
        block = generate_block_fsk(m, budget, fading, rng)
    if mode == "guess":
        m_hat = rng.integers(0, M, n)
    elif mode == "coin":
        wrong = rng.random(n) < p
        m_hat = np.where(wrong, (m + 1) % M, m)
    else:
        m_hat = detect(block, budget, config.detector_kind())
    return m, m_hat


def _batch_errors(config, snr_db, seed, point_id, index, n):
    m, m_hat = simulate_batch(config, snr_db, n, batch_rng(seed, point_id, index))
    return int(np.count_nonzero(m != m_hat))


def estimate_ser(config: ScenarioConfig, snr_db: Optional[float] = None, *, point_id: int = 0,
                 seed: Optional[int] = None, workers: int = 1) -> SerEstimate:
    """SER at one operating point with the stopping rule of ``config.trials``.

    Stops after the first batch at which ``min_errors`` errors have been
    seen, or when ``max_trials`` trials have run.
    """
    if snr_db is None:
        if len(config.snr_db) != 1:
            raise ValueError("config has several SNR points; pass snr_db explicitly")
        snr_db = config.snr_db[0]
    seed = config.seed if seed is None else seed
    config.link_budget(snr_db)  # surfaces infeasible configurations before any work
    policy = config.trials
    sizes = []
    remaining = policy.max_trials
    while remaining > 0:
        sizes.append(min(policy.batch, remaining))
        remaining -= sizes[-1]

    start = time.perf_counter()
    trials = errors = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        i = 0
        while i < len(sizes):
            wave = range(i, min(i + max(workers, 1), len(sizes)))
            if pool is None:
                counts = [_batch_errors(config, snr_db, seed, point_id, j, sizes[j]) for j in wave]
            else:
                futures = [pool.submit(_batch_errors, config, snr_db, seed, point_id, j, sizes[j]) for j in wave]
                counts = [f.result() for f in futures]
            stop = False
            for j, c in zip(wave, counts):
                trials += sizes[j]
                errors += c
                if errors >= policy.min_errors:
                    stop = True
                    break
            if stop:
                break
            i = wave.stop
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return SerEstimate.from_counts(trials, errors, seed, point_id, time.perf_counter() - start)
