"""Ergodic Monte Carlo estimates of the finite-size secrecy sum-rate."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from ..channel import RngSpec, SystemConfig, sample_csit_pair
from ..errors import ValidationError
from ..precoder import build_rci, optimal_regularizer, secrecy_sum_rate

__all__ = ["McEstimate", "trial_secrecy_rate", "run_trials", "ergodic_secrecy_rate_mc"]


class McEstimate(NamedTuple):
    mean: float
    std_error: float
    trials: int
    sinr_intended_mean: float = math.nan
    sinr_eve_mean: float = math.nan

    @property
    def ci95(self):
        half = 1.959963984540054 * self.std_error
        return self.mean - half, self.mean + half


def trial_secrecy_rate(cfg: SystemConfig, xi: float, master_seed: int, stream_id: int):
    """One realization: ``(R_s, mean SINR, mean eavesdropper SINR)``."""
    pair = sample_csit_pair(cfg, RngSpec(master_seed, stream_id))
    point = secrecy_sum_rate(pair.H, build_rci(pair.Hhat, xi), cfg.rho)
    return point.secrecy_sum_rate, float(point.sinr_intended.mean()), float(point.sinr_eve.mean())


def run_trials(cfg: SystemConfig, trials: int, master_seed: int, xi: float | None = None,
               workers: int = 1) -> np.ndarray:
    """Per-trial results as a ``(trials, 3)`` array ordered by stream id.

    Stream ``i`` is trial ``i`` whatever the worker count, so the array is
    identical for any ``workers``.
    """
    if int(trials) != trials or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials!r}")
    if xi is None:
        xi = optimal_regularizer(cfg.beta, cfg.rho)

    def chunk(ids):
        return [trial_secrecy_rate(cfg, xi, master_seed, i) for i in ids]

    ids = range(int(trials))
    if workers <= 1:
        rows = chunk(ids)
    else:
        parts = [ids[w::workers] for w in range(workers)]
        out = [None] * int(trials)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part, res in zip(parts, pool.map(chunk, parts)):
                for i, r in zip(part, res):
                    out[i] = r
        rows = out
    return np.asarray(rows, dtype=float).reshape(-1, 3)


def _mean_and_error(x):
    n = len(x)
    mean = math.fsum(x) / n
    if n < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in x) / (n - 1)
    return mean, math.sqrt(var / n)


def ergodic_secrecy_rate_mc(cfg: SystemConfig, trials: int, master_seed: int,
                            xi: float | None = None, workers: int = 1) -> McEstimate:
    """Average the secrecy sum-rate over independent draws of the estimate
    and the error. ``xi`` defaults to the perfect-CSIT optimum at the
    configured load and SNR. Sums are exact (``math.fsum``) so the result
    does not depend on evaluation order.
    """
    rows = run_trials(cfg, trials, master_seed, xi=xi, workers=workers)
    mean, se = _mean_and_error(rows[:, 0].tolist())
    return McEstimate(
        mean=mean, std_error=se, trials=int(trials),
        sinr_intended_mean=math.fsum(rows[:, 1].tolist()) / len(rows),
        sinr_eve_mean=math.fsum(rows[:, 2].tolist()) / len(rows),
    )
