"""Quick invariant checks runnable without pytest (``rcisec selftest``)."""

from __future__ import annotations

import math

import numpy as np

from ..asymptotics import g_function, large_system_point, secrecy_rate_deq_perfect
from ..channel import RngSpec, SystemConfig, sample_csit_pair
from ..fdd import feedback_bits, scaling_constant
from ..precoder import build_rci, optimal_regularizer, secrecy_sum_rate
from ..tdd import TddConfig, optimal_training_grid, training_cubic_coefficients


def _csit_identity():
    cfg = SystemConfig(M=6, K=4, rho=10.0, tau2=0.3)
    for s in range(20):
        p = sample_csit_pair(cfg, RngSpec(1, s))
        if np.max(np.abs(p.H - p.Hhat - p.E)) != 0.0:
            return False
    return True


def _power_normalization():
    cfg = SystemConfig(M=8, K=6, rho=10.0, tau2=0.1)
    for s in range(20):
        W = build_rci(sample_csit_pair(cfg, RngSpec(2, s)).Hhat, 0.1).W
        if abs(np.vdot(W, W).real - 1.0) > 1e-10:
            return False
    return True


def _rate_nonnegative():
    cfg = SystemConfig(M=4, K=6, rho=1e3, tau2=0.2)
    xi = optimal_regularizer(cfg.beta, cfg.rho)
    for s in range(20):
        p = sample_csit_pair(cfg, RngSpec(3, s))
        if secrecy_sum_rate(p.H, build_rci(p.Hhat, xi), cfg.rho).secrecy_sum_rate < 0:
            return False
    return True


def _fixed_point():
    rng = np.random.default_rng(0)
    for beta, xi in zip(rng.uniform(0.01, 2, 200), rng.uniform(0.01, 10, 200)):
        g = g_function(beta, xi)
        if abs(xi * g + beta * g / (1 + g) - 1) >= 1e-10:
            return False
    return True


def _perfect_reduction():
    for beta in (0.3, 0.7, 1.0, 1.5):
        for rho in (1.0, 10.0, 1e3):
            a = large_system_point(beta, rho, 0.0).rate_per_user
            b = secrecy_rate_deq_perfect(beta, rho)
            if abs(a - b) > 1e-12 * max(abs(b), 1e-300) and not (a == b == 0):
                return False
    return True


def _tau_monotone():
    for beta in (0.5, 1.0):
        for rho in (10.0, 100.0):
            rates = [large_system_point(beta, rho, t).rate_per_user for t in np.linspace(0, 0.9, 19)]
            if any(b > a + 1e-12 for a, b in zip(rates, rates[1:])):
                return False
    return True


def _feedback_slope():
    return (feedback_bits(10, 0.5, 23.0, 2.0) - feedback_bits(10, 0.5, 20.0, 2.0)) == 9.0


def _scaling_increasing():
    bs = np.linspace(1.01, 5, 50)
    return all(np.all(np.diff([scaling_constant(r, b) for b in bs]) > 0) for r in (0.5, 1.0))


def _cubic_residual():
    for T in (100, 200, 400):
        sol = optimal_training_grid(TddConfig.from_db(T=T, K=10, beta=1.0, rho_db=40.0, c=10.0))
        co = training_cubic_coefficients(TddConfig.from_db(T=T, K=10, beta=1.0, rho_db=40.0, c=10.0), sol.q)
        res = np.polyval(co, sol.t_opt_cubic)
        if not abs(res) < 1e-6 * max(abs(c) for c in co) or math.isnan(sol.t_opt_cubic):
            return False
    return True


CHECKS = [
    ("csit pair identity H - Hhat - E == 0", _csit_identity),
    ("precoder power normalization", _power_normalization),
    ("secrecy sum-rate nonnegative", _rate_nonnegative),
    ("g fixed-point identity", _fixed_point),
    ("perfect-CSIT reduction", _perfect_reduction),
    ("rate nonincreasing in tau2", _tau_monotone),
    ("feedback bits slope (M-1) per 3 dB", _feedback_slope),
    ("scaling constant increasing in b", _scaling_increasing),
    ("training cubic residual", _cubic_residual),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check())
        except Exception as exc:  # report, keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
