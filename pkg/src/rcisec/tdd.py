"""
TDD uplink-training optimization.

With ``T_t`` orthogonal pilot uses per coherence interval of ``T`` uses and
uplink SNR ``rho_ul``, the CSIT error is ``1/(1 + T_t*rho_ul)`` and the data
phase keeps a fraction ``(T - T_t)/T`` of the interval. The optimal
``T_t`` balances the two. A high-SNR cubic gives it in closed form; the
brute-force grid over integer ``T_t`` is the reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import large_system_point, secrecy_rate_deq_perfect
from .errors import NoRootError, ValidationError
from .fdd import BetaRegime, regime_for
from .precoder import optimal_regularizer

__all__ = [
    "TddConfig",
    "TrainingSolution",
    "tdd_csit_error",
    "tdd_effective_params",
    "tdd_secrecy_rate",
    "training_cubic_coefficients",
    "solve_cubic",
    "solve_training_cubic",
    "optimal_training_grid",
]

# high-SNR reference for q when a fixed reference is requested
Q_REFERENCE_RHO_DB = 40.0


@dataclass(frozen=True)
class TddConfig:
    """TDD scenario. ``c = rho / rho_ul`` is fixed, so the uplink SNR
    follows the downlink SNR."""

    T: int
    K: int
    beta: float
    rho: float
    c: float

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError(f"T must be a positive integer, got {self.T!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ValidationError(f"K must be a positive integer, got {self.K!r}")
        if not 0 < self.beta <= 1.0 + 1e-9:
            raise ValidationError(f"beta must lie in (0, 1], got {self.beta!r}")
        if not self.rho > 0:
            raise ValidationError(f"rho must be positive, got {self.rho!r}")
        if not self.c > 0:
            raise ValidationError(f"c must be positive, got {self.c!r}")

    @classmethod
    def from_db(cls, T, K, beta, rho_db, c):
        return cls(T=T, K=K, beta=beta, rho=10.0 ** (rho_db / 10.0), c=c)

    @property
    def rho_ul(self) -> float:
        return self.rho / self.c

    @property
    def M(self) -> int:
        return int(round(self.K / self.beta))

    def replace(self, **changes):
        kw = dict(T=self.T, K=self.K, beta=self.beta, rho=self.rho, c=self.c)
        kw.update(changes)
        return TddConfig(**kw)


@dataclass(frozen=True)
class TrainingSolution:
    t_opt_cubic: float
    t_opt_grid: int
    rate_at_grid_opt: float
    q: float
    t_opt_refined: float
    roots: tuple = ()


def tdd_csit_error(T_t: float, rho_ul: float) -> float:
    if not T_t > 0:
        raise ValidationError(f"T_t must be positive, got {T_t!r}")
    if not rho_ul > 0:
        raise ValidationError(f"rho_ul must be positive, got {rho_ul!r}")
    return 1.0 / (1.0 + T_t * rho_ul)


def tdd_effective_params(T_t, rho, rho_ul, xi):
    """Effective ``(xi~, rho~)`` written in terms of the training length."""
    snr_t = T_t * rho_ul
    return xi * (1.0 + snr_t) / snr_t, rho * snr_t / (rho + 1.0 + snr_t)


def tdd_secrecy_rate(cfg: TddConfig, T_t: float, xi: float | None = None) -> float:
    """Large-system secrecy sum-rate, including the training prelog, for
    ``0 < T_t <= T``. The regularizer defaults to the perfect-CSIT optimum."""
    if not 0 < T_t <= cfg.T:
        raise ValidationError(f"T_t must lie in (0, {cfg.T}], got {T_t!r}")
    if T_t == cfg.T:
        return 0.0
    if xi is None:
        xi = optimal_regularizer(cfg.beta, cfg.rho)
    tau2 = tdd_csit_error(T_t, cfg.rho_ul)
    point = large_system_point(cfg.beta, cfg.rho, tau2, xi)
    return (cfg.T - T_t) / cfg.T * cfg.K * point.rate_per_user


def _q_value(cfg, q_reference_rho_db):
    rho = cfg.rho if q_reference_rho_db is None else 10.0 ** (q_reference_rho_db / 10.0)
    return -cfg.K * secrecy_rate_deq_perfect(cfg.beta, rho) * math.log(2.0)


def training_cubic_coefficients(cfg: TddConfig, q: float):
    """Coefficients (highest degree first) of the training cubic in ``T_t``."""
    K, T, c = cfg.K, cfg.T, cfg.c
    if regime_for(cfg.beta) is BetaRegime.BELOW_ONE:
        return (q, c * q - K * c, c * c * q + K * c * T - 2 * K * c * c, 2 * K * c * c * T)
    return (4 * q, 4 * c * q - 4 * K * c, 3 * c * c * q + 4 * K * c * T - 6 * K * c * c,
            6 * K * T * c * c)


def _polish(coeffs, x, iters=8):
    a, b, c, d = coeffs
    for _ in range(iters):
        f = ((a * x + b) * x + c) * x + d
        df = (3 * a * x + 2 * b) * x + c
        if df == 0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def solve_cubic(a, b, c, d):
    """Real roots of ``a x^3 + b x^2 + c x + d`` in ascending order.

    Closed form (trigonometric for three real roots, Cardano otherwise)
    followed by Newton polishing on the original polynomial. A triple root
    is reported once.
    """
    if a == 0:
        raise ValidationError("leading coefficient is zero; not a cubic")
    B, C, D = b / a, c / a, d / a
    shift = B / 3.0
    p = C - B * B / 3.0
    qq = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
    disc = (qq / 2.0) ** 2 + (p / 3.0) ** 3
    if p == 0 and qq == 0:
        ts = [0.0]
    elif disc > 0:
        s = math.sqrt(disc)
        u = math.copysign(abs(-qq / 2.0 + s) ** (1 / 3), -qq / 2.0 + s)
        v = math.copysign(abs(-qq / 2.0 - s) ** (1 / 3), -qq / 2.0 - s)
        ts = [u + v]
    else:
        r = math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, -qq / (2.0 * r**3)))
        phi = math.acos(arg)
        ts = [2 * r * math.cos((phi - 2 * math.pi * k) / 3.0) for k in range(3)]
    roots = sorted(_polish((a, b, c, d), t - shift) for t in ts)
    return roots


def _cubic_root(cfg, q):
    coeffs = training_cubic_coefficients(cfg, q)
    roots = solve_cubic(*coeffs)
    inside = [r for r in roots if cfg.K < r < cfg.T]
    if not inside:
        raise NoRootError(
            f"training cubic has no root in ({cfg.K}, {cfg.T}); roots={roots}", roots
        )
    if len(inside) == 1:
        return inside[0], roots
    return max(inside, key=lambda r: tdd_secrecy_rate(cfg, r)), roots


def solve_training_cubic(cfg: TddConfig, q_reference_rho_db: float | None = None) -> float:
    """High-SNR approximation of the rate-maximizing training length.

    ``q = -ln(2) * Rbar`` where ``Rbar`` is the perfect-CSIT large-system sum
    rate in bits, evaluated at the operating SNR, or at
    ``q_reference_rho_db`` if given.

    Raises
    ------
    NoRootError
        No real root in ``(K, T)``; the exception carries all roots.
    """
    return _cubic_root(cfg, _q_value(cfg, q_reference_rho_db))[0]


def optimal_training_grid(cfg: TddConfig, q_reference_rho_db: float | None = None) -> TrainingSolution:
    """Brute-force the integer training length in ``(K, T)`` and compare it
    with the cubic prediction.

    Ties go to the smaller ``T_t``. ``t_opt_refined`` interpolates the
    maximum with a parabola through the grid optimum and its neighbours.
    """
    if cfg.T - cfg.K < 2:
        raise ValidationError(f"no admissible training length in ({cfg.K}, {cfg.T})")
    xi = optimal_regularizer(cfg.beta, cfg.rho)
    grid = np.arange(cfg.K + 1, cfg.T)
    rates = np.array([tdd_secrecy_rate(cfg, int(t), xi) for t in grid])
    i = int(np.argmax(rates))  # first maximum, i.e. smallest T_t
    refined = float(grid[i])
    if 0 < i < len(grid) - 1:
        y0, y1, y2 = rates[i - 1], rates[i], rates[i + 1]
        curv = y0 - 2 * y1 + y2
        if curv < 0:
            refined += 0.5 * (y0 - y2) / curv
    q = _q_value(cfg, q_reference_rho_db)
    try:
        t_cubic, roots = _cubic_root(cfg, q)
    except NoRootError as exc:
        t_cubic, roots = math.nan, exc.roots
    return TrainingSolution(
        t_opt_cubic=t_cubic, t_opt_grid=int(grid[i]), rate_at_grid_opt=float(rates[i]),
        q=q, t_opt_refined=refined, roots=tuple(roots),
    )
