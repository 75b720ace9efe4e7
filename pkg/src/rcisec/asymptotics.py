"""
Large-system deterministic equivalents for RCI precoding under CSIT error.

``g(beta, xi)`` is the positive solution of ``xi*g = 1 - beta*g/(1 + g)``,
i.e. of the quadratic ``xi*g**2 + a*g - 1 = 0`` with ``a = xi - 1 + beta``.
Writing ``D = a**2 + 4*xi`` (which equals ``xi**2`` times the radicand of the
usual closed form), the closed form collapses to

    g = (sqrt(D) - a) / (2*xi)

for either sign of ``xi``. When ``a > 0`` that difference cancels, so it is
evaluated as ``2 / (a + sqrt(D))`` instead; when ``a <= 0`` the original
expression is a sum of nonnegative terms. Both branches are exact
rearrangements. The second form also stays finite at ``xi = 0`` when
``beta > 1``, giving ``g = 1/(beta - 1)``; that point is reachable because
the optimal regularizer crosses zero for overloaded systems.

CSIT error enters through the effective SNR ``rho~ = rho(1-tau2)/(rho*tau2+1)``
and regularizer ``xi~ = xi/(1-tau2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import SystemConfig
from .errors import DomainError, ValidationError
from .precoder import optimal_regularizer

__all__ = [
    "LargeSystemPoint",
    "g_function",
    "effective_snr",
    "effective_regularizer",
    "deq_sinr_intended",
    "deq_sinr_eve",
    "large_system_point",
    "secrecy_rate_deq",
    "secrecy_rate_deq_perfect",
]


def g_function(beta: float, xi: float) -> float:
    """Fixed-point quantity ``g(beta, xi)``.

    Raises
    ------
    DomainError
        If ``xi == 0`` with ``beta <= 1`` (g diverges) or the radicand is
        negative (possible only for ``xi < 0``).
    """
    if beta < 0:
        raise ValidationError(f"beta must be nonnegative, got {beta!r}")
    if not math.isfinite(xi) or (xi == 0 and beta <= 1.0):
        raise DomainError(f"g(beta={beta!r}, xi) is undefined at xi={xi!r}")
    a = xi - 1.0 + beta
    D = a * a + 4.0 * xi
    if D < 0:
        raise DomainError(
            f"g(beta={beta!r}, xi={xi!r}): negative radicand "
            f"{D / (xi * xi):.6g}; no real fixed point"
        )
    s = math.sqrt(D)
    if a > 0:
        return 2.0 / (a + s)
    return (s - a) / (2.0 * xi)


def effective_snr(rho, tau2):
    return rho * (1.0 - tau2) / (rho * tau2 + 1.0)


def effective_regularizer(xi, tau2):
    if tau2 >= 1.0:
        raise DomainError("effective regularizer is infinite at tau2 = 1")
    return xi / (1.0 - tau2)


def _check(beta, rho, tau2):
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta!r}")
    if not rho > 0:
        raise ValidationError(f"rho must be positive, got {rho!r}")
    if not 0.0 <= tau2 <= 1.0:
        raise ValidationError(f"tau2 must lie in [0, 1], got {tau2!r}")


def _intended(beta, rho_t, xi_t, g):
    one_g2 = (1.0 + g) ** 2
    return g * (rho_t + xi_t * rho_t / beta * one_g2) / (rho_t + one_g2)


def deq_sinr_intended(beta: float, rho: float, tau2: float, xi: float) -> float:
    """Deterministic equivalent of the intended user's SINR."""
    _check(beta, rho, tau2)
    if tau2 >= 1.0:
        raise DomainError("intended SINR equivalent is undefined at tau2 = 1")
    rho_t = effective_snr(rho, tau2)
    xi_t = effective_regularizer(xi, tau2)
    return _intended(beta, rho_t, xi_t, g_function(beta, xi_t))


def deq_sinr_eve(beta: float, rho: float, tau2: float, xi: float) -> float:
    """Deterministic equivalent of the eavesdropper alliance's SINR,
    ``rho * (tau2 + (1 - tau2)/(1 + g)**2)``. Equals ``rho`` at ``tau2 = 1``."""
    _check(beta, rho, tau2)
    if tau2 == 1.0:
        return float(rho)
    g = g_function(beta, effective_regularizer(xi, tau2))
    return rho * (tau2 + (1.0 - tau2) / (1.0 + g) ** 2)


@dataclass(frozen=True)
class LargeSystemPoint:
    beta: float
    rho: float
    tau2: float
    xi: float
    g: float
    rho_tilde: float
    xi_tilde: float
    sinr_intended_deq: float
    sinr_eve_deq: float
    rate_per_user: float

    def sum_rate(self, K):
        return K * self.rate_per_user


def large_system_point(beta: float, rho: float, tau2: float = 0.0, xi: float | None = None,
                       clamp: bool = True) -> LargeSystemPoint:
    """Evaluate the large-system secrecy rate at one operating point.

    ``xi`` defaults to the perfect-CSIT optimum at ``(beta, rho)``. The
    per-user rate is ``[log2((1 + SINR)/(1 + SINR_eve))]^+``; the clamp is
    applied once to the common per-user term. ``clamp=False`` returns the
    raw log-ratio, which can be negative.
    """
    _check(beta, rho, tau2)
    if tau2 >= 1.0:
        raise DomainError("large-system secrecy rate is undefined at tau2 = 1")
    if xi is None:
        xi = optimal_regularizer(beta, rho)
    rho_t = effective_snr(rho, tau2)
    xi_t = effective_regularizer(xi, tau2)
    g = g_function(beta, xi_t)
    s = _intended(beta, rho_t, xi_t, g)
    e = rho * (tau2 + (1.0 - tau2) / (1.0 + g) ** 2)
    rate = math.log2((1.0 + s) / (1.0 + e))
    if clamp:
        rate = max(rate, 0.0)
    return LargeSystemPoint(
        beta=float(beta), rho=float(rho), tau2=float(tau2), xi=float(xi), g=g,
        rho_tilde=rho_t, xi_tilde=xi_t, sinr_intended_deq=s, sinr_eve_deq=e,
        rate_per_user=rate,
    )


def secrecy_rate_deq(cfg: SystemConfig, xi: float | None = None, clamp: bool = True) -> LargeSystemPoint:
    """Large-system point for a finite scenario; the sum rate is
    ``point.sum_rate(cfg.K)``."""
    return large_system_point(cfg.beta, cfg.rho, cfg.tau2, xi, clamp=clamp)


def secrecy_rate_deq_perfect(beta: float, rho: float, clamp: bool = True) -> float:
    """Per-user large-system secrecy rate with perfect CSIT and the optimal
    regularizer. Evaluated directly, without the CSIT-error substitutions."""
    _check(beta, rho, 0.0)
    xi = optimal_regularizer(beta, rho)
    g = g_function(beta, xi)
    one_g2 = (1.0 + g) ** 2
    num = 1.0 + g * (rho + rho * xi / beta * one_g2) / (rho + one_g2)
    den = 1.0 + rho / one_g2
    rate = math.log2(num / den)
    return max(rate, 0.0) if clamp else rate
