"""
Regularized channel inversion (RCI) precoding and exact finite-size rates.

The precoder is built from the CSIT estimate only; SINRs are evaluated on
the true channel. User indices are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, SingularMatrixError, ValidationError

__all__ = [
    "Precoder",
    "RatePoint",
    "optimal_regularizer",
    "build_rci",
    "gain_matrix",
    "sinr_intended",
    "sinr_eavesdropper",
    "sinr_intended_all",
    "sinr_eavesdropper_all",
    "secrecy_sum_rate",
]

# Reciprocal condition number below which the regularized Gram matrix is
# treated as singular.
_RCOND_MIN = 1e-13


def optimal_regularizer(beta: float, rho: float) -> float:
    """Large-system secrecy-optimal regularizer under perfect CSIT.

    Parameters
    ----------
    beta : float
        Load K/M, positive.
    rho : float
        Downlink SNR (linear), positive.

    Returns
    -------
    float
        The regularization parameter xi. It can be slightly negative for
        beta > 1 at high SNR.
    """
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta!r}")
    if not rho > 0:
        raise ValidationError(f"rho must be positive, got {rho!r}")
    beta = float(beta)
    rho = float(rho)
    root = np.sqrt(beta**2 * (rho**2 + rho + 1.0) - beta * (2.0 * rho * (rho - 1.0)) + rho**2)
    num = (
        -2.0 * rho**2 * (1.0 - beta) ** 2
        + 6.0 * rho * beta
        + 2.0 * beta**2
        - 2.0 * (beta * (rho + 1.0) - rho) * root
    )
    den = 6.0 * rho**2 * (beta + 2.0) + 6.0 * rho * beta
    return float(num / den)


@dataclass(frozen=True)
class Precoder:
    """RCI precoding matrix ``W`` (M x K, unit Frobenius norm), its power
    normalization constant ``gamma`` and the regularizer ``xi``."""

    W: np.ndarray
    gamma: float
    xi: float

    @property
    def M(self):
        return self.W.shape[0]

    @property
    def K(self):
        return self.W.shape[1]


def _solve_checked(A, B):
    # A is Hermitian; cond via its eigenvalues is cheap at these sizes
    ev = np.abs(np.linalg.eigvalsh(A))
    if ev.max() == 0.0 or ev.min() / ev.max() < _RCOND_MIN:
        raise SingularMatrixError(
            "regularized Gram matrix is singular "
            f"(reciprocal condition {ev.min() / ev.max() if ev.max() else 0.0:.3g})"
        )
    return np.linalg.solve(A, B)


def build_rci(Hhat: np.ndarray, xi: float) -> Precoder:
    """Build ``W = (Hhat^H Hhat + M xi I)^{-1} Hhat^H / sqrt(gamma)``.

    The unnormalized precoder is computed through whichever of the two
    equivalent linear systems is smaller::

        (Hhat^H Hhat + M xi I)^{-1} Hhat^H == Hhat^H (Hhat Hhat^H + M xi I)^{-1}

    and ``gamma`` is its squared Frobenius norm, so ``trace(W^H W) == 1``.

    Raises
    ------
    DegenerateChannelError
        If ``Hhat`` is identically zero (no CSIT).
    SingularMatrixError
        If the regularized Gram matrix is not invertible, e.g. ``xi == 0``
        with ``K > M``.
    """
    Hhat = np.asarray(Hhat, dtype=complex)
    if Hhat.ndim != 2:
        raise ValidationError(f"Hhat must be a K x M matrix, got shape {Hhat.shape}")
    if not np.isfinite(xi):
        raise ValidationError(f"xi must be finite, got {xi!r}")
    K, M = Hhat.shape
    if not np.any(Hhat):
        raise DegenerateChannelError("CSIT estimate is identically zero; precoder undefined")
    HhatH = Hhat.conj().T
    if K <= M:
        A = Hhat @ HhatH + M * xi * np.eye(K)
        X = HhatH @ _solve_checked(A, np.eye(K))
    else:
        A = HhatH @ Hhat + M * xi * np.eye(M)
        X = _solve_checked(A, HhatH)
    gamma = float(np.vdot(X, X).real)
    if not gamma > 0:
        raise DegenerateChannelError("power normalization constant is zero")
    return Precoder(W=X / np.sqrt(gamma), gamma=gamma, xi=float(xi))


def gain_matrix(H, prec: Precoder) -> np.ndarray:
    """``G[k, j] = |h_k^H w_j|^2`` for the true channel rows ``h_k^H``."""
    H = np.asarray(H)
    if H.shape != (prec.K, prec.M):
        raise ValidationError(
            f"channel shape {H.shape} does not match precoder ({prec.K}, {prec.M})"
        )
    return np.abs(H @ prec.W) ** 2


def _check_index(k, K):
    if int(k) != k or not 0 <= k < K:
        raise ValidationError(f"user index must be in [0, {K}), got {k!r}")
    return int(k)


def sinr_intended_all(H, prec: Precoder, rho: float) -> np.ndarray:
    G = gain_matrix(H, prec)
    signal = np.diag(G)
    interference = G.sum(axis=1) - signal
    return rho * signal / (1.0 + rho * interference)


def sinr_eavesdropper_all(H, prec: Precoder, rho: float) -> np.ndarray:
    G = gain_matrix(H, prec)
    return rho * (G.sum(axis=0) - np.diag(G))


def sinr_intended(H, prec: Precoder, rho: float, k: int) -> float:
    """SINR of user ``k`` decoding its own message, treating the other
    users' streams as noise."""
    k = _check_index(k, prec.K)
    H = np.asarray(H)
    g = np.abs(H[k] @ prec.W) ** 2
    interference = g.sum() - g[k]
    return float(rho * g[k] / (1.0 + rho * interference))


def sinr_eavesdropper(H, prec: Precoder, rho: float, k: int) -> float:
    """SINR of the alliance of all users except ``k`` eavesdropping on
    message ``k``: ``rho * ||H_k w_k||^2`` with row ``k`` removed from H."""
    k = _check_index(k, prec.K)
    H_k = np.delete(np.asarray(H), k, axis=0)
    leak = H_k @ prec.W[:, k]
    return float(rho * np.vdot(leak, leak).real)


@dataclass(frozen=True)
class RatePoint:
    sinr_intended: np.ndarray
    sinr_eve: np.ndarray
    secrecy_sum_rate: float

    @property
    def per_user_rates(self):
        return np.maximum(np.log2(1.0 + self.sinr_intended) - np.log2(1.0 + self.sinr_eve), 0.0)


def secrecy_sum_rate(H, prec: Precoder, rho: float) -> RatePoint:
    """Secrecy sum-rate in bits/s/Hz, clamping each user's rate difference
    at zero before summing."""
    s = sinr_intended_all(H, prec, rho)
    e = sinr_eavesdropper_all(H, prec, rho)
    per_user = np.maximum(np.log2(1.0 + s) - np.log2(1.0 + e), 0.0)
    return RatePoint(sinr_intended=s, sinr_eve=e, secrecy_sum_rate=float(per_user.sum()))
