"""
FDD limited-feedback planning.

Users quantize their channel direction with random vector quantization
(RVQ); the transmitter is assumed to know the channel magnitude. The
quantization error plays the role of the CSIT error variance ``tau2``,
which must shrink like ``C / rho`` to hold a constant high-SNR rate gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import large_system_point, secrecy_rate_deq_perfect
from .channel import RngSpec, make_generator
from .errors import ValidationError
from .precoder import optimal_regularizer

__all__ = [
    "BetaRegime",
    "regime_for",
    "FddPlan",
    "RvqCodebook",
    "rate_gap",
    "scaling_constant",
    "feedback_bits",
    "feedback_bits_exact",
    "plan_fdd",
    "rvq_codebook",
    "rvq_quantize",
    "rvq_mean_distortion",
    "rvq_distortion_bound",
    "RVQ_MAX_BITS",
]

# loads this close to 1 use the beta == 1 constants
BETA_ONE_TOL = 1e-9

# brute-force quantization is limited to 2**20 codewords
RVQ_MAX_BITS = 20


class BetaRegime(enum.Enum):
    BELOW_ONE = "beta_below_one"
    EQUAL_ONE = "beta_equal_one"


def regime_for(beta: float) -> BetaRegime:
    """Map a load to its regime.

    The two regimes have different constants and the switch at beta = 1
    is discontinuous. Loads above one are rejected: the high-SNR secrecy
    rate is zero there whatever the CSIT quality.
    """
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta!r}")
    if abs(beta - 1.0) <= BETA_ONE_TOL:
        return BetaRegime.EQUAL_ONE
    if beta < 1.0:
        return BetaRegime.BELOW_ONE
    raise ValidationError(f"no feedback scaling law for beta > 1 (got {beta!r})")


def _as_regime(regime):
    if isinstance(regime, BetaRegime):
        return regime
    if isinstance(regime, str):
        return BetaRegime(regime)
    return regime_for(float(regime))


def rate_gap(beta: float, rho: float, tau2: float, clamped: bool = True) -> float:
    """Per-user large-system rate loss ``(Rbar - R) / K`` caused by CSIT
    error ``tau2``, with the regularizer fixed to the perfect-CSIT optimum.

    ``clamped=False`` drops the ``[.]^+`` on both rates; at high SNR both
    modes agree.
    """
    xi = optimal_regularizer(beta, rho)
    perfect = secrecy_rate_deq_perfect(beta, rho, clamp=clamped)
    imperfect = large_system_point(beta, rho, tau2, xi, clamp=clamped).rate_per_user
    return perfect - imperfect


def scaling_constant(regime, b: float) -> float:
    """Constant C in ``tau2 = C / rho`` targeting a gap of ``log2(b)`` bits.

    ``regime`` is a :class:`BetaRegime`, its string value, or a load beta.
    """
    if not b >= 1:
        raise ValidationError(f"b must be >= 1, got {b!r}")
    regime = _as_regime(regime)
    if regime is BetaRegime.BELOW_ONE:
        return 0.5 * (math.sqrt(4.0 * b - 3.0) - 1.0)
    return 2.0 / 3.0 * (math.sqrt(3.0 * b - 2.0) - 1.0)


def _check_bits_args(M, b):
    if int(M) != M or M < 2:
        raise ValidationError(f"M must be an integer >= 2, got {M!r}")
    if not b > 1:
        raise ValidationError(f"b must be > 1, got {b!r}")


def feedback_bits(M: int, regime, rho_db: float, b: float) -> float:
    """Feedback bits per user, linear in ``rho_db`` with slope ``(M-1)/3``
    (one extra bit per antenna per 3 dB)."""
    _check_bits_args(M, b)
    regime = _as_regime(regime)
    slope = (M - 1) / 3.0 * rho_db
    if regime is BetaRegime.BELOW_ONE:
        return slope - (M - 1) * (math.log2(math.sqrt(4.0 * b - 3.0) - 1.0) - 1.0)
    return slope - (M - 1) * (math.log2((math.sqrt(3.0 * b - 2.0) - 1.0) / 3.0) + 1.0)


def feedback_bits_exact(M: int, regime, rho_db: float, b: float) -> float:
    """``(M-1) * log2(rho / C)``: the bits that make the RVQ distortion bound
    equal ``C / rho``, without the 3 dB ~ 1 bit approximation."""
    _check_bits_args(M, b)
    C = scaling_constant(regime, b)
    return (M - 1) * (rho_db / 10.0 * math.log2(10.0) - math.log2(C))


@dataclass(frozen=True)
class FddPlan:
    b: float
    C: float
    B: float
    M: int
    beta_regime: BetaRegime
    rho_db: float

    @property
    def B_bits(self) -> int:
        """Integer bits actually fed back (rounded up)."""
        return math.ceil(self.B - 1e-9)

    @property
    def tau2(self) -> float:
        return self.C / 10.0 ** (self.rho_db / 10.0)

    @property
    def gap_bits(self) -> float:
        return math.log2(self.b)


def plan_fdd(M: int, beta: float, rho_db: float, b: float) -> FddPlan:
    regime = regime_for(beta)
    return FddPlan(
        b=float(b), C=scaling_constant(regime, b), B=feedback_bits(M, regime, rho_db, b),
        M=int(M), beta_regime=regime, rho_db=float(rho_db),
    )


@dataclass(frozen=True)
class RvqCodebook:
    B_bits: int
    M: int
    vectors: np.ndarray  # (2**B_bits, M), unit-norm rows


def rvq_codebook(B_bits: int, M: int, rng: RngSpec) -> RvqCodebook:
    """Random codebook of ``2**B_bits`` vectors isotropic on the complex
    unit sphere in M dimensions (normalized complex Gaussian vectors)."""
    if int(B_bits) != B_bits or B_bits < 0:
        raise ValidationError(f"B_bits must be a nonnegative integer, got {B_bits!r}")
    if B_bits > RVQ_MAX_BITS:
        raise ValidationError(f"B_bits={B_bits} exceeds the brute-force limit {RVQ_MAX_BITS}")
    if int(M) != M or M < 1:
        raise ValidationError(f"M must be a positive integer, got {M!r}")
    gen = make_generator(rng)
    n = 1 << int(B_bits)
    V = gen.standard_normal((n, M)) + 1j * gen.standard_normal((n, M))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return RvqCodebook(B_bits=int(B_bits), M=int(M), vectors=V)


def rvq_quantize(h, codebook: RvqCodebook):
    """Return ``(index, sin2)`` for the codeword best aligned with ``h``.

    ``sin2 = 1 - |<h/||h||, c>|**2`` is the squared sine of the angle
    between the channel direction and the chosen codeword. Ties go to the
    lowest index.
    """
    V = codebook.vectors
    if V.shape[0] == 0:
        raise ValidationError("empty codebook")
    h = np.asarray(h, dtype=complex).ravel()
    if h.shape[0] != V.shape[1]:
        raise ValidationError(f"channel dimension {h.shape[0]} != codebook dimension {V.shape[1]}")
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ValidationError("cannot quantize the zero vector")
    overlap = np.abs(V.conj() @ (h / norm)) ** 2
    idx = int(np.argmax(overlap))
    return idx, float(max(1.0 - overlap[idx], 0.0))


def rvq_mean_distortion(M: int, B_bits: int, draws: int, master_seed: int = 0) -> float:
    """Monte Carlo mean of ``sin2`` with a fresh codebook and channel per draw."""
    total = []
    for i in range(draws):
        cb = rvq_codebook(B_bits, M, RngSpec(master_seed, 2 * i))
        gen = make_generator(RngSpec(master_seed, 2 * i + 1))
        h = gen.standard_normal(M) + 1j * gen.standard_normal(M)
        total.append(rvq_quantize(h, cb)[1])
    return math.fsum(total) / draws


def rvq_distortion_bound(M: int, B_bits: float) -> float:
    """Upper bound ``2**(-B/(M-1))`` on the mean RVQ distortion."""
    if M < 2:
        raise ValidationError("bound needs M >= 2")
    return 2.0 ** (-B_bits / (M - 1))
