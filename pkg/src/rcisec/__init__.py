"""Regularized channel inversion precoding for the MISO broadcast channel
with confidential messages under imperfect CSIT.

Finite-size Monte Carlo secrecy rates, large-system deterministic
equivalents, and FDD feedback / TDD training dimensioning.
"""

from .errors import (
    RcisecError,
    ValidationError,
    NumericError,
    DomainError,
    SingularMatrixError,
    DegenerateChannelError,
    NoRootError,
)
from .channel import SystemConfig, ChannelPair, RngSpec, sample_channel, sample_csit_pair
from .precoder import (
    Precoder,
    RatePoint,
    optimal_regularizer,
    build_rci,
    sinr_intended,
    sinr_eavesdropper,
    secrecy_sum_rate,
)
from .asymptotics import (
    LargeSystemPoint,
    g_function,
    deq_sinr_intended,
    deq_sinr_eve,
    secrecy_rate_deq,
    secrecy_rate_deq_perfect,
)

__version__ = "0.1.0"

__all__ = [
    "RcisecError", "ValidationError", "NumericError", "DomainError",
    "SingularMatrixError", "DegenerateChannelError", "NoRootError",
    "SystemConfig", "ChannelPair", "RngSpec", "sample_channel", "sample_csit_pair",
    "Precoder", "RatePoint", "optimal_regularizer", "build_rci",
    "sinr_intended", "sinr_eavesdropper", "secrecy_sum_rate",
    "LargeSystemPoint", "g_function", "deq_sinr_intended", "deq_sinr_eve",
    "secrecy_rate_deq", "secrecy_rate_deq_perfect",
]
