"""
Channel generation: i.i.d. Rayleigh fading and the imperfect-CSIT pair.

Random numbers
--------------
Every draw comes from numpy's ``Philox`` counter-based bit generator keyed
by the 128-bit integer ``(stream_id << 64) | master_seed``. Gaussian
variates are produced by ``numpy.random.Generator.standard_normal``
(ziggurat). A CN(0, s) entry is ``sqrt(s/2) * (x + 1j*y)`` with x, y standard
normal. For a K x M draw the generator emits, in this order, the real part
of the estimate (K*M values, C order), its imaginary part, the real part of
the error, then its imaginary part. Trials keyed by distinct ``stream_id``
are independent and can be evaluated in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "SystemConfig",
    "RngSpec",
    "ChannelPair",
    "make_generator",
    "sample_channel",
    "sample_csit_pair",
]

_U64 = 1 << 64


@dataclass(frozen=True)
class SystemConfig:
    """Scenario: M transmit antennas, K single-antenna users, downlink SNR
    ``rho`` (linear) and CSIT error variance ``tau2``.

    ``beta`` is derived as K/M.
    """

    M: int
    K: int
    rho: float
    tau2: float = 0.0
    beta: float = field(init=False)

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValidationError(f"M must be a positive integer, got {self.M!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ValidationError(f"K must be a positive integer, got {self.K!r}")
        if not np.isfinite(self.rho) or self.rho <= 0:
            raise ValidationError(f"rho must be positive, got {self.rho!r}")
        if not 0.0 <= self.tau2 <= 1.0:
            raise ValidationError(f"tau2 must lie in [0, 1], got {self.tau2!r}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "tau2", float(self.tau2))
        object.__setattr__(self, "beta", self.K / self.M)

    @classmethod
    def from_db(cls, M, K, rho_db, tau2=0.0):
        return cls(M=M, K=K, rho=10.0 ** (rho_db / 10.0), tau2=tau2)

    @property
    def rho_db(self):
        return 10.0 * np.log10(self.rho)

    def replace(self, **changes):
        kw = dict(M=self.M, K=self.K, rho=self.rho, tau2=self.tau2)
        kw.update(changes)
        return SystemConfig(**kw)


@dataclass(frozen=True)
class RngSpec:
    """Identifies one reproducible random stream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v < _U64:
                raise ValidationError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    @property
    def key(self) -> int:
        return (int(self.stream_id) << 64) | int(self.master_seed)


def make_generator(rng: RngSpec) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=rng.key))


@dataclass(frozen=True)
class ChannelPair:
    """True channel ``H`` with its transmitter-side estimate ``Hhat`` and
    the estimation error ``E``; ``H - Hhat - E`` evaluates to exactly zero."""

    H: np.ndarray
    Hhat: np.ndarray
    E: np.ndarray


def _standard_cn(gen, shape):
    re = gen.standard_normal(shape)
    im = gen.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def sample_channel(cfg: SystemConfig, rng: RngSpec) -> np.ndarray:
    """Draw a K x M matrix with i.i.d. CN(0, 1) entries."""
    return _standard_cn(make_generator(rng), (cfg.K, cfg.M))


def sample_csit_pair(cfg: SystemConfig, rng: RngSpec) -> ChannelPair:
    """Draw ``Hhat ~ CN(0, 1 - tau2)`` and an independent ``E ~ CN(0, tau2)``
    and form ``H = Hhat + E``.

    With ``tau2 = 0`` the error is exactly zero; with ``tau2 = 1`` the
    estimate is exactly zero.
    """
    if not 0.0 <= cfg.tau2 <= 1.0:
        raise ValidationError(f"tau2 must lie in [0, 1], got {cfg.tau2!r}")
    gen = make_generator(rng)
    shape = (cfg.K, cfg.M)
    z_hat = _standard_cn(gen, shape)
    z_err = _standard_cn(gen, shape)
    Hhat = np.sqrt(1.0 - cfg.tau2) * z_hat
    H = Hhat + np.sqrt(cfg.tau2) * z_err
    # stored error is recomputed from H so that H - Hhat - E == 0 bitwise
    return ChannelPair(H=H, Hhat=Hhat, E=H - Hhat)
