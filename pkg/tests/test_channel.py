import numpy as np
import pytest
from scipy import stats

from rcisec import ChannelPair, RngSpec, SystemConfig, ValidationError, sample_channel, sample_csit_pair
from rcisec.channel import make_generator


def test_config_derives_beta():
    cfg = SystemConfig(M=8, K=6, rho=10.0, tau2=0.1)
    assert cfg.beta == 6 / 8


@pytest.mark.parametrize("kw", [
    dict(M=0, K=1, rho=1.0),
    dict(M=1, K=0, rho=1.0),
    dict(M=2, K=2, rho=0.0),
    dict(M=2, K=2, rho=1.0, tau2=-0.1),
    dict(M=2, K=2, rho=1.0, tau2=1.5),
    dict(M=2.5, K=2, rho=1.0),
])
def test_config_rejects_invalid(kw):
    with pytest.raises(ValidationError):
        SystemConfig(**kw)


@pytest.mark.parametrize("kw", [dict(master_seed=-1), dict(master_seed=0, stream_id=1 << 64)])
def test_rngspec_range(kw):
    with pytest.raises(ValidationError):
        RngSpec(**kw)


def test_sample_channel_shape_and_determinism():
    cfg = SystemConfig(M=4, K=4, rho=1.0)
    a = sample_channel(cfg, RngSpec(11, 3))
    b = sample_channel(cfg, RngSpec(11, 3))
    assert a.shape == (4, 4) and a.dtype == complex
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_channel(cfg, RngSpec(11, 4)))
    assert not np.array_equal(a, sample_channel(cfg, RngSpec(12, 3)))


def test_generator_is_philox_keyed_by_seed_and_stream():
    gen = make_generator(RngSpec(5, 7))
    assert isinstance(gen.bit_generator, np.random.Philox)
    ref = np.random.Generator(np.random.Philox(key=(7 << 64) | 5)).standard_normal(4)
    assert np.array_equal(gen.standard_normal(4), ref)


def test_sample_channel_unit_variance():
    cfg = SystemConfig(M=4, K=4, rho=1.0)
    draws = np.stack([sample_channel(cfg, RngSpec(1, s)) for s in range(100_000 // 16 + 1)])
    var = np.mean(np.abs(draws) ** 2)
    assert abs(var - 1.0) < 0.01
    # real and imaginary parts each carry half the power
    assert abs(np.mean(draws.real ** 2) - 0.5) < 0.01
    assert abs(np.mean(draws.imag ** 2) - 0.5) < 0.01


def test_scalar_channel_power_is_exponential():
    cfg = SystemConfig(M=1, K=1, rho=1.0)
    p = np.array([abs(sample_channel(cfg, RngSpec(2, s))[0, 0]) ** 2 for s in range(100_000)])
    assert abs(p.mean() - 1.0) < 0.02
    assert stats.kstest(p, "expon").pvalue > 0.01


def test_csit_pair_identity_exact():
    cfg = SystemConfig(M=6, K=5, rho=1.0, tau2=0.37)
    for s in range(50):
        p = sample_csit_pair(cfg, RngSpec(9, s))
        assert isinstance(p, ChannelPair)
        assert np.max(np.abs(p.H - p.Hhat - p.E)) == 0.0


def test_perfect_csit_has_zero_error():
    p = sample_csit_pair(SystemConfig(M=3, K=3, rho=1.0, tau2=0.0), RngSpec(0, 0))
    assert not np.any(p.E)
    assert np.array_equal(p.H, p.Hhat)


def test_no_csit_has_zero_estimate():
    p = sample_csit_pair(SystemConfig(M=3, K=3, rho=1.0, tau2=1.0), RngSpec(0, 0))
    assert not np.any(p.Hhat)


def test_csit_variances_and_independence():
    cfg = SystemConfig(M=4, K=4, rho=1.0, tau2=0.25)
    pairs = [sample_csit_pair(cfg, RngSpec(3, s)) for s in range(100_000 // 16 + 1)]
    Hhat = np.stack([p.Hhat for p in pairs]).reshape(len(pairs), -1)
    E = np.stack([p.E for p in pairs]).reshape(len(pairs), -1)
    H = np.stack([p.H for p in pairs]).reshape(len(pairs), -1)
    assert abs(np.mean(np.abs(Hhat) ** 2) / 0.75 - 1) < 0.01
    assert abs(np.mean(np.abs(E) ** 2) / 0.25 - 1) < 0.01
    assert abs(np.mean(np.abs(H) ** 2) - 1) < 0.01
    n = len(pairs)
    cov = (Hhat.conj() * E).mean(axis=0)  # zero-mean by construction
    # normalize to unit-variance variables before applying the 3/sqrt(n) bound
    assert np.max(np.abs(cov) / np.sqrt(0.75 * 0.25)) < 3 / np.sqrt(n)


def test_csit_pair_reproducible():
    cfg = SystemConfig(M=5, K=3, rho=1.0, tau2=0.2)
    a, b = sample_csit_pair(cfg, RngSpec(42, 17)), sample_csit_pair(cfg, RngSpec(42, 17))
    for x, y in zip((a.H, a.Hhat, a.E), (b.H, b.Hhat, b.E)):
        assert np.array_equal(x, y)
