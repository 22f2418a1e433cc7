import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from vicsek_mean.noise import NoiseKind, RngStream, noise_variance, sample_noise


@pytest.mark.parametrize("kind", list(NoiseKind))
def test_zero_delta_gives_zeros(kind):
    rng = RngStream(1)
    assert np.array_equal(sample_noise(kind, 0.0, 7, rng), np.zeros(7))


def test_two_point_support():
    xi = sample_noise(NoiseKind.TWO_POINT, 0.1, 1000, RngStream(2))
    assert set(np.unique(xi).tolist()) == {-0.1, 0.1}


def test_uniform_moments():
    delta = 0.1
    xi = sample_noise(NoiseKind.UNIFORM, delta, 10**6, RngStream(3))
    assert abs(xi.mean()) <= 4 * (delta / math.sqrt(3)) / 1e3
    assert xi.var() == pytest.approx(delta**2 / 3, rel=0.02)


@pytest.mark.parametrize("kind", list(NoiseKind))
def test_variance_matches_closed_form(kind):
    delta = 0.3
    xi = sample_noise(kind, delta, 400_000, RngStream(4))
    var = noise_variance(kind, delta)
    assert abs(xi.mean()) < 5 * math.sqrt(var / xi.size)
    assert xi.var() == pytest.approx(var, rel=0.02)


def test_truncated_gaussian_variance_against_quadrature():
    delta = 0.2
    sigma = delta / 3

    def pdf(u):
        return math.exp(-0.5 * (u / sigma) ** 2)

    mass, _ = integrate.quad(pdf, -delta, delta)
    second, _ = integrate.quad(lambda u: u * u * pdf(u), -delta, delta)
    assert noise_variance(NoiseKind.TRUNCATED_GAUSSIAN, delta) == pytest.approx(second / mass, rel=1e-10)


@given(st.sampled_from(list(NoiseKind)), st.floats(0, 3), st.integers(1, 50), st.integers(0, 2**63))
def test_samples_bounded_and_reproducible(kind, delta, n, seed):
    a = sample_noise(kind, delta, n, RngStream(seed, 5))
    b = sample_noise(kind, delta, n, RngStream(seed, 5))
    assert a.shape == (n,)
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) <= delta)


def test_streams_differ_across_runs_and_count_draws():
    s0, s1 = RngStream(9, 0), RngStream(9, 1)
    assert not np.array_equal(s0.uniform(0, 1, 4), s1.uniform(0, 1, 4))
    assert s0.counter == 4
    s0.signs(3)
    assert s0.counter == 7


def test_stream_rejects_bad_seed():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)
    with pytest.raises(ValueError):
        RngStream(0, -1)


def test_negative_delta_rejected():
    with pytest.raises(ValueError):
        sample_noise(NoiseKind.UNIFORM, -0.1, 3, RngStream(0))
