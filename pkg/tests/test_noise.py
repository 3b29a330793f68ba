import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitcusum import DomainError, NoiseModel
from bitcusum.noise import logistic_cdf, logistic_ppf, norm_cdf, norm_ppf

import oracles


def test_gaussian_bit_zero_probability(gaussian):
    # theta = 0.2 above the threshold: P(bit = 0) = Phi(-0.2)
    assert gaussian.q(0.2, 0.0) == pytest.approx(0.4207, abs=5e-5)
    assert 1.0 - gaussian.q(0.2, 0.0) == pytest.approx(0.5793, abs=5e-5)


def test_gaussian_cdf_matches_scipy():
    for x in np.linspace(-8.0, 8.0, 81):
        assert norm_cdf(float(x)) == pytest.approx(oracles.cdf_gaussian(float(x)), abs=1e-14)


def test_gaussian_ppf_matches_scipy():
    grid = np.concatenate([
        np.linspace(1e-6, 1 - 1e-6, 501),
        [1e-9, 1e-8, 0.02425, 1 - 0.02425, 1 - 1e-9],
    ])
    for p in grid:
        assert norm_ppf(float(p)) == pytest.approx(oracles.ppf_gaussian(float(p)), abs=1e-10)


def test_gaussian_ppf_edge_cases():
    assert norm_ppf(0.5) == pytest.approx(0.0, abs=1e-15)
    assert norm_ppf(0.0) == -math.inf
    assert norm_ppf(1.0) == math.inf


def test_logistic_forms():
    # the scalar helpers are standard (unit scale); NoiseModel applies scale
    for x in (-20.0, -3.5, -1.0, 0.0, 0.7, 5.0, 30.0):
        assert logistic_cdf(x) == pytest.approx(oracles.cdf_logistic(x), abs=1e-14)
    for p in (1e-8, 0.01, 0.3, 0.5, 0.77, 0.999):
        assert logistic_ppf(p) == pytest.approx(oracles.ppf_logistic(p), abs=1e-12)


def test_logistic_cdf_extreme_arguments_do_not_overflow():
    assert logistic_cdf(-1e6) == 0.0
    assert logistic_cdf(1e6) == 1.0


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6),
       st.sampled_from(["gaussian", "logistic"]))
@settings(deadline=None, max_examples=200)
def test_quantile_round_trip(p, family):
    model = NoiseModel(family, 1.0)
    assert model.cdf(model.quantile(p)) == pytest.approx(p, abs=1e-10)


@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3))
@settings(deadline=None, max_examples=100)
def test_q_decreasing_in_theta(theta, tau):
    model = NoiseModel("gaussian", 1.0)
    assert model.q(theta + 0.5, tau) < model.q(theta, tau)


def test_qtilde_reduces_to_q(gaussian):
    assert gaussian.qtilde(0.3, 0.0, 1.0) == gaussian.q(0.3, 1.0)
    # positive shift makes a one-bit more likely
    assert gaussian.qtilde(0.3, 0.4, 1.0) < gaussian.q(0.3, 1.0)


def test_array_quantile(gaussian):
    p = np.array([0.1, 0.5, 0.9])
    x = gaussian.quantile(p)
    assert x.shape == (3,)
    assert x[1] == pytest.approx(0.0, abs=1e-15)
    assert x[0] == pytest.approx(-x[2], abs=1e-12)


def test_scale_validation():
    with pytest.raises(DomainError):
        NoiseModel("gaussian", 0.0)
    with pytest.raises(DomainError):
        NoiseModel("cauchy", 1.0)


def test_scaled_families():
    m = NoiseModel("gaussian", 2.0)
    assert m.cdf(1.0) == pytest.approx(oracles.cdf_gaussian(1.0, 2.0), abs=1e-14)
    m = NoiseModel("logistic", 3.0)
    assert m.quantile(0.75) == pytest.approx(oracles.ppf_logistic(0.75, 3.0), abs=1e-12)
