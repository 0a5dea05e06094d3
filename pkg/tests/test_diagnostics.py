import math

import numpy as np
import pytest

from weakmeas import DEFAULT_SHAPE, EnsembleSuperposition, xi_mixture
from weakmeas.diagnostics import (
    autocorrelation,
    effective_sample_size,
    histogram_probabilities,
    integrated_autocorr_time,
    total_variation,
)


def ar1(rho, n, seed=0):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = e[0] / math.sqrt(1 - rho**2)
    for t in range(1, n):
        x[t] = rho * x[t - 1] + e[t]
    return x


def test_iid_sequence_has_full_ess():
    x = np.random.default_rng(1).standard_normal(50_000)
    assert effective_sample_size(x) == pytest.approx(50_000, rel=0.1)


def test_ar1_autocorrelation_time():
    # tau = (1 + rho) / (1 - rho) for AR(1)
    x = ar1(0.9, 200_000)
    assert integrated_autocorr_time(x) == pytest.approx(19.0, rel=0.1)
    assert autocorrelation(x)[1] == pytest.approx(0.9, abs=0.01)


def test_degenerate_inputs():
    assert autocorrelation(np.ones(10))[0] == 1.0
    assert effective_sample_size(np.array([])) == 0.0
    assert integrated_autocorr_time(np.array([3.0])) == 1.0


def test_histogram_probabilities_outside_mass():
    p, out = histogram_probabilities([-2.0, 0.1, 0.2, 0.9, 5.0], np.linspace(0, 1, 3))
    np.testing.assert_allclose(p, [0.4, 0.2])
    assert out == pytest.approx(0.4)


def test_total_variation_extremes():
    mix = xi_mixture(EnsembleSuperposition.single(0.0, 200, DEFAULT_SHAPE))
    edges = np.linspace(-0.25, 0.25, 51)
    far = np.full(100, 3.0)
    assert total_variation(far, mix, edges) == pytest.approx(1.0, abs=1e-5)
    draws = np.random.default_rng(0).normal(0, mix.std, 200_000)
    assert total_variation(draws, mix, edges) < 0.01
