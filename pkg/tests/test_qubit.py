import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from weakmeas import (
    MINUS,
    PLUS,
    PLUS_X,
    SIGMA_Z,
    BipartiteScenario,
    NearOrthogonalPostSelection,
    Observable,
    QubitState,
    basis_from_angle,
    born_probabilities,
    inner,
    pointer_shift,
    weak_value,
)
from weakmeas.qubit import expectation
from weakmeas.scenario import update_single_after_B

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


@given(angles)
def test_basis_is_orthonormal(theta):
    b = basis_from_angle(theta)
    assert abs(inner(b.plus_state, b.plus_state) - 1) < 1e-14
    assert abs(inner(b.minus_state, b.minus_state) - 1) < 1e-14
    assert abs(inner(b.plus_state, b.minus_state)) < 1e-14


@given(angles)
def test_basis_matches_reference_vectors(theta):
    b = basis_from_angle(theta)
    for sign in (1, -1):
        np.testing.assert_allclose(b.state(sign).as_array(), oracles.spin_state(theta, sign), atol=1e-15)


@given(angles)
def test_basis_vectors_are_eigenvectors(theta):
    obs = Observable.from_angle(theta)
    b = basis_from_angle(theta)
    for sign in (1, -1):
        v = b.state(sign).as_array()
        np.testing.assert_allclose(obs.matrix() @ v, sign * v, atol=1e-14)


def test_eigenstate_weak_values():
    assert weak_value(PLUS, PLUS_X, SIGMA_Z) == pytest.approx(1.0, abs=1e-15)
    assert weak_value(MINUS, PLUS_X, SIGMA_Z) == pytest.approx(-1.0, abs=1e-15)


def test_post_measurement_state_weak_value():
    # after Bob's +w outcome A is (alpha|+> + beta|->)/norm with beta/alpha = sqrt(10)
    sc = BipartiteScenario(1 / math.sqrt(12), math.sqrt(5 / 6), 1 / math.sqrt(12), g=0.05)
    state = update_single_after_B(sc)[0].state
    wv = weak_value(state, PLUS_X, SIGMA_Z)
    expected = (1 - math.sqrt(10)) / (1 + math.sqrt(10))
    assert wv.real == pytest.approx(expected, abs=1e-14)
    assert abs(wv.imag) < 1e-15
    assert pointer_shift(0.05, wv) == pytest.approx(0.05 * expected, abs=1e-15)


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_weak_value_matches_matrix_formula(t_pre, t_post, t_obs):
    pre = basis_from_angle(t_pre).plus_state
    post = basis_from_angle(t_post).plus_state
    if abs(inner(post, pre)) < 1e-6:
        return
    obs = Observable.from_angle(t_obs)
    ref = oracles.weak_value_matrix(pre.as_array(), post.as_array(), obs.matrix())
    assert abs(weak_value(pre, post, obs) - ref) < 1e-9 * max(1.0, abs(ref))


def test_orthogonal_postselection_rejected():
    with pytest.raises(NearOrthogonalPostSelection):
        weak_value(PLUS, MINUS, SIGMA_Z)


@given(angles, angles)
def test_born_probabilities_sum_to_one(t_state, t_basis):
    p = born_probabilities(basis_from_angle(t_state).plus_state, basis_from_angle(t_basis))
    assert sum(p) == pytest.approx(1.0, abs=1e-14)
    assert p[0] == pytest.approx(math.cos((t_state - t_basis) / 2) ** 2, abs=1e-14)


def test_expectation_of_plus_x():
    assert expectation(PLUS_X, SIGMA_Z) == pytest.approx(0.0, abs=1e-15)
    assert expectation(PLUS, SIGMA_Z) == 1.0


def test_state_validation():
    with pytest.raises(ValueError):
        Observable((1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        pointer_shift(-0.1, 1.0)
    s = QubitState.from_amplitudes(3.0, 4.0)
    assert s.norm == pytest.approx(1.0)
