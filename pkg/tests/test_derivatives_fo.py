import numpy as np
import pytest
from hypothesis import given

from rbdhess.derivatives_fo import id_fo_derivatives
from rbdhess.dynamics import mass_matrix
from rbdhess.model import JointState, quadruped, random_state
from rbdhess.oracle import dual_fo, fd_fo

from conftest import planar_pendulum, relerr, small_models


@pytest.mark.parametrize("q", np.linspace(-3, 3, 7))
def test_pendulum_closed_form(q):
    mass, length, g = 1.3, 0.8, 9.81
    m = planar_pendulum(mass, length, g)
    fo = id_fo_derivatives(m, JointState(np.array([q]), np.array([0.9]), np.array([0.4])))
    assert np.isclose(fo.dtau_dq[0, 0], -mass * g * length * np.sin(q), rtol=1e-12, atol=1e-14)
    assert fo.dtau_dqd[0, 0] == pytest.approx(0.0, abs=1e-14)
    assert np.isclose(fo.dtau_dqdd[0, 0], mass * length**2, rtol=1e-14)


@given(small_models())
def test_matches_dual_oracle(case):
    model, state = case
    fo, ref = id_fo_derivatives(model, state), dual_fo(model, state)
    floor = max(np.abs(fo.dtau_dq).max(), np.abs(fo.dtau_dqd).max(), np.abs(fo.dtau_dqdd).max())
    assert relerr(fo.dtau_dq, ref.dtau_dq, floor) < 1e-10
    assert relerr(fo.dtau_dqd, ref.dtau_dqd, floor) < 1e-10


@given(small_models())
def test_acceleration_block_is_mass_matrix(case):
    model, state = case
    assert relerr(id_fo_derivatives(model, state).dtau_dqdd, mass_matrix(model, state.q)) < 1e-13


def test_matches_finite_differences_on_quadruped():
    model = quadruped()
    state = random_state(model, 2)
    fo, fd = id_fo_derivatives(model, state), fd_fo(model, state)
    assert relerr(fo.dtau_dq, fd.dtau_dq) < 1e-7
    assert relerr(fo.dtau_dqd, fd.dtau_dqd) < 1e-7
