import numpy as np
import pytest

from rbdhess.derivatives_fo import id_fo_derivatives
from rbdhess.model import JointState, quadruped, random_state, serial_chain
from rbdhess.oracle import (
    JOINT_IDENTITIES,
    PerturbationDirection,
    check_identities_K,
    dual_fo,
    dual_id_directional,
    fd_fo,
    so_oracle,
)

from conftest import mixed_tree, planar_pendulum, relerr


def test_pendulum_directional_derivative():
    mass, length, g = 1.3, 0.8, 9.81
    m = planar_pendulum(mass, length, g)
    for q in np.linspace(-2, 2, 5):
        s = JointState(np.array([q]), np.array([0.2]), np.array([0.1]))
        d = dual_id_directional(m, s, PerturbationDirection(1, 0, "q"))
        assert np.isclose(d[0], -mass * g * length * np.sin(q), rtol=1e-12, atol=1e-14)


def test_pendulum_fd_within_absolute_bound():
    m = planar_pendulum(1.0, 1.0, 1.0)
    s = JointState(np.array([0.7]), np.array([0.3]), np.array([0.2]))
    fd = fd_fo(m, s, h=1e-6)
    assert abs(fd.dtau_dq[0, 0] + np.sin(0.7)) < 1e-7


def test_direction_validation():
    m = serial_chain(2, "revolute", 0)
    with pytest.raises(ValueError):
        PerturbationDirection(1, 1).index(m)
    with pytest.raises(ValueError):
        PerturbationDirection(1, 0, "jerk").index(m)
    assert PerturbationDirection(2, 0, "qd").index(m) == 1


def test_fd_step_validation():
    m = serial_chain(1)
    s = random_state(m, 0)
    with pytest.raises(ValueError):
        fd_fo(m, s, h=0.5)
    with pytest.raises(ValueError):
        so_oracle(m, s, method="complex")


def test_directional_matches_full_jacobian_column():
    m = quadruped()
    s = random_state(m, 1)
    ref = dual_fo(m, s)
    d = PerturbationDirection(3, 0, "q")
    assert np.allclose(dual_id_directional(m, s, d), ref.dtau_dq[:, d.index(m)])


def test_dual_and_fd_oracles_agree():
    m = serial_chain(3, ("spherical", "free", "revolute"), 2)
    s = random_state(m, 5)
    assert relerr(dual_fo(m, s).dtau_dq, fd_fo(m, s).dtau_dq) < 1e-7
    a, b = so_oracle(m, s, "dual"), so_oracle(m, s, "fd")
    for x, y in zip(a.as_tuple(), b.as_tuple()):
        assert relerr(x, y, np.abs(a.d2tau_dq2).max()) < 1e-5


def test_dual_oracle_derivative_of_rnea_is_mass_matrix():
    m = serial_chain(4, "prismatic", 1)
    s = random_state(m, 0)
    assert relerr(dual_fo(m, s).dtau_dqdd, id_fo_derivatives(m, s).dtau_dqdd) < 1e-14


def test_k_identities_on_mixed_tree(tree):
    model, state = tree
    errors = check_identities_K(model, state)
    assert set(errors) == set(JOINT_IDENTITIES)
    assert max(errors.values()) < 1e-8

