import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbdhess import dual as dl
from rbdhess.model import (
    Body,
    Joint,
    JointState,
    KinematicModel,
    ModelError,
    branched_chain,
    check_state,
    dump_model,
    integrate_config,
    load_model,
    model_to_dict,
    quadruped,
    quat_exp,
    quat_mul,
    quat_to_rot,
    random_state,
    same_model,
    serial_chain,
)

from conftest import EYE_QUAT, small_models


def _body(idx, parent, joint=None, **kw):
    args = dict(translation=np.zeros(3), quaternion=EYE_QUAT, mass=1.0, com=np.zeros(3), rotational=np.eye(3))
    args.update(kw)
    return Body(idx, parent, joint or Joint.revolute(), args["translation"], args["quaternion"],
                args["mass"], args["com"], args["rotational"])


def test_joint_dimensions():
    assert [(Joint(k).ndof, Joint(k).nq) for k in ("spherical", "free")] == [(3, 4), (6, 7)]
    assert (Joint.revolute().ndof, Joint.prismatic().nq) == (1, 1)


@pytest.mark.parametrize("kind, axis, msg", [
    ("helical", None, "unknown joint"),
    ("revolute", None, "requires an axis"),
    ("revolute", (1.0, 1.0, 0.0), "non-unit"),
    ("spherical", (1.0, 0, 0), "takes no axis"),
])
def test_joint_validation(kind, axis, msg):
    with pytest.raises(ModelError, match=msg):
        Joint(kind, axis)


def test_body_validation():
    with pytest.raises(ModelError, match="mass"):
        _body(1, 0, mass=0.0)
    with pytest.raises(ModelError, match="not symmetric"):
        _body(1, 0, rotational=np.array([[1, 0.2, 0], [0, 1, 0], [0, 0, 1.0]]))
    with pytest.raises(ModelError, match="quaternion"):
        _body(1, 0, quaternion=np.array([1.0, 1, 0, 0]))


def test_parent_ordering_must_be_topological():
    with pytest.raises(ModelError, match="non-topological"):
        KinematicModel((_body(1, 0), _body(2, 3), _body(3, 1)))
    with pytest.raises(ModelError, match="no bodies"):
        KinematicModel(())


def test_topology_queries():
    m = branched_chain(7, 2, "revolute", 0)
    assert m.parents[1:] == (0, 1, 1, 2, 2, 3, 3)
    assert m.ancestors(7) == [7, 3, 1]
    assert m.precedes(1, 6) and not m.precedes(2, 6)
    assert m.subtree(2) == [2, 4, 5]
    assert m.depth == 3 and m.level(4) == 3


def test_generators_shape():
    assert serial_chain(5).N == 5 and serial_chain(5).depth == 5
    m = branched_chain(13, 3, "spherical", 1, floating_base=True)
    assert m.joint(1).kind == "free" and m.joint(2).kind == "spherical"
    assert m.n == 6 + 12 * 3
    q = quadruped()
    assert (q.N, q.n, q.nq) == (13, 18, 19)
    with pytest.raises(ValueError, match="N must be"):
        serial_chain(0)


def test_generation_is_deterministic():
    a = branched_chain(9, 2, ("revolute", "prismatic"), seed=4)
    b = branched_chain(9, 2, ("revolute", "prismatic"), seed=4)
    assert same_model(a, b)
    assert not same_model(a, branched_chain(9, 2, ("revolute", "prismatic"), seed=5))


@given(small_models())
def test_json_round_trip_is_lossless(case):
    model, _ = case
    again = load_model(dump_model(model))
    assert same_model(model, again)
    assert json.loads(dump_model(again)) == model_to_dict(model)


@pytest.mark.parametrize("edit, msg", [
    (lambda d: d.pop("bodies"), "bodies"),
    (lambda d: d["bodies"][0]["joint"].update(type="screw"), "unknown joint"),
    (lambda d: d["bodies"][0]["inertia"].update(com=[0, 0]), "expected 3 numbers"),
    (lambda d: d["bodies"][0]["inertia"].update(spatial=(np.eye(6) + np.eye(6, k=1)).tolist()), "not symmetric"),
    (lambda d: d["bodies"][1].update(parent=5), "non-topological"),
])
def test_load_rejects_bad_documents(edit, msg):
    doc = model_to_dict(serial_chain(3, seed=2))
    edit(doc)
    with pytest.raises(ModelError, match=msg):
        load_model(json.dumps(doc))


def test_load_reports_json_position():
    with pytest.raises(ModelError, match="line 1"):
        load_model("{bad json")


def test_spatial_inertia_field_is_accepted():
    m = serial_chain(2, seed=3)
    doc = model_to_dict(m)
    doc["bodies"][1]["inertia"] = {"spatial": m.body(2).inertia.tolist()}
    again = load_model(json.dumps(doc))
    assert np.allclose(again.body(2).inertia, m.body(2).inertia, atol=1e-14)


def test_check_state_shapes_and_quaternions():
    m = serial_chain(2, "spherical", 0)
    good = random_state(m, 0)
    check_state(m, good)
    with pytest.raises(ValueError, match="configuration"):
        check_state(m, JointState(good.q[:-1], good.qd, good.qdd))
    with pytest.raises(ValueError, match="qd"):
        check_state(m, JointState(good.q, good.qd[:2], good.qdd))
    bad = good.q.copy()
    bad[:4] *= 2
    with pytest.raises(ValueError, match="unit-norm"):
        check_state(m, JointState(bad, good.qd, good.qdd))


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_quaternion_exponential_matches_rotation(w):
    w = np.array(w)
    R = quat_to_rot(quat_exp(w))
    theta = np.linalg.norm(w)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    if theta > 1e-9:
        assert np.allclose(R @ w, w, atol=1e-12)  # axis is fixed
        assert np.isclose(np.trace(R), 1 + 2 * np.cos(theta))


def test_quaternion_product_composes_rotations():
    rng = np.random.default_rng(0)
    a, b = (quat_exp(rng.standard_normal(3)) for _ in range(2))
    assert np.allclose(quat_to_rot(quat_mul(a, b)), quat_to_rot(a) @ quat_to_rot(b))


def test_integrate_config_is_local_step():
    m = serial_chain(1, "free", 0)
    q = random_state(m, 1).q
    delta = np.array([0.0, 0, 0, 0.1, 0, 0])
    q2 = integrate_config(m, q, delta)
    R = quat_to_rot(q[3:7])
    # pure translation step moves the origin along the body x axis
    assert np.allclose(q2[:3] - q[:3], 0.1 * R[:, 0])
    assert np.allclose(q2[3:], q[3:])


def test_integrate_config_is_dual_aware():
    m = serial_chain(2, "spherical", 0)
    q = random_state(m, 1).q
    delta = dl.Dual(np.zeros(m.n), np.eye(m.n))
    out = integrate_config(m, q, delta)
    assert out.du.shape == (m.n, m.nq)
    # tangent of q * exp(w/2) along w = e_x is q * (0, 1/2, 0, 0)
    expected = 0.5 * quat_mul(q[:4], np.array([0.0, 1, 0, 0]))
    assert np.allclose(out.du[0, :4], expected)
