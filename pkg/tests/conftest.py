import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rbdhess.model import Body, Joint, JointState, KinematicModel, branched_chain, random_state, serial_chain

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

JOINT_TYPES = ("revolute", "prismatic", "spherical", "free")

EYE_QUAT = np.array([1.0, 0, 0, 0])


def planar_pendulum(mass=1.3, length=0.8, g=9.81) -> KinematicModel:
    """Point mass on a massless rod, revolute about z, COM along x, gravity along -y."""
    body = Body(1, 0, Joint.revolute((0, 0, 1.0)), np.zeros(3), EYE_QUAT, mass,
                np.array([length, 0, 0]), np.zeros((3, 3)))
    return KinematicModel((body,), gravity=(0.0, -g, 0.0), name="pendulum")


def mixed_tree(N=10, seed=7) -> KinematicModel:
    """Branched tree cycling through every joint type, floating base."""
    return branched_chain(N, 2, ("spherical", "revolute", "prismatic", "free"), seed, True)


def relerr(a, b, floor=0.0):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(initial=0), np.abs(b).max(initial=0), floor)
    return float(np.abs(a - b).max(initial=0) / scale) if scale > 0 else 0.0


@st.composite
def small_models(draw, max_bodies=6):
    """A small random tree of mixed joints, with a random state."""
    N = draw(st.integers(1, max_bodies))
    joints = tuple(draw(st.lists(st.sampled_from(JOINT_TYPES), min_size=1, max_size=4)))
    seed = draw(st.integers(0, 10_000))
    floating = draw(st.booleans())
    if draw(st.booleans()):
        model = serial_chain(N, joints, seed, floating)
    else:
        model = branched_chain(N, draw(st.integers(2, 3)), joints, seed, floating)
    return model, random_state(model, seed + 1)


@pytest.fixture
def pendulum():
    return planar_pendulum()


@pytest.fixture
def tree():
    model = mixed_tree()
    return model, random_state(model, 3)


def zero_state(model) -> JointState:
    return JointState(model.neutral_configuration(), np.zeros(model.n), np.zeros(model.n))
