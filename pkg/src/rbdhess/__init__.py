"""Analytical first- and second-order partials of rigid-body inverse dynamics."""

from .derivatives_fo import FirstOrderDerivatives, id_fo_derivatives
from .derivatives_so import SecondOrderDerivatives, cross_hessian_q_qd, id_so_derivatives
from .dynamics import forward_pass, mass_matrix, rnea
from .model import (
    Body,
    Joint,
    JointState,
    KinematicModel,
    ModelError,
    branched_chain,
    dump_model,
    load_model,
    load_model_file,
    quadruped,
    random_state,
    serial_chain,
)

__all__ = [
    "Body",
    "FirstOrderDerivatives",
    "Joint",
    "JointState",
    "KinematicModel",
    "ModelError",
    "SecondOrderDerivatives",
    "branched_chain",
    "cross_hessian_q_qd",
    "dump_model",
    "forward_pass",
    "id_fo_derivatives",
    "id_so_derivatives",
    "load_model",
    "load_model_file",
    "mass_matrix",
    "quadruped",
    "random_state",
    "rnea",
    "serial_chain",
]
