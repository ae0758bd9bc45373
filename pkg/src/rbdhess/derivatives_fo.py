"""Analytical first-order partials of inverse dynamics.

For every body ``i`` and each ancestor ``j`` (``j`` on the root path of
``i``, ``j == i`` included)::

    dtau_i/dq_j   = S_i^T (2B_i^C Psid_j + I_i^C Psidd_j)
    dtau_j/dq_i   = S_j^T (2B_i^C Psid_i + I_i^C Psidd_i + (f_i^C xbar*) S_i)   (j != i)
    dtau_i/dqd_j  = S_i^T (2B_i^C S_j + I_i^C (Psid_j + Phid_j))
    dtau_j/dqd_i  = S_j^T (2B_i^C S_i + I_i^C (Psid_i + Phid_i))                (j != i)

Each line is evaluated for all DoF pairs at once as a dense product, then
masked to the pairs whose bodies are ordered that way.  This shares nothing
with the second-order sweep, so the two can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dual as dl
from .dynamics import ForwardPassData, forward_pass, mass_matrix_from, subtree_sums
from .model import JointState, KinematicModel
from .spatial import crf_bar


@dataclass
class FirstOrderDerivatives:
    dtau_dq: np.ndarray
    dtau_dqd: np.ndarray
    dtau_dqdd: np.ndarray


def fo_from_pass(model: KinematicModel, fp: ForwardPassData) -> FirstOrderDerivatives:
    mv, T = dl.batched_matvec, dl.swap_last
    owner = model.dof_owner
    IC, BC = subtree_sums(model, fp.inertias), subtree_sums(model, fp.coriolis)
    fC = subtree_sums(model, fp.forces)
    IC, BC, fC = IC[owner], BC[owner], fC[owner]
    cols = fp.columns
    S, Psid, Psidd = cols[:, 0], cols[:, 1], cols[:, 2]
    PP = Psid + cols[:, 3]
    # row a: S_a^T 2B_i^C and S_a^T I_i^C for the body i owning DoF a
    row_B, row_I = mv(T(BC), S), mv(IC, S)
    t_q = mv(BC, Psid) + mv(IC, Psidd) + mv(crf_bar(fC), S)
    t_qd = mv(BC, S) + mv(IC, PP)
    own_row, own_col = model.dof_precedes, model.dof_strictly_precedes.T
    dq = (row_B @ T(Psid) + row_I @ T(Psidd)) * own_row + (S @ T(t_q)) * own_col
    dqd = (row_B @ T(S) + row_I @ T(PP)) * own_row + (S @ T(t_qd)) * own_col
    M = mass_matrix_from(model, S, subtree_sums(model, fp.inertias))
    return FirstOrderDerivatives(dq, dqd, M)


def id_fo_derivatives(model: KinematicModel, state: JointState) -> FirstOrderDerivatives:
    """``dtau/dq``, ``dtau/dqd`` and ``dtau/dqdd == M(q)`` at ``state``."""
    return fo_from_pass(model, forward_pass(model, state))
