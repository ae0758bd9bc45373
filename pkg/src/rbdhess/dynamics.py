"""Ground-frame kinematics, recursive Newton-Euler and the mass matrix.

Every spatial quantity is expressed in ground coordinates.  Gravity enters
only as the fictitious base acceleration ``a_0 = -a_g``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from . import dual as dl
from .model import JointState, KinematicModel, check_state, joint_transforms
from .spatial import body_coriolis, crf, crm, skew


def _rows(x, first=None):
    """Stacked per-body rows as a list indexed by body id."""
    return [first] + list(x)


def _per_body(model, cols):
    """Split stacked DoF rows ``(n, 6)`` into per-body ``6 x n_i`` matrices."""
    return [None] + [cols[model.dofs(i)].T for i in range(1, model.N + 1)]


@dataclass
class Kinematics:
    """Ground-frame placement data, stacked over bodies.  The list views are
    indexed by body id (0 unused)."""

    model: KinematicModel
    transforms: object  # body -> ground motion transforms, (N, 6, 6)
    columns: object  # all subspace columns stacked, (n, 6)
    inertias: object  # (N, 6, 6)

    @cached_property
    def X(self) -> list:
        return _rows(self.transforms)

    @cached_property
    def S(self) -> list:
        return _per_body(self.model, self.columns)

    @cached_property
    def I(self) -> list:
        return _rows(self.inertias)


@dataclass
class ForwardPassData:
    """Quantities of the forward sweep, stacked over bodies or DoFs.

    ``columns`` stacks the per-DoF 6-vectors ``[s, psid, psidd, phid]`` as an
    ``(n, 4, 6)`` array; ``inertias``, ``coriolis`` and ``forces`` hold the
    per-body seeds ``(N, ...)``.  The list views are indexed by body id.
    ``BC`` is the un-halved Coriolis composite (``2 B``).  ``IC``, ``BC`` and
    ``fC`` equal the per-body seeds until :func:`accumulate` runs; ``f``
    always keeps the per-body (non-composite) force.
    """

    model: KinematicModel
    kin: Kinematics
    velocities: object  # (N, 6)
    accelerations: object  # (N, 6)
    base_acceleration: object
    columns: object
    coriolis: object
    forces: object
    accumulated: bool = False

    @property
    def inertias(self):
        return self.kin.inertias

    def _column_block(self, b):
        return _per_body(self.model, self.columns[:, b])

    @cached_property
    def v(self) -> list:
        return _rows(self.velocities, np.zeros(6))

    @cached_property
    def a(self) -> list:
        return _rows(self.accelerations, self.base_acceleration)

    @property
    def S(self) -> list:
        return self.kin.S

    @cached_property
    def Psid(self) -> list:
        return self._column_block(1)

    @cached_property
    def Psidd(self) -> list:
        return self._column_block(2)

    @cached_property
    def Phid(self) -> list:
        return self._column_block(3)

    @property
    def I(self) -> list:
        return self.kin.I

    @property
    def X(self) -> list:
        return self.kin.X

    @cached_property
    def f(self) -> list:
        return _rows(self.forces)

    def _composite(self, per_body):
        if not self.accumulated:
            return _rows(per_body)
        return _rows(subtree_sums(self.model, per_body))

    @cached_property
    def IC(self) -> list:
        return self._composite(self.inertias)

    @cached_property
    def BC(self) -> list:
        return self._composite(self.coriolis)

    @cached_property
    def fC(self) -> list:
        return self._composite(self.forces)


def _transforms(R, lower):
    """Batched ``[[R, 0], [lower, R]]``."""
    X = dl.zeros(dl.real(R).shape[:-2] + (6, 6), like=dl.first_dual(R, lower))
    X[..., :3, :3] = R
    X[..., 3:, 3:] = R
    X[..., 3:, :3] = lower
    return X


def _motion_transforms(R, p):
    """Batched ``[[R, 0], [p^ R, R]]``."""
    return _transforms(R, skew(p) @ R)


def _inverse_motion_transforms(R, p):
    Rt = dl.swap_last(R)
    return _transforms(Rt, -(Rt @ skew(p)))


def kinematics(model: KinematicModel, q) -> Kinematics:
    Rj, pj = joint_transforms(model, q)
    Rpl, tpl = model.placements
    # pose of each body relative to its parent
    R_rel = list(Rpl @ Rj)
    p_rel = list(tpl + dl.batched_matvec(Rpl, pj))
    Rs, ps = [np.eye(3)], [np.zeros(3)]
    for i, lam in enumerate(model.parents[1:]):
        Rl = Rs[lam]
        Rs.append(Rl @ R_rel[i])
        ps.append(ps[lam] + Rl @ p_rel[i])
    R, p = dl.stack(Rs[1:]), dl.stack(ps[1:])
    X = _motion_transforms(R, p)
    Xinv = _inverse_motion_transforms(R, p)
    cols = dl.batched_matvec(X[model.dof_owner], model.local_subspace_columns)
    inertias = dl.swap_last(Xinv) @ (model.local_inertias @ Xinv)
    return Kinematics(model, X, cols, inertias)


def base_acceleration(model: KinematicModel):
    return np.concatenate([np.zeros(3), -np.asarray(model.gravity)])


def _motion(model: KinematicModel, state: JointState):
    """Kinematics plus body velocities and accelerations.

    Tree recursions such as ``v_i = v_parent + S_i qd_i`` are evaluated as
    sums over ancestors with the dense ancestor matrix.
    """
    check_state(model, state)
    q, qd, qdd = state
    kin = kinematics(model, q)
    Sc = kin.columns
    anc, own = model.ancestor_matrix, model.dof_matrix
    vJ = own @ (Sc * qd[:, None])
    v = anc @ vJ
    cv = crm(v)
    c = own @ (Sc * qdd[:, None]) + dl.batched_matvec(cv, vJ)
    a0 = base_acceleration(model)
    a = anc @ c + a0
    return kin, v, cv, a, a0


def _body_forces(I, v, a):
    return dl.batched_matvec(I, a) + dl.batched_matvec(crf(v), dl.batched_matvec(I, v))


def forward_pass(model: KinematicModel, state: JointState) -> ForwardPassData:
    """Velocities, accelerations, subspace derivatives and body forces."""
    kin, v, cv, a, a0 = _motion(model, state)
    Sc, owner = kin.columns, model.dof_owner
    # parent velocity / acceleration of each body; row 0 is the ground
    vp = dl.concatenate([np.zeros((1, 6)), v])[model.parent_rows]
    ap = dl.concatenate([a0[None], a])[model.parent_rows]
    cvp, cap = crm(vp)[owner], crm(ap)[owner]
    phid = dl.batched_matvec(cv[owner], Sc)
    psid = dl.batched_matvec(cvp, Sc)
    psidd = dl.batched_matvec(cap, Sc) + dl.batched_matvec(cvp, psid)
    I = kin.inertias
    BC = 2.0 * body_coriolis(I, v)
    return ForwardPassData(
        model, kin, v, a, a0,
        columns=dl.stack([Sc, psid, psidd, phid], axis=1), coriolis=BC, forces=_body_forces(I, v, a),
    )


def subtree_sums(model: KinematicModel, per_body):
    """Stacked composites: row ``k`` sums the rows of every body in the subtree of ``k + 1``."""
    if dl.is_dual(per_body):
        out = per_body.copy()
        for i in range(model.N, 0, -1):
            lam = model.parent(i)
            if lam > 0:
                out[lam - 1] = out[lam - 1] + out[i - 1]
        return out
    flat = per_body.reshape(model.N, -1)
    return (model.ancestor_matrix.T @ flat).reshape(per_body.shape)


def accumulate(model: KinematicModel, fp: ForwardPassData) -> ForwardPassData:
    """Copy of ``fp`` whose ``IC``, ``BC`` and ``fC`` hold subtree sums."""
    if fp.accumulated:
        return fp
    return replace(fp, accumulated=True)


def rnea(model: KinematicModel, state: JointState):
    """Generalized forces ``tau = M(q) qdd + C(q, qd) qd + g(q)``."""
    kin, v, _, a, _ = _motion(model, state)
    fC = subtree_sums(model, _body_forces(kin.inertias, v, a))[model.dof_owner]
    return dl.batched_matvec(fC[:, None, :], kin.columns)[:, 0]


def mass_matrix_from(model: KinematicModel, columns, IC):
    """``M`` from the stacked subspace columns ``(n, 6)`` and composite
    inertias ``(N, 6, 6)``: ``M[b, a] = S_b^T I_i^C S_a`` for ``b`` on the root
    path of ``a``'s body ``i``, mirrored to the other triangle."""
    K = columns @ dl.swap_last(dl.batched_matvec(IC[model.dof_owner], columns))
    return K * model.dof_precedes.T + dl.swap_last(K) * model.dof_strictly_precedes


def mass_matrix(model: KinematicModel, q):
    kin = kinematics(model, q)
    return mass_matrix_from(model, kin.columns, subtree_sums(model, kin.inertias))


def kinetic_energy(model: KinematicModel, state: JointState) -> float:
    fp = forward_pass(model, state)
    return sum(0.5 * fp.v[i] @ fp.I[i] @ fp.v[i] for i in range(1, model.N + 1))
