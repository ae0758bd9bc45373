"""Reference derivatives for checking the analytical algorithms.

Two independent routes are provided:

* dual numbers pushed through :func:`~rbdhess.dynamics.rnea` and
  :func:`~rbdhess.derivatives_fo.id_fo_derivatives` (exact to rounding), and
* central finite differences.

Configuration directions always use the local retraction
:func:`~rbdhess.model.integrate_config`, the same perturbation that defines
the analytical Lie derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dual as dl
from .derivatives_fo import FirstOrderDerivatives, id_fo_derivatives
from .derivatives_so import SecondOrderDerivatives
from .dynamics import accumulate, forward_pass, mass_matrix, rnea
from .model import JointState, KinematicModel, check_state, integrate_config
from .spatial import body_coriolis, crm
from .tensor_algebra import (
    cross_force_tensor,
    cross_motion_tensor,
    matrix_tensor_product,
    tensor_matrix_product,
)

VARIABLES = ("q", "qd", "qdd")


@dataclass(frozen=True)
class PerturbationDirection:
    joint: int
    dof: int
    variable: str = "q"

    def index(self, model: KinematicModel) -> int:
        if self.variable not in VARIABLES:
            raise ValueError(f"unknown variable {self.variable!r}")
        if not 0 <= self.dof < model.joint(self.joint).ndof:
            raise ValueError(f"joint {self.joint} has no DoF {self.dof}")
        return model.dof_offsets[self.joint] + self.dof


def seeded_state(model: KinematicModel, state: JointState, variable: str, directions) -> JointState:
    """``state`` with dual tangents ``directions`` (k x n) on one variable."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    q, qd, qdd = state
    if variable == "q":
        delta = dl.Dual(np.zeros(model.n), directions)
        return JointState(integrate_config(model, q, delta), qd, qdd)
    if variable == "qd":
        return JointState(q, dl.Dual(qd, directions), qdd)
    if variable == "qdd":
        return JointState(q, qd, dl.Dual(qdd, directions))
    raise ValueError(f"unknown variable {variable!r}")


def _tangents(x):
    """Move the dual tangent axis last so ``out[..., k]`` is direction ``k``."""
    return np.moveaxis(x.du, 0, -1)


def dual_id_directional(model: KinematicModel, state: JointState, direction: PerturbationDirection):
    """Exact directional derivative of ``rnea`` along one free mode."""
    check_state(model, state)
    e = np.zeros(model.n)
    e[direction.index(model)] = 1.0
    tau = rnea(model, seeded_state(model, state, direction.variable, e))
    return tau.du[0]


def dual_fo(model: KinematicModel, state: JointState) -> FirstOrderDerivatives:
    """First-order partials of ``rnea`` by forward-mode dual numbers."""
    check_state(model, state)
    eye = np.eye(model.n)
    cols = [_tangents(rnea(model, seeded_state(model, state, var, eye))) for var in VARIABLES]
    return FirstOrderDerivatives(*cols)


def _perturbed(model, state, variable, k, h):
    q, qd, qdd = state
    e = np.zeros(model.n)
    e[k] = h
    if variable == "q":
        return JointState(integrate_config(model, q, e), qd, qdd)
    if variable == "qd":
        return JointState(q, qd + e, qdd)
    return JointState(q, qd, qdd + e)


def _central(fn, model, state, variable, h):
    cols = []
    for k in range(model.n):
        plus = fn(_perturbed(model, state, variable, k, h))
        minus = fn(_perturbed(model, state, variable, k, -h))
        cols.append((plus - minus) / (2.0 * h))
    return np.stack(cols, axis=-1)


def fd_fo(model: KinematicModel, state: JointState, h: float = 1e-6) -> FirstOrderDerivatives:
    """Central-difference first-order partials of ``rnea``."""
    if not 0 < h < 1e-2:
        raise ValueError("step must satisfy 0 < h < 1e-2")
    check_state(model, state)

    def fn(s):
        return rnea(model, s)

    return FirstOrderDerivatives(*(_central(fn, model, state, var, h) for var in VARIABLES))


def so_oracle(model: KinematicModel, state: JointState, method: str = "dual", h: float = 1e-6) -> SecondOrderDerivatives:
    """Second-order partials by differentiating the analytical first-order ones.

    Page ``k`` of each tensor is the derivative along DoF ``k``; ``dM_dq``
    comes from the ``dtau/dqdd`` block, which is ``M(q)``.
    """
    check_state(model, state)
    if method == "dual":
        eye = np.eye(model.n)
        fq = id_fo_derivatives(model, seeded_state(model, state, "q", eye))
        fv = id_fo_derivatives(model, seeded_state(model, state, "qd", eye))
        return SecondOrderDerivatives(
            d2tau_dq2=_tangents(fq.dtau_dq),
            d2tau_dqd2=_tangents(fv.dtau_dqd),
            d2tau_dqd_dq=_tangents(fq.dtau_dqd),
            dM_dq=_tangents(fq.dtau_dqdd),
        )
    if method == "fd":
        if not 0 < h < 1e-2:
            raise ValueError("step must satisfy 0 < h < 1e-2")

        def fo(s):
            d = id_fo_derivatives(model, s)
            return np.stack([d.dtau_dq, d.dtau_dqd])

        gq = _central(fo, model, state, "q", h)
        gv = _central(fo, model, state, "qd", h)
        dM = _central(lambda s: mass_matrix(model, s.q), model, state, "q", h)
        return SecondOrderDerivatives(
            d2tau_dq2=gq[0], d2tau_dqd2=gv[1], d2tau_dqd_dq=gq[1], dM_dq=dM
        )
    raise ValueError(f"unknown method {method!r}")


def so_oracle_q_qd(model: KinematicModel, state: JointState):
    """``d2tau/dq dqd`` obtained by differentiating ``dtau/dq`` along ``qd``."""
    fv = id_fo_derivatives(model, seeded_state(model, state, "qd", np.eye(model.n)))
    return _tangents(fv.dtau_dq)



# ---------------------------------------------------------------------------
# Multi-DoF joint identities.  Each right-hand side is a tensor expression in
# forward-pass quantities; each left-hand side is the dual derivative of the
# matching quantity along the DoFs of joint j.  Composite Coriolis matrices
# use the halved convention here: ``B^C_i`` is a sum of ``body_coriolis``.

JOINT_IDENTITIES = (
    "S/q",
    "Phid/q",
    "vxS/q",
    "Psid/q",
    "I/q",
    "IC/q",
    "a/q",
    "Ia/q",
    "Psidd/q",
    "BC/q",
    "f/q",
    "fC/q",
    "S^T/q",
    "Phid/qd",
    "Psid/qd",
    "BC/qd",
)


def _coriolis_tensor(inertia, U):
    """Page ``k`` is ``body_coriolis(inertia, U[:, k])``."""
    return np.moveaxis(body_coriolis(inertia, U.T), 0, -1)


def _composite_coriolis_tensor(model, fp, root, U):
    return sum(_coriolis_tensor(fp.I[l], U) for l in model.subtree(root))


def _quantities(model, fp, qd, i):
    """The differentiated quantity of body ``i`` for every identity."""
    S = fp.S[i]
    half_BC = 0.5 * fp.BC[i]
    return {
        "S/q": S,
        "Phid/q": fp.Phid[i],
        "vxS/q": crm(S @ qd[model.dofs(i)]) @ S,
        "Psid/q": fp.Psid[i],
        "I/q": fp.I[i],
        "IC/q": fp.IC[i],
        "a/q": fp.a[i],
        "Ia/q": fp.I[i] @ fp.a[i],
        "Psidd/q": fp.Psidd[i],
        "BC/q": half_BC,
        "f/q": fp.f[i],
        "fC/q": fp.fC[i],
        "S^T/q": S.T,
        "Phid/qd": fp.Phid[i],
        "Psid/qd": fp.Psid[i],
        "BC/qd": half_BC,
    }


def _rhs(model, fp, qd, name, i, j):
    """Analytical derivative of quantity ``name`` of body ``i`` along joint ``j``,
    or ``None`` where it vanishes."""
    before = model.precedes(j, i)
    after = j != i and model.precedes(i, j)
    if name in ("IC/q", "BC/q", "fC/q", "BC/qd"):
        if not (before or after):
            return None
        r = i if before else j  # the composite that actually moves
    elif name == "Psid/qd":
        if not (before and j != i):
            return None
    elif not before:
        return None
    Si, Sj = fp.S[i], fp.S[j]
    Psid_j, Psidd_j = fp.Psid[j], fp.Psidd[j]
    Ii = fp.I[i]
    Ux, Uxf = cross_motion_tensor, cross_force_tensor

    def moved(X):  # S_j x~* X - X (S_j x~)
        return tensor_matrix_product(Uxf(Sj), X) - matrix_tensor_product(X, Ux(Sj))

    def force(X):  # S_j x~* f as a 6 x n_j matrix
        return tensor_matrix_product(Uxf(Sj), X)[:, 0, :]

    if name == "S/q":
        return tensor_matrix_product(Ux(Sj), Si)
    if name == "Phid/q":
        return tensor_matrix_product(Ux(Psid_j), Si) + tensor_matrix_product(Ux(Sj), fp.Phid[i])
    if name == "vxS/q":
        return tensor_matrix_product(Ux(Sj), crm(Si @ qd[model.dofs(i)]) @ Si)
    if name == "Psid/q":
        return tensor_matrix_product(Ux(Psid_j), Si) + tensor_matrix_product(Ux(Sj), fp.Psid[i])
    if name == "I/q":
        return moved(Ii)
    if name == "IC/q":
        return moved(fp.IC[r])
    if name == "a/q":
        return Psidd_j - crm(fp.v[i]) @ Psid_j - crm(fp.a[i]) @ Sj
    if name == "Ia/q":
        return force(Ii @ fp.a[i]) + Ii @ Psidd_j - Ii @ (crm(fp.v[i]) @ Psid_j)
    if name == "Psidd/q":
        return (
            tensor_matrix_product(Ux(Psidd_j), Si)
            + 2.0 * tensor_matrix_product(Ux(Psid_j), fp.Psid[i])
            + tensor_matrix_product(Ux(Sj), fp.Psidd[i])
        )
    if name == "BC/q":
        return _composite_coriolis_tensor(model, fp, r, Psid_j) + moved(0.5 * fp.BC[r])
    if name == "f/q":
        return Ii @ Psidd_j + force(fp.f[i]) + 2.0 * body_coriolis(Ii, fp.v[i]) @ Psid_j
    if name == "fC/q":
        return fp.IC[r] @ Psidd_j + force(fp.fC[r]) + fp.BC[r] @ Psid_j
    if name == "S^T/q":
        return matrix_tensor_product(-Si.T, Uxf(Sj))
    if name in ("Phid/qd", "Psid/qd"):
        return tensor_matrix_product(Ux(Sj), Si)
    if name == "BC/qd":
        return _composite_coriolis_tensor(model, fp, r, Sj)
    raise KeyError(name)


def check_identities_K(model: KinematicModel, state: JointState) -> dict[str, float]:
    """Worst relative error of each identity over all body pairs ``(i, j)``.

    Errors are normalised per identity by the largest entry seen on either
    side.  That scale is floored at ``1e-6`` of the largest scale over all
    identities, so an identity whose both sides vanish for the model (``vxS/q`` on
    single-DoF joints) reports rounding noise rather than noise over noise.
    """
    check_state(model, state)
    eye = np.eye(model.n)
    qd = np.asarray(state.qd, dtype=float)
    fp = accumulate(model, forward_pass(model, state))
    passes = {
        var: accumulate(model, forward_pass(model, seeded_state(model, state, var, eye)))
        for var in ("q", "qd")
    }
    diff = dict.fromkeys(JOINT_IDENTITIES, 0.0)
    scale = dict.fromkeys(JOINT_IDENTITIES, 0.0)
    for i in range(1, model.N + 1):
        lhs_of = {var: _quantities(model, f, qd, i) for var, f in passes.items()}
        for j in range(1, model.N + 1):
            sj = model.dofs(j)
            for name in JOINT_IDENTITIES:
                var = "qd" if name.endswith("/qd") else "q"
                lhs = np.moveaxis(lhs_of[var][name].du[sj], 0, -1)
                rhs = _rhs(model, fp, qd, name, i, j)
                if rhs is None:
                    rhs = np.zeros_like(lhs)
                diff[name] = max(diff[name], float(np.abs(lhs - rhs).max()))
                scale[name] = max(scale[name], float(np.abs(lhs).max()), float(np.abs(rhs).max()))
    floor = 1e-6 * max(scale.values())
    return {name: diff[name] / max(scale[name], floor) if floor > 0 else diff[name] for name in JOINT_IDENTITIES}


def dual_so(model: KinematicModel, state: JointState) -> SecondOrderDerivatives:
    return so_oracle(model, state, "dual")


def fd_so(model: KinematicModel, state: JointState, h: float = 1e-6) -> SecondOrderDerivatives:
    return so_oracle(model, state, "fd", h)
