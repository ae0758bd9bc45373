"""Accuracy and structure checks shared by the ``verify`` command and the tests.

Every check reports an error already normalised so that it passes when
``error <= tolerance``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .derivatives_fo import id_fo_derivatives
from .derivatives_so import SecondOrderDerivatives, id_so_derivatives
from .dynamics import mass_matrix
from .model import JointState, KinematicModel, branched_chain, random_state, serial_chain
from .tensor_algebra import check_identities_m

TENSOR_NAMES = ("d2tau_dq2", "d2tau_dqd2", "d2tau_dqd_dq", "dM_dq")

CHECKS = ("fo", "so-dual", "so-fd", "identities-m", "identities-k", "symmetry", "sparsity")


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


def scaled_error(a, b, rtol: float, atol: float = 0.0, floor: float = 0.0) -> float:
    """``max|a - b|`` over ``max(max|a|, max|b|, floor, atol / rtol)``.

    ``scaled_error(a, b, rtol, atol) <= rtol`` is the usual mixed test
    ``max|a - b| <= max(rtol * scale, atol)``.  ``floor`` lets a quantity that
    is identically zero be judged against the size of its siblings.
    """
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), floor)
    if atol > 0:
        scale = max(scale, atol / rtol)
    diff = np.abs(a - b).max(initial=0.0)
    return float(diff / scale) if scale > 0 else float(diff)


def _largest(*arrays) -> float:
    return max(float(np.abs(x).max(initial=0.0)) for x in arrays)


def _tensor_errors(name, got: SecondOrderDerivatives, ref: SecondOrderDerivatives, rtol, atol=0.0):
    floor = _largest(*got.as_tuple())
    return [
        CheckResult(
            f"{name}:{t}", scaled_error(getattr(got, t), getattr(ref, t), rtol, atol, floor), rtol
        )
        for t in TENSOR_NAMES
    ]


def related_mask(model: KinematicModel) -> np.ndarray:
    """``mask[a, b, c]`` is true when the bodies owning DoFs ``a, b, c`` all lie
    on one root path, the only triples a second-order partial can couple."""
    owner = model.dof_owner + 1
    N = model.N
    rel = np.zeros((N + 1, N + 1), dtype=bool)
    for i in range(1, N + 1):
        for j in model.ancestors(i):
            rel[i, j] = rel[j, i] = True
    ra = rel[np.ix_(owner, owner)]
    return ra[:, :, None] & ra[:, None, :] & ra[None, :, :]


def structure_errors(model: KinematicModel, so: SecondOrderDerivatives) -> list[CheckResult]:
    owner = model.dof_owner
    different_joint = owner[:, None] != owner[None, :]
    asym_q = np.abs(so.d2tau_dq2 - so.d2tau_dq2.transpose(0, 2, 1))[:, different_joint]
    asym_qd = np.abs(so.d2tau_dqd2 - so.d2tau_dqd2.transpose(0, 2, 1))[:, different_joint]
    asym_M = np.abs(so.dM_dq - so.dM_dq.transpose(1, 0, 2))
    outside = ~related_mask(model)
    leak = max(np.abs(getattr(so, t))[outside].max(initial=0.0) for t in TENSOR_NAMES)
    return [
        CheckResult("symmetry:d2tau_dq2", float(asym_q.max(initial=0.0)), 0.0),
        CheckResult("symmetry:d2tau_dqd2", float(asym_qd.max(initial=0.0)), 0.0),
        CheckResult("symmetry:dM_dq", float(asym_M.max(initial=0.0)), 0.0),
        CheckResult("sparsity", float(leak), 0.0),
    ]


def verify_state(model: KinematicModel, state: JointState, checks=CHECKS) -> list[CheckResult]:
    """Run the model-dependent checks at one state."""
    out = []
    so = None
    if "fo" in checks:
        fo, ref = id_fo_derivatives(model, state), oracle.dual_fo(model, state)
        floor = _largest(fo.dtau_dq, fo.dtau_dqd, fo.dtau_dqdd)
        for t in ("dtau_dq", "dtau_dqd", "dtau_dqdd"):
            err = scaled_error(getattr(fo, t), getattr(ref, t), 1e-10, floor=floor)
            out.append(CheckResult(f"fo:{t}", err, 1e-10))
        err = scaled_error(fo.dtau_dqdd, mass_matrix(model, state.q), 1e-13)
        out.append(CheckResult("fo:mass_matrix", err, 1e-13))
    if any(c in checks for c in ("so-dual", "so-fd", "symmetry", "sparsity")):
        so = id_so_derivatives(model, state)
    if "so-dual" in checks:
        out += _tensor_errors("so-dual", so, oracle.so_oracle(model, state, "dual"), 1e-9, 1e-12)
    if "so-fd" in checks:
        out += _tensor_errors("so-fd", so, oracle.so_oracle(model, state, "fd"), 1e-4)
    if "identities-k" in checks:
        for name, err in oracle.check_identities_K(model, state).items():
            out.append(CheckResult(f"identities-k:{name}", err, 1e-8))
    if "symmetry" in checks or "sparsity" in checks:
        for r in structure_errors(model, so):
            if r.name.split(":")[0] in checks:
                out.append(r)
    return out


def verify_identities_m(instances: int = 200, seed: int = 0) -> list[CheckResult]:
    return [
        CheckResult(f"identities-m:{name}", err, 1e-13)
        for name, err in check_identities_m(instances, seed).items()
    ]


def worst_by_check(results) -> list[CheckResult]:
    """Collapse repeated check names to their worst error, keeping first-seen order."""
    worst: dict[str, CheckResult] = {}
    for r in results:
        if r.name not in worst or r.error > worst[r.name].error:
            worst[r.name] = r
    return list(worst.values())


# ---------------------------------------------------------------------------
# the standard random suite


@dataclass(frozen=True)
class SuiteCase:
    chain: str  # "serial" or "branched"
    bf: int
    joint: object
    N: int
    floating_base: bool
    seed: int

    def build(self) -> tuple[KinematicModel, JointState]:
        if self.chain == "serial":
            model = serial_chain(self.N, self.joint, self.seed, self.floating_base)
        else:
            model = branched_chain(self.N, self.bf, self.joint, self.seed, self.floating_base)
        return model, random_state(model, self.seed + 1000)


_JOINT_MIXES = (
    "revolute",
    "prismatic",
    "spherical",
    "free",
    ("revolute", "prismatic"),
    ("revolute", "spherical"),
    ("spherical", "prismatic", "revolute"),
    ("free", "revolute", "spherical", "prismatic"),
)
_CHAINS = (("serial", 0), ("branched", 2), ("branched", 3))


def standard_suite(count: int = 50, seed: int = 0, max_bodies: int = 24) -> list[SuiteCase]:
    """Deterministic spread of (model, state) cases over chain shape, joint
    mix, base type and size.  Multi-DoF-heavy mixes get smaller trees so the
    whole suite stays quick."""
    rng = np.random.default_rng(seed)
    cases = []
    for idx in range(count):
        chain, bf = _CHAINS[idx % len(_CHAINS)]
        joint = _JOINT_MIXES[idx % len(_JOINT_MIXES)]
        floating = bool((idx // 2) % 2)
        heavy = joint in ("spherical", "free") or "free" in joint
        cap = min(max_bodies, 10 if heavy else max_bodies)
        N = 1 if idx == 0 else int(rng.integers(1, cap + 1))
        if idx == 1:
            N = max_bodies
        cases.append(SuiteCase(chain, bf, joint, N, floating, seed * 1000 + idx))
    return cases
