"""Kinematic trees with Lie-group joints.

Conventions:

* Bodies are numbered ``1..N`` with ``parent < id``; ``0`` is the ground.
* Spherical and free joints store unit quaternions scalar-first
  ``(w, x, y, z)``.  A free joint's configuration is
  ``[translation (3), quaternion (4)]`` and its velocity is the body twist
  ``[omega, v]`` in the child frame, so its motion subspace is ``Identity(6)``.
* Configuration perturbations are local (right multiplication by the
  exponential), which keeps every motion subspace constant in its own frame.

Functions touching configurations are written against :mod:`rbdhess.dual`
helpers so they also run on dual-valued inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import dual as dl
from .spatial import as_inertia, skew, spatial_inertia

JOINT_KINDS = ("revolute", "prismatic", "spherical", "free")
_NDOF = {"revolute": 1, "prismatic": 1, "spherical": 3, "free": 6}
_NQ = {"revolute": 1, "prismatic": 1, "spherical": 4, "free": 7}

AXIS_TOL = 1e-12
QUAT_TOL = 1e-9


class ModelError(ValueError):
    """Malformed model document or violated model invariant."""


@dataclass(frozen=True)
class Joint:
    kind: str
    axis: tuple | None = None

    def __post_init__(self):
        if self.kind not in JOINT_KINDS:
            raise ModelError(f"unknown joint type {self.kind!r}")
        if self.kind in ("revolute", "prismatic"):
            if self.axis is None:
                raise ModelError(f"{self.kind} joint requires an axis")
            axis = tuple(float(a) for a in self.axis)
            if len(axis) != 3 or abs(math.sqrt(sum(a * a for a in axis)) - 1.0) > AXIS_TOL:
                raise ModelError(f"non-unit joint axis {axis}")
            object.__setattr__(self, "axis", axis)
        elif self.axis is not None:
            raise ModelError(f"{self.kind} joint takes no axis")

    @classmethod
    def revolute(cls, axis=(0.0, 0.0, 1.0)):
        return cls("revolute", tuple(axis))

    @classmethod
    def prismatic(cls, axis=(0.0, 0.0, 1.0)):
        return cls("prismatic", tuple(axis))

    @classmethod
    def spherical(cls):
        return cls("spherical")

    @classmethod
    def free(cls):
        return cls("free")

    @property
    def ndof(self) -> int:
        return _NDOF[self.kind]

    @property
    def nq(self) -> int:
        return _NQ[self.kind]

    def motion_subspace(self):
        """Joint motion subspace in the child frame (6 x ndof)."""
        if self.kind == "revolute":
            return np.concatenate([self.axis, np.zeros(3)])[:, None]
        if self.kind == "prismatic":
            return np.concatenate([np.zeros(3), self.axis])[:, None]
        if self.kind == "spherical":
            return np.vstack([np.eye(3), np.zeros((3, 3))])
        return np.eye(6)

    @cached_property
    def _axis_terms(self):
        """Axis array and, for Rodrigues' formula, ``K`` and ``K @ K``."""
        a = np.asarray(self.axis, dtype=float)
        K = skew(a)
        return a, K, K @ K

    def transform(self, qj):
        """Child-frame pose ``(R, p)`` relative to the joint frame."""
        if self.kind == "revolute":
            _, K, K2 = self._axis_terms
            angle = qj[0]
            return np.eye(3) + dl.sin(angle) * K + (1.0 - dl.cos(angle)) * K2, np.zeros(3)
        if self.kind == "prismatic":
            return np.eye(3), self._axis_terms[0] * qj[0]
        if self.kind == "spherical":
            return quat_to_rot(qj), np.zeros(3)
        return quat_to_rot(qj[3:7]), qj[0:3]

    def neutral(self):
        if self.kind == "spherical":
            return np.array([1.0, 0, 0, 0])
        if self.kind == "free":
            return np.array([0.0, 0, 0, 1, 0, 0, 0])
        return np.zeros(1)


@dataclass(frozen=True, eq=False)
class Body:
    id: int
    parent: int
    joint: Joint
    translation: np.ndarray
    quaternion: np.ndarray
    mass: float
    com: np.ndarray
    rotational: np.ndarray  # 3x3, about the centre of mass
    inertia: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tr = np.asarray(self.translation, dtype=float).reshape(3)
        qu = np.asarray(self.quaternion, dtype=float).reshape(4)
        if abs(np.linalg.norm(qu) - 1.0) > QUAT_TOL:
            raise ModelError(f"body {self.id}: placement quaternion is not unit-norm")
        com = np.asarray(self.com, dtype=float).reshape(3)
        rot = np.asarray(self.rotational, dtype=float).reshape(3, 3)
        if not self.mass > 0:
            raise ModelError(f"body {self.id}: mass must be positive")
        if np.abs(rot - rot.T).max() > 1e-12 * max(np.abs(rot).max(), 1.0):
            raise ModelError(f"body {self.id}: rotational inertia is not symmetric")
        if np.linalg.eigvalsh(rot).min() < -1e-12:
            raise ModelError(f"body {self.id}: non-PSD inertia")
        try:
            inertia = as_inertia(spatial_inertia(self.mass, com, rot))
        except ValueError as exc:
            raise ModelError(f"body {self.id}: {exc}") from None
        for name, val in (("translation", tr), ("quaternion", qu), ("com", com), ("rotational", rot)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        inertia.setflags(write=False)
        object.__setattr__(self, "inertia", inertia)

    @cached_property
    def placement_rotation(self):
        R = quat_to_rot(self.quaternion)
        R.setflags(write=False)
        return R


@dataclass(frozen=True, eq=False)
class KinematicModel:
    bodies: tuple
    gravity: tuple = (0.0, 0.0, -9.81)
    name: str = "model"

    # derived, filled in __post_init__
    parents: tuple = field(init=False, repr=False)
    dof_offsets: tuple = field(init=False, repr=False)
    q_offsets: tuple = field(init=False, repr=False)
    n: int = field(init=False)
    nq: int = field(init=False)
    depth: int = field(init=False)

    def __post_init__(self):
        bodies = tuple(self.bodies)
        if not bodies:
            raise ModelError("model has no bodies")
        for idx, b in enumerate(bodies, start=1):
            if b.id != idx:
                raise ModelError(f"body ids must be 1..N in order, got {b.id} at position {idx}")
            if not 0 <= b.parent < b.id:
                raise ModelError(f"non-topological parent ordering: body {b.id} has parent {b.parent}")
        g = tuple(float(x) for x in self.gravity)
        if len(g) != 3:
            raise ModelError("gravity must be a 3-vector")
        parents = (None,) + tuple(b.parent for b in bodies)
        dof, qo = [None], [None]
        n = nq = 0
        levels = [0]
        for b in bodies:
            dof.append(n)
            qo.append(nq)
            n += b.joint.ndof
            nq += b.joint.nq
            levels.append(levels[b.parent] + 1)
        for name, val in (
            ("bodies", bodies),
            ("gravity", g),
            ("parents", parents),
            ("dof_offsets", tuple(dof)),
            ("q_offsets", tuple(qo)),
            ("n", n),
            ("nq", nq),
            ("depth", max(levels)),
        ):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "_levels", tuple(levels))

    @property
    def N(self) -> int:
        return len(self.bodies)

    def body(self, i: int) -> Body:
        return self.bodies[i - 1]

    def joint(self, i: int) -> Joint:
        return self.bodies[i - 1].joint

    def parent(self, i: int) -> int:
        return self.parents[i]

    def level(self, i: int) -> int:
        return self._levels[i]

    def dofs(self, i: int) -> slice:
        o = self.dof_offsets[i]
        return slice(o, o + self.bodies[i - 1].joint.ndof)

    def qs(self, i: int) -> slice:
        o = self.q_offsets[i]
        return slice(o, o + self.bodies[i - 1].joint.nq)

    def ancestors(self, i: int) -> list[int]:
        """``[i, parent(i), ..., root]`` (ground excluded)."""
        out = []
        while i > 0:
            out.append(i)
            i = self.parents[i]
        return out

    def precedes(self, j: int, i: int) -> bool:
        """``j`` lies on the path from ``i`` to the root (``j == i`` included)."""
        while i > j:
            i = self.parents[i]
        return i == j

    def subtree(self, i: int) -> list[int]:
        return [k for k in range(i, self.N + 1) if self.precedes(i, k)]

    def neutral_configuration(self):
        return np.concatenate([b.joint.neutral() for b in self.bodies])

    # -- dense topology arrays for batched sweeps (0-based body rows) --------
    @cached_property
    def dof_owner(self) -> np.ndarray:
        """Body row (``id - 1``) owning each DoF."""
        return np.repeat(np.arange(self.N), [b.joint.ndof for b in self.bodies])

    @cached_property
    def parent_rows(self) -> np.ndarray:
        """Row of each body's parent in an array whose row 0 is the ground."""
        return np.array(self.parents[1:])

    @cached_property
    def ancestor_matrix(self) -> np.ndarray:
        """``A[i, k] == 1`` iff body ``k + 1`` precedes body ``i + 1``."""
        A = np.zeros((self.N, self.N))
        for i in range(1, self.N + 1):
            A[i - 1, [k - 1 for k in self.ancestors(i)]] = 1.0
        return A

    @cached_property
    def dof_precedes(self) -> np.ndarray:
        """``P[a, b]`` is true iff the body owning DoF ``b`` precedes the one owning ``a``."""
        owner = self.dof_owner
        return self.ancestor_matrix[np.ix_(owner, owner)].astype(bool)

    @cached_property
    def dof_strictly_precedes(self) -> np.ndarray:
        owner = self.dof_owner
        return self.dof_precedes & (owner[:, None] != owner[None, :])

    @cached_property
    def dof_matrix(self) -> np.ndarray:
        """``D[i, c] == 1`` iff DoF ``c`` belongs to body ``i + 1``."""
        D = np.zeros((self.N, self.n))
        D[self.dof_owner, np.arange(self.n)] = 1.0
        return D

    @cached_property
    def local_subspace_columns(self) -> np.ndarray:
        """Joint-frame motion subspace columns, one row per DoF ``(n, 6)``."""
        return np.concatenate([b.joint.motion_subspace().T for b in self.bodies])

    @cached_property
    def root_paths(self) -> tuple:
        """Per body id: DoF indices along ``ancestors(i)`` and, for each ancestor
        ``j``, the half-open range ``(j, start, end)`` its DoFs occupy there."""
        out = [None]
        for i in range(1, self.N + 1):
            idx, blocks = [], []
            for j in self.ancestors(i):
                s = self.dofs(j)
                blocks.append((j, len(idx), len(idx) + s.stop - s.start))
                idx.extend(range(s.start, s.stop))
            out.append((idx, blocks))
        return tuple(out)

    @cached_property
    def joint_groups(self) -> dict:
        """Per joint kind: body rows, their configuration indices ``(M, nq)`` and
        the stacked axis terms ``(axes, K, K @ K)`` for one-DoF kinds."""
        groups = {}
        for kind in JOINT_KINDS:
            ids = [b.id for b in self.bodies if b.joint.kind == kind]
            if not ids:
                continue
            qidx = np.array([list(range(self.qs(i).start, self.qs(i).stop)) for i in ids])
            terms = None
            if kind in ("revolute", "prismatic"):
                terms = tuple(np.stack(t) for t in zip(*(self.joint(i)._axis_terms for i in ids)))
            groups[kind] = (np.array(ids) - 1, qidx, terms)
        return groups

    @cached_property
    def placements(self) -> tuple:
        """Stacked parent-frame placements: rotations ``(N, 3, 3)``, translations ``(N, 3)``."""
        return (
            np.stack([b.placement_rotation for b in self.bodies]),
            np.stack([b.translation for b in self.bodies]),
        )

    @cached_property
    def local_inertias(self) -> np.ndarray:
        return np.stack([b.inertia for b in self.bodies])


@dataclass
class JointState:
    q: np.ndarray
    qd: np.ndarray
    qdd: np.ndarray

    def __iter__(self):
        return iter((self.q, self.qd, self.qdd))


def check_state(model: KinematicModel, state: JointState) -> None:
    """Raise ``ValueError`` if ``state`` does not fit ``model``."""
    q, qd, qdd = (dl.real(x) for x in state)
    if q.shape != (model.nq,):
        raise ValueError(f"configuration has length {q.shape}, model expects {model.nq}")
    for name, x in (("qd", qd), ("qdd", qdd)):
        if x.shape != (model.n,):
            raise ValueError(f"{name} has shape {x.shape}, model expects ({model.n},)")
    for i in range(1, model.N + 1):
        jt = model.joint(i)
        if jt.kind in ("spherical", "free"):
            quat = q[model.qs(i)][-4:]
            if abs(np.linalg.norm(quat) - 1.0) > QUAT_TOL:
                raise ValueError(f"joint {i}: configuration quaternion is not unit-norm")


# ---------------------------------------------------------------------------
# rotations (dual-aware)


def quat_to_rot(quat):
    """Rotation matrix of a unit quaternion; batched over leading axes."""
    w, x, y, z = quat[..., 0], quat[..., 1], quat[..., 2], quat[..., 3]
    rows = [
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ]
    return dl.stack([dl.stack(r, axis=-1) for r in rows], axis=-2)


def quat_mul(a, b):
    aw, ax, ay, az = a[0], a[1], a[2], a[3]
    bw, bx, by, bz = b[0], b[1], b[2], b[3]
    return dl.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_normalize(quat):
    return quat / dl.sqrt(quat @ quat)


_SMALL_ANGLE2 = 1e-12


def quat_exp(w):
    """Unit quaternion of the rotation vector ``w``."""
    th2 = w @ w
    if float(dl.real(th2)) < _SMALL_ANGLE2:
        half = 0.5 - th2 / 48.0
        return dl.concatenate([dl.stack([1.0 - th2 / 8.0]), w * half])
    th = dl.sqrt(th2)
    return dl.concatenate([dl.stack([dl.cos(th * 0.5)]), w * (dl.sin(th * 0.5) / th)])


def so3_left_jacobian(w):
    th2 = w @ w
    W = skew(w)
    if float(dl.real(th2)) < _SMALL_ANGLE2:
        return np.eye(3) + W * (0.5 - th2 / 24.0) + (W @ W) * (1.0 / 6.0 - th2 / 120.0)
    th = dl.sqrt(th2)
    a = (1.0 - dl.cos(th)) / th2
    b = (th - dl.sin(th)) / (th2 * th)
    return np.eye(3) + W * a + (W @ W) * b


def joint_transforms(model: KinematicModel, q):
    """Child-frame poses of every joint relative to its joint frame, stacked:
    rotations ``(N, 3, 3)`` and offsets ``(N, 3)``."""
    like = q if dl.is_dual(q) else None
    R = dl.zeros((model.N, 3, 3), like=like)
    R[...] = np.eye(3)
    p = dl.zeros((model.N, 3), like=like)
    for kind, (rows, qidx, terms) in model.joint_groups.items():
        qk = q[qidx]
        if kind == "revolute":
            _, K, K2 = terms
            angle = qk[:, 0][:, None, None]
            R[rows] = np.eye(3) + dl.sin(angle) * K + (1.0 - dl.cos(angle)) * K2
        elif kind == "prismatic":
            p[rows] = terms[0] * qk[:, 0][:, None]
        elif kind == "spherical":
            R[rows] = quat_to_rot(qk)
        else:
            R[rows] = quat_to_rot(qk[:, 3:7])
            p[rows] = qk[:, 0:3]
    return R, p


def axis_angle_to_rot(axis, angle):
    K = skew(np.asarray(axis, dtype=float))
    return np.eye(3) + dl.sin(angle) * K + (1.0 - dl.cos(angle)) * (K @ K)


# ---------------------------------------------------------------------------
# configuration space


def integrate_config(model: KinematicModel, q, delta):
    """Configuration reached from ``q`` by the local tangent step ``delta``."""
    parts = []
    for i in range(1, model.N + 1):
        jt = model.joint(i)
        qi = q[model.qs(i)]
        di = delta[model.dofs(i)]
        if jt.kind in ("revolute", "prismatic"):
            parts.append(qi + di)
        elif jt.kind == "spherical":
            parts.append(quat_normalize(quat_mul(qi, quat_exp(di))))
        else:
            quat = qi[3:7]
            R = quat_to_rot(quat)
            p = qi[0:3] + R @ (so3_left_jacobian(di[0:3]) @ di[3:6])
            parts.append(dl.concatenate([p, quat_normalize(quat_mul(quat, quat_exp(di[0:3])))]))
    return dl.concatenate(parts)


# ---------------------------------------------------------------------------
# generators


def _random_quat(rng):
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return v if v[0] >= 0 else -v


def _random_axis(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _joint_for(choice, idx, rng):
    if isinstance(choice, Joint):
        return choice
    if isinstance(choice, str):
        if choice in ("revolute", "prismatic"):
            return Joint(choice, tuple(_random_axis(rng)))
        return Joint(choice)
    return _joint_for(choice[idx % len(choice)], idx, rng)


def _cylinder(rng, length):
    mass = rng.uniform(0.5, 5.0)
    radius = rng.uniform(0.02, 0.1)
    ixx = 0.5 * mass * radius**2
    iyy = mass * (3 * radius**2 + length**2) / 12.0
    return mass, np.array([length / 2.0, 0.0, 0.0]), np.diag([ixx, iyy, iyy])


def _tree(parents: Sequence[int], joint, seed: int, floating_base: bool, name: str) -> KinematicModel:
    rng = np.random.default_rng(seed)
    lengths = {0: 0.0}
    bodies = []
    for idx, parent in enumerate(parents, start=1):
        if floating_base and idx == 1:
            jt = Joint.free()
        else:
            jt = _joint_for(joint, idx - 1, rng)
        length = rng.uniform(0.1, 1.0)
        lengths[idx] = length
        mass, com, rot = _cylinder(rng, length)
        translation = np.array([lengths[parent], 0.0, 0.0])
        bodies.append(Body(idx, parent, jt, translation, _random_quat(rng), mass, com, rot))
    return KinematicModel(tuple(bodies), name=name)


def serial_chain(N: int, joint="revolute", seed: int = 0, floating_base: bool = False) -> KinematicModel:
    """Unbranched chain of ``N`` bodies with random link lengths and inertias.

    ``joint`` is a :class:`Joint`, a joint-type name (revolute/prismatic axes
    are then drawn at random), or a sequence of either cycled along the chain.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return _tree(list(range(N)), joint, seed, floating_base, f"serial{N}")


def branched_chain(N: int, bf: int = 2, joint="revolute", seed: int = 0, floating_base: bool = False) -> KinematicModel:
    """Complete ``bf``-ary tree of ``N`` bodies filled level by level."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if bf < 2:
        raise ValueError("branching factor must be >= 2")
    parents = [0] + [(i - 2) // bf + 1 for i in range(2, N + 1)]
    return _tree(parents, joint, seed, floating_base, f"branched{N}_bf{bf}")


def quadruped(seed: int = 0) -> KinematicModel:
    """Floating-base quadruped: free trunk plus four 3-DoF legs (18 DoF)."""
    rng = np.random.default_rng(seed)
    eye = np.array([1.0, 0, 0, 0])
    trunk = Body(1, 0, Joint.free(), np.zeros(3), eye, 30.0, np.zeros(3), np.diag([0.5, 2.0, 2.2]))
    bodies = [trunk]
    hips = [(0.37, 0.2), (0.37, -0.2), (-0.37, 0.2), (-0.37, -0.2)]
    axes = [(1.0, 0, 0), (0, 1.0, 0), (0, 1.0, 0)]
    for x, y in hips:
        parent = 1
        offsets = [np.array([x, y, 0.0]), np.array([0.0, 0.0, -0.08]), np.array([0.0, 0.0, -0.35])]
        for axis, off in zip(axes, offsets):
            idx = len(bodies) + 1
            mass = rng.uniform(0.8, 2.5)
            length = 0.35
            com = np.array([0.0, 0.0, -length / 2])
            rot = np.diag([mass * length**2 / 12, mass * length**2 / 12, 0.002])
            bodies.append(Body(idx, parent, Joint.revolute(axis), off, eye, mass, com, rot))
            parent = idx
    return KinematicModel(tuple(bodies), name="quadruped")


def random_state(model: KinematicModel, seed: int = 0) -> JointState:
    rng = np.random.default_rng(seed)
    q = []
    for b in model.bodies:
        kind = b.joint.kind
        if kind == "revolute":
            q.append(rng.uniform(-np.pi, np.pi, 1))
        elif kind == "prismatic":
            q.append(rng.uniform(-1.0, 1.0, 1))
        elif kind == "spherical":
            q.append(_random_quat(rng))
        else:
            q.append(np.concatenate([rng.uniform(-1.0, 1.0, 3), _random_quat(rng)]))
    qd = rng.uniform(-1.0, 1.0, model.n)
    qdd = rng.uniform(-1.0, 1.0, model.n)
    return JointState(np.concatenate(q), qd, qdd)


# ---------------------------------------------------------------------------
# JSON model files


def _fail(path, msg):
    raise ModelError(f"{path}: {msg}")


def _vec(doc, key, n, path):
    try:
        val = doc[key]
    except (KeyError, TypeError):
        _fail(f"{path}.{key}", "missing field")
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        _fail(f"{path}.{key}", "expected numbers")
    if arr.shape != (n,):
        _fail(f"{path}.{key}", f"expected {n} numbers, got shape {arr.shape}")
    return arr


def _body_from_doc(doc, pos) -> Body:
    path = f"bodies[{pos}]"
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    try:
        bid, parent = int(doc["id"]), int(doc["parent"])
    except (KeyError, TypeError, ValueError):
        _fail(path, "id and parent must be integers")
    jdoc = doc.get("joint")
    if not isinstance(jdoc, dict) or "type" not in jdoc:
        _fail(f"{path}.joint", "missing joint type")
    axis = _vec(jdoc, "axis", 3, f"{path}.joint") if jdoc["type"] in ("revolute", "prismatic") else None
    try:
        joint = Joint(jdoc["type"], None if axis is None else tuple(axis))
    except ModelError as exc:
        _fail(f"{path}.joint", str(exc))
    pdoc = doc.get("placement", {"translation": [0, 0, 0], "quaternion": [1, 0, 0, 0]})
    tr = _vec(pdoc, "translation", 3, f"{path}.placement")
    qu = _vec(pdoc, "quaternion", 4, f"{path}.placement")
    idoc = doc.get("inertia")
    if not isinstance(idoc, dict):
        _fail(f"{path}.inertia", "missing inertia")
    if "spatial" in idoc:
        try:
            mat = as_inertia(np.asarray(idoc["spatial"], dtype=float))
        except ValueError as exc:
            _fail(f"{path}.inertia.spatial", str(exc))
        mass, com, rot = inertia_parameters(mat)
    else:
        try:
            mass = float(idoc["mass"])
        except (KeyError, TypeError, ValueError):
            _fail(f"{path}.inertia.mass", "expected a number")
        com = _vec(idoc, "com", 3, f"{path}.inertia")
        ixx, iyy, izz, ixy, ixz, iyz = _vec(idoc, "rotational", 6, f"{path}.inertia")
        rot = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
    try:
        return Body(bid, parent, joint, tr, qu, mass, com, rot)
    except ModelError as exc:
        _fail(path, str(exc))


def inertia_parameters(mat):
    """``(mass, com, rotational-about-com)`` of a 6x6 spatial inertia."""
    mass = mat[3, 3]
    c = mat[:3, 3:] / mass
    com = np.array([c[2, 1], c[0, 2], c[1, 0]])
    C = skew(com)
    return mass, com, mat[:3, :3] - mass * C @ C.T


def model_from_dict(doc) -> KinematicModel:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    bodies_doc = doc.get("bodies")
    if not isinstance(bodies_doc, list) or not bodies_doc:
        raise ModelError("bodies: expected a non-empty list")
    bodies = [_body_from_doc(b, pos) for pos, b in enumerate(bodies_doc)]
    bodies.sort(key=lambda b: b.id)
    gravity = _vec(doc, "gravity", 3, "model") if "gravity" in doc else (0.0, 0.0, -9.81)
    return KinematicModel(tuple(bodies), tuple(gravity), str(doc.get("name", "model")))


def load_model(text: str) -> KinematicModel:
    """Parse and validate a JSON model document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return model_from_dict(doc)


def load_model_file(path) -> KinematicModel:
    with open(path, encoding="utf-8") as fh:
        return load_model(fh.read())


def model_to_dict(model: KinematicModel) -> dict:
    bodies = []
    for b in model.bodies:
        joint = {"type": b.joint.kind}
        if b.joint.axis is not None:
            joint["axis"] = list(b.joint.axis)
        r = b.rotational
        bodies.append(
            {
                "id": b.id,
                "parent": b.parent,
                "joint": joint,
                "placement": {"translation": b.translation.tolist(), "quaternion": b.quaternion.tolist()},
                "inertia": {
                    "mass": float(b.mass),
                    "com": b.com.tolist(),
                    "rotational": [r[0, 0], r[1, 1], r[2, 2], r[0, 1], r[0, 2], r[1, 2]],
                },
            }
        )
    return {"name": model.name, "gravity": list(model.gravity), "bodies": bodies}


def dump_model(model: KinematicModel) -> str:
    return json.dumps(model_to_dict(model), indent=2)


def same_model(a: KinematicModel, b: KinematicModel) -> bool:
    return model_to_dict(a) == model_to_dict(b)
