"""6-D spatial vector algebra.

Vectors are plain length-6 arrays in angular-first order: motion vectors are
``[omega, v]`` and force vectors are ``[moment, force]``.  Operator builders
(:func:`crm`, :func:`crf`, :func:`crf_bar`) broadcast over leading axes and
accept :class:`~rbdhess.dual.Dual` arguments.
"""

from __future__ import annotations

import numpy as np

from .dual import batched_matvec, linear

INERTIA_SYMMETRY_TOL = 1e-12


def _gather_table(build, dim, size):
    """Index/sign tables for an operator whose entries are each +-1 times one
    input component (or zero), so it can be built with a single gather."""
    idx = np.zeros(size * size, dtype=int)
    sign = np.zeros(size * size)
    for c in range(dim):
        e = np.zeros(dim)
        e[c] = 1.0
        flat = build(e).ravel()
        hit = flat != 0
        idx[hit] = c
        sign[hit] = flat[hit]
    return idx, sign


def _skew_reference(w):
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def _crm_reference(v):
    w, u = _skew_reference(v[:3]), _skew_reference(v[3:])
    return np.block([[w, np.zeros((3, 3))], [u, w]])


def _crf_reference(v):
    return -_crm_reference(v).T


def _crf_bar_reference(f):
    m, g = _skew_reference(f[:3]), _skew_reference(f[3:])
    return np.block([[-m, -g], [-g, np.zeros((3, 3))]])


_SKEW = _gather_table(_skew_reference, 3, 3)
_CRM = _gather_table(_crm_reference, 6, 6)
_CRF = _gather_table(_crf_reference, 6, 6)
_CRF_BAR = _gather_table(_crf_bar_reference, 6, 6)


def _gathered(x, table, size):
    x = np.asarray(x)
    idx, sign = table
    return (x[..., idx] * sign).reshape(x.shape[:-1] + (size, size))


@linear
def skew(w):
    """3x3 cross-product matrix, ``skew(w) @ u == cross(w, u)``."""
    return _gathered(w, _SKEW, 3)


@linear
def crm(v):
    """Motion cross-product operator ``(v x)``."""
    return _gathered(v, _CRM, 6)


@linear
def crf(v):
    """Force cross-product operator ``(v x*) == -(v x)^T``."""
    return _gathered(v, _CRF, 6)


@linear
def crf_bar(f):
    """Swapped force cross operator: ``crf_bar(f) @ v == crf(v) @ f``."""
    return _gathered(f, _CRF_BAR, 6)


def cross_motion(v, u):
    return crm(v) @ u


def cross_force(v, f):
    return crf(v) @ f


def cross_force_swapped(f, v):
    return crf_bar(f) @ v


def spatial_inertia(mass, com, rotational):
    """Spatial inertia about the body origin.

    ``rotational`` is the 3x3 inertia about the centre of mass, ``com`` the
    centre-of-mass position in the body frame.
    """
    c = skew(np.asarray(com, dtype=float))
    out = np.zeros((6, 6))
    out[:3, :3] = np.asarray(rotational, dtype=float) + mass * c @ c.T
    out[:3, 3:] = mass * c
    out[3:, :3] = mass * c.T
    out[3:, 3:] = mass * np.eye(3)
    return out


def as_inertia(matrix, tol: float = INERTIA_SYMMETRY_TOL):
    """Validate a 6x6 spatial inertia and return its symmetrized copy.

    Raises ``ValueError`` on asymmetry beyond ``tol`` (relative), a mass
    block that is not ``m * I`` with ``m > 0``, or a non-PSD matrix.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (6, 6):
        raise ValueError(f"spatial inertia must be 6x6, got {m.shape}")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > tol * scale:
        raise ValueError("spatial inertia is not symmetric")
    m = 0.5 * (m + m.T)
    mass = m[3, 3]
    if not mass > 0:
        raise ValueError(f"spatial inertia mass must be positive, got {mass}")
    if np.abs(m[3:, 3:] - mass * np.eye(3)).max() > tol * scale:
        raise ValueError("spatial inertia mass block is not m * Identity(3)")
    if np.linalg.eigvalsh(m).min() < -1e-10 * scale:
        raise ValueError("spatial inertia is not positive semi-definite")
    return m


def body_coriolis(inertia, v):
    """Body-level Coriolis matrix ``B = 1/2 [(v x*) I - I (v x) + (I v) xbar*]``."""
    Iv = batched_matvec(inertia, v)
    return 0.5 * (crf(v) @ inertia - inertia @ crm(v) + crf_bar(Iv))
