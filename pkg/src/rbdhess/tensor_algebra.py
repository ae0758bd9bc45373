"""Spatial-matrix cross operators, tensor products and tensor rotations.

Tensors are ``(rows, cols, pages)`` numpy arrays.  A spatial motion matrix
``U`` (6 x n) maps to the tensor ``U x~`` whose page ``k`` is ``crm(U[:, k])``;
likewise for ``U x~*`` and, for a force matrix ``F``, ``F xbar~*``.

:func:`check_identities_m` evaluates the nineteen spatial-matrix identities
on random instances; the ``verify`` CLI command and the test suite both use it.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .spatial import crf, crf_bar, crm


def _as_matrix(a):
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def cross_motion_tensor(U):
    """``U x~``: page ``k`` is ``(u_k x)``."""
    return np.moveaxis(crm(_as_matrix(U).T), 0, -1)


def cross_force_tensor(U):
    """``U x~*``: page ``k`` is ``(u_k x*)``."""
    return np.moveaxis(crf(_as_matrix(U).T), 0, -1)


def cross_swapped_tensor(F):
    """``F xbar~*``: page ``k`` is ``(f_k xbar*)``."""
    return np.moveaxis(crf_bar(_as_matrix(F).T), 0, -1)


def tensor_matrix_product(A, B):
    """``Z[i, j, k] = sum_l A[i, l, k] B[l, j]``; a 1-D ``B`` is a single column."""
    A = np.asarray(A)
    B = _as_matrix(B)
    if A.ndim != 3 or A.shape[1] != B.shape[0]:
        raise ValueError(f"tensor_matrix_product: shapes {A.shape} and {B.shape} do not conform")
    return np.einsum("ilk,lj->ijk", A, B)


def matrix_tensor_product(B, A):
    """``Y[i, j, k] = sum_l B[i, l] A[l, j, k]``."""
    B = np.asarray(B)
    A = np.asarray(A)
    if B.ndim != 2 or A.ndim != 3 or B.shape[1] != A.shape[0]:
        raise ValueError(f"matrix_tensor_product: shapes {B.shape} and {A.shape} do not conform")
    return np.einsum("il,ljk->ijk", B, A)


def rot_T(A):
    """Transpose along dims 1-2: ``B[j, i, k] = A[i, j, k]``."""
    return np.transpose(A, (1, 0, 2))


def rot_R(A):
    """Rotate along dims 2-3: ``B[i, k, j] = A[i, j, k]``."""
    return np.transpose(A, (0, 2, 1))


def rot_RT(A):
    """``rot_T(rot_R(A))``: ``B[k, i, j] = A[i, j, k]``."""
    return np.transpose(A, (2, 0, 1))


def collapse(Z):
    """Drop the singleton column axis of a ``(6, 1, n)`` tensor."""
    return Z[:, 0, :]


# ---------------------------------------------------------------------------
# Spatial-matrix identities.  Each entry maps one random instance to a
# (lhs, rhs) pair, or a list of pairs for chained equalities.


def _sizes(rng):
    return rng.integers(1, 7, size=3)


def _instance(rng):
    n, m, l = _sizes(rng)
    return dict(
        v=rng.standard_normal(6),
        f=rng.standard_normal(6),
        U=rng.standard_normal((6, n)),
        F=rng.standard_normal((6, m)),
        V=rng.standard_normal((6, l)),
        lam=rng.standard_normal(),
    )


tmp = tensor_matrix_product
mtp = matrix_tensor_product
Ux = cross_motion_tensor
Uxf = cross_force_tensor
Fxb = cross_swapped_tensor


def _force_cross_dual(d):
    return Uxf(d["U"]), -rot_T(Ux(d["U"]))


def _transpose_left_product(d):
    return mtp(-d["V"].T, Uxf(d["U"])), rot_T(tmp(Ux(d["U"]), d["V"]))


def _transpose_left_product_then_force(d):
    U, V, F = d["U"], d["V"], d["F"]
    return tmp(mtp(-V.T, Uxf(U)), F), tmp(rot_T(tmp(Ux(U), V)), F)


def _motion_cross_collapse(d):
    return collapse(tmp(Ux(d["U"]), d["v"])), -crm(d["v"]) @ d["U"]


def _force_cross_swap(d):
    return tmp(Uxf(d["U"]), d["F"]), rot_R(tmp(Fxb(d["F"]), d["U"]))


def _swapped_cross_swap(d):
    return tmp(Fxb(d["F"]), d["U"]), rot_R(tmp(Uxf(d["U"]), d["F"]))


def _cross_linearity(d):
    return Ux(d["lam"] * d["U"]), d["lam"] * Ux(d["U"])


def _motion_cross_antisymmetry(d):
    return tmp(Ux(d["U"]), d["V"]), -rot_R(tmp(Ux(d["V"]), d["U"]))


def _motion_cross_of_product(d):
    U, v = d["U"], d["v"]
    return Ux(crm(v) @ U), mtp(crm(v), Ux(U)) - tmp(Ux(U), crm(v))


def _force_cross_of_product(d):
    U, v = d["U"], d["v"]
    return Uxf(crm(v) @ U), mtp(crf(v), Uxf(U)) - tmp(Uxf(U), crf(v))


def _swapped_cross_of_collapse(d):
    U, v = d["U"], d["v"]
    lhs = Fxb(collapse(tmp(Uxf(U), v)))
    return lhs, tmp(Uxf(U), crf_bar(v)) - mtp(crf_bar(v), Ux(U))


def _transpose_of_force_product(d):
    return rot_T(tmp(Uxf(d["U"]), d["F"])), mtp(-d["F"].T, Ux(d["U"]))


def _bilinear_rotations(d):
    U, V, F = d["U"], d["V"], d["F"]
    lhs = mtp(V.T, tmp(Uxf(U), F))
    mid = tmp(rot_RT(tmp(Ux(V), U)), F)
    right = rot_T(mtp(F.T, rot_R(tmp(Ux(V), U))))
    return [(lhs, mid), (lhs, right)]


def _force_cross_collapse(d):
    return crf(d["v"]) @ d["F"], collapse(tmp(Fxb(d["F"]), d["v"]))


def _swapped_force_collapse(d):
    return crf_bar(d["f"]) @ d["U"], collapse(tmp(Uxf(d["U"]), d["f"]))


def _rotated_bilinear(d):
    U, V, F = d["U"], d["V"], d["F"]
    return mtp(V.T, rot_R(tmp(Uxf(U), F))), rot_R(tmp(rot_RT(tmp(Ux(V), U)), F))


def _rotated_bilinear_exchange(d):
    U, V, F = d["U"], d["V"], d["F"]
    return mtp(V.T, rot_R(tmp(Uxf(U), F))), -rot_T(mtp(U.T, rot_R(tmp(Uxf(V), F))))


def _rotation_through_left_product(d):
    U, V, F = d["U"], d["V"], d["F"]
    return mtp(V.T, rot_R(tmp(Uxf(U), F))), rot_R(mtp(V.T, tmp(Uxf(U), F)))


def _transpose_rotation_of_products(d):
    B, Y = d["B"], d["Y"]
    return rot_T(mtp(B, Y)), tmp(rot_T(Y), B.T)


TENSOR_IDENTITIES: dict[str, Callable] = {
    "force_cross_dual": _force_cross_dual,
    "transpose_left_product": _transpose_left_product,
    "transpose_left_product_then_force": _transpose_left_product_then_force,
    "motion_cross_collapse": _motion_cross_collapse,
    "force_cross_swap": _force_cross_swap,
    "swapped_cross_swap": _swapped_cross_swap,
    "cross_linearity": _cross_linearity,
    "motion_cross_antisymmetry": _motion_cross_antisymmetry,
    "motion_cross_of_product": _motion_cross_of_product,
    "force_cross_of_product": _force_cross_of_product,
    "swapped_cross_of_collapse": _swapped_cross_of_collapse,
    "transpose_of_force_product": _transpose_of_force_product,
    "bilinear_rotations": _bilinear_rotations,
    "force_cross_collapse": _force_cross_collapse,
    "swapped_force_collapse": _swapped_force_collapse,
    "rotated_bilinear": _rotated_bilinear,
    "rotated_bilinear_exchange": _rotated_bilinear_exchange,
    "rotation_through_left_product": _rotation_through_left_product,
    "transpose_rotation_of_products": _transpose_rotation_of_products,
}


def relative_error(a, b) -> float:
    """Max-abs difference normalised by the larger operand's max-abs entry."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    diff = np.abs(a - b).max(initial=0.0)
    return diff / scale if scale > 0 else diff


def identity_instance(name: str, rng: np.random.Generator):
    d = _instance(rng)
    if name == "transpose_rotation_of_products":
        n1, n2, n3, n4 = rng.integers(1, 7, size=4)
        d["B"] = rng.standard_normal((n1, n2))
        d["Y"] = rng.standard_normal((n2, n3, n4))
    return d


def check_identity_m(name: str, instances: int = 200, seed: int = 0) -> float:
    """Worst relative error of identity ``name`` over random instances."""
    rng = np.random.default_rng(seed)
    fn = TENSOR_IDENTITIES[name]
    worst = 0.0
    for _ in range(instances):
        pairs = fn(identity_instance(name, rng))
        if isinstance(pairs, tuple):
            pairs = [pairs]
        for lhs, rhs in pairs:
            worst = max(worst, relative_error(lhs, rhs))
    return worst


def check_identities_m(instances: int = 200, seed: int = 0) -> dict[str, float]:
    return {name: check_identity_m(name, instances, seed) for name in TENSOR_IDENTITIES}
