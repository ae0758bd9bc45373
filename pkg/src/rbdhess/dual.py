"""Array-valued dual numbers for forward-mode differentiation.

A :class:`Dual` holds a real array ``re`` and a stack of tangents ``du`` with
one leading axis per seeded direction, so ``du.shape == (k,) + re.shape``.
Carrying ``k`` directions at once lets a single pass through the dynamics
code produce a full Jacobian column block.

The dynamics code stays scalar-agnostic by only using arithmetic operators,
``@`` and the helpers in this module (:func:`sin`, :func:`stack`, ...), which
fall through to numpy for plain arrays.
"""

from __future__ import annotations

import functools

import numpy as np


class Dual:
    """``re + eps * du`` with ``eps**2 == 0``; supports up to 2-D ``re`` in ``@``."""

    __slots__ = ("re", "du")
    __array_ufunc__ = None  # make numpy defer to our reflected operators

    def __init__(self, re, du):
        self.re = np.asarray(re, dtype=float)
        self.du = np.asarray(du, dtype=float)
        if self.du.shape[1:] != self.re.shape:
            raise ValueError(
                f"tangent shape {self.du.shape} does not match (k,) + {self.re.shape}"
            )

    @property
    def k(self) -> int:
        return self.du.shape[0]

    @property
    def shape(self):
        return self.re.shape

    @property
    def ndim(self):
        return self.re.ndim

    def __len__(self):
        return len(self.re)

    @property
    def T(self):
        if self.re.ndim < 2:
            return self
        return Dual(self.re.T, np.swapaxes(self.du, -1, -2))

    def __repr__(self):
        return f"Dual(re={self.re!r}, du={self.du!r})"

    # -- indexing -----------------------------------------------------------
    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Dual(self.re[idx], self.du[(slice(None),) + idx])

    def __setitem__(self, idx, value):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if isinstance(value, Dual):
            self.re[idx] = value.re
            self.du[(slice(None),) + idx] = value.du
        else:
            self.re[idx] = value
            self.du[(slice(None),) + idx] = 0.0

    def copy(self):
        return Dual(self.re.copy(), self.du.copy())

    # -- arithmetic ---------------------------------------------------------
    def _aligned(self, ndim):
        # tangent reshaped so trailing-axis broadcasting lines up with ``re``
        pad = ndim - self.re.ndim
        if pad <= 0:
            return self.du
        return self.du.reshape((self.k,) + (1,) * pad + self.re.shape)

    def __add__(self, other):
        if isinstance(other, Dual):
            nd = max(self.ndim, other.ndim)
            return Dual(self.re + other.re, self._aligned(nd) + other._aligned(nd))
        other = np.asarray(other, dtype=float)
        re = self.re + other
        return Dual(re, np.array(np.broadcast_to(self._aligned(re.ndim), (self.k,) + re.shape)))

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.du)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Dual):
            nd = max(self.ndim, other.ndim)
            return Dual(
                self.re * other.re,
                self._aligned(nd) * other.re + self.re * other._aligned(nd),
            )
        other = np.asarray(other, dtype=float)
        re = self.re * other
        return Dual(re, self._aligned(re.ndim) * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        inv = 1.0 / self.re
        return Dual(inv, -self.du * inv * inv)

    def __pow__(self, p):
        if p == 2:
            return self * self
        return Dual(self.re**p, p * self.re ** (p - 1) * self.du)

    def __matmul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re @ other.re, self.du @ other.re + _re_at_du(self.re, other))
        other = np.asarray(other, dtype=float)
        return Dual(self.re @ other, self.du @ other)

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=float)
        return Dual(other @ self.re, _re_at_du(other, self))


def _re_at_du(a, b: Dual):
    """Tangent part of ``a @ b`` for plain ``a`` and dual ``b``."""
    if b.re.ndim == 1:
        return np.matmul(a, b.du[..., None])[..., 0]
    return np.matmul(a, b.du)


def is_dual(x) -> bool:
    return isinstance(x, Dual)


def real(x):
    return x.re if isinstance(x, Dual) else np.asarray(x)


def seed(x, directions=None) -> Dual:
    """Dual copy of ``x`` with unit tangents; ``directions`` rows are the seeds."""
    x = np.asarray(x, dtype=float)
    if directions is None:
        directions = np.eye(x.size).reshape((x.size,) + x.shape)
    return Dual(x, directions)


def constant(x, k: int) -> Dual:
    x = np.asarray(x, dtype=float)
    return Dual(x, np.zeros((k,) + x.shape))


def linear(fn):
    """Lift an operator that is linear in its first argument to duals.

    ``fn`` must broadcast over leading axes so it can be applied to the
    tangent stack unchanged.
    """

    @functools.wraps(fn)
    def wrapper(x, *args, **kwargs):
        if isinstance(x, Dual):
            return Dual(fn(x.re, *args, **kwargs), fn(x.du, *args, **kwargs))
        return fn(x, *args, **kwargs)

    return wrapper


def sin(x):
    if isinstance(x, Dual):
        return Dual(np.sin(x.re), np.cos(x.re) * x.du)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(np.cos(x.re), -np.sin(x.re) * x.du)
    return np.cos(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = np.sqrt(x.re)
        return Dual(r, x.du / (2.0 * r))
    return np.sqrt(x)


def swap_last(x):
    """Transpose the trailing two axes (batched matrix transpose)."""
    if isinstance(x, Dual):
        return Dual(np.swapaxes(x.re, -1, -2), np.swapaxes(x.du, -1, -2))
    return np.swapaxes(x, -1, -2)


def batched_matvec(A, x):
    """``A[..., :, :] @ x[..., :]`` over matching leading axes."""
    return (A @ x[..., None])[..., 0]


def _k_of(items):
    for it in items:
        if isinstance(it, Dual):
            return it.k
    return None


def stack(items, axis=0):
    items = list(items)
    k = _k_of(items)
    if k is None:
        return np.stack(items, axis=axis, dtype=float)
    res = [real(it).astype(float) for it in items]
    re = np.stack(res, axis=axis)
    dus = [
        it._aligned(r.ndim) if isinstance(it, Dual) else np.zeros((k,) + r.shape)
        for it, r in zip(items, res)
    ]
    dus = [np.broadcast_to(d, (k,) + r.shape) for d, r in zip(dus, res)]
    ax = axis + 1 if axis >= 0 else axis
    return Dual(re, np.stack(dus, axis=ax))


def concatenate(items, axis=0):
    items = list(items)
    k = _k_of(items)
    if k is None:
        return np.concatenate(items, axis=axis, dtype=float)
    res = [real(it).astype(float) for it in items]
    dus = [
        it.du if isinstance(it, Dual) else np.zeros((k,) + r.shape)
        for it, r in zip(items, res)
    ]
    ax = axis + 1 if axis >= 0 else axis
    return Dual(np.concatenate(res, axis=axis), np.concatenate(dus, axis=ax))


def block(rows):
    return concatenate([concatenate(r, axis=1) for r in rows], axis=0)


def zeros(shape, like=None):
    """Zeros of ``shape``; dual-valued when ``like`` is a :class:`Dual`."""
    if isinstance(like, Dual):
        shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
        return Dual(np.zeros(shape), np.zeros((like.k,) + shape))
    return np.zeros(shape)


def first_dual(*xs):
    """The first :class:`Dual` among ``xs`` (searching one level into lists)."""
    for x in xs:
        if isinstance(x, Dual):
            return x
        if isinstance(x, (list, tuple)):
            for y in x:
                if isinstance(y, Dual):
                    return y
    return None
