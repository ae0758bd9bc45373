"""Second-order partials of inverse dynamics in one backward sweep.

The sweep visits each body ``i`` from the leaves in, then every ancestor
``j`` of ``i`` and every ancestor ``k`` of ``j`` (both inclusive).  For each
DoF triple ``(p, t, r)`` the tensor expressions collapse to a handful of dot
products between 6-vectors, and each scalar is written to all of its
symmetric images.  Work per triple is constant, so a serial chain costs
``O(N^3)`` while a bushy tree costs ``O(N d^2)``.

The dot products for one body are formed with two small matrix products
before its triple loop; the loop itself only combines and scatters scalars.

Output layout: ``T[row, col, page]`` with ``row`` the output DoF.
``d2tau_dqd_dq[a, b, c]`` is ``d2 tau_a / dqd_b dq_c``.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

import numpy as np

from .dual import batched_matvec
from .dynamics import forward_pass, subtree_sums
from .model import JointState, KinematicModel
from .spatial import crf, crf_bar
from .tensor_algebra import rot_R


@dataclass
class SecondOrderDerivatives:
    d2tau_dq2: np.ndarray
    d2tau_dqd2: np.ndarray
    d2tau_dqd_dq: np.ndarray
    dM_dq: np.ndarray

    def as_tuple(self):
        return self.d2tau_dq2, self.d2tau_dqd2, self.d2tau_dqd_dq, self.dM_dq


def cross_hessian_q_qd(d: SecondOrderDerivatives) -> np.ndarray:
    """``d2 tau / dq dqd`` from the stored ``dqd dq`` block."""
    return rot_R(d.d2tau_dqd_dq)


# column blocks stacked per DoF: s, psid, psidd, psid + phid
_S, _PSID, _PSIDD, _PP = range(4)

# the (u, block) dot products the sweep reads, as flat indices into the 12 x 4 grid
_PICKED = np.array([
    u * 4 + b for u, b in (
        (0, _S), (0, _PSID), (1, _S), (1, _PSIDD), (1, _PP), (2, _S), (3, _S), (4, _S),
        (5, _S), (6, _S), (7, _PSID), (8, _S), (8, _PSIDD), (8, _PP), (9, _S), (10, _S),
        (10, _PSID), (11, _S),
    )
])


def _sym_part(X):
    return X + X.swapaxes(-1, -2)


def _scratch(Ic, Bc, fc, S, Psid, Psidd, PP):
    """A0..A7 and B(s_p) for a batch of DoFs (leading axis).

    Row ``c`` pairs the columns of DoF ``c`` with the composites ``Ic[c]``,
    ``Bc[c]``, ``fc[c]`` of the body that owns it.  ``Ic`` is symmetric, so
    ``crf(s) Ic - Ic crm(s)`` is the symmetric part of ``crf(s) Ic``.
    """
    mv = batched_matvec
    d = S.shape[0]
    cs, cps = np.split(crf(np.concatenate([S, Psid])), 2)
    BcT = Bc.swapaxes(1, 2)
    bars = crf_bar(np.concatenate([
        mv(Ic, S),
        mv(Ic, Psid),
        mv(BcT, S),
        mv(Bc, Psid) + mv(Ic, Psidd) + mv(cs, fc),
        mv(Bc, S) + mv(Ic, PP),
    ]))
    A0, bar_psid, A4, A5, A7 = (bars[b * d:(b + 1) * d] for b in range(5))
    X = cs @ Ic
    A1 = _sym_part(X)
    B_s = A1 + A0
    A2 = A0 - A1
    A3 = _sym_part(cps @ Ic) + bar_psid + cs @ Bc + (cs @ BcT).swapaxes(1, 2)
    A6 = X + A0
    return (A0, A1, A2, A3, A4, A5, A6, A7), B_s


def _u_operator(A, B_s):
    """Per DoF ``p``: the (72 x 24) map from ``[s_t, psid_t, psidd_t, psid_t + phid_t]``
    to the stacked vectors ``u_1 .. u_12``."""
    A0, A1, A2, A3, A4, A5, A6, A7 = A
    Bt = B_s.swapaxes(1, 2)
    L = np.zeros((A0.shape[0], 72, 24))
    blocks = {
        # (u, column block): operator
        (0, 0): A3.swapaxes(1, 2), (1, 0): A1.swapaxes(1, 2), (2, 0): A5, (3, 0): A6,
        (4, 0): A4, (5, 0): A7, (6, 0): A3, (7, 0): A4, (8, 0): A0, (9, 0): B_s,
        (10, 0): Bt, (11, 0): A1,
        (2, 1): A3, (4, 1): A2, (5, 1): B_s, (7, 1): -Bt,
        (2, 2): A1,
        (6, 3): A1,
    }
    for (u, b), op in blocks.items():
        L[:, 6 * u:6 * u + 6, 6 * b:6 * b + 6] = op
    return L


def id_so_derivatives(model: KinematicModel, state: JointState) -> SecondOrderDerivatives:
    fp = forward_pass(model, state)
    n = model.n
    nn = n * n
    dq, dqd, dM = (array("d", bytes(8 * n * nn)) for _ in range(3))
    dqdM = array("d", bytes(8 * n * nn))  # [out, q, qd]; transposed on return

    offs = model.dof_offsets
    # per-DoF stacked columns [s, psid, psidd, psid + phid], shape (n, 4, 6)
    W = np.array(fp.columns)
    W[:, _PP] += W[:, _PSID]
    # scratch for every DoF at once, each against its body's composites
    owner = model.dof_owner
    IC, BC, fC = (subtree_sums(model, x)[owner] for x in (fp.inertias, fp.coriolis, fp.forces))
    L_all = _u_operator(*_scratch(IC, BC, fC, *W.transpose(1, 0, 2)))
    # U_all[p, t] holds u_1..u_12 of DoF p paired with the columns of DoF t, (n, n, 12, 6)
    U_all = (L_all.reshape(n * 72, 24) @ W.reshape(n, 24).T).reshape(n, 12, 6, n)
    U_all = np.ascontiguousarray(U_all.transpose(0, 3, 1, 2))
    paths = model.root_paths
    chain_cols = [None] + [
        np.ascontiguousarray(W[idx].transpose(2, 1, 0)).reshape(6, -1) for idx, _ in paths[1:]
    ]

    for i in range(model.N, 0, -1):
        # chain: DoFs along the root path of i; starts: where each ancestor's sit
        chain, starts = paths[i]
        m = len(chain)
        d = model.joint(i).ndof
        # u_1..u_12 for every (p, chain DoF jt), dotted with every column block
        # of every chain DoF kr:
        # Dall[p][a][r][c] = u_{u+1}(p, jt = chain[a]) . block_b(kr = chain[c])
        # for the r-th picked (u, b)
        U = U_all[offs[i]:offs[i] + d, chain]
        Dall = (U.reshape(d, m * 12, 6) @ chain_cols[i]).reshape(d, m, 48, m)
        Dall = Dall[:, :, _PICKED].tolist()
        for p in range(d):
            ip = offs[i] + p
            D = Dall[p]
            for j, j_start, j_end in starts:
                j_is_i = j == i
                for a in range(j_start, j_end):
                    jt = chain[a]
                    (u1s, u1d, u2s, u2dd, u2pp, u3s, u4s, u5s, u6s, u7s, u8d,
                     u9s, u9dd, u9pp, u10s, u11s, u11d, u12s) = D[a]
                    row_ip, row_jt = ip * nn, jt * nn
                    # k runs over j and its ancestors: chain positions j_start..m-1
                    for c in range(j_start, m):
                        kr = chain[c]
                        row_kr = kr * nn
                        p1 = u11d[c]
                        p2 = u8d[c] + u9dd[c]
                        dq[row_ip + jt * n + kr] = p2
                        dqdM[row_ip + kr * n + jt] = -p1
                        if not j_is_i:
                            val = u1d[c] + u2dd[c]
                            dq[row_jt + kr * n + ip] = val
                            dq[row_jt + ip * n + kr] = val
                            dqdM[row_jt + ip * n + kr] = u1s[c] + u2pp[c]
                            dqdM[row_jt + kr * n + ip] = p1
                            val = u11s[c]
                            dqd[row_jt + kr * n + ip] = val
                            dqd[row_jt + ip * n + kr] = val
                            val = u12s[c]
                            dM[row_kr + jt * n + ip] = val
                            dM[row_jt + kr * n + ip] = val
                        if c >= j_end:  # k strictly above j
                            dq[row_ip + kr * n + jt] = p2
                            dq[row_kr + ip * n + jt] = u3s[c]
                            val = -u11s[c]
                            dqd[row_ip + jt * n + kr] = val
                            dqd[row_ip + kr * n + jt] = val
                            dqdM[row_ip + jt * n + kr] = u5s[c] + u9pp[c]
                            dqdM[row_kr + jt * n + ip] = u6s[c]
                            val = u9s[c]
                            dM[row_kr + ip * n + jt] = val
                            dM[row_ip + kr * n + jt] = val
                            if not j_is_i:
                                dq[row_kr + jt * n + ip] = dq[row_kr + ip * n + jt]
                                dqdM[row_kr + ip * n + jt] = u7s[c]
                                val = u10s[c]
                                dqd[row_kr + ip * n + jt] = val
                                dqd[row_kr + jt * n + ip] = val
                            else:
                                dqd[row_kr + jt * n + ip] = u4s[c]
                        else:
                            dqd[row_ip + jt * n + kr] = -u2s[c]

    def tensor(flat):
        return np.frombuffer(flat).reshape(n, n, n).copy()

    return SecondOrderDerivatives(
        tensor(dq), tensor(dqd), np.transpose(tensor(dqdM), (0, 2, 1)), tensor(dM)
    )
