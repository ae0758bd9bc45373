"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line (shown even without ``-s``) and
then asserts.  Run just these with ``pytest tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from rbdhess.cli import scaling_exponent
from rbdhess.derivatives_fo import id_fo_derivatives
from rbdhess.derivatives_so import id_so_derivatives
from rbdhess.dynamics import mass_matrix, rnea
from rbdhess.model import JointState, branched_chain, quadruped, random_state, serial_chain
from rbdhess.oracle import check_identities_K
from rbdhess.verify import standard_suite, verify_identities_m, verify_state, worst_by_check

import tensor_forms as tf
from conftest import mixed_tree, planar_pendulum, relerr

SUITE_MINUTES = 5.0


@pytest.fixture
def report(capsys):
    def emit(label, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return emit


@pytest.fixture(scope="module")
def suite_results():
    """Every check on the 50-case suite, with the wall time of the SO part."""
    rows, so_seconds = [], 0.0
    for case in standard_suite():
        model, state = case.build()
        rows += verify_state(model, state, ("fo", "symmetry", "sparsity"))
        start = time.perf_counter()
        rows += verify_state(model, state, ("so-dual", "so-fd"))
        so_seconds += time.perf_counter() - start
    return worst_by_check(rows), so_seconds


def _summary(results, prefix):
    chosen = [r for r in results if r.name.startswith(prefix)]
    assert chosen, prefix
    worst = max(chosen, key=lambda r: r.error / r.tolerance if r.tolerance else r.error)
    return all(r.passed for r in chosen), worst


def test_second_order_matches_dual_and_fd_oracles(suite_results, report):
    results, seconds = suite_results
    ok_dual, w_dual = _summary(results, "so-dual")
    ok_fd, w_fd = _summary(results, "so-fd")
    fast = seconds < SUITE_MINUTES * 60
    detail = (
        f"worst {w_dual.name} {w_dual.error:.1e} <= 1e-9, worst {w_fd.name} {w_fd.error:.1e} "
        f"<= 1e-4, 50 cases in {seconds:.1f} s"
    )
    assert report("second-order partials vs dual and FD oracles", ok_dual and ok_fd and fast, detail)


def test_first_order_matches_dual_oracle(suite_results, report):
    results, _ = suite_results
    ok_grad = all(r.passed for r in results if r.name in ("fo:dtau_dq", "fo:dtau_dqd", "fo:dtau_dqdd"))
    ok_mass = all(r.passed for r in results if r.name == "fo:mass_matrix")
    errs = {r.name: r.error for r in results if r.name.startswith("fo:")}
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + " (1e-10, mass matrix 1e-13)"
    assert report("first-order partials vs dual oracle", ok_grad and ok_mass, detail)


def test_m_identities(report):
    results = verify_identities_m(200, seed=0)
    worst = max(results, key=lambda r: r.error)
    ok = len(results) == 19 and all(r.passed for r in results)
    detail = f"19 identities x 200 instances, worst {worst.name} {worst.error:.1e} <= 1e-13"
    assert report("tensor algebra identities", ok, detail)


def test_k_identities_on_mixed_tree(report):
    model = mixed_tree(10, seed=7)
    kinds = {model.joint(i).kind for i in range(1, model.N + 1)}
    assert kinds == {"revolute", "prismatic", "spherical", "free"}
    worst_name, worst = None, 0.0
    for seed in range(3):
        for name, err in check_identities_K(model, random_state(model, seed)).items():
            if err >= worst:
                worst_name, worst = name, err
    ok = worst <= 1e-8
    detail = f"16 identities, all (i, j) pairs, 3 states, worst {worst_name} {worst:.1e} <= 1e-8"
    assert report("joint-level identities", ok, detail)


def test_scalar_sweep_equals_tensor_forms(report):
    model = mixed_tree(16, seed=5)
    state = random_state(model, 6)
    so = id_so_derivatives(model, state)
    terms = tf.Terms.at(model, state)
    rng = np.random.default_rng(0)
    worst, count = 0.0, 0
    for family, forms in tf.FAMILIES.items():
        full = getattr(so, family)
        floor = np.abs(full).max()
        for form, relation in forms:
            triples = tf.sample(model, relation, 20, rng)
            assert len(triples) == 20, form.__name__
            for i, j, k in triples:
                _, (a, b, c), block = form(terms, i, j, k)
                got = full[model.dofs(a)][:, model.dofs(b)][:, :, model.dofs(c)]
                worst = max(worst, relerr(got, block, floor))
                count += 1
    ok = worst <= 1e-12
    detail = f"{count} blocks over {sum(map(len, tf.FAMILIES.values()))} forms, worst {worst:.1e} <= 1e-12"
    assert report("scalar sweep vs tensor expressions", ok, detail)


def test_pendulum_closed_forms(report):
    mass, length, g = 1.3, 0.8, 9.81
    model = planar_pendulum(mass, length, g)
    inertia, weight = mass * length**2, mass * g * length
    rng = np.random.default_rng(11)
    worst = dict.fromkeys(("tau", "dtau_dq", "d2tau_dq2", "M", "dM_dq"), 0.0)
    for _ in range(100):
        q, qd, qdd = rng.uniform(-np.pi, np.pi), rng.uniform(-3, 3), rng.uniform(-3, 3)
        state = JointState(np.array([q]), np.array([qd]), np.array([qdd]))
        fo, so = id_fo_derivatives(model, state), id_so_derivatives(model, state)
        # each quantity is judged against the size of the terms that make it up,
        # so states where they cancel do not blow up the ratio
        torque_scale = inertia * abs(qdd) + weight
        checks = {
            "tau": (rnea(model, state)[0], inertia * qdd + weight * np.cos(q), torque_scale),
            "dtau_dq": (fo.dtau_dq[0, 0], -weight * np.sin(q), weight),
            "d2tau_dq2": (so.d2tau_dq2[0, 0, 0], -weight * np.cos(q), weight),
            "M": (mass_matrix(model, state.q)[0, 0], inertia, inertia),
            "dM_dq": (so.dM_dq[0, 0, 0], 0.0, inertia),
        }
        for name, (got, want, scale) in checks.items():
            worst[name] = max(worst[name], relerr(got, want, scale))
    ok = max(worst.values()) <= 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (<= 1e-12, 100 states)"
    assert report("planar pendulum closed forms", ok, detail)


def _median_times(models, rounds=11, round_ns=20e6):
    """Median SO time per model.  Sizes are interleaved round by round so a
    burst of machine noise lands on all of them; each round times a short
    batch after one untimed call."""
    cases = [(m, random_state(m, 0)) for m in models]
    per_round = [[] for _ in cases]
    for _ in range(rounds):
        for k, (m, s) in enumerate(cases):
            id_so_derivatives(m, s)
            times = []
            while not times or (sum(times) < round_ns and len(times) < 200):
                start = time.perf_counter_ns()
                id_so_derivatives(m, s)
                times.append(time.perf_counter_ns() - start)
            per_round[k].append(np.median(times))
    return [float(np.median(r)) for r in per_round]


def test_complexity_scaling(report):
    sizes = [8, 16, 32, 64]
    serial = _median_times([serial_chain(N, "revolute", 0) for N in sizes])
    # the quadruped rides along with the tree rounds rather than getting one short window of its own
    *tree, quad = _median_times([branched_chain(N, 4, "revolute", 0) for N in sizes] + [quadruped(0)])
    serial_exp, tree_exp = scaling_exponent(sizes, serial), scaling_exponent(sizes, tree)
    ok = 2.5 <= serial_exp <= 3.5 and 0.8 <= tree_exp <= 1.8 and quad < 5e6
    detail = (
        f"serial exponent {serial_exp:.2f} in [2.5, 3.5], bf=4 exponent {tree_exp:.2f} in [0.8, 1.8], "
        f"quadruped {quad / 1e6:.2f} ms < 5 ms; serial medians "
        + "/".join(f"{t / 1e6:.2f}" for t in serial) + " ms"
    )
    assert report("runtime scaling", ok, detail)


def test_hessian_structure(suite_results, report):
    results, _ = suite_results
    chosen = [r for r in results if r.name.startswith(("symmetry", "sparsity"))]
    assert len(chosen) == 4
    worst = max(r.error for r in chosen)
    ok = all(r.passed for r in chosen)
    detail = f"distinct-joint symmetry and branch sparsity on 50 cases, largest violation {worst:.1e} (exact)"
    assert report("Hessian structure", ok, detail)
