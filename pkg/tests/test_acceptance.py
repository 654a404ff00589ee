"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to watch the verdict lines.
Budgets are generous on a laptop-class machine; the whole file stays well
under an hour on two cores.
"""
import json
import math
import time

import numpy as np
import pytest

from gibbs_shadows import clifford as cl
from gibbs_shadows import experiments as ex
from gibbs_shadows import qbm, shadows, states, thermal, tpq
from gibbs_shadows.config import parse_config
from gibbs_shadows.paulis import (
    PauliString,
    build_random_xyz,
    build_xxz,
    one_two_qubit_paulis,
    rescale,
    spectral_window,
)
from gibbs_shadows.shadows import substream
from gibbs_shadows.states import zero_state

from oracles import random_hermitian

SEED = 20240810


def _verdict(name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {tag}{' -- ' + detail if detail else ''}", flush=True)


# ---------------------------------------------------------------------------
# 1. Clifford design moments
# ---------------------------------------------------------------------------

def test_c01_clifford_design_moments(cl1_group, cl1_unitaries, cl2_group, cl2_unitaries):
    start = time.monotonic()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for n, unitaries in ((1, cl1_unitaries), (2, cl2_unitaries)):
        dim = 1 << n
        b = 0
        cols = np.stack([u.conj().T[:, b] for u in unitaries])  # U^dag |b>
        for _ in range(5):
            o1 = random_hermitian(dim, rng)
            o2 = random_hermitian(dim, rng, traceless=True)
            o3 = random_hermitian(dim, rng, traceless=True)
            ev1 = np.einsum("gi,ij,gj->g", cols.conj(), o1, cols)
            first = ev1.mean() - np.trace(o1) / dim
            proj = np.einsum("gi,gj->gij", cols, cols.conj())
            second = (proj * ev1[:, None, None]).mean(axis=0) - (
                o1 + np.eye(dim) * np.trace(o1)
            ) / (dim * (dim + 1))
            ev2 = np.einsum("gi,ij,gj->g", cols.conj(), o2, cols)
            ev3 = np.einsum("gi,ij,gj->g", cols.conj(), o3, cols)
            third = (proj * (ev2 * ev3)[:, None, None]).mean(axis=0) - (
                np.eye(dim) * np.trace(o2 @ o3) + o2 @ o3 + o3 @ o2
            ) / (dim * (dim + 1) * (dim + 2))
            worst = max(
                worst, abs(first), np.abs(second).max(), np.abs(third).max()
            )
    elapsed = time.monotonic() - start
    ok = worst <= 1e-12 and elapsed <= 60.0
    _verdict("c01 clifford-design-moments", ok, f"max_err={worst:.2e} time={elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed <= 60.0


# ---------------------------------------------------------------------------
# 2. Shadow channel unbiasedness
# ---------------------------------------------------------------------------

def test_c02_shadow_channel_unbiasedness(cl2_group, cl2_unitaries):
    start = time.monotonic()
    rng = np.random.default_rng(SEED + 1)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    acc = np.zeros((4, 4), dtype=complex)
    eye = np.eye(4)
    for u in cl2_unitaries:
        rotated = u @ psi
        probs = np.abs(rotated) ** 2
        cols = u.conj().T
        for b in range(4):
            proj = np.outer(cols[:, b], cols[:, b].conj())
            acc += probs[b] * (5.0 * proj - eye)
    acc /= len(cl2_unitaries)
    err = np.abs(acc - np.outer(psi, psi.conj())).max()
    elapsed = time.monotonic() - start
    ok = err <= 1e-10 and elapsed <= 60.0
    _verdict("c02 shadow-channel-unbiasedness", ok, f"max_err={err:.2e} time={elapsed:.1f}s")
    assert err <= 1e-10
    assert elapsed <= 60.0


# ---------------------------------------------------------------------------
# 3. Purity identity
# ---------------------------------------------------------------------------

def test_c03_purity_identity():
    worst = 0.0
    for n in range(2, 9):
        for build in (lambda m: build_xxz(m, 0.5, 0.75), lambda m: build_random_xyz(m, m + 3)):
            h = build(n)
            for beta in (0.25, 0.5, 1.0, 2.0):
                purity, decay = thermal.purity_and_decay(h, beta)
                worst = max(worst, abs(purity - math.exp(-decay)) / purity)
    ok = worst <= 1e-10
    _verdict("c03 purity-identity", ok, f"max_rel_err={worst:.2e}")
    assert worst <= 1e-10


# ---------------------------------------------------------------------------
# 4. TPQ moment formulas (the variance clause is a documented spec defect:
#    the second-order ensemble formulas carry a truncation error that is
#    several times the 4-SE statistical band at n=8 with 1e4 draws)
# ---------------------------------------------------------------------------

def test_c04_tpq_moment_formulas():
    start = time.monotonic()
    h = build_xxz(8, 0.5, 0.75)
    observables = [
        PauliString.from_label("Z" + "I" * 7),
        PauliString.from_label("ZZ" + "I" * 6),
        PauliString.from_label("XX" + "I" * 6),
    ]
    prep = tpq.ExactTpqPreparer(h, 1.0)
    stream = substream(SEED, 4)
    draws = 10_000
    vals = np.empty((draws, len(observables)))
    for i in range(draws):
        psi = prep.prepare(cl.sample_clifford(8, stream)).state
        vals[i] = [states.pauli_expectation(psi, o) for o in observables]
    elapsed = time.monotonic() - start
    failures = []
    details = []
    for j, obs in enumerate(observables):
        col = vals[:, j]
        mean_pred, var_pred = thermal.tpq_moments(h, 1.0, obs)
        se_mean = col.std(ddof=1) / math.sqrt(draws)
        z_mean = abs(col.mean() - mean_pred) / se_mean
        centered = col - col.mean()
        se_var = math.sqrt(
            max((centered**4).mean() - (centered**2).mean() ** 2, 0.0) / draws
        )
        z_var = abs(col.var() - var_pred) / se_var
        details.append(f"{obs.label().rstrip('I') or 'I'}: mean {z_mean:.1f}SE var {z_var:.1f}SE")
        if z_mean > 4.0:
            failures.append(f"mean of {obs.label()} off by {z_mean:.1f} SE")
        if z_var > 4.0:
            failures.append(f"variance of {obs.label()} off by {z_var:.1f} SE")
    ok = not failures and elapsed <= 600.0
    _verdict(
        "c04 tpq-moment-formulas",
        ok,
        "; ".join(details) + f" time={elapsed:.0f}s",
    )
    assert elapsed <= 600.0
    assert not failures, (
        "second-order ensemble-moment formulas miss the Monte Carlo variance by "
        "more than 4 standard errors; the gap is their own truncation error "
        "(verified against full group enumeration at n=2, where the Taylor form "
        "with exact ensemble moments equals d/(d+1) times the formula to 15 "
        "digits yet sits far from the enumerated truth): " + "; ".join(failures)
    )


# ---------------------------------------------------------------------------
# 5. Polynomial backend fidelity and degree trend
# ---------------------------------------------------------------------------

def test_c05_polynomial_backend_fidelity():
    n, beta = 10, 1.0
    h = build_xxz(n, 0.5, 0.75)
    window = spectral_window(h, "bound")
    _, tau = rescale(h, window, beta)
    degrees = (4, 8, 16, 32)
    polys = {d: tpq.chebyshev_fit(tau, d) for d in degrees}
    tableaus = [cl.sample_clifford(n, substream(SEED, 50 + i)) for i in range(10)]
    exact_prep = tpq.ExactTpqPreparer(h, beta)
    exact_states = [exact_prep.prepare(t).state for t in tableaus]

    observables = one_two_qubit_paulis(n)
    assert len(observables) == 435
    truth = thermal.gibbs(h, beta).expectations(observables)

    worst_fit = 1.0
    errs = {}
    psi_by_degree = {}
    for d in degrees:
        preparer = tpq.PolyTpqPreparer(h, beta, polys[d], window)
        psis = [preparer.prepare(t).state for t in tableaus]
        psi_by_degree[d] = psis
        if d == 32:
            worst_fit = min(e.fidelity(p) for e, p in zip(exact_states, psis))
        est = np.zeros(len(observables))
        for psi in psis:
            est += [states.pauli_expectation(psi, o) for o in observables]
        est /= len(tableaus)
        errs[d] = float(np.abs(est - truth).max())

    trend_ok = True
    for d_prev, d_next in zip(degrees, degrees[1:]):
        # allowance: the two ensembles differ by at most the worst state gap
        dev = max(
            float(np.linalg.norm(a.amps - b.amps))
            for a, b in zip(psi_by_degree[d_prev], psi_by_degree[d_next])
        )
        if errs[d_next] > errs[d_prev] + 2.0 * dev + 1e-12:
            trend_ok = False
    ok = worst_fit >= 1.0 - 1e-4 and trend_ok
    _verdict(
        "c05 polynomial-backend-fidelity",
        ok,
        f"min_fidelity(d=32)={worst_fit:.8f} errs=" + str({d: round(errs[d], 5) for d in degrees}),
    )
    assert worst_fit >= 1.0 - 1e-4
    assert trend_ok, f"degree-vs-error trend violated: {errs}"


# ---------------------------------------------------------------------------
# 6. Shadow-estimate comparison across state sources
# ---------------------------------------------------------------------------

def test_c06_shadow_compare_three_methods():
    start = time.monotonic()
    cfg = parse_config(
        """
experiment = shadow-compare
n = 10
j = 0.5
delta = 0.75
beta = 1.0
degree = 32
shadow_grid = 1000,5000,20000,50000
u_count = 100
"""
    )
    header, rows = ex.run_shadow_compare(cfg, seed=SEED, threads=2)
    final = {r[0]: r[2] for r in rows if r[1] == 50_000}
    elapsed = time.monotonic() - start
    cap_ok = all(v <= 0.2 for v in final.values())
    spread = max(final.values()) / min(final.values())
    ok = cap_ok and spread <= 2.0 and elapsed <= 1800.0
    _verdict(
        "c06 shadow-compare",
        ok,
        f"final={ {k: round(v, 4) for k, v in final.items()} } spread={spread:.2f} time={elapsed:.0f}s",
    )
    assert cap_ok, final
    assert spread <= 2.0, final
    assert elapsed <= 1800.0


# ---------------------------------------------------------------------------
# 7. Single-shot mean squared error of per-qubit shadows
# ---------------------------------------------------------------------------

def test_c07_pauli_shadow_mse():
    n, beta = 6, 1.0
    h = build_xxz(n, 0.5, 0.75)
    snap = thermal.gibbs(h, beta)
    obs = PauliString.from_label("ZZ" + "I" * 4)
    truth = snap.expectation(obs)
    predicted = 3.0 ** obs.weight() - truth**2
    mean_pred, var_pred = thermal.tpq_moments(h, beta, obs)
    allowance = var_pred + (mean_pred - truth) ** 2  # the O(e^-n) ensemble term

    prep = tpq.ExactTpqPreparer(h, beta)
    stream = substream(SEED, 7)
    total = 100_000
    chunk = 20_000
    sq_sum = 0.0
    sq_sq_sum = 0.0
    for c in range(total // chunk):
        rows = np.empty((chunk, 1 << n), dtype=complex)
        for i in range(chunk):
            rows[i] = prep.prepare(cl.sample_clifford(n, stream)).state.amps
        bases, outcomes = shadows.pauli_shadow_pool(
            rows, np.arange(chunk), chunk, int(stream.integers(2**63 - 1)), n
        )
        ests = shadows.estimate_pauli_batch(bases, outcomes, obs)
        sq = (ests - truth) ** 2
        sq_sum += sq.sum()
        sq_sq_sum += (sq**2).sum()
    mse = sq_sum / total
    se = math.sqrt(max(sq_sq_sum / total - mse**2, 0.0) / total)
    gap = abs(mse - predicted)
    ok = gap <= 5.0 * se
    _verdict(
        "c07 pauli-shadow-mse",
        ok,
        f"empirical={mse:.4f} predicted={predicted:.4f} gap={gap / se:.2f}SE "
        f"(tpq allowance {allowance:.4f})",
    )
    assert gap <= 5.0 * se


# ---------------------------------------------------------------------------
# 8. Median-of-means plan arithmetic and empirical failure rate
# ---------------------------------------------------------------------------

def test_c08_theorem_plan_and_failure_rate():
    start = time.monotonic()
    plan = shadows.plan_shadows(0.1, 0.01, 435, 3.0)
    plan_ok = plan.n_per_group == 1800 and plan.k_groups == 49
    n = 10
    h = build_xxz(n, 0.5, 0.75)
    snap = thermal.gibbs(h, 1.0)
    observables = one_two_qubit_paulis(n)
    truth = snap.expectations(observables)
    weights = np.exp(-(snap.eigenvalues - snap.eigenvalues[0]))
    weights /= weights.sum()
    state_rows = snap.eigenvectors.T.copy()
    total = plan.total
    reps = 200
    failures = 0
    for rep in range(reps):
        rng = substream(SEED, 8, rep)
        assignment = rng.choice(weights.size, size=total, p=weights)
        pool_seed = int(rng.integers(2**63 - 1))
        bases, outcomes = shadows.pauli_shadow_pool(state_rows, assignment, total, pool_seed, n)
        worst = 0.0
        for j, obs in enumerate(observables):
            ests = shadows.estimate_pauli_batch(bases, outcomes, obs)
            groups = ests.reshape(plan.k_groups, plan.n_per_group).mean(axis=1)
            worst = max(worst, abs(float(np.median(groups)) - truth[j]))
            if worst > 0.1:
                break
        failures += worst > 0.1
    rate = failures / reps
    elapsed = time.monotonic() - start
    ok = plan_ok and rate <= 5 * 0.01
    _verdict(
        "c08 theorem-plan-failure-rate",
        ok,
        f"N={plan.n_per_group} K={plan.k_groups} failures={failures}/{reps} time={elapsed:.0f}s",
    )
    assert plan_ok
    assert rate <= 0.05


# ---------------------------------------------------------------------------
# 9. QBM training on a realizable thermal target
# ---------------------------------------------------------------------------

def test_c09_qbm_gibbs_target_training():
    start = time.monotonic()
    n = 8
    eta = qbm.TargetState.from_gibbs(build_xxz(n, 0.5, 0.75), 1.0)
    theta0 = qbm.initial_theta(n, substream(SEED, 9))
    exact = qbm.train(eta, theta0, qbm.ExactGradient(), 0.1, 200, seed=SEED)
    s_vals = [rec[0] for rec in exact.history]
    monotone = all(b <= a + 1e-12 for a, b in zip(s_vals, s_vals[1:]))

    shadow = qbm.train(
        eta,
        theta0,
        qbm.ShadowGradient(count=5000, degree=32, u_count=1),
        0.1,
        200,
        seed=SEED + 1,
    )
    eps_max_final = shadow.history[-1][1]
    elapsed = time.monotonic() - start
    ok = monotone and eps_max_final <= 0.3 and elapsed <= 7200.0
    _verdict(
        "c09 qbm-gibbs-training",
        ok,
        f"S {s_vals[0]:.3f}->{s_vals[-1]:.4f} monotone={monotone} "
        f"shadow eps_max={eps_max_final:.3f} time={elapsed:.0f}s",
    )
    assert monotone
    assert eps_max_final <= 0.3
    assert elapsed <= 7200.0


# ---------------------------------------------------------------------------
# 10. QBM training on classical data
# ---------------------------------------------------------------------------

def test_c10_qbm_classical_target_training(tmp_path):
    start = time.monotonic()
    cfg = parse_config(
        """
experiment = qbm-train
n = 8
target = classical
backends = shadows
lr = 0.2
steps = 400
shadow_count = 10000
degree = 32
u_count = 1
window = exact
"""
    )
    ex.run_to_dir(cfg, seed=SEED, out_dir=tmp_path)
    log = (tmp_path / "qbm-train.shadows.csv").read_text().splitlines()[1:]
    s_vals = [float(line.split(",")[1]) for line in log]
    eps_mean_final = float(log[-1].split(",")[3])
    drop = s_vals[0] - s_vals[-1]
    tail_change = abs(s_vals[3 * len(s_vals) // 4] - s_vals[-1])
    plateau = tail_change <= 0.1 * drop
    dist = (tmp_path / "qbm-train.shadows.distribution.csv").read_text().splitlines()[1:]
    tv = 0.5 * sum(
        abs(float(line.split(",")[1]) - float(line.split(",")[2])) for line in dist
    )
    elapsed = time.monotonic() - start
    ok = plateau and tv <= 0.1
    _verdict(
        "c10 qbm-classical-training",
        ok,
        f"S {s_vals[0]:.3f}->{s_vals[-1]:.4f} plateau={plateau} TV={tv:.4f} "
        f"eps_mean={eps_mean_final:.4f} time={elapsed:.0f}s",
    )
    assert plateau, "relative entropy did not plateau"
    assert tv <= 0.1
    assert elapsed <= 7200.0


# ---------------------------------------------------------------------------
# 11. Gradient correctness against central finite differences
# ---------------------------------------------------------------------------

def test_c11_gradient_finite_differences():
    worst = 0.0
    for n in (2, 3, 4):
        rng = substream(SEED, 11, n)
        theta = qbm.initial_theta(n, rng) * 3.0
        eta = qbm.TargetState.from_gibbs(build_xxz(n, 0.5, 0.75), 1.0)
        grad = qbm.gradient(eta, theta, qbm.ExactGradient())
        step = 1e-5
        for k in range(theta.size):
            up, down = theta.copy(), theta.copy()
            up[k] += step
            down[k] -= step
            fd = (qbm.relative_entropy(eta, up) - qbm.relative_entropy(eta, down)) / (2 * step)
            worst = max(worst, abs(grad[k] - fd))
    ok = worst <= 1e-6
    _verdict("c11 gradient-finite-differences", ok, f"max_gap={worst:.2e}")
    assert worst <= 1e-6


# ---------------------------------------------------------------------------
# 12. Block encoding and its qubitized two-by-two structure
# ---------------------------------------------------------------------------

def test_c12_block_encoding():
    worst_block = 0.0
    worst_qubit = 0.0
    for idx, (n, seed) in enumerate(((2, 5), (3, 6), (3, 7))):
        h = build_random_xyz(n, seed)
        enc = tpq.build_lcu(h)
        block = tpq.encoded_block(enc)
        worst_block = max(
            worst_block, float(np.abs(block - states.dense_pauli_sum(h) / enc.a).max())
        )
        eig = states.eig_hermitian(states.dense_pauli_sum(h) / enc.a)
        dim_s = 1 << n
        for col in (0, dim_s // 2, dim_s - 1):
            lam = float(eig.eigenvalues[col])
            if 1.0 - lam**2 < 1e-8:
                continue
            u_vec = np.zeros(enc.w.shape[0], dtype=complex)
            u_vec[:dim_s] = eig.eigenvectors[:, col]
            wu = enc.w @ u_vec
            s = math.sqrt(1.0 - lam**2)
            perp = (wu - lam * u_vec) / s
            worst_qubit = max(
                worst_qubit,
                abs(np.vdot(u_vec, wu) - lam),
                abs(np.vdot(perp, wu) - s),
                abs(np.vdot(perp, enc.w @ perp) + lam),
            )
    ok = worst_block <= 1e-10 and worst_qubit <= 1e-10
    _verdict(
        "c12 block-encoding", ok, f"block_err={worst_block:.2e} qubitized_err={worst_qubit:.2e}"
    )
    assert worst_block <= 1e-10
    assert worst_qubit <= 1e-10
