"""End-to-end experiment drivers: declarative config in, CSV + JSON out.

Every experiment is a pure function of (config, seed): all randomness flows
through per-cell substreams keyed by stable indices, so reruns are
byte-identical and results do not depend on thread count.  Wall-clock data
lives only in the metadata JSON, never in CSV bodies.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import thermal as gibbs_mod
from . import qbm as qbm_mod
from . import shadows as shadows_mod
from . import states, tpq
from .clifford import sample_clifford
from .paulis import (
    PauliSum,
    build_random_xyz,
    build_xxz,
    fields_and_matched_pairs,
    one_two_qubit_paulis,
    rescale,
    spectral_window,
)
from .shadows import substream


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_metadata(path: Path, cfg: dict, seed: int, wall_time: float) -> None:
    meta = {
        "config": cfg,
        "seed": seed,
        "version": __version__,
        "wall_time_s": wall_time,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _parallel(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _build_model(cfg: dict, derive_seed: int | None = None) -> PauliSum:
    if cfg["model"] == "xxz":
        return build_xxz(cfg["n"], cfg["j"], cfg["delta"])
    seed = cfg["model_seed"] if derive_seed is None else derive_seed
    return build_random_xyz(cfg["n"], seed)


def _sub_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(entropy=seed, spawn_key=key).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Polynomial-degree sweep of direct TPQ expectation errors
# ---------------------------------------------------------------------------

def run_tpq_degree_sweep(cfg: dict, seed: int, threads: int = 1):
    h = _build_model(cfg)
    n = cfg["n"]
    observables = one_two_qubit_paulis(n)
    window = spectral_window(h, cfg["window"])
    tableaus = [sample_clifford(n, substream(seed, i)) for i in range(cfg["u_seeds"])]

    def one_beta(item):
        b_idx, beta = item
        exact = gibbs_mod.gibbs(h, beta).expectations(observables)
        _, tau = rescale(h, window, beta)
        rows = []
        for degree in cfg["degree_grid"]:
            poly = tpq.chebyshev_fit(tau, degree)
            preparer = tpq.PolyTpqPreparer(h, beta, poly, window)
            estimates = np.zeros(len(observables))
            for u_idx, tab in enumerate(tableaus):
                psi = preparer.prepare(tab, u_id=(seed, u_idx)).state
                estimates += np.array(
                    [states.pauli_expectation(psi, p) for p in observables]
                )
            estimates /= len(tableaus)
            rows.append((beta, degree, float(np.abs(estimates - exact).max()), len(tableaus)))
        return rows

    nested = _parallel(one_beta, list(enumerate(cfg["beta_grid"])), threads)
    return ["beta", "degree", "max_err", "seed_count"], [r for rows in nested for r in rows]


# ---------------------------------------------------------------------------
# Shadow-estimate error versus shadow count for three state sources
# ---------------------------------------------------------------------------

def run_shadow_compare(cfg: dict, seed: int, threads: int = 1):
    h = _build_model(cfg)
    n, beta = cfg["n"], cfg["beta"]
    observables = one_two_qubit_paulis(n)
    snap = gibbs_mod.gibbs(h, beta)
    exact = snap.expectations(observables)
    counts = sorted(cfg["shadow_grid"])
    pool_size = counts[-1]
    u_count = cfg["u_count"]
    window = spectral_window(h, cfg["window"])
    _, tau = rescale(h, window, beta)
    poly = tpq.chebyshev_fit(tau, cfg["degree"])
    tableaus = [sample_clifford(n, substream(seed, 100 + i)) for i in range(u_count)]
    # one measurement-randomness key shared by all methods: a controlled
    # comparison uses identical bases and inverse-CDF draws per shadow index
    pool_seed = _sub_seed(seed, 7)

    def state_pool(method: str):
        if method == "gibbs":
            weights = np.exp(-beta * (snap.eigenvalues - snap.eigenvalues[0]))
            weights /= weights.sum()
            rng = substream(seed, 11)
            assignment = rng.choice(weights.size, size=pool_size, p=weights)
            return snap.eigenvectors.T.copy(), assignment
        if method == "tpq-exact":
            preparer = tpq.ExactTpqPreparer(h, beta)
        else:
            preparer = tpq.PolyTpqPreparer(h, beta, poly, window)
        rows = np.stack([preparer.prepare(t).state.amps for t in tableaus])
        return rows, np.arange(pool_size) % u_count

    def one_method(method: str):
        rows_mat, assignment = state_pool(method)
        bases, outcomes = shadows_mod.pauli_shadow_pool(
            rows_mat, assignment, pool_size, pool_seed, n
        )
        out = []
        errs = np.empty((len(counts), len(observables)))
        for j, p in enumerate(observables):
            ests = shadows_mod.estimate_pauli_batch(bases, outcomes, p)
            csum = np.cumsum(ests)
            for c_idx, c in enumerate(counts):
                errs[c_idx, j] = abs(csum[c - 1] / c - exact[j])
        for c_idx, c in enumerate(counts):
            out.append((method, c, float(errs[c_idx].max())))
        return out

    nested = _parallel(one_method, ["gibbs", "tpq-exact", "tpq-poly"], threads)
    return ["method", "n_shadows", "max_err"], [r for rows in nested for r in rows]


# ---------------------------------------------------------------------------
# Purity versus system size
# ---------------------------------------------------------------------------

def run_purity_scan(cfg: dict, seed: int, threads: int = 1):
    def one_cell(item):
        model, n = item
        if model == "xxz":
            h = build_xxz(n, cfg["j"], cfg["delta"])
        else:
            h = build_random_xyz(n, _sub_seed(seed, n))  # fresh instance per n
        rows = []
        for beta in cfg["beta_grid"]:
            purity, _ = gibbs_mod.purity_and_decay(h, beta)
            rows.append((model, beta, n, purity))
        return rows

    cells = [(m, n) for m in ("xxz", "random-xyz") for n in cfg["n_grid"]]
    nested = _parallel(one_cell, cells, threads)
    return ["model", "beta", "n", "purity"], [r for rows in nested for r in rows]


# ---------------------------------------------------------------------------
# Direct TPQ estimation error versus system size and ensemble size
# ---------------------------------------------------------------------------

def run_tpq_ensemble(cfg: dict, seed: int, threads: int = 1):
    sizes = sorted(cfg["ensemble_sizes"])
    reps = cfg["repetitions"]
    beta = cfg["beta"]

    def one_n(n: int):
        h = build_xxz(n, cfg["j"], cfg["delta"])
        observables = fields_and_matched_pairs(n)
        exact = gibbs_mod.gibbs(h, beta).expectations(observables)
        preparer = tpq.ExactTpqPreparer(h, beta)
        mean_errs = np.empty((reps, len(sizes)))
        for rep in range(reps):
            rng = substream(seed, n, rep)
            vals = np.empty((sizes[-1], len(observables)))
            for i in range(sizes[-1]):
                psi = preparer.prepare(sample_clifford(n, rng)).state
                vals[i] = [states.pauli_expectation(psi, p) for p in observables]
            for s_idx, size in enumerate(sizes):
                est = vals[:size].mean(axis=0)
                mean_errs[rep, s_idx] = np.abs(est - exact).mean()
        rows = []
        for s_idx, size in enumerate(sizes):
            col = mean_errs[:, s_idx]
            stderr = float(col.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
            rows.append((n, size, float(col.mean()), stderr, reps))
        return rows

    nested = _parallel(one_n, cfg["n_grid"], threads)
    return ["n", "ensemble_size", "mean_err", "stderr", "reps"], [
        r for rows in nested for r in rows
    ]


# ---------------------------------------------------------------------------
# QBM training
# ---------------------------------------------------------------------------

def make_sparse_distribution(
    n: int, rng: np.random.Generator, samples: int = 10_000, scale: float = 0.4
) -> np.ndarray:
    """Synthetic sparse empirical target with pairwise structure.

    Draws ``samples`` bit strings from a random classical pairwise Boltzmann
    distribution (couplings and fields uniform in +-scale) and returns the
    empirical frequencies -- the same histogram-of-samples shape real
    recorded data would give, dominated by a modest set of strings.
    """
    dim = 1 << n
    bits = 1.0 - 2.0 * ((np.arange(dim)[:, None] >> np.arange(n)[None, :]) & 1)
    couplings = rng.uniform(-scale, scale, size=(n, n))
    fields = rng.uniform(-scale, scale, size=n)
    energy = np.einsum("si,ij,sj->s", bits, np.triu(couplings, 1), bits) + bits @ fields
    p = np.exp(-(energy - energy.min()))
    p /= p.sum()
    counts = rng.multinomial(samples, p)
    return counts / samples


def _qbm_target(cfg: dict, seed: int) -> qbm_mod.TargetState:
    if cfg["target"] == "gibbs":
        h = build_xxz(cfg["n"], cfg["target_j"], cfg["target_delta"])
        return qbm_mod.TargetState.from_gibbs(h, cfg["target_beta"])
    if cfg["data_csv"]:
        q = qbm_mod.read_bitstring_csv(cfg["data_csv"], cfg["n"])
    else:
        q = make_sparse_distribution(
            cfg["n"], substream(seed, 999), samples=cfg["synthetic_samples"], scale=cfg["synthetic_scale"]
        )
    return qbm_mod.encode_classical(q)


def _qbm_backend(name: str, cfg: dict) -> qbm_mod.Backend:
    if name == "exact":
        return qbm_mod.ExactGradient()
    if name == "tpq":
        return qbm_mod.TpqGradient(n_states=cfg["tpq_states"])
    if name == "shadows":
        return qbm_mod.ShadowGradient(
            count=cfg["shadow_count"],
            degree=cfg["degree"],
            u_count=cfg["u_count"],
            mom_groups=cfg["mom_groups"],
            window=cfg["window"],
        )
    raise ValueError(f"unknown backend {name!r}; expected exact, tpq or shadows")


def run_qbm_train(cfg: dict, seed: int, threads: int = 1):
    """Returns {backend: TrainState}; CSV emission happens in run_to_dir."""
    eta = _qbm_target(cfg, seed)
    theta0 = qbm_mod.initial_theta(cfg["n"], substream(seed, 1))
    backends = [(name, _qbm_backend(name, cfg)) for name in cfg["backends"]]

    def one_backend(item):
        idx, (name, backend) = item
        return name, qbm_mod.train(
            eta, theta0, backend, cfg["lr"], cfg["steps"], seed=_sub_seed(seed, 50 + idx)
        )

    results = _parallel(one_backend, list(enumerate(backends)), threads)
    return eta, dict(results)


def _final_distribution(state: qbm_mod.TrainState) -> np.ndarray:
    from .paulis import build_qbm

    h = build_qbm(state.theta)
    snap = gibbs_mod.gibbs(h, 1.0)
    return np.real(np.diag(snap.rho))


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------

def run_to_dir(cfg: dict, seed: int, out_dir, threads: int = 1) -> list[Path]:
    """Run one configured experiment and write its CSV + metadata files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kind = cfg["experiment"]
    start = time.monotonic()
    written: list[Path] = []
    if kind == "qbm-train":
        eta, results = run_qbm_train(cfg, seed, threads)
        summary = {}
        for name, ts in results.items():
            csv_path = out / f"qbm-train.{name}.csv"
            rows = [(k, s, em, ea) for k, (s, em, ea) in enumerate(ts.history)]
            write_csv(csv_path, ["step", "S", "eps_max", "eps_mean"], rows)
            written.append(csv_path)
            final_s, final_em, final_ea = ts.history[-1]
            summary[name] = {
                "final_S": final_s,
                "final_eps_max": final_em,
                "final_eps_mean": final_ea,
                "steps": ts.step,
            }
            if cfg["target"] == "classical":
                dist_path = out / f"qbm-train.{name}.distribution.csv"
                model_q = _final_distribution(ts)
                target_q = np.real(np.diag(eta.eta))
                dist_rows = [
                    (format(s, f"0{cfg['n']}b")[::-1], float(target_q[s]), float(model_q[s]))
                    for s in range(model_q.size)
                ]
                write_csv(dist_path, ["bitstring", "q", "p_model"], dist_rows)
                written.append(dist_path)
        summary_path = out / "qbm-train.summary.json"
        summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        written.append(summary_path)
    else:
        runner = {
            "tpq-degree-sweep": run_tpq_degree_sweep,
            "shadow-compare": run_shadow_compare,
            "purity-scan": run_purity_scan,
            "tpq-ensemble": run_tpq_ensemble,
        }[kind]
        header, rows = runner(cfg, seed, threads)
        csv_path = out / f"{kind}.csv"
        write_csv(csv_path, header, rows)
        written.append(csv_path)
    meta_path = out / f"{kind}.meta.json"
    write_metadata(meta_path, cfg, seed, time.monotonic() - start)
    written.append(meta_path)
    return written
