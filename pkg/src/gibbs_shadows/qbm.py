"""Quantum Boltzmann machine: relative-entropy descent on rho_theta = e^-H(theta)/Z.

The inverse temperature of the model is absorbed into theta.  Gradients come
from one of three backends -- the exact thermal oracle, direct expectation
values on imaginary-time-evolved random stabilizer states, or randomized-
measurement shadow pools shared across all gradient components -- while the
relative entropy and the epsilon metrics are always monitored exactly, which
is affordable at desk scale.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import thermal as gibbs_mod
from . import shadows as shadows_mod
from . import states, tpq
from .clifford import sample_clifford
from .paulis import (
    PauliString,
    PauliSum,
    build_qbm,
    one_two_qubit_paulis,
    qbm_parameter_count,
    qbm_qubit_count,
    qbm_terms,
    rescale,
    spectral_window,
)
from .shadows import substream
from .states import StateVector


class TrainingDiverged(RuntimeError):
    """Raised when exact-gradient descent keeps increasing the objective."""


@dataclass
class TargetState:
    """Data-encoding density matrix; a statevector is kept for rank-1 targets."""

    n: int
    eta: np.ndarray
    provenance: str
    psi: np.ndarray | None = None

    def check(self, tol: float = 1e-10):
        if np.abs(self.eta - self.eta.conj().T).max() > tol:
            raise ValueError("target is not Hermitian")
        if abs(np.trace(self.eta).real - 1.0) > tol:
            raise ValueError("target trace differs from one")
        if np.linalg.eigvalsh(self.eta).min() < -tol:
            raise ValueError("target is not positive semidefinite")

    def expectation(self, p: PauliString) -> float:
        if self.psi is not None:
            val = complex(np.vdot(self.psi, states.pauli_matvec(p, self.psi)))
            return val.real
        return states.pauli_trace_with(self.eta, p)

    def expectations(self, observables) -> np.ndarray:
        return np.array([self.expectation(p) for p in observables])

    @classmethod
    def from_gibbs(cls, h: PauliSum, beta: float) -> "TargetState":
        snap = gibbs_mod.gibbs(h, beta)
        return cls(h.n, snap.rho, f"gibbs(beta={beta})")

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "TargetState":
        n = int(math.log2(mat.shape[0]))
        target = cls(n, np.asarray(mat, dtype=complex), "explicit")
        target.check()
        return target


def encode_classical(q: np.ndarray) -> TargetState:
    """Rank-1 encoding |psi> = sum_s sqrt(q(s)) |s> of an n-bit distribution."""
    q = np.asarray(q, dtype=float)
    n = int(math.log2(q.size))
    if 1 << n != q.size:
        raise ValueError("distribution length must be a power of two")
    if np.any(q < 0):
        raise ValueError("probabilities must be nonnegative")
    total = q.sum()
    if total <= 0:
        raise ValueError("all-zero distribution")
    if abs(total - 1.0) > 1e-9:
        warnings.warn(f"distribution sums to {total!r}; renormalizing", stacklevel=2)
    q = q / total
    psi = np.sqrt(q).astype(complex)
    return TargetState(n, np.outer(psi, psi.conj()), "classical-distribution", psi=psi)


def read_bitstring_csv(path, n: int | None = None) -> np.ndarray:
    """Empirical distribution from a CSV of 0/1 rows, one sample per line."""
    counts: dict[int, int] = {}
    total = 0
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            bits = [cell.strip() for cell in row if cell.strip() != ""]
            if not bits:
                continue
            if n is None:
                n = len(bits)
            elif len(bits) != n:
                raise ValueError(f"row with {len(bits)} bits; expected {n}")
            s = 0
            for q, cell in enumerate(bits):
                if cell not in ("0", "1"):
                    raise ValueError(f"bit cell {cell!r} is not 0/1")
                s |= int(cell) << q
            counts[s] = counts.get(s, 0) + 1
            total += 1
    if not total:
        raise ValueError("empty sample file")
    q_arr = np.zeros(1 << n)
    for s, c in counts.items():
        q_arr[s] = c / total
    return q_arr


# ---------------------------------------------------------------------------
# Objective and gradient
# ---------------------------------------------------------------------------

def _target_entropy(eta: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(eta)
    vals = np.clip(vals, 0.0, None)
    nz = vals[vals > 1e-300]
    return float(np.sum(nz * np.log(nz)))


def relative_entropy(eta: TargetState, theta: np.ndarray) -> float:
    """S(eta || rho_theta) = Tr(eta log eta) - Tr(eta log rho_theta).

    log rho_theta = -H(theta) - log Z is always finite for a thermal model,
    so only the target-side entropy needs the 0 log 0 = 0 convention.
    """
    h = build_qbm(theta)
    ops = qbm_terms(eta.n)
    tr_eta_h = float(np.dot(np.asarray(theta, dtype=float), eta.expectations(ops)))
    if len(h) > 0:
        eig = states.eig_hermitian(states.dense_pauli_sum(h))
        log_z = gibbs_mod._log_partition(eig.eigenvalues, 1.0)
    else:
        log_z = eta.n * math.log(2.0)
    return _target_entropy(eta.eta) + tr_eta_h + log_z


@dataclass(frozen=True)
class ExactGradient:
    name: str = "exact"


@dataclass(frozen=True)
class TpqGradient:
    """Model expectations from n_states exact imaginary-time-evolved states."""

    n_states: int = 1
    name: str = "tpq"


@dataclass(frozen=True)
class ShadowGradient:
    """One shared per-qubit shadow pool per step serves all gradient terms.

    ``window`` picks the spectral rescaling: the coefficient bound is the
    hardware-realistic default, but sharply trained models push the rescaled
    ground energy high enough that the success branch underflows; the exact
    window keeps it pinned at zero and is available at desk scale.
    """

    count: int = 5000
    degree: int = 32
    u_count: int = 1
    mom_groups: int = 0  # 0 = auto: ceil(4.5 ln(M / 0.01))
    window: str = "bound"
    name: str = "shadows"

    def groups_for(self, m_observables: int) -> int:
        if self.mom_groups > 0:
            return self.mom_groups
        return max(1, math.ceil(4.5 * math.log(m_observables / 0.01)))


Backend = ExactGradient | TpqGradient | ShadowGradient

_POLY_CACHE: dict[tuple[float, int], tpq.ChebyshevPoly] = {}


def _cached_poly(tau: float, degree: int) -> tpq.ChebyshevPoly:
    key = (round(tau, 12), degree)
    if key not in _POLY_CACHE:
        _POLY_CACHE[key] = tpq.chebyshev_fit(tau, degree)
    return _POLY_CACHE[key]


def model_expectations(theta: np.ndarray, ops, backend: Backend, rng: np.random.Generator | None = None) -> np.ndarray:
    """<P>_rho_theta for each P in ops, through the chosen backend."""
    n = qbm_n(theta)
    h = build_qbm(theta)
    if isinstance(backend, ExactGradient):
        if len(h) == 0:
            return np.zeros(len(ops))
        snap = gibbs_mod.gibbs(h, 1.0)
        return snap.expectations(ops)
    if rng is None:
        raise ValueError("stochastic backends need a generator")
    if isinstance(backend, TpqGradient):
        if backend.n_states < 1:
            raise ValueError("n_states must be positive")
        preparer = tpq.ExactTpqPreparer(h, 1.0)
        acc = np.zeros(len(ops))
        for _ in range(backend.n_states):
            psi = preparer.prepare(sample_clifford(n, rng)).state
            acc += np.array([states.pauli_expectation(psi, p) for p in ops])
        return acc / backend.n_states
    if isinstance(backend, ShadowGradient):
        if backend.count < 1 or backend.u_count < 1 or backend.degree < 1:
            raise ValueError("shadow backend resources must be positive")
        window = spectral_window(h, backend.window)
        _, tau = rescale(h, window, 1.0)
        poly = _cached_poly(tau, backend.degree)
        preparer = tpq.PolyTpqPreparer(h, 1.0, poly, window)
        prepared = [preparer.prepare(sample_clifford(n, rng)) for _ in range(backend.u_count)]
        for st in prepared:
            # a gradient needs thermal semantics: once the surviving amplitude
            # drops to the polynomial approximation error the normalized state
            # is approximation noise, not an imaginary-time-evolved state
            if math.sqrt(st.norm_sq) < 10.0 * poly.sup_error:
                raise FloatingPointError(
                    "surviving amplitude fell below the polynomial error during "
                    "training; tighten the spectral window or raise the degree"
                )
        pool_states = np.stack([st.state.amps for st in prepared])
        assignment = np.arange(backend.count) % backend.u_count
        pool_seed = int(rng.integers(0, 2**63 - 1))
        bases, outcomes = shadows_mod.pauli_shadow_pool(
            pool_states, assignment, backend.count, pool_seed, n
        )
        k_groups = backend.groups_for(len(ops))
        n_per_group = max(1, backend.count // k_groups)
        out = np.empty(len(ops))
        for j, p in enumerate(ops):
            ests = shadows_mod.estimate_pauli_batch(bases, outcomes, p)
            out[j] = shadows_mod.median_of_means(ests, n_per_group, k_groups)
        return out
    raise TypeError(f"unknown backend {backend!r}")


def qbm_n(theta) -> int:
    return qbm_qubit_count(np.asarray(theta).size)


def gradient(
    eta: TargetState, theta: np.ndarray, backend: Backend, rng: np.random.Generator | None = None
) -> np.ndarray:
    """d S / d theta_k = <H_k>_eta - <H_k>_rho_theta, in the fixed term order."""
    ops = qbm_terms(eta.n)
    target_side = eta.expectations(ops)
    model_side = model_expectations(theta, ops, backend, rng)
    return target_side - model_side


def initial_theta(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-0.1, 0.1, size=qbm_parameter_count(n))


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------

@dataclass
class TrainState:
    theta: np.ndarray
    step: int
    history: list[tuple[float, float, float]] = field(default_factory=list)
    # history[k] = (S, eps_max, eps_mean) at step k; length step + 1


def train(
    eta: TargetState,
    theta0: np.ndarray,
    backend: Backend,
    lr: float,
    steps: int,
    seed: int = 0,
    divergence_factor: float = 1.0,
    grad_tol: float | None = None,
) -> TrainState:
    """Vanilla gradient descent; metrics are recorded before every update.

    Aborts when the exactly-monitored objective exceeds ``divergence_factor``
    times its previous value for 10 consecutive exact-backend steps; at the
    default factor of 1.0 any sustained increase trips the guard.
    """
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    theta = np.array(theta0, dtype=float)
    ops_grad = qbm_terms(eta.n)
    ops_eps = one_two_qubit_paulis(eta.n)
    eta_grad = eta.expectations(ops_grad)
    eta_eps = eta.expectations(ops_eps)
    target_entropy = _target_entropy(eta.eta)
    history: list[tuple[float, float, float]] = []
    bad_streak = 0
    step = 0
    for step in range(steps + 1):
        h = build_qbm(theta)
        if len(h) > 0:
            snap = gibbs_mod.gibbs(h, 1.0)
            model_eps = snap.expectations(ops_eps)
            s_val = target_entropy + float(np.dot(theta, eta_grad)) + snap.log_z
        else:
            model_eps = np.zeros(len(ops_eps))
            s_val = target_entropy + eta.n * math.log(2.0)
        devs = np.abs(model_eps - eta_eps)
        history.append((s_val, float(devs.max()), float(devs.mean())))
        if len(history) >= 2 and isinstance(backend, ExactGradient):
            bad_streak = bad_streak + 1 if history[-1][0] > history[-2][0] * divergence_factor else 0
            if bad_streak >= 10:
                raise TrainingDiverged(f"objective grew for 10 consecutive steps at step {step}")
        if step == steps:
            break
        if isinstance(backend, ExactGradient):
            grad = eta_grad - snap.expectations(ops_grad)
        else:
            grad = eta_grad - model_expectations(theta, ops_grad, backend, substream(seed, step))
        if grad_tol is not None and float(np.abs(grad).max()) <= grad_tol:
            break
        theta = theta - lr * grad
    return TrainState(theta, len(history) - 1, history)
