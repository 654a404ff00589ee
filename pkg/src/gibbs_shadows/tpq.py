"""Preparation of imaginary-time-evolved random stabilizer states.

Two backends produce the normalized state exp(-beta H / 2) U|0>/sqrt(N):

* ``exact``  -- dense functional calculus of the half evolution;
* ``poly:d`` -- a degree-d Chebyshev approximation of exp(-tau x) on the
  min-max-rescaled spectrum [0, 1], applied with the three-term recurrence
  using only Hamiltonian matrix-vector products.

On the postselected success branch a phased-iterate eigenvalue-transform
circuit applies exactly such a polynomial of the rescaled Hamiltonian, so the
polynomial action is the functional target; the block encoding it would run
on is built and verified separately (:func:`build_lcu`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import thermal as gibbs_mod
from . import states
from .clifford import CliffordTableau, replay_inplace, synthesize
from .paulis import PauliSum, SpectralWindow, rescale
from .states import StateVector

POLY_CACHE_VERSION = 1
_ERROR_GRID_POINTS = 10_000


@dataclass
class TpqState:
    state: StateVector
    beta: float
    backend: str  # "exact" or "poly:<degree>"
    u_id: object  # seed tuple or caller-supplied identifier for U
    norm_sq: float  # pre-normalization squared norm <0|U^dag f(H)^2 U|0>


@dataclass(frozen=True)
class ChebyshevPoly:
    """Truncated Chebyshev series for exp(-tau x) on x in [0, 1]."""

    degree: int
    coeffs: np.ndarray  # length degree+1, Chebyshev basis after x = (t+1)/2
    tau: float
    sup_error: float  # measured on a 10^4-point grid of [0, 1]

    def eval(self, x) -> np.ndarray:
        return np.polynomial.chebyshev.chebval(2.0 * np.asarray(x) - 1.0, self.coeffs)


def chebyshev_fit(tau: float, degree: int) -> ChebyshevPoly:
    """Chebyshev-Gauss quadrature coefficients for exp(-tau x), x in [0, 1].

    The quadrature size is chosen so that aliased coefficients are at
    machine-zero; the sup error is measured on a fixed grid and stored, so
    downstream accuracy checks bind to the actual error, not a bound.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    m = max(256, 4 * (degree + 1), int(4 * tau) + 64)
    theta = np.pi * (np.arange(m) + 0.5) / m
    nodes = np.cos(theta)
    values = np.exp(-tau * (nodes + 1.0) / 2.0)
    ks = np.arange(degree + 1)
    coeffs = (2.0 / m) * (np.cos(np.outer(ks, theta)) @ values)
    coeffs[0] /= 2.0
    grid = np.linspace(0.0, 1.0, _ERROR_GRID_POINTS)
    poly_vals = np.polynomial.chebyshev.chebval(2.0 * grid - 1.0, coeffs)
    sup_error = float(np.abs(poly_vals - np.exp(-tau * grid)).max())
    return ChebyshevPoly(degree, coeffs, tau, sup_error)


def save_poly_cache(path, polys: list[ChebyshevPoly]) -> None:
    """JSON-lines cache of (tau, degree, coefficients, sup error) records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps({"format": "chebyshev-cache", "version": POLY_CACHE_VERSION}) + "\n")
        for p in polys:
            fh.write(
                json.dumps(
                    {
                        "tau": p.tau,
                        "degree": p.degree,
                        "coeffs": p.coeffs.tolist(),
                        "sup_error": p.sup_error,
                    }
                )
                + "\n"
            )


def load_poly_cache(path) -> list[ChebyshevPoly]:
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("format") != "chebyshev-cache" or header.get("version") != POLY_CACHE_VERSION:
            raise ValueError(f"unrecognized polynomial cache header in {path}")
        out = []
        for line in fh:
            rec = json.loads(line)
            out.append(
                ChebyshevPoly(
                    rec["degree"], np.array(rec["coeffs"]), rec["tau"], rec["sup_error"]
                )
            )
    return out


# ---------------------------------------------------------------------------
# State preparation
# ---------------------------------------------------------------------------

class ExactTpqPreparer:
    """Caches the dense shifted half-evolution for repeated U draws."""

    def __init__(self, h: PauliSum, beta: float):
        if beta < 0:
            raise ValueError("beta must be nonnegative")
        self.h = h
        self.beta = beta
        eig = states.eig_hermitian(states.dense_pauli_sum(h))
        self._lambda_min = float(eig.eigenvalues[0])
        # exp(-beta (H - lmin)/2) keeps entries <= 1; the dropped scalar is
        # restored in norm_sq bookkeeping
        shifted = np.exp(-beta * (eig.eigenvalues - self._lambda_min) / 2.0)
        self._propagator = (eig.eigenvectors * shifted) @ eig.eigenvectors.conj().T
        self._log_scale = -beta * self._lambda_min  # log of the squared scalar

    def prepare(self, u: CliffordTableau, u_id=None) -> TpqState:
        amps = np.zeros(1 << self.h.n, dtype=complex)
        amps[0] = 1.0
        replay_inplace(synthesize(u), amps, self.h.n)
        evolved = self._propagator @ amps
        shifted_sq = float(np.linalg.norm(evolved) ** 2)
        if shifted_sq < 1e-300:
            raise FloatingPointError("imaginary-time evolution annihilated the state")
        log_norm_sq = math.log(shifted_sq) + self._log_scale
        norm_sq = math.exp(log_norm_sq) if log_norm_sq < 709.0 else math.inf
        state = StateVector(self.h.n, evolved / math.sqrt(shifted_sq))
        return TpqState(state, self.beta, "exact", u_id, norm_sq)


def prepare_exact(h: PauliSum, beta: float, u: CliffordTableau, u_id=None) -> TpqState:
    return ExactTpqPreparer(h, beta).prepare(u, u_id)


def chebyshev_apply(h_tilde: PauliSum, coeffs: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """sum_k c_k T_k(2 Ht - 1) applied to a vector with the three-term
    recurrence; only Hamiltonian matrix-vector products are used."""

    def mapped(v):
        return 2.0 * states.pauli_sum_matvec(h_tilde, v) - v

    t_prev = amps
    acc = coeffs[0] * t_prev
    if len(coeffs) >= 2:
        t_cur = mapped(amps)
        acc = acc + coeffs[1] * t_cur
        for k in range(2, len(coeffs)):
            t_next = 2.0 * mapped(t_cur) - t_prev
            acc = acc + coeffs[k] * t_next
            t_prev, t_cur = t_cur, t_next
    return acc


class PolyTpqPreparer:
    """Applies a Chebyshev polynomial of the rescaled Hamiltonian to U|0>."""

    def __init__(self, h: PauliSum, beta: float, poly: ChebyshevPoly, window: SpectralWindow):
        h_tilde, tau = rescale(h, window, beta)
        if not math.isclose(tau, poly.tau, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(
                f"polynomial was fit for tau={poly.tau}, but (beta, window) give tau={tau}"
            )
        self.h = h
        self.beta = beta
        self.poly = poly
        self.window = window
        self._h_tilde = h_tilde

    def apply_poly(self, amps: np.ndarray) -> np.ndarray:
        return chebyshev_apply(self._h_tilde, self.poly.coeffs, amps)

    def prepare(self, u: CliffordTableau, u_id=None) -> TpqState:
        amps = np.zeros(1 << self.h.n, dtype=complex)
        amps[0] = 1.0
        replay_inplace(synthesize(u), amps, self.h.n)
        out = self.apply_poly(amps)
        norm_sq = float(np.linalg.norm(out) ** 2)
        if norm_sq < 1e-300:
            raise FloatingPointError("polynomial action annihilated the state")
        state = StateVector(self.h.n, out / math.sqrt(norm_sq))
        return TpqState(state, self.beta, f"poly:{self.poly.degree}", u_id, norm_sq)


def prepare_poly(
    h: PauliSum,
    beta: float,
    u: CliffordTableau,
    poly: ChebyshevPoly,
    window: SpectralWindow,
    u_id=None,
) -> TpqState:
    return PolyTpqPreparer(h, beta, poly, window).prepare(u, u_id)


def success_probability(h: PauliSum, beta: float, window: SpectralWindow) -> float:
    """Ensemble-averaged probability of the all-zero ancilla branch.

    exp(beta lmin) Tr exp(-beta H) / 2^n; the per-U empirical analogue is
    norm_sq * exp(beta lmin) from :class:`TpqState`.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    eig = states.eig_hermitian(states.dense_pauli_sum(h))
    log_z = gibbs_mod._log_partition(eig.eigenvalues, beta)
    return math.exp(beta * window.lambda_min + log_z - h.n * math.log(2.0))


# ---------------------------------------------------------------------------
# LCU block encoding and its qubitized structure
# ---------------------------------------------------------------------------

@dataclass
class BlockEncoding:
    m: int  # ancilla count
    w: np.ndarray  # dense unitary on n + m qubits
    a: float  # normalization sum_k |a_k|
    n: int


def build_lcu(h: PauliSum) -> BlockEncoding:
    """W = A^dag B A with A preparing sqrt(|a_k|/a) and B selecting signed Paulis.

    The system occupies the low qubits and the ancilla register the high
    qubits, so the (0..2^n-1) x (0..2^n-1) corner of W is the encoded block
    H / a.  W is a Hermitian unitary (B is a signed Pauli selector), which is
    what gives each eigenspace its 2x2 reflection structure.
    """
    k_terms = len(h.terms)
    if k_terms == 0:
        raise ValueError("cannot block-encode the zero operator")
    m = max(0, (k_terms - 1).bit_length())
    if h.n + m > states.MAX_QUBITS:
        raise ValueError("ancilla register pushes past the dense qubit cap")
    dim_a = 1 << m
    dim_s = 1 << h.n
    a = h.coeff_l1()
    amplitudes = np.zeros(dim_a)
    for idx, (coeff, _) in enumerate(h.terms):
        amplitudes[idx] = math.sqrt(abs(coeff) / a)
    # complete the amplitude column to a unitary (deterministic Householder QR)
    if dim_a == 1:
        a_mat = np.eye(1, dtype=complex)
    else:
        basis = np.eye(dim_a)
        basis[:, 0] = amplitudes
        q, _ = np.linalg.qr(basis)
        phase = np.vdot(q[:, 0], amplitudes)
        q[:, 0] *= np.sign(phase.real)
        if np.abs(q[:, 0] - amplitudes).max() > 1e-12:
            raise AssertionError("QR completion failed to reproduce the amplitude column")
        a_mat = q.astype(complex)
    b_mat = np.zeros((dim_a * dim_s, dim_a * dim_s), dtype=complex)
    eye_s = np.eye(dim_s, dtype=complex)
    for idx in range(dim_a):
        lo = idx * dim_s
        if idx < k_terms:
            coeff, p = h.terms[idx]
            b_mat[lo : lo + dim_s, lo : lo + dim_s] = math.copysign(1.0, coeff) * states.dense_pauli(p)
        else:
            b_mat[lo : lo + dim_s, lo : lo + dim_s] = eye_s
    a_full = np.kron(a_mat, eye_s)
    w = a_full.conj().T @ b_mat @ a_full
    return BlockEncoding(m, w, a, h.n)


def encoded_block(enc: BlockEncoding) -> np.ndarray:
    """(<0^m| x I) W (|0^m> x I), which should equal H / a."""
    dim_s = 1 << enc.n
    return enc.w[:dim_s, :dim_s]
