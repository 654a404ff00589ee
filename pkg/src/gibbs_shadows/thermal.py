"""Exact thermal-state reference quantities via dense eigendecomposition.

All Boltzmann weights are computed with the spectrum shifted by its minimum
before exponentiation, so partition-function ratios stay finite for beta up
to ~50 without arbitrary precision; absolute quantities (Z) can still
overflow for extreme beta * span and then raise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import states
from .paulis import PauliString, PauliSum


@dataclass
class GibbsSnapshot:
    """Thermal density operator with its partition function and free energy.

    F is -log(Z)/beta for beta > 0 and NaN at beta = 0.  The eigensystem of
    the Hamiltonian is kept for cheap repeated expectation values.
    """

    n: int
    beta: float
    rho: np.ndarray
    Z: float
    F: float
    log_z: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def expectation(self, obs: PauliString | PauliSum) -> float:
        if isinstance(obs, PauliString):
            return states.pauli_trace_with(self.rho, obs)
        return float(sum(c * states.pauli_trace_with(self.rho, p) for c, p in obs))

    def expectations(self, observables) -> np.ndarray:
        return np.array([self.expectation(obs) for obs in observables])


def _obs_matvec(obs, mat: np.ndarray) -> np.ndarray:
    if isinstance(obs, PauliString):
        return states.pauli_matvec(obs, mat)
    return states.pauli_sum_matvec(obs, mat)


def _weights(eigenvalues: np.ndarray, beta: float) -> np.ndarray:
    w = np.exp(-beta * (eigenvalues - eigenvalues[0]))
    return w / w.sum()


def _log_partition(eigenvalues: np.ndarray, beta: float) -> float:
    shifted = -beta * (eigenvalues - eigenvalues[0])
    return float(-beta * eigenvalues[0] + np.log(np.exp(shifted).sum()))


def gibbs(h: PauliSum, beta: float) -> GibbsSnapshot:
    """rho_beta = exp(-beta H) / Z through the eigendecomposition of H."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    eig = states.eig_hermitian(states.dense_pauli_sum(h))
    w = _weights(eig.eigenvalues, beta)
    rho = (eig.eigenvectors * w) @ eig.eigenvectors.conj().T
    log_z = _log_partition(eig.eigenvalues, beta)
    try:
        z = math.exp(log_z)
    except OverflowError:
        raise OverflowError("partition function overflows double precision") from None
    if z <= 0.0:
        raise OverflowError("partition function underflows double precision")
    f = -log_z / beta if beta > 0 else math.nan
    return GibbsSnapshot(h.n, beta, rho, z, f, log_z, eig.eigenvalues, eig.eigenvectors)


def purity_and_decay(h: PauliSum, beta: float) -> tuple[float, float]:
    """Tr rho^2 and the exponent 2 beta (F_2b - F_b); purity = exp(-exponent).

    At beta = 0 the limit applies: purity 2^-n with exponent n log 2.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    eig = states.eig_hermitian(states.dense_pauli_sum(h))
    log_z1 = _log_partition(eig.eigenvalues, beta)
    log_z2 = _log_partition(eig.eigenvalues, 2.0 * beta)
    decay = 2.0 * log_z1 - log_z2
    return math.exp(-decay), decay


def tpq_moments(h: PauliSum, beta: float, obs: PauliString | PauliSum) -> tuple[float, float]:
    """Predicted ensemble mean and variance of <psi_b|O|psi_b> over random
    stabilizer initializations, to second order in the normalization spread."""
    if beta <= 0:
        raise ValueError("the moment formulas need beta > 0")
    eig = states.eig_hermitian(states.dense_pauli_sum(h))
    vecs = eig.eigenvectors
    a = vecs.conj().T @ _obs_matvec(obs, vecs)  # O in the eigenbasis
    diag = np.real(np.diag(a))
    w1 = _weights(eig.eigenvalues, beta)
    w2 = _weights(eig.eigenvalues, 2.0 * beta)
    tr_rho_o = float(np.dot(w1, diag))
    tr_rho2b_o = float(np.dot(w2, diag))
    purity, _ = purity_and_decay(h, beta)
    u = np.exp(-beta * (eig.eigenvalues - eig.eigenvalues[0]))
    cross = float(u @ (np.abs(a) ** 2) @ u) / float(np.dot(u, u))
    mean = tr_rho_o + purity * (tr_rho_o - tr_rho2b_o)
    var = purity * (cross - 2.0 * tr_rho_o * tr_rho2b_o + tr_rho_o**2)
    return mean, var


def tpq_failure_bound(o_norm: float, epsilon: float, h: PauliSum, beta: float) -> float:
    """Concentration bound min(1, 4 |O|^2 Tr rho^2 / eps^2) for a TPQ estimate."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    purity, _ = purity_and_decay(h, beta)
    return min(1.0, 4.0 * o_norm**2 * purity / epsilon**2)
