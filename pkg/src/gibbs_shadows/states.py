"""Dense complex linear algebra: statevectors, gate kernels, matrix functions.

Everything is double-precision and little-endian (qubit i = index bit i);
a dense operator on n qubits is a 2^n x 2^n ndarray.  The configured qubit
cap keeps the 2^n x 2^n objects inside desk-scale memory.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .paulis import PauliString, PauliSum

MAX_QUBITS = 12

HGATE = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
SGATE = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
XGATE = np.array([[0, 1], [1, 0]], dtype=complex)
YGATE = np.array([[0, -1j], [1j, 0]], dtype=complex)
ZGATE = np.array([[1, 0], [0, -1]], dtype=complex)
CXGATE = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
PAULI_1Q = {"I": np.eye(2, dtype=complex), "X": XGATE, "Y": YGATE, "Z": ZGATE}
# rotations mapping a measurement axis onto Z: V w V^dag = Z
BASIS_ROTATION = {"X": HGATE, "Y": HGATE @ SDG, "Z": np.eye(2, dtype=complex)}


def _check_qubit_cap(n: int):
    if n > MAX_QUBITS:
        raise ValueError(f"n={n} exceeds the dense cap of {MAX_QUBITS} qubits")


@dataclass
class StateVector:
    """Normalized complex amplitude array of length 2^n."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        _check_qubit_cap(self.n)
        self.amps = np.ascontiguousarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.n,):
            raise ValueError("amplitude array must have length 2^n")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n, self.amps / nrm)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)


def zero_state(n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def basis_state(n: int, index: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


# ---------------------------------------------------------------------------
# Gate application
# ---------------------------------------------------------------------------

def _assert_unitary(gate: np.ndarray, tol: float = 1e-12):
    d = gate.shape[0]
    if gate.shape != (d, d) or d not in (2, 4):
        raise ValueError("gate must be a 2x2 or 4x4 matrix")
    err = np.abs(gate.conj().T @ gate - np.eye(d)).max()
    if err > tol:
        raise ValueError(f"gate is not unitary (deviation {err:.2e})")


def apply_gate_inplace(amps: np.ndarray, gate: np.ndarray, targets: tuple[int, ...], n: int):
    """Apply a 1- or 2-qubit unitary in place.

    ``targets[0]`` indexes the most significant bit of the gate matrix, so a
    CX given in the usual |control, target> basis is applied as
    ``apply_gate_inplace(amps, CXGATE, (control, target), n)``.
    """
    dim = 1 << n
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"target {q} out of range for n={n}")
    k = len(targets)
    if gate.shape != (1 << k, 1 << k):
        raise ValueError("gate size does not match target count")
    view = amps.reshape([2] * n)
    # axis j of the reshaped tensor is qubit n-1-j
    axes = [n - 1 - q for q in targets]
    moved = np.moveaxis(view, axes, range(k))
    block = moved.reshape(1 << k, dim >> k)  # may copy; write back through the view
    moved[...] = (gate @ block).reshape(moved.shape)


def apply_gate(state: StateVector, gate: np.ndarray, targets) -> StateVector:
    """Pure-value gate application with unitarity and range checks."""
    gate = np.asarray(gate, dtype=complex)
    _assert_unitary(gate)
    out = state.amps.copy()
    apply_gate_inplace(out, gate, tuple(targets), state.n)
    return StateVector(state.n, out)


# ---------------------------------------------------------------------------
# Pauli realizations
# ---------------------------------------------------------------------------

def _parity_lookup(masked: np.ndarray) -> np.ndarray:
    v = masked.astype(np.int64).copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def pauli_matvec(p: PauliString, amps: np.ndarray) -> np.ndarray:
    """P @ amps via bit operations; works on (2^n,) or (2^n, m) arrays."""
    dim = 1 << p.n
    if amps.shape[0] != dim:
        raise ValueError("dimension mismatch")
    idx = np.arange(dim)
    y_count = (p.x & p.z).bit_count()
    factors = p.phase * (1j) ** (y_count % 4) * (1.0 - 2.0 * _parity_lookup(idx & p.z))
    out = np.empty_like(amps, dtype=complex)
    if amps.ndim == 1:
        out[idx ^ p.x] = factors * amps
    else:
        out[idx ^ p.x, :] = factors[:, None] * amps
    return out


def pauli_sum_matvec(h: PauliSum, amps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps, dtype=complex)
    for coeff, p in h:
        out += coeff * pauli_matvec(p, amps)
    return out


def pauli_expectation(state: StateVector, p: PauliString) -> float:
    """<psi|P|psi>, asserted real to 1e-12 before discarding the residue."""
    if p.n != state.n:
        raise ValueError("qubit-count mismatch")
    val = complex(np.vdot(state.amps, pauli_matvec(p, state.amps)))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"expectation has imaginary residue {val.imag:.2e}")
    return val.real


def pauli_trace_with(rho: np.ndarray, p: PauliString) -> float:
    """Tr(rho P) by gathering the single nonzero of P per column: O(2^n)."""
    dim = 1 << p.n
    if rho.shape != (dim, dim):
        raise ValueError("dimension mismatch")
    idx = np.arange(dim)
    y_count = (p.x & p.z).bit_count()
    factors = p.phase * (1j) ** (y_count % 4) * (1.0 - 2.0 * _parity_lookup(idx & p.z))
    val = complex(np.sum(rho[idx, idx ^ p.x] * factors))
    return val.real


def dense_pauli(p: PauliString) -> np.ndarray:
    _check_qubit_cap(p.n)
    dim = 1 << p.n
    idx = np.arange(dim)
    y_count = (p.x & p.z).bit_count()
    factors = p.phase * (1j) ** (y_count % 4) * (1.0 - 2.0 * _parity_lookup(idx & p.z))
    mat = np.zeros((dim, dim), dtype=complex)
    mat[idx ^ p.x, idx] = factors
    return mat


def dense_pauli_sum(h: PauliSum) -> np.ndarray:
    _check_qubit_cap(h.n)
    dim = 1 << h.n
    idx = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, p in h:
        y_count = (p.x & p.z).bit_count()
        factors = (1j) ** (y_count % 4) * (1.0 - 2.0 * _parity_lookup(idx & p.z))
        mat[idx ^ p.x, idx] += coeff * factors
    return mat


# ---------------------------------------------------------------------------
# Density operators and Hermitian eigenproblems
# ---------------------------------------------------------------------------

@dataclass
class DensityOperator:
    """Unit-trace Hermitian matrix; shadow snapshots may be non-positive."""

    n: int
    mat: np.ndarray

    def __post_init__(self):
        _check_qubit_cap(self.n)
        self.mat = np.ascontiguousarray(self.mat, dtype=complex)
        dim = 1 << self.n
        if self.mat.shape != (dim, dim):
            raise ValueError("matrix must be 2^n x 2^n")

    def check_state(self, tol: float = 1e-10):
        if np.abs(self.mat - self.mat.conj().T).max() > tol:
            raise ValueError("not Hermitian")
        if abs(np.trace(self.mat).real - 1.0) > tol:
            raise ValueError("trace differs from one")


@dataclass
class HermitianEig:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # unitary, columns


def eig_hermitian(mat: np.ndarray, tol: float = 1e-10) -> HermitianEig:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("need a square matrix")
    if np.abs(mat - mat.conj().T).max() > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(mat)
    return HermitianEig(vals, vecs)


def mat_func(mat: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f(M) = V f(Lambda) V^dag through the eigendecomposition.

    The eigendecomposition is the single canonical route for matrix functions
    here; series-based routes exist only as independent test oracles.
    """
    eig = eig_hermitian(mat)
    with np.errstate(all="ignore"):
        fvals = np.asarray(f(eig.eigenvalues), dtype=complex)
    if fvals.shape != eig.eigenvalues.shape or not np.all(np.isfinite(fvals)):
        raise ValueError("function undefined or non-finite on an eigenvalue")
    return (eig.eigenvectors * fvals) @ eig.eigenvectors.conj().T
