"""Pauli-string algebra on bitmasks, Hamiltonian builders, spectral rescaling.

Conventions (used package-wide):

* little-endian everywhere: bit ``i`` of a mask refers to qubit ``i``, and
  qubit ``i`` occupies bit ``i`` of a computational-basis index.
* string labels put qubit 0 first, so ``"XZI"`` means X on qubit 0, Z on
  qubit 1, identity on qubit 2.
* a :class:`PauliString` is ``phase * (tensor of literal I/X/Y/Z letters)``
  with ``phase`` one of ``{1, i, -1, -i}``; Hermitian strings have real phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PRUNE_TOL = 1e-14
_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)
_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_CODES = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliString:
    """Signed n-qubit Pauli operator as paired X/Z bitmasks plus a phase."""

    n: int
    x: int = 0
    z: int = 0
    phase: complex = 1 + 0j

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("mask exceeds qubit count")
        if self.phase not in _PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str, phase: complex = 1 + 0j) -> "PauliString":
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _LETTERS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, coeff_phase: complex = 1 + 0j) -> "PauliString":
        if not 0 <= qubit < n:
            raise ValueError("qubit out of range")
        xb, zb = _LETTERS[letter]
        return cls(n, xb << qubit, zb << qubit, coeff_phase)

    def label(self) -> str:
        return "".join(
            _CODES[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n)
        )

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def is_hermitian(self) -> bool:
        return self.phase in (1 + 0j, -1 + 0j)

    def commutes(self, other: "PauliString") -> bool:
        self._check(other)
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Operator product; phase stays in {1, i, -1, -i} (group closure)."""
        self._check(other)
        x = self.x ^ other.x
        z = self.z ^ other.z
        # i-exponent bookkeeping: each Y letter carries an i (Y = iXZ), and
        # commuting the left factor's Z block past the right factor's X block
        # costs (-1) per overlapping qubit.
        k = (
            (self.x & self.z).bit_count()
            + (other.x & other.z).bit_count()
            - (x & z).bit_count()
            + 2 * (self.z & other.x).bit_count()
        ) % 4
        return PauliString(self.n, x, z, self.phase * other.phase * _PHASES[k])

    def support(self) -> list[int]:
        m = self.x | self.z
        return [i for i in range(self.n) if (m >> i) & 1]

    def _check(self, other: "PauliString"):
        if self.n != other.n:
            raise ValueError(f"qubit-count mismatch: {self.n} vs {other.n}")


@dataclass(frozen=True)
class PauliSum:
    """Hermitian operator sum_k a_k P_k with real coefficients.

    Canonical form: coefficients real (string phases folded in), no duplicate
    strings, terms below :data:`PRUNE_TOL` dropped, terms sorted by mask pair.
    """

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    @classmethod
    def from_terms(cls, n: int, terms) -> "PauliSum":
        acc: dict[tuple[int, int], float] = {}
        for coeff, p in terms:
            if p.n != n:
                raise ValueError("all terms must share the qubit count")
            c = complex(coeff) * p.phase
            if abs(c.imag) > 1e-12 * max(1.0, abs(c.real)):
                raise ValueError(f"non-Hermitian term {coeff} * {p.label()}")
            acc[(p.x, p.z)] = acc.get((p.x, p.z), 0.0) + c.real
        kept = sorted(
            ((c, PauliString(n, x, z)) for (x, z), c in acc.items() if abs(c) > PRUNE_TOL),
            key=lambda t: (t[1].x, t[1].z),
        )
        return cls(n, tuple(kept))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coeff_l1(self) -> float:
        return float(sum(abs(c) for c, _ in self.terms))

    def max_weight(self) -> int:
        return max((p.weight() for _, p in self.terms), default=0)

    def scaled(self, factor: float) -> "PauliSum":
        return PauliSum.from_terms(self.n, ((factor * c, p) for c, p in self.terms))

    def plus_identity(self, shift: float) -> "PauliSum":
        terms = list(self.terms) + [(shift, PauliString.identity(self.n))]
        return PauliSum.from_terms(self.n, terms)

    def to_text(self) -> str:
        """Round-trippable `coefficient pauli-word` lines (shortest repr floats)."""
        return "".join(f"{c!r} {p.label()}\n" for c, p in self.terms)

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "PauliSum":
        terms = []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {ln}: expected `coefficient pauli-word`")
            coeff = float(parts[0])
            word = parts[1]
            if n is None:
                n = len(word)
            elif len(word) != n:
                raise ValueError(f"line {ln}: word length {len(word)} != {n}")
            terms.append((coeff, PauliString.from_label(word)))
        if n is None:
            raise ValueError("empty Hamiltonian file")
        return cls.from_terms(n, terms)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "PauliSum":
        with open(path) as fh:
            return cls.from_text(fh.read())


# ---------------------------------------------------------------------------
# Hamiltonian builders
# ---------------------------------------------------------------------------

def build_xxz(n: int, j: float, delta: float) -> PauliSum:
    """Open-chain XXZ Hamiltonian: sum_i J(X_i X_{i+1} + Y_i Y_{i+1}) + D Z_i Z_{i+1}."""
    if n < 2:
        raise ValueError("XXZ chain needs n >= 2")
    terms = []
    for i in range(n - 1):
        for coeff, letter in ((j, "X"), (j, "Y"), (delta, "Z")):
            p = PauliString.single(n, i, letter) * PauliString.single(n, i + 1, letter)
            terms.append((coeff, p))
    return PauliSum.from_terms(n, terms)


def qbm_qubit_count(num_params: int) -> int:
    """Invert num_params = 3 C(n,2) + 3n = 3n(n+1)/2."""
    disc = 9 + 24 * num_params
    root = math.isqrt(disc)
    if root * root != disc or (root - 3) % 6 != 0 or root <= 3:
        raise ValueError(f"{num_params} is not 3*C(n,2) + 3n for any integer n")
    return (root - 3) // 6


def qbm_parameter_count(n: int) -> int:
    return 3 * (n * (n - 1) // 2) + 3 * n


def qbm_terms(n: int) -> list[PauliString]:
    """Pauli strings H(theta) pairs with, in the fixed parameter order.

    Blocks: XX pairs (i<j lexicographic), YY pairs, ZZ pairs, then X fields,
    Y fields, Z fields.  Gradients and parameter vectors share this order.
    """
    ops = []
    for letter in "XYZ":
        for i in range(n):
            for jj in range(i + 1, n):
                ops.append(PauliString.single(n, i, letter) * PauliString.single(n, jj, letter))
    for letter in "XYZ":
        for i in range(n):
            ops.append(PauliString.single(n, i, letter))
    return ops


def build_qbm(theta) -> PauliSum:
    """Fully connected two-body-plus-fields model Hamiltonian H(theta)."""
    theta = np.asarray(theta, dtype=float)
    n = qbm_qubit_count(theta.size)
    ops = qbm_terms(n)
    return PauliSum.from_terms(n, zip(theta.tolist(), ops))


def build_random_xyz(n: int, seed: int) -> PauliSum:
    """All-to-all XX/YY/ZZ couplings plus X/Y/Z fields, coefficients iid U[-1, 1]."""
    if n < 2:
        raise ValueError("all-to-all model needs n >= 2")
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=qbm_parameter_count(n))
    return PauliSum.from_terms(n, zip(coeffs.tolist(), qbm_terms(n)))


# ---------------------------------------------------------------------------
# Spectral window and imaginary-time rescaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralWindow:
    lambda_min: float
    lambda_max: float
    exact: bool = False

    def span(self) -> float:
        return self.lambda_max - self.lambda_min


def spectral_window(h: PauliSum, mode: str = "bound") -> SpectralWindow:
    """Enclosing window for spec(H): exact eigenvalue extremes or +-sum|a_k|.

    The coefficient bound is the hardware-realistic default; exact mode exists
    for oracle tests and small systems.
    """
    if len(h) == 0:
        raise ValueError("empty operator has no spectral window")
    if mode == "bound":
        a = h.coeff_l1()
        return SpectralWindow(-a, a, exact=False)
    if mode == "exact":
        from . import states  # deferred: states depends on this module

        eig = states.eig_hermitian(states.dense_pauli_sum(h))
        return SpectralWindow(float(eig.eigenvalues[0]), float(eig.eigenvalues[-1]), exact=True)
    raise ValueError(f"unknown window mode {mode!r}")


def rescale(h: PauliSum, window: SpectralWindow, beta: float) -> tuple[PauliSum, float]:
    """Min-max rescaling (H - lmin)/(lmax - lmin) and the matching imaginary time.

    With tau = beta * (lmax - lmin) / 2 the rescaled evolution reproduces the
    physical half-evolution up to a scalar: exp(-tau Ht) = exp(beta lmin / 2) exp(-beta H / 2).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    span = window.span()
    if span <= 0:
        raise ValueError("degenerate spectral window")
    h_tilde = h.scaled(1.0 / span).plus_identity(-window.lambda_min / span)
    tau = beta * span / 2.0
    return h_tilde, tau


# ---------------------------------------------------------------------------
# Observable sets
# ---------------------------------------------------------------------------

def one_two_qubit_paulis(n: int) -> list[PauliString]:
    """All weight-1 and weight-2 Pauli strings: 3n + 9 C(n,2) operators."""
    ops = [PauliString.single(n, i, a) for i in range(n) for a in "XYZ"]
    for i in range(n):
        for jj in range(i + 1, n):
            for a in "XYZ":
                for b in "XYZ":
                    ops.append(PauliString.single(n, i, a) * PauliString.single(n, jj, b))
    return ops


def fields_and_matched_pairs(n: int) -> list[PauliString]:
    """Weight-1 Paulis plus matched XX/YY/ZZ pairs: 3n + 3 C(n,2) operators."""
    ops = [PauliString.single(n, i, a) for i in range(n) for a in "XYZ"]
    for i in range(n):
        for jj in range(i + 1, n):
            for a in "XYZ":
                ops.append(PauliString.single(n, i, a) * PauliString.single(n, jj, a))
    return ops
