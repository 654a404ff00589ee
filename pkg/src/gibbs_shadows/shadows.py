"""Classical shadows: snapshot collection, estimators, median-of-means.

Snapshot records store only the measurement-unitary descriptor and the
outcome bits, never the 2^n x 2^n snapshot matrix; estimates are computed by
Pauli conjugation so a record costs O(n^2) memory at most.

Randomness discipline: every shadow's randomness is a fixed function of
(experiment seed, shadow index) -- scalar collectors take an explicit
per-record stream from :func:`substream`, and the batch collectors draw row i
of a counter-based block for shadow i -- so results do not depend on
collection order or thread count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import states
from .clifford import CliffordTableau, replay, sample_clifford, synthesize
from .paulis import PauliString, PauliSum
from .states import BASIS_ROTATION, StateVector

_BASIS_CODE = {"X": 0, "Y": 1, "Z": 2}
_CODE_BASIS = "XYZ"


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a (seed, index...) address."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


@dataclass(frozen=True)
class ShadowRecord:
    """One randomized-measurement snapshot.

    kind "clifford": ``tableau`` holds V (and ``v_id`` a reconstructible
    seed-derived identifier); kind "pauli": ``bases`` holds the per-qubit
    measurement axes.  ``outcome`` packs the measured bits little-endian.
    """

    kind: str
    n: int
    outcome: int
    tableau: CliffordTableau | None = None
    v_id: tuple | None = None
    bases: tuple[str, ...] | None = None


# ---------------------------------------------------------------------------
# Collection
# ---------------------------------------------------------------------------

def _sample_outcome(amps: np.ndarray, rng: np.random.Generator) -> int:
    probs = np.abs(amps) ** 2
    probs /= probs.sum()
    return int(rng.choice(probs.size, p=probs))


def collect_clifford(
    state: StateVector, v: CliffordTableau, rng: np.random.Generator, v_id=None
) -> ShadowRecord:
    """Measure V|psi> in the computational basis and record (V, b)."""
    if v.n != state.n:
        raise ValueError("qubit-count mismatch")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("state must be normalized")
    rotated = replay(synthesize(v), state)
    b = _sample_outcome(rotated.amps, rng)
    return ShadowRecord("clifford", state.n, b, tableau=v, v_id=v_id)


def rotate_to_bases(state: StateVector, bases) -> StateVector:
    amps = state.amps.copy()
    for q, axis in enumerate(bases):
        if axis != "Z":
            states.apply_gate_inplace(amps, BASIS_ROTATION[axis], (q,), state.n)
    return StateVector(state.n, amps)


def collect_pauli(state: StateVector, bases, rng: np.random.Generator) -> ShadowRecord:
    """Measure each qubit along its assigned axis; bases from sample_pauli_basis."""
    bases = tuple(bases)
    if len(bases) != state.n:
        raise ValueError("need one basis per qubit")
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("state must be normalized")
    rotated = rotate_to_bases(state, bases)
    b = _sample_outcome(rotated.amps, rng)
    return ShadowRecord("pauli", state.n, b, bases=bases)


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------

def estimate_clifford(rec: ShadowRecord, obs: PauliSum | PauliString) -> float:
    """Tr[snapshot * O] for a global-rotation record.

    Per Pauli term: a conjugated string with any X component contributes 0;
    a Z-type string contributes (2^n + 1) times its sign on the outcome; the
    identity contributes exactly its coefficient.
    """
    if rec.kind != "clifford":
        raise ValueError("record is not a global-rotation shadow")
    terms = [(1.0, obs)] if isinstance(obs, PauliString) else list(obs.terms)
    total = 0.0
    scale = float((1 << rec.n) + 1)
    for coeff, p in terms:
        if p.is_identity():
            total += coeff * p.phase.real
            continue
        q = rec.tableau.conjugate(p)
        if q.x != 0:
            continue
        sign = q.phase.real * (1.0 - 2.0 * ((q.z & rec.outcome).bit_count() & 1))
        total += coeff * scale * sign
    return total


def estimate_pauli(rec: ShadowRecord, obs: PauliString) -> float:
    """Product estimator for per-qubit-rotation records: matching axes give
    3 * (+-1), any mismatch zeroes the whole estimate."""
    if rec.kind != "pauli":
        raise ValueError("record is not a per-qubit shadow")
    if obs.n != rec.n:
        raise ValueError("qubit-count mismatch")
    value = obs.phase.real
    label = obs.label()
    for q in obs.support():
        if rec.bases[q] != label[q]:
            return 0.0
        value *= 3.0 * (1.0 - 2.0 * ((rec.outcome >> q) & 1))
    return value


def estimate_pauli_batch(
    bases: np.ndarray, outcomes: np.ndarray, obs: PauliString
) -> np.ndarray:
    """Vectorized :func:`estimate_pauli` over (count, n) basis codes and outcomes."""
    count = bases.shape[0]
    support = obs.support()
    if not support:
        return np.full(count, obs.phase.real)
    label = obs.label()
    est = np.full(count, obs.phase.real * 3.0 ** len(support))
    for q in support:
        est *= bases[:, q] == _BASIS_CODE[label[q]]
        est *= 1.0 - 2.0 * ((outcomes >> q) & 1)
    return est


def bases_to_codes(bases) -> np.ndarray:
    return np.array([_BASIS_CODE[b] for b in bases], dtype=np.uint8)


# ---------------------------------------------------------------------------
# Median of means
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimatorPlan:
    """Group size N and group count K sufficient for (epsilon, delta, M)."""

    n_per_group: int
    k_groups: int
    epsilon: float
    delta: float
    m_observables: int
    sigma_sq_max: float

    @property
    def total(self) -> int:
        return self.n_per_group * self.k_groups


def plan_shadows(epsilon: float, delta: float, m_observables: int, sigma_sq_max: float) -> EstimatorPlan:
    """N = ceil(6 sigma^2 / eps^2), K = ceil(4.5 ln(M / delta)), floored at 1."""
    if not (0 < epsilon <= 1 and 0 < delta <= 1):
        raise ValueError("epsilon and delta must lie in (0, 1]")
    if m_observables < 1:
        raise ValueError("need at least one observable")
    n_per_group = max(1, math.ceil(6.0 * sigma_sq_max / epsilon**2))
    k_groups = max(1, math.ceil(4.5 * math.log(m_observables / delta)))
    return EstimatorPlan(n_per_group, k_groups, epsilon, delta, m_observables, sigma_sq_max)


def median_of_means(values, n_per_group: int, k_groups: int) -> float:
    """Median of K contiguous group means of N values each (first N*K used).

    An even K takes the average of the two central means.
    """
    values = np.asarray(values, dtype=float)
    need = n_per_group * k_groups
    if values.size < need:
        raise ValueError(f"need {need} values, got {values.size}")
    groups = values[:need].reshape(k_groups, n_per_group)
    return float(np.median(groups.mean(axis=1)))


def mse_bound(obs, gibbs_snapshot, kind: str) -> float:
    """Predicted single-shot mean squared error of a shadow estimate.

    kind "clifford": Tr O0^2 + 2 Tr rho O0^2 - (Tr rho O0)^2 with O0 the
    traceless part.  kind "pauli" expects a k-local Pauli string and gives
    3^k - (Tr rho O)^2; for a general operator the looser 4^k |O0|^2 bound is
    returned (a bound, not an estimate -- flagged with a warning).
    """
    rho = gibbs_snapshot.rho
    dim = rho.shape[0]
    if kind == "clifford":
        dense = states.dense_pauli(obs) if isinstance(obs, PauliString) else states.dense_pauli_sum(obs)
        o0 = dense - np.eye(dim) * (np.trace(dense) / dim)
        o0_sq = o0 @ o0
        tr_o0_sq = float(np.trace(o0_sq).real)
        tr_rho_o0_sq = float(np.trace(rho @ o0_sq).real)
        tr_rho_o0 = float(np.trace(rho @ o0).real)
        return tr_o0_sq + 2.0 * tr_rho_o0_sq - tr_rho_o0**2
    if kind == "pauli":
        if isinstance(obs, PauliString):
            mean = gibbs_snapshot.expectation(obs)
            return 3.0 ** obs.weight() - mean**2
        import warnings

        k = obs.max_weight()
        dense = states.dense_pauli_sum(obs)
        o0 = dense - np.eye(dim) * (np.trace(dense) / dim)
        norm = float(np.linalg.norm(np.linalg.eigvalsh(o0), ord=np.inf))
        warnings.warn(
            "per-qubit-shadow MSE for a non-Pauli observable is a 4^k bound, not an estimate",
            stacklevel=2,
        )
        return 4.0**k * norm**2
    raise ValueError(f"unknown shadow kind {kind!r}")


# ---------------------------------------------------------------------------
# Batched per-qubit-shadow collection
# ---------------------------------------------------------------------------

# rotation table indexed by basis code 0/1/2 = X/Y/Z
_ROTATIONS = np.stack([BASIS_ROTATION["X"], BASIS_ROTATION["Y"], np.eye(2, dtype=complex)])

try:  # jit kernel for the bulk collector; the numpy path is the reference
    import numba

    @numba.njit(parallel=True, cache=True)
    def _rotate_measure(batch, codes, rot, uniforms, outcomes, n):
        count, dim = batch.shape
        for i in numba.prange(count):
            row = batch[i]
            for q in range(n):
                c = codes[i, q]
                if c == 2:  # measuring along Z needs no rotation
                    continue
                g00, g01 = rot[c, 0, 0], rot[c, 0, 1]
                g10, g11 = rot[c, 1, 0], rot[c, 1, 1]
                step = 1 << q
                for base in range(0, dim, 2 * step):
                    for off in range(base, base + step):
                        a0 = row[off]
                        a1 = row[off + step]
                        row[off] = g00 * a0 + g01 * a1
                        row[off + step] = g10 * a0 + g11 * a1
            total = 0.0
            for k in range(dim):
                v = row[k]
                total += v.real * v.real + v.imag * v.imag
            r = uniforms[i] * total
            acc = 0.0
            out = dim - 1
            for k in range(dim):
                v = row[k]
                acc += v.real * v.real + v.imag * v.imag
                if acc >= r:
                    out = k
                    break
            outcomes[i] = out

except ImportError:  # pragma: no cover
    numba = None


def collect_pauli_batch(
    state_rows: np.ndarray,
    bases: np.ndarray,
    uniforms: np.ndarray,
    n: int,
) -> np.ndarray:
    """Measurement outcomes for one batch: row i of ``state_rows`` is measured
    along the axes in ``bases[i]`` using the inverse-CDF draw ``uniforms[i]``.

    Rotations run in single precision; the per-amplitude error ~1e-7 is
    irrelevant next to shot noise.
    """
    batch = np.array(state_rows, dtype=np.complex64)
    count = batch.shape[0]
    rot = _ROTATIONS.astype(np.complex64)
    if numba is not None:
        outcomes = np.empty(count, dtype=np.int64)
        _rotate_measure(batch, bases, rot, uniforms.astype(np.float64), outcomes, n)
        return outcomes
    for q in range(n):
        g = rot[bases[:, q]]  # (count, 2, 2), row-dependent rotation
        view = batch.reshape(count, 1 << (n - 1 - q), 2, 1 << q)
        a0 = view[:, :, 0, :]
        a1 = view[:, :, 1, :]
        new0 = g[:, 0, 0][:, None, None] * a0 + g[:, 0, 1][:, None, None] * a1
        a1[...] = g[:, 1, 0][:, None, None] * a0 + g[:, 1, 1][:, None, None] * a1
        a0[...] = new0
    probs = np.abs(batch) ** 2
    cum = np.cumsum(probs, axis=1)
    draws = (uniforms * cum[:, -1]).astype(np.float32)
    outcomes = (cum < draws[:, None]).sum(axis=1)
    return np.minimum(outcomes, probs.shape[1] - 1).astype(np.int64)


def pauli_shadow_pool(
    states_matrix: np.ndarray,
    assignment: np.ndarray,
    count: int,
    seed: int,
    n: int,
    chunk: int = 4096,
) -> tuple[np.ndarray, np.ndarray]:
    """Collect ``count`` per-qubit shadows of the states in ``states_matrix``.

    ``assignment[i]`` picks the state row measured by shadow i.  Shadow i's
    randomness is row i of a counter-based block keyed by ``seed``, so the
    pool is reproducible and independent of chunking.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    randoms = rng.random(size=(count, n + 1))
    bases = np.minimum((randoms[:, :n] * 3).astype(np.uint8), 2)
    outcomes = np.empty(count, dtype=np.int64)
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        rows = states_matrix[assignment[lo:hi]]
        outcomes[lo:hi] = collect_pauli_batch(rows, bases[lo:hi], randoms[lo:hi, n], n)
    return bases, outcomes


# ---------------------------------------------------------------------------
# Shadow log files
# ---------------------------------------------------------------------------

def _bits_str(outcome: int, n: int) -> str:
    return "".join(str((outcome >> q) & 1) for q in range(n))


def append_shadow_log(path, records) -> None:
    """Append-only text log: `kind n descriptor outcome-bits` per line."""
    with open(path, "a") as fh:
        for rec in records:
            if rec.kind == "pauli":
                desc = "".join(rec.bases)
            elif rec.v_id is not None:
                desc = "seed:" + ",".join(str(v) for v in rec.v_id)
            else:
                desc = "tab:" + rec.tableau.to_text().replace(" ", "/")
            fh.write(f"{rec.kind} {rec.n} {desc} {_bits_str(rec.outcome, rec.n)}\n")


def read_shadow_log(path) -> list[ShadowRecord]:
    records = []
    for raw in Path(path).read_text().splitlines():
        if not raw.strip():
            continue
        kind, n_str, desc, bits = raw.split()
        n = int(n_str)
        outcome = sum((1 << q) for q, ch in enumerate(bits) if ch == "1")
        if kind == "pauli":
            records.append(ShadowRecord("pauli", n, outcome, bases=tuple(desc)))
        elif desc.startswith("seed:"):
            key = tuple(int(v) for v in desc[5:].split(","))
            tab = sample_clifford(n, substream(*key))
            records.append(ShadowRecord("clifford", n, outcome, tableau=tab, v_id=key))
        elif desc.startswith("tab:"):
            tab = CliffordTableau.from_text(desc[4:].replace("/", " "))
            records.append(ShadowRecord("clifford", n, outcome, tableau=tab))
        else:
            raise ValueError(f"unrecognized shadow log line: {raw!r}")
    return records
