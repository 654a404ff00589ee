"""Clifford tableaus: uniform sampling, Pauli conjugation, circuit synthesis.

A tableau stores the conjugation action of a Clifford unitary on the 2n
generator Paulis, U X_i U^dag and U Z_i U^dag, each as an (x mask, z mask,
sign bit) triple.  Global phases are ignored throughout; every downstream
quantity (probabilities, expectations) is phase-invariant.

Sampling follows the transvection construction of Koenig and Smolin, which
maps uniform random choices bijectively onto Sp(2n, F2); together with
uniform sign bits this is uniform over the Clifford group mod phase.
Correctness is certified against full enumeration at n <= 2 (24 and 11520
elements) rather than by re-deriving the mapping.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import states
from .paulis import PauliString
from .states import StateVector

Gate = tuple[str, tuple[int, ...]]

_GATE_MATRICES = {"H": states.HGATE, "S": states.SGATE, "CX": states.CXGATE}

ENUM_CACHE_VERSION = 1


@dataclass
class CliffordTableau:
    """Images of X_i and Z_i under conjugation, as parallel bitmask lists."""

    n: int
    xx: list[int]  # x masks of the X_i images
    xz: list[int]  # z masks of the X_i images
    xs: list[int]  # sign bits of the X_i images
    zx: list[int]
    zz: list[int]
    zs: list[int]

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(
            n,
            [1 << i for i in range(n)],
            [0] * n,
            [0] * n,
            [0] * n,
            [1 << i for i in range(n)],
            [0] * n,
        )

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(
            self.n,
            list(self.xx),
            list(self.xz),
            list(self.xs),
            list(self.zx),
            list(self.zz),
            list(self.zs),
        )

    def key(self) -> tuple:
        return (
            tuple(self.xx),
            tuple(self.xz),
            tuple(self.xs),
            tuple(self.zx),
            tuple(self.zz),
            tuple(self.zs),
        )

    def is_identity(self) -> bool:
        return self.key() == CliffordTableau.identity(self.n).key()

    def x_image(self, i: int) -> PauliString:
        return PauliString(self.n, self.xx[i], self.xz[i], -1.0 if self.xs[i] else 1.0)

    def z_image(self, i: int) -> PauliString:
        return PauliString(self.n, self.zx[i], self.zz[i], -1.0 if self.zs[i] else 1.0)

    # -- gate action (left composition: tableau of g.U from tableau of U) --

    def apply_gate(self, name: str, qubits: tuple[int, ...]):
        """Conjugate every stored image by the named gate, in place."""
        if name == "H":
            (q,) = qubits
            self._h(1 << q)
        elif name == "S":
            (q,) = qubits
            self._s(1 << q)
        elif name == "CX":
            c, t = qubits
            self._cx(1 << c, 1 << t)
        else:
            raise ValueError(f"unknown gate {name!r}")

    def _h(self, b: int):
        for x, z, s in self._row_arrays():
            for i in range(self.n):
                xb, zb = x[i] & b, z[i] & b
                s[i] ^= 1 if (xb and zb) else 0
                x[i] ^= xb ^ zb
                z[i] ^= xb ^ zb

    def _s(self, b: int):
        for x, z, s in self._row_arrays():
            for i in range(self.n):
                xb = x[i] & b
                s[i] ^= 1 if (xb and (z[i] & b)) else 0
                if xb:
                    z[i] ^= b

    def _cx(self, cb: int, tb: int):
        for x, z, s in self._row_arrays():
            for i in range(self.n):
                xc, zt = x[i] & cb, z[i] & tb
                if xc and zt:
                    xt, zc = x[i] & tb, z[i] & cb
                    if bool(xt) == bool(zc):
                        s[i] ^= 1
                if xc:
                    x[i] ^= tb
                if zt:
                    z[i] ^= cb

    def _row_arrays(self):
        return ((self.xx, self.xz, self.xs), (self.zx, self.zz, self.zs))

    # -- algebra --

    def conjugate(self, p: PauliString) -> PauliString:
        """U p U^dag by multiplying generator images; O(n) row products."""
        if p.n != self.n:
            raise ValueError("qubit-count mismatch")
        acc = PauliString(self.n, 0, 0, p.phase)
        for i in range(self.n):
            xb = (p.x >> i) & 1
            zb = (p.z >> i) & 1
            if xb:
                acc = acc * self.x_image(i)
            if zb:
                acc = acc * self.z_image(i)
            if xb and zb:
                acc = PauliString(acc.n, acc.x, acc.z, acc.phase * 1j)  # Y = iXZ
        return acc

    def compose(self, other: "CliffordTableau") -> "CliffordTableau":
        """Tableau of (self . other): conjugation first by other, then self."""
        if self.n != other.n:
            raise ValueError("qubit-count mismatch")
        out = CliffordTableau(self.n, [0] * self.n, [0] * self.n, [0] * self.n,
                              [0] * self.n, [0] * self.n, [0] * self.n)
        for i in range(self.n):
            for img, (mx, mz, ms) in (
                (self.conjugate(other.x_image(i)), (out.xx, out.xz, out.xs)),
                (self.conjugate(other.z_image(i)), (out.zx, out.zz, out.zs)),
            ):
                if img.phase not in (1 + 0j, -1 + 0j):
                    raise AssertionError("composition produced a non-Hermitian image")
                mx[i], mz[i], ms[i] = img.x, img.z, int(img.phase.real < 0)
        return out

    def is_symplectic(self) -> bool:
        """Images preserve the generator commutation relations."""

        def sym(ax, az, bx, bz):
            return ((ax & bz).bit_count() + (az & bx).bit_count()) & 1

        for i in range(self.n):
            if sym(self.xx[i], self.xz[i], self.zx[i], self.zz[i]) != 1:
                return False
            if self.xx[i] == 0 and self.xz[i] == 0:
                return False
            for j in range(i + 1, self.n):
                if sym(self.xx[i], self.xz[i], self.xx[j], self.xz[j]) != 0:
                    return False
                if sym(self.zx[i], self.zz[i], self.zx[j], self.zz[j]) != 0:
                    return False
            for j in range(self.n):
                if i != j and sym(self.xx[i], self.xz[i], self.zx[j], self.zz[j]) != 0:
                    return False
        return True

    # -- serialization (enumeration cache format) --

    def to_text(self) -> str:
        parts = [f"{self.n}"]
        for arr in (self.xx, self.xz, self.xs, self.zx, self.zz, self.zs):
            parts.append(",".join(format(v, "x") for v in arr))
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "CliffordTableau":
        parts = line.split()
        if len(parts) != 7:
            raise ValueError("malformed tableau line")
        n = int(parts[0])
        arrays = [[int(v, 16) for v in part.split(",")] for part in parts[1:]]
        if any(len(a) != n for a in arrays):
            raise ValueError("malformed tableau line")
        return cls(n, *arrays)


# ---------------------------------------------------------------------------
# Uniform sampling (Koenig-Smolin transvections)
# ---------------------------------------------------------------------------
# Vectors of F2^(2n) are Python ints with interleaved coordinates: bit 2i is
# the x component on qubit i and bit 2i+1 the z component.

_EVEN = int("01" * 32, 2)  # mask of the x coordinates (low bit of each pair)


def _symplectic_inner(v: int, w: int) -> int:
    return (((v & (w >> 1)) ^ ((v >> 1) & w)) & _EVEN).bit_count() & 1


def _transvect(k: int, v: int) -> int:
    return v ^ (k if _symplectic_inner(k, v) else 0)


def _pair(v: int, i: int) -> int:
    return (v >> (2 * i)) & 3


def _find_transvection(x: int, y: int, nn: int) -> tuple[int, int]:
    """Vectors h1, h2 with Z_h1 Z_h2 x = y (the zero transvection is a no-op)."""
    if x == y:
        return 0, 0
    if _symplectic_inner(x, y) == 1:
        return x ^ y, 0
    n = nn >> 1
    # a coordinate pair where both vectors are nonzero
    for i in range(n):
        px, py = _pair(x, i), _pair(y, i)
        if px and py:
            pz = px ^ py
            if pz == 0:  # equal pairs: pick any partner anticommuting with them
                pz = 2 if px == 3 else 3
            z = pz << (2 * i)
            return x ^ z, y ^ z
    # otherwise: one pair where x is nonzero and y zero, and one the other way
    z = 0
    for i in range(n):
        px, py = _pair(x, i), _pair(y, i)
        if px and not py:
            z = (1 if px == 2 else 2) << (2 * i)
            break
    for i in range(n):
        px, py = _pair(x, i), _pair(y, i)
        if py and not px:
            z |= (1 if py == 2 else 2) << (2 * i)
            break
    return x ^ z, y ^ z


def _random_symplectic_rows(n: int, rng: np.random.Generator) -> list[int]:
    """Rows of a uniform Sp(2n, F2) element in interleaved coordinates."""
    nn = 2 * n
    k = int(rng.integers(1, 1 << nn))  # uniform over the 4^n - 1 nonzero images
    f1 = k
    e1 = 1
    t0, t1 = _find_transvection(e1, f1, nn)
    bits = rng.integers(0, 2, size=nn - 1)
    eprime = e1
    for j in range(2, nn):
        eprime |= int(bits[j - 1]) << j
    h0 = _transvect(t1, _transvect(t0, eprime))
    if bits[0]:
        f1 = 0
    if n == 1:
        rows = [1, 2]
    else:
        inner = _random_symplectic_rows(n - 1, rng)
        rows = [1, 2] + [r << 2 for r in inner]
    for j in range(nn):
        row = _transvect(t0, rows[j])
        row = _transvect(t1, row)
        row = _transvect(h0, row)
        rows[j] = _transvect(f1, row)
    return rows


def _split_interleaved(v: int, n: int) -> tuple[int, int]:
    x = z = 0
    for i in range(n):
        x |= ((v >> (2 * i)) & 1) << i
        z |= ((v >> (2 * i + 1)) & 1) << i
    return x, z


def sample_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniform over Cl(2^n) mod phase; deterministic given the generator state."""
    if n < 1:
        raise ValueError("need at least one qubit")
    rows = _random_symplectic_rows(n, rng)
    signs = rng.integers(0, 2, size=2 * n)
    t = CliffordTableau(n, [0] * n, [0] * n, [0] * n, [0] * n, [0] * n, [0] * n)
    for i in range(n):
        t.xx[i], t.xz[i] = _split_interleaved(rows[2 * i], n)
        t.zx[i], t.zz[i] = _split_interleaved(rows[2 * i + 1], n)
        t.xs[i] = int(signs[2 * i])
        t.zs[i] = int(signs[2 * i + 1])
    return t


def sample_pauli_basis(n: int, rng: np.random.Generator) -> list[str]:
    """Independent per-qubit measurement axes, each of X/Y/Z with probability 1/3."""
    return ["XYZ"[c] for c in rng.integers(0, 3, size=n)]


# ---------------------------------------------------------------------------
# Synthesis to {H, S, CX}
# ---------------------------------------------------------------------------

def synthesize(t: CliffordTableau) -> list[Gate]:
    """Gate list whose replay matches the tableau's conjugation action.

    Reduces a working copy to the identity tableau column by column with
    O(n^2) gates, then emits the inverse sequence.  Column j is handled by
    first forcing the X_j image to +X_j, then the Z_j image to +Z_j using
    only gates that fix X_j.
    """
    if not t.is_symplectic():
        raise ValueError("invalid tableau")
    work = t.copy()
    applied: list[Gate] = []

    def emit(name: str, *qubits: int):
        work.apply_gate(name, qubits)
        applied.append((name, qubits))

    def cz(c: int, tq: int):
        emit("H", tq)
        emit("CX", c, tq)
        emit("H", tq)

    n = t.n
    for j in range(n):
        jb = 1 << j
        # --- bring the X_j image to +X_j ---
        if all(not (work.xx[j] >> k) & 1 for k in range(j, n)):
            k = next(k for k in range(j, n) if (work.xz[j] >> k) & 1)
            emit("H", k)
        if not (work.xx[j] & jb):
            k = next(k for k in range(j + 1, n) if (work.xx[j] >> k) & 1)
            emit("CX", j, k)
            emit("CX", k, j)
            emit("CX", j, k)
        for k in range(j + 1, n):
            if (work.xx[j] >> k) & 1:
                emit("CX", j, k)
        if work.xz[j] & jb:
            emit("S", j)
        for k in range(j + 1, n):
            if (work.xz[j] >> k) & 1:
                cz(j, k)
        # --- bring the Z_j image to +Z_j, fixing X_j ---
        # anticommutation with X_j guarantees the z bit at column j
        for k in range(j + 1, n):
            if (work.zx[j] >> k) & 1:
                if (work.zz[j] >> k) & 1:
                    emit("S", k)
                emit("H", k)
        for k in range(j + 1, n):
            if (work.zz[j] >> k) & 1:
                emit("CX", k, j)
        if work.zx[j] & jb:
            emit("H", j)
            emit("S", j)
            emit("H", j)  # the X_j-axis rotation taking Y_j to Z_j
        # --- signs ---
        if work.xs[j]:
            emit("S", j)
            emit("S", j)
        if work.zs[j]:
            emit("H", j)
            emit("S", j)
            emit("S", j)
            emit("H", j)
    if not work.is_identity():
        raise AssertionError("synthesis failed to reduce the tableau")
    out: list[Gate] = []
    for name, qubits in reversed(applied):
        if name == "S":
            out.extend((("S", qubits),) * 3)  # S^-1 = S^3 within {H, S, CX}
        else:
            out.append((name, qubits))
    return out


_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _compile_gates(gates: list[Gate]) -> list[tuple]:
    """Collapse S runs (S^2 = Z, S^3 = S^dag) into single diagonal ops."""
    ops: list[tuple] = []
    i = 0
    while i < len(gates):
        name, qubits = gates[i]
        if name == "S":
            run = 1
            while i + run < len(gates) and gates[i + run] == ("S", qubits):
                run += 1
            i += run
            if run % 4:
                ops.append((("S", "Z", "SDG")[run % 4 - 1], qubits[0]))
        elif name == "H":
            ops.append(("H", qubits[0]))
            i += 1
        else:
            ops.append(("CX", qubits[0], qubits[1]))
            i += 1
    return ops


def _run_compiled(ops: list[tuple], amps: np.ndarray, n: int):
    """Execute compiled ops in place; amps is (2^n,) or (2^n, cols)."""
    tail = 1 if amps.ndim == 1 else amps.shape[1]
    for op in ops:
        kind = op[0]
        if kind == "CX":
            c, t = op[1], op[2]
            hi, lo = (c, t) if c > t else (t, c)
            v = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, (1 << lo) * tail)
            sub = v[:, 1, :, :, :] if c == hi else v[:, :, :, 1, :]
            axis = 2 if c == hi else 1
            a0 = np.take(sub, 0, axis=axis).copy()
            a1 = np.take(sub, 1, axis=axis)
            if c == hi:
                sub[:, :, 0, :] = a1
                sub[:, :, 1, :] = a0
            else:
                sub[:, 0, :, :] = a1
                sub[:, 1, :, :] = a0
        else:
            q = op[1]
            v = amps.reshape(-1, 2, (1 << q) * tail)
            if kind == "H":
                a0 = v[:, 0, :].copy()
                v[:, 0, :] = (a0 + v[:, 1, :]) * _INV_SQRT2
                v[:, 1, :] = (a0 - v[:, 1, :]) * _INV_SQRT2
            elif kind == "S":
                v[:, 1, :] *= 1j
            elif kind == "Z":
                v[:, 1, :] *= -1.0
            else:  # SDG
                v[:, 1, :] *= -1j


def replay(gates: list[Gate], state: StateVector) -> StateVector:
    amps = state.amps.copy()
    _run_compiled(_compile_gates(gates), amps, state.n)
    return StateVector(state.n, amps)


def replay_inplace(gates: list[Gate], amps: np.ndarray, n: int):
    _run_compiled(_compile_gates(gates), amps, n)


def tableau_from_gates(n: int, gates: list[Gate]) -> CliffordTableau:
    t = CliffordTableau.identity(n)
    for name, qubits in gates:
        t.apply_gate(name, qubits)
    return t


def dense_unitary(t: CliffordTableau) -> np.ndarray:
    """Dense matrix of some unitary realizing the tableau (global phase free)."""
    mat = np.eye(1 << t.n, dtype=complex)
    _run_compiled(_compile_gates(synthesize(t)), mat, t.n)
    return mat


# ---------------------------------------------------------------------------
# Full-group enumeration (desk scale, n <= 2)
# ---------------------------------------------------------------------------

def _generators(n: int) -> list[Gate]:
    gens: list[Gate] = []
    for q in range(n):
        gens.append(("H", (q,)))
        gens.append(("S", (q,)))
    for c in range(n):
        for tq in range(n):
            if c != tq:
                gens.append(("CX", (c, tq)))
    return gens


_ENUM_MEMO: dict[int, list[CliffordTableau]] = {}


def enumerate_group(n: int, cache_path: str | Path | None = None) -> list[CliffordTableau]:
    """All of Cl(2^n) mod phase by breadth-first closure over {H, S, CX}.

    Only sensible at n <= 2 (24 and 11520 elements).  ``cache_path`` reads or
    writes the documented text cache: a `cliffords-enum v<k> n=<n> count=<m>`
    header followed by one tableau per line.
    """
    if n > 2:
        raise ValueError("full enumeration is desk-scale only (n <= 2)")
    if n in _ENUM_MEMO:
        return _ENUM_MEMO[n]
    if cache_path is not None and Path(cache_path).exists():
        group = _read_enum_cache(Path(cache_path), n)
        _ENUM_MEMO[n] = group
        return group
    gens = _generators(n)
    start = CliffordTableau.identity(n)
    seen = {start.key(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for tab in frontier:
            for name, qubits in gens:
                cand = tab.copy()
                cand.apply_gate(name, qubits)
                k = cand.key()
                if k not in seen:
                    seen[k] = cand
                    nxt.append(cand)
        frontier = nxt
    group = sorted(seen.values(), key=lambda tb: tb.key())
    if cache_path is not None:
        _write_enum_cache(Path(cache_path), n, group)
    _ENUM_MEMO[n] = group
    return group


def _write_enum_cache(path: Path, n: int, group: list[CliffordTableau]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"cliffords-enum v{ENUM_CACHE_VERSION} n={n} count={len(group)}\n")
        for tab in group:
            fh.write(tab.to_text() + "\n")


def _read_enum_cache(path: Path, n: int) -> list[CliffordTableau]:
    with open(path) as fh:
        header = fh.readline().split()
        if (
            len(header) != 4
            or header[0] != "cliffords-enum"
            or header[1] != f"v{ENUM_CACHE_VERSION}"
            or header[2] != f"n={n}"
        ):
            raise ValueError(f"unrecognized enumeration cache header in {path}")
        count = int(header[3].split("=")[1])
        group = [CliffordTableau.from_text(line) for line in fh]
    if len(group) != count:
        raise ValueError(f"cache {path} is truncated")
    return group
