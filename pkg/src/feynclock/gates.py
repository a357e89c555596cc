"""Circuit-to-Hamiltonian evolution with explicit gate matrices.

The clock register has k+1 sites; in the single-excitation sector the
Hamiltonian is block tridiagonal with U_{i+1} below and U_{i+1}^dagger above
the diagonal. Its propagator factorises into clock amplitudes times ordered
gate strings, which :func:`verify_structure` checks block by block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from feynclock import clock
from feynclock.constants import (
    DENSE_SIZE_CAP,
    FULL_CLOCK_MAX_K,
    FULL_CLOCK_MAX_QUBITS,
    NORM_TOL,
    STRUCTURE_TOL,
    UNITARY_TOL,
)
from feynclock.numerics import as_matrix, matrix_exponential, unitarity_residual


class CapacityError(ValueError):
    """Requested dense construction exceeds the configured size cap."""


class GateSchemaError(ValueError):
    """A gate-sequence JSON document does not match the expected schema."""


@dataclass(frozen=True)
class UnitarySequence:
    n: int
    gates: tuple

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"qubit count must be a non-negative integer, got {self.n!r}")
        if len(self.gates) == 0:
            raise ValueError("gate sequence must not be empty")
        dim = 2**self.n
        mats = []
        for idx, g in enumerate(self.gates, start=1):
            m = as_matrix(g)
            if m.shape != (dim, dim):
                raise ValueError(f"gate U_{idx} has shape {m.shape}, expected {(dim, dim)}")
            res = unitarity_residual(m)
            if res > UNITARY_TOL:
                raise ValueError(f"gate U_{idx} is not unitary (residual {res:.2e})")
            m = m.copy()
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "gates", tuple(mats))

    @property
    def k(self) -> int:
        return len(self.gates)

    @property
    def dim(self) -> int:
        return 2**self.n

    def product(self, upto: int | None = None) -> np.ndarray:
        """U_upto ... U_1 (whole circuit by default)."""
        out = np.eye(self.dim, dtype=complex)
        for g in self.gates[: self.k if upto is None else upto]:
            out = g @ out
        return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Approximately Haar unitary: QR of a complex Gaussian with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_sequence(k: int, n: int, rng: np.random.Generator) -> UnitarySequence:
    return UnitarySequence(n, tuple(random_unitary(2**n, rng) for _ in range(k)))


def identity_sequence(k: int, n: int) -> UnitarySequence:
    return UnitarySequence(n, tuple(np.eye(2**n) for _ in range(k)))


# -- JSON gate files ---------------------------------------------------------


def sequence_to_json(seq: UnitarySequence) -> dict:
    return {
        "n": seq.n,
        "gates": [
            [[float(z.real), float(z.imag)] for z in g.reshape(-1)] for g in seq.gates
        ],
    }


def sequence_from_json(doc) -> UnitarySequence:
    """Parse ``{"n": int, "gates": [[[re, im], ...], ...]}`` (row-major entries)."""
    if not isinstance(doc, dict):
        raise GateSchemaError("top level must be an object with fields 'n' and 'gates'")
    for key in ("n", "gates"):
        if key not in doc:
            raise GateSchemaError(f"missing field '{key}'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise GateSchemaError(f"field 'n' must be a non-negative integer, got {n!r}")
    gates = doc["gates"]
    if not isinstance(gates, list) or not gates:
        raise GateSchemaError("field 'gates' must be a non-empty list")
    dim = 2**n
    mats = []
    for gi, g in enumerate(gates):
        where = f"gates[{gi}]"
        if not isinstance(g, list) or len(g) != dim * dim:
            got = len(g) if isinstance(g, list) else type(g).__name__
            raise GateSchemaError(f"field '{where}' must list {dim * dim} entries, got {got}")
        vals = []
        for ei, entry in enumerate(g):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            ):
                raise GateSchemaError(f"field '{where}[{ei}]' must be a [re, im] number pair")
            vals.append(complex(entry[0], entry[1]))
        m = np.array(vals, dtype=complex).reshape(dim, dim)
        res = unitarity_residual(m)
        if res > UNITARY_TOL:
            raise GateSchemaError(f"field '{where}' is not unitary (residual {res:.2e})")
        mats.append(m)
    return UnitarySequence(n, tuple(mats))


def load_sequence(path) -> UnitarySequence:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GateSchemaError(f"{path}: invalid JSON ({exc})") from exc
    return sequence_from_json(doc)


def save_sequence(seq: UnitarySequence, path) -> None:
    Path(path).write_text(json.dumps(sequence_to_json(seq), indent=1) + "\n")


# -- Hamiltonians ------------------------------------------------------------


def _check_cap(seq: UnitarySequence, cap: int) -> int:
    size = (seq.k + 1) * seq.dim
    if size > cap:
        raise CapacityError(f"dense size {(seq.k + 1)}*{seq.dim}={size} exceeds cap {cap}")
    return size


def build_reduced_hamiltonian(seq: UnitarySequence, cap: int = DENSE_SIZE_CAP) -> np.ndarray:
    size = _check_cap(seq, cap)
    d = seq.dim
    h = np.zeros((size, size), dtype=complex)
    for i, u in enumerate(seq.gates):
        rows = slice((i + 1) * d, (i + 2) * d)
        cols = slice(i * d, (i + 1) * d)
        h[rows, cols] = u
        h[cols, rows] = u.conj().T
    return h


def occupation_index(occupied, k: int) -> int:
    """Basis index of an occupation pattern; site 0 is the most significant bit."""
    return sum(1 << (k - s) for s in occupied)


def build_full_clock_hamiltonian(seq: UnitarySequence) -> np.ndarray:
    """Hamiltonian on the full 2**(k+1) clock occupation space (x) register."""
    k = seq.k
    if k > FULL_CLOCK_MAX_K or seq.n > FULL_CLOCK_MAX_QUBITS:
        raise CapacityError(
            f"full clock space limited to k <= {FULL_CLOCK_MAX_K}, n <= {FULL_CLOCK_MAX_QUBITS}"
            f" (got k={k}, n={seq.n})"
        )
    d = seq.dim
    nstates = 2 ** (k + 1)
    h = np.zeros((nstates * d, nstates * d), dtype=complex)
    for state in range(nstates):
        for i in range(k):
            src_bit = 1 << (k - i)
            dst_bit = 1 << (k - i - 1)
            # q_{i+1}^dagger q_i: site i occupied, site i+1 empty
            if state & src_bit and not state & dst_bit:
                target = (state & ~src_bit) | dst_bit
                u = seq.gates[i]
                h[target * d : (target + 1) * d, state * d : (state + 1) * d] += u
                h[state * d : (state + 1) * d, target * d : (target + 1) * d] += u.conj().T
    return h


def number_operator(k: int, dim: int) -> np.ndarray:
    counts = np.array([bin(s).count("1") for s in range(2 ** (k + 1))], dtype=float)
    return np.diag(np.repeat(counts, dim)).astype(complex)


def single_excitation_block(h_full: np.ndarray, k: int, dim: int) -> np.ndarray:
    """Restrict a full clock Hamiltonian to states |0>_c, ..., |k>_c (in that order)."""
    idx = np.concatenate(
        [np.arange(dim) + occupation_index([site], k) * dim for site in range(k + 1)]
    )
    return h_full[np.ix_(idx, idx)]


# -- evolution ---------------------------------------------------------------


def gate_string(seq: UnitarySequence, i: int, j: int) -> np.ndarray:
    """Predicted gate factor of block (i, j) of the propagator.

    Below the diagonal U_i ... U_{j+1} (the gates carrying the clock from j to
    i, latest on the left); above it the adjoint of the transposed string;
    identity on the diagonal.
    """
    out = np.eye(seq.dim, dtype=complex)
    if i > j:
        for g in seq.gates[j:i]:
            out = g @ out
    elif i < j:
        for g in seq.gates[i:j]:
            out = g @ out
        out = out.conj().T
    return out


@dataclass(frozen=True)
class BlockEvolution:
    k: int
    n: int
    t: float
    matrix: np.ndarray = field(repr=False)
    clock_coeffs: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2**self.n

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.dim
        return self.matrix[i * d : (i + 1) * d, j * d : (j + 1) * d]


def evolve(seq: UnitarySequence, t: float, cap: int = DENSE_SIZE_CAP) -> BlockEvolution:
    g = matrix_exponential(build_reduced_hamiltonian(seq, cap), t)
    d = seq.dim
    coeffs = np.empty((seq.k + 1, seq.k + 1), dtype=complex)
    for i in range(seq.k + 1):
        for j in range(seq.k + 1):
            s = gate_string(seq, i, j)
            coeffs[i, j] = np.trace(s.conj().T @ g[i * d : (i + 1) * d, j * d : (j + 1) * d]) / d
    return BlockEvolution(seq.k, seq.n, float(t), g, coeffs)


@dataclass(frozen=True)
class StructureReport:
    max_residual: float
    worst_block: tuple
    unitarity_residual: float
    tol: float
    gate_independence: float | None = None

    @property
    def passed(self) -> bool:
        ok = self.max_residual <= self.tol and self.unitarity_residual <= self.tol
        if self.gate_independence is not None:
            ok = ok and self.gate_independence <= self.tol
        return ok

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "worst_block": list(self.worst_block),
            "unitarity_residual": self.unitarity_residual,
            "gate_independence": self.gate_independence,
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_structure(
    ev: BlockEvolution,
    seq: UnitarySequence,
    tol: float = STRUCTURE_TOL,
    other: UnitarySequence | None = None,
) -> StructureReport:
    """Compare each block of ``ev`` with a_ij(t) times its predicted gate string.

    When ``other`` (a second sequence of the same shape) is given, its
    evolution at the same time is computed and the largest difference between
    the two sets of |a_ij| is reported as ``gate_independence``.
    """
    if ev.k != seq.k or ev.n != seq.n:
        raise ValueError(
            f"evolution (k={ev.k}, n={ev.n}) does not match sequence (k={seq.k}, n={seq.n})"
        )
    worst, where = 0.0, (0, 0)
    for i in range(seq.k + 1):
        for j in range(seq.k + 1):
            pred = ev.clock_coeffs[i, j] * gate_string(seq, i, j)
            r = float(np.max(np.abs(ev.block(i, j) - pred)))
            if r > worst:
                worst, where = r, (i, j)
    indep = None
    if other is not None:
        if other.k != seq.k or other.n != seq.n:
            raise ValueError("comparison sequence must share k and n")
        ev2 = evolve(other, ev.t)
        indep = float(np.max(np.abs(np.abs(ev.clock_coeffs) - np.abs(ev2.clock_coeffs))))
    return StructureReport(worst, where, unitarity_residual(ev.matrix), tol, indep)


def k2_closed_form(u1, u2, t: float) -> np.ndarray:
    """Exact propagator of the two-gate reduced Hamiltonian.

    Uses H^3 = 2H, so exp(-iHt) = I - i H sin(sqrt2 t)/sqrt2 + H^2 (cos(sqrt2 t) - 1)/2,
    written out block by block.
    """
    u1 = as_matrix(u1)
    u2 = as_matrix(u2)
    if u1.shape != u2.shape or u1.shape[0] != u1.shape[1]:
        raise ValueError(f"gate shapes differ or are not square: {u1.shape}, {u2.shape}")
    r2 = math.sqrt(2.0)
    c = (math.cos(r2 * t) - 1.0) / 2.0
    s = math.sin(r2 * t) / r2
    eye = np.eye(u1.shape[0], dtype=complex)
    u1d, u2d = u1.conj().T, u2.conj().T
    return np.block(
        [
            [(1 + c) * eye, -1j * s * u1d, c * u1d @ u2d],
            [-1j * s * u1, math.cos(r2 * t) * eye, -1j * s * u2d],
            [c * u2 @ u1, -1j * s * u2, (1 + c) * eye],
        ]
    )


def run_computation(seq: UnitarySequence, input_state, t: float) -> tuple[np.ndarray, float]:
    """Evolve |0>_c (x) input and post-select the clock on |k>_c.

    Returns the normalised register state conditioned on completion and the
    completion probability.
    """
    psi = np.asarray(input_state, dtype=complex).reshape(-1)
    if psi.size != seq.dim:
        raise ValueError(f"input state has dimension {psi.size}, expected {seq.dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"input state is not normalised (norm {norm:.12f})")
    g = matrix_exponential(build_reduced_hamiltonian(seq), t)
    d = seq.dim
    out = g[seq.k * d :, :d] @ psi
    p = float(np.vdot(out, out).real)
    if p > 0:
        out = out / math.sqrt(p)
    return out, p


def states_equal_up_to_phase(a, b, tol: float = STRUCTURE_TOL) -> bool:
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    return abs(abs(np.vdot(a, b)) - 1.0) <= tol


def clock_amplitudes_reference(k: int, t: float) -> np.ndarray:
    return clock.amplitude_matrix(k, t)
