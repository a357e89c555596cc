"""Runtime verification suites behind ``feynclock verify``."""

from __future__ import annotations

import numpy as np

from feynclock import clock, gates
from feynclock import constants as C
from feynclock.numerics import matrix_exponential, unitarity_residual

LEVELS = {
    "quick": {"oracle_k": range(2, 9), "oracle_t": 5, "struct_k": range(2, 6), "struct_reps": 2,
              "norm_k": (1, 2, 10, 50, 200), "cons_k": range(1, 5)},
    "full": {"oracle_k": range(2, 13), "oracle_t": 20, "struct_k": range(2, 9), "struct_reps": 5,
             "norm_k": tuple(range(1, 201)), "cons_k": range(1, 7)},
}


def _suite(name, residual, tol, **extra) -> dict:
    return {"suite": name, "max_residual": float(residual), "tol": tol,
            "passed": bool(residual <= tol), **extra}


def oracle_suite(ks, n_t: int, rng) -> dict:
    worst = 0.0
    for k in ks:
        h = clock.build_clock_matrix(k).to_dense()
        for t in rng.uniform(0.0, 3.0 * (k + 2), n_t):
            dense = abs(matrix_exponential(h, t)[k, 0]) ** 2
            worst = max(worst, abs(dense - clock.success_probability(k, t)))
    return _suite("oracle", worst, C.ORACLE_TOL, k_values=list(ks))


def structure_suite(ks, reps: int, rng, qubits=(1, 2)) -> dict:
    worst = 0.0
    worst_unit = 0.0
    worst_indep = 0.0
    for k in ks:
        for n in qubits:
            for _ in range(reps):
                seq = gates.random_sequence(k, n, rng)
                other = gates.random_sequence(k, n, rng)
                t = float(rng.uniform(0.0, 2.0 * k))
                rep = gates.verify_structure(gates.evolve(seq, t), seq, other=other)
                worst = max(worst, rep.max_residual)
                worst_unit = max(worst_unit, rep.unitarity_residual)
                worst_indep = max(worst_indep, rep.gate_independence)
    res = max(worst, worst_indep)
    out = _suite("structure", res, C.STRUCTURE_TOL, k_values=list(ks))
    out.update(block_residual=worst, gate_independence=worst_indep, unitarity=worst_unit)
    out["passed"] = out["passed"] and worst_unit <= C.EVOLUTION_UNITARY_TOL
    return out


def sequence_suite(seq: gates.UnitarySequence, rng, n_t: int = 5) -> dict:
    """Structure check for a user-supplied gate sequence."""
    worst = 0.0
    for t in rng.uniform(0.0, 2.0 * seq.k, n_t):
        ev = gates.evolve(seq, float(t))
        rep = gates.verify_structure(ev, seq)
        worst = max(worst, rep.max_residual, rep.unitarity_residual)
    return _suite("gate_file", worst, C.STRUCTURE_TOL, k=seq.k, n=seq.n)


def normalization_suite(ks, rng, n_t: int = 5) -> dict:
    worst = 0.0
    for k in ks:
        for t in rng.uniform(0.0, 2.0 * (k + 2), n_t):
            col = clock.amplitude_matrix(k, t)[:, 0]
            worst = max(worst, abs(float(np.sum(np.abs(col) ** 2)) - 1.0))
    return _suite("normalization", worst, C.NORM_TOL, k_max=max(ks))


def unitarity_suite(ks, rng, n_t: int = 3) -> dict:
    worst = 0.0
    for k in ks:
        h = clock.build_clock_matrix(k).to_dense()
        for t in rng.uniform(0.0, 2.0 * (k + 2), n_t):
            worst = max(worst, unitarity_residual(matrix_exponential(h, t)))
            worst = max(worst, unitarity_residual(clock.amplitude_matrix(k, t)))
    return _suite("unitarity", worst, C.EVOLUTION_UNITARY_TOL)


def conservation_suite(ks, rng, n: int = 1) -> dict:
    worst = 0.0
    for k in ks:
        seq = gates.random_sequence(k, n, rng)
        h = gates.build_full_clock_hamiltonian(seq)
        num = gates.number_operator(k, seq.dim)
        worst = max(worst, float(np.max(np.abs(h @ num - num @ h))))
    return _suite("conservation", worst, C.CONSERVATION_TOL, k_values=list(ks))


def run_verification(level: str = "quick", seed: int = 0, sequence=None) -> dict:
    if level not in LEVELS:
        raise ValueError(f"unknown verification level {level!r}")
    cfg = LEVELS[level]
    rng = np.random.default_rng(seed)
    suites = [
        oracle_suite(cfg["oracle_k"], cfg["oracle_t"], rng),
        structure_suite(cfg["struct_k"], cfg["struct_reps"], rng),
        normalization_suite(cfg["norm_k"], rng),
        unitarity_suite(cfg["oracle_k"], rng),
        conservation_suite(cfg["cons_k"], rng),
    ]
    if sequence is not None:
        suites.append(sequence_suite(sequence, rng))
    return {"level": level, "seed": seed, "suites": suites,
            "passed": all(s["passed"] for s in suites)}
