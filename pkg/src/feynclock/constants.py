"""Numerical tolerances and fixed defaults used across the package."""

import math

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
EVOLUTION_UNITARY_TOL = 1e-9
STRUCTURE_TOL = 1e-9
ORACLE_TOL = 1e-10
EIGEN_REL_TOL = 1e-12
NORM_TOL = 1e-10
CONSERVATION_TOL = 1e-12

# largest (k+1) * 2**n matrix dimension built densely
DENSE_SIZE_CAP = 4096
FULL_CLOCK_MAX_K = 8
FULL_CLOCK_MAX_QUBITS = 2

# peak search
COARSE_STEP_FACTOR = 0.05
COARSE_STEP_MIN = 0.01
SECOND_STEP_FACTOR = 0.025
WINDOW_LO = 0.3
WINDOW_HI = 0.7
SMALL_K = 10
REFINE_REL_TOL = 1e-9
# grid samples below this fraction of the window maximum are treated as
# round-off (P_k(t) ahead of the wavefront is ~1e-30 and numerically ragged)
PEAK_NOISE_FLOOR = 1e-6
# absolute floor so a window holding only round-off never yields a maximum
PEAK_ABS_FLOOR = 1e-12
TIE_TOL = 1e-9

# adiabatic gap scan
GAP_GRID = 257
GAP_REFINE_ROUNDS = 3
GAP_REFINE_POINTS = 65

DOOLEY_COEFF = math.pi**2 / 8
