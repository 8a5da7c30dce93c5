"""dickeg: exact spectra of the finite-size Dicke model via G-functions.

The package solves ``H = -delta J_x + omega d^dag d + 2 g (d^dag + d) J_z``
on the maximal-spin sector by locating zeros of a ``k x k`` spectral
determinant built from extended-coherent-state expansions, with an
independent dense-diagonalization oracle, quench dynamics, and genuine
multipartite entanglement monitoring.
"""

from .errors import (
    CompletenessError,
    ConvergenceError,
    DegenerateNullSpaceError,
    DickegError,
    DimensionCapError,
    PoleError,
    SolverFailureError,
)
from .model import (
    DELTA_MIN,
    G_MIN,
    PARITIES,
    DickeIndex,
    DisplacedDiagonal,
    ModelParams,
    diag_element_displaced,
    dicke_two_m_values,
    ladder_element,
    lambda_crossover,
    offdiag_element,
)
from .gfunction import GEvaluation, PoleSet, g_matrix, g_value, g_values, pole_set
from .oracle import (
    ConvergencePoint,
    LimitLevel,
    OracleSpectrum,
    build_hamiltonian,
    convergence_curve,
    default_m_fock,
    diagonalize_fock,
    ecs_eigenvalues,
    limit_spectrum_strong,
    limit_spectrum_weak,
    parity_matrix,
)
from .recurrence import DEFAULT_N_C, POLE_EPSILON, a_table, c_table, project_initial_c
from .spectrum import (
    EigenState,
    RejectedZero,
    ScanReport,
    SpectrumRecord,
    find_exceptional,
    reconstruct_eigenstate,
    scan_report,
    scan_zeros,
    suggested_n_c,
)
from .dynamics import (
    COMPLETENESS_TOLERANCE,
    EigenBasis,
    QubitDensityMatrix,
    default_t_grid,
    eigen_basis,
    energy_expectation,
    evolve,
    expand_in_eigenbasis,
    initial_state,
    purity,
    reduce_to_qubits,
)
from .entanglement import (
    SDP_TOLERANCE,
    Bipartition,
    GmeResult,
    all_bipartitions,
    gme_monotone,
    negativity,
    partial_transpose,
)
from .sdp import Block, SdpSolution, solve_sdp

__version__ = "0.1.0"
