"""Genuine multipartite entanglement of the qubit reduced state.

The detector is the PPT-mixture criterion: a state that cannot be
written as a mixture of states each PPT across some bipartition is
genuinely multipartite entangled.  The quantitative monotone is the
optimum of the fully decomposable witness program

    E(rho) = |min Tr(W rho)|   (0 when the minimum is non-negative)

    over Hermitian W subject to, for EVERY bipartition M:
        W = P_M + Q_M^{T_M},   0 <= P_M <= I,  0 <= Q_M <= I,

solved with the package's own interior-point method
(:mod:`dickeg.sdp`).  The normalization bounding both P and Q by the
identity fixes the scale so a GHZ state of any size scores 1/2.

Bipartite negativities provide an independent upper bound: a fully
decomposable witness is in particular decomposable for each single cut,
so ``E(rho) <= min_M negativity(rho, M)``, with equality for GHZ-class
pure states.  This pairing is used as a cross-check in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sdp import Block, solve_sdp, svec, unsvec

__all__ = [
    "Bipartition",
    "GmeResult",
    "SDP_TOLERANCE",
    "all_bipartitions",
    "gme_monotone",
    "negativity",
    "partial_transpose",
]

#: Default convergence tolerance (duality gap and feasibility) of the SDP.
SDP_TOLERANCE = 1e-7


@dataclass(frozen=True)
class Bipartition:
    """One cut of N qubits, stored as a bit mask over qubit positions.

    A cut and its complement are the same bipartition; the canonical
    representative is the mask containing qubit 0.  There are
    ``2^(N-1) - 1`` distinct bipartitions.
    """

    mask: int
    n_qubits: int

    def __post_init__(self) -> None:
        full = (1 << self.n_qubits) - 1
        if not 0 < self.mask < full:
            raise ValueError(
                f"mask {self.mask:#x} is not a nonempty proper subset of "
                f"{self.n_qubits} qubits"
            )
        if not self.mask & 1:
            object.__setattr__(self, "mask", full ^ self.mask)

    @property
    def qubits(self) -> tuple[int, ...]:
        """Positions on the canonical side of the cut."""
        return tuple(q for q in range(self.n_qubits) if self.mask >> q & 1)


def all_bipartitions(n_qubits: int) -> list[Bipartition]:
    """Every distinct bipartition, canonicalized, in mask order."""
    if n_qubits < 2:
        raise ValueError("bipartitions need at least two qubits")
    full = (1 << n_qubits) - 1
    return [Bipartition(m, n_qubits) for m in range(1, full, 2)]


@dataclass(frozen=True)
class GmeResult:
    """Outcome of the witness optimization.

    ``value`` is the monotone ``max(0, -min Tr(W rho))``; ``witness`` the
    optimal W; ``solver_status`` one of ``optimal``, ``near_optimal``
    (``failed`` never survives - the solver raises instead);
    ``duality_gap`` the final complementarity gap.
    """

    value: float
    witness: np.ndarray
    solver_status: str
    duality_gap: float


def _pt_indices(mask: int, n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column source indices realizing the partial transpose."""
    dim = 1 << n_qubits
    r, c = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    keep = ~mask & ((1 << n_qubits) - 1)
    return (r & keep) | (c & mask), (c & keep) | (r & mask)


def partial_transpose(rho: np.ndarray, part: Bipartition) -> np.ndarray:
    """Transpose the subsystem on one side of the cut."""
    rho = np.asarray(rho)
    dim = 1 << part.n_qubits
    if rho.shape != (dim, dim):
        raise ValueError(f"state has shape {rho.shape}, expected {(dim, dim)}")
    rows, cols = _pt_indices(part.mask, part.n_qubits)
    return rho[rows, cols]


def negativity(rho: np.ndarray, part: Bipartition) -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    eigs = np.linalg.eigvalsh(partial_transpose(rho, part))
    return float(-np.sum(eigs[eigs < 0.0]))


@lru_cache(maxsize=None)
def _pt_svec_map(mask: int, n_qubits: int) -> np.ndarray:
    """The partial transpose as a real orthogonal matrix on svec space."""
    dim = 1 << n_qubits
    rows, cols = _pt_indices(mask, n_qubits)
    n = dim * dim
    out = np.empty((n, n))
    for alpha in range(n):
        e = np.zeros(n)
        e[alpha] = 1.0
        out[:, alpha] = svec(unsvec(e, dim)[rows, cols])
    return out


def gme_monotone(
    rho: np.ndarray,
    tolerance: float = SDP_TOLERANCE,
    max_iterations: int = 100,
) -> GmeResult:
    """Optimize the fully decomposable witness for ``rho``.

    ``rho`` must be a density matrix on the full ``2^N`` qubit space with
    ``N >= 2``; the SDP dimension grows as ``4^N``, so this is intended
    for small qubit numbers (N <= 4 is comfortable).

    Raises
    ------
    SolverFailureError
        If the interior-point iteration stalls before near-optimality.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    n_qubits = int(round(np.log2(dim)))
    if 1 << n_qubits != dim or rho.shape != (dim, dim):
        raise ValueError(f"rho must be 2^N x 2^N, got shape {rho.shape}")
    if n_qubits < 2:
        raise ValueError("genuine multipartite entanglement needs N >= 2")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("rho must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("rho must have unit trace")

    parts = all_bipartitions(n_qubits)
    n_param = dim * dim
    w_slice = slice(0, n_param)
    q_slices = [
        slice((1 + i) * n_param, (2 + i) * n_param) for i in range(len(parts))
    ]
    c = np.zeros((1 + len(parts)) * n_param)
    c[w_slice] = svec((rho + rho.conj().T) / 2.0)

    eye = np.eye(dim, dtype=complex)
    zero = np.zeros((dim, dim), dtype=complex)
    blocks = []
    for part, q_slc in zip(parts, q_slices):
        pt = _pt_svec_map(part.mask, n_qubits)
        blocks.append(  # P_M = W - Q^T_M >= 0
            Block(zero, ((w_slice, None, 1.0), (q_slc, pt, -1.0)))
        )
        blocks.append(  # I - P_M >= 0
            Block(eye, ((w_slice, None, -1.0), (q_slc, pt, 1.0)))
        )
        blocks.append(Block(zero, ((q_slc, None, 1.0),)))  # Q_M >= 0
        blocks.append(Block(eye, ((q_slc, None, -1.0),)))  # I - Q_M >= 0

    y0 = np.zeros(c.size)
    y0[w_slice] = svec(0.5 * eye)
    for q_slc in q_slices:
        y0[q_slc] = svec(0.25 * eye)

    sol = solve_sdp(c, blocks, y0, tolerance=tolerance,
                    max_iterations=max_iterations)
    return GmeResult(
        value=max(0.0, -sol.objective),
        witness=unsvec(sol.y[w_slice], dim),
        solver_status=sol.status,
        duality_gap=sol.duality_gap,
    )
