"""Quench dynamics from the GHZ ⊗ vacuum initial state.

The protocol: prepare the qubits in the maximally entangled state
``(|j, +j> + |j, -j>)/sqrt(2)`` (the Bell state for two qubits, GHZ
beyond) with the photon mode in its vacuum, switch on the coupled
Hamiltonian at ``t = 0``, and follow the reduced state of the qubits.
Because the initial state lives in the maximal-spin sector and the
Hamiltonian conserves total spin, the evolution stays in the
``(N + 1) x (photon)`` collective space; the reduced qubit density
matrix is obtained by tracing the photons and embedding the collective
rows into the symmetric subspace of the ``2^N`` qubit space.

Evolution is exact: the initial state is expanded over an eigenbasis
(``|psi(t)> = sum_n f_n e^{-i E_n t} |n>``), so time enters only through
phases and there is no integrator error.  The eigenbasis can come from
either the dense-diagonalization oracle (default - cheap at the small
qubit numbers where the ``2^N`` reduced state is useful) or from the
G-function spectrum via :func:`dickeg.spectrum.reconstruct_eigenstate`,
and the two sources can be cross-validated against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompletenessError
from .model import ModelParams
from .oracle import build_hamiltonian, default_m_fock, diagonalize_fock
from .spectrum import reconstruct_eigenstate, scan_zeros

__all__ = [
    "COMPLETENESS_TOLERANCE",
    "EigenBasis",
    "QubitDensityMatrix",
    "default_t_grid",
    "eigen_basis",
    "energy_expectation",
    "evolve",
    "expand_in_eigenbasis",
    "initial_state",
    "purity",
    "reduce_to_qubits",
]

#: An eigenbasis must carry at least this much of the initial state.
COMPLETENESS_TOLERANCE = 1e-8


@dataclass(frozen=True)
class EigenBasis:
    """A finite set of eigenstates spanning (enough of) the initial state.

    ``vectors[:, n]`` is the ``n``-th eigenstate in the flat product basis
    ``row * (m_fock + 1) + nu`` (collective rows ascending in ``m'``),
    ``energies[n]`` its eigenvalue; both parities are merged and sorted
    ascending.  ``completeness_defect`` is ``1 - sum |f_n|^2`` for the
    GHZ ⊗ vacuum initial state the basis was built for.
    """

    energies: np.ndarray
    vectors: np.ndarray
    parities: np.ndarray
    m_fock: int
    completeness_defect: float
    source: str


@dataclass(frozen=True)
class QubitDensityMatrix:
    """Reduced state of the qubits at one time, on the full 2^N space."""

    t: float
    rho: np.ndarray


def default_t_grid(t_max: float = 50.0, dt: float = 0.05) -> np.ndarray:
    """The standard sampling grid, dense enough for the beat structure."""
    return np.arange(0.0, t_max + 0.5 * dt, dt)


def initial_state(params: ModelParams, m_fock: int | None = None) -> np.ndarray:
    """GHZ ⊗ vacuum in the flat product basis, exactly normalized."""
    if m_fock is None:
        m_fock = default_m_fock(params)
    n = params.n_qubits
    psi = np.zeros((n + 1, m_fock + 1))
    psi[0, 0] = 1.0 / math.sqrt(2.0)
    psi[n, 0] = 1.0 / math.sqrt(2.0)
    return psi.reshape(-1)


def eigen_basis(
    params: ModelParams,
    source: str = "oracle",
    m_fock: int | None = None,
    e_max: float | None = None,
    tolerance: float = COMPLETENESS_TOLERANCE,
) -> EigenBasis:
    """Assemble an eigenbasis sufficient to expand the initial state.

    ``source="oracle"`` takes dense-diagonalization eigenpairs;
    ``source="gfunction"`` locates zeros with :func:`~dickeg.spectrum.
    scan_zeros` and reconstructs each eigenstate from the spectral
    determinant's null vector (both parities).  In either case states
    are kept in ascending energy up to ``e_max``; when ``e_max`` is None
    it grows adaptively until the completeness defect for the initial
    state drops below ``tolerance``.

    Raises
    ------
    CompletenessError
        If the defect cannot be brought below ``tolerance`` (raise
        ``e_max`` or ``m_fock``).
    """
    if m_fock is None:
        m_fock = default_m_fock(params)
    psi0 = initial_state(params, m_fock)

    if source == "oracle":
        spec = diagonalize_fock(params, m_fock=m_fock)
        f_all = spec.eigenvectors.T @ psi0
        weight = f_all**2
        if e_max is None:
            # smallest ascending-energy prefix that carries the state
            lack = 1.0 - np.cumsum(weight)
            enough = np.nonzero(lack < tolerance)[0]
            if enough.size == 0:
                raise CompletenessError(
                    f"completeness defect {lack[-1]:.3e} at the full cutoff "
                    f"m_fock={m_fock}; increase m_fock"
                )
            n_keep = int(enough[0]) + 1
        else:
            n_keep = int(np.searchsorted(spec.eigenvalues, e_max, side="right"))
            defect = 1.0 - float(np.sum(weight[:n_keep]))
            if defect >= tolerance:
                raise CompletenessError(
                    f"completeness defect {defect:.3e} with e_max={e_max}; "
                    "increase e_max or m_fock"
                )
        defect = 1.0 - float(np.sum(weight[:n_keep]))
        return EigenBasis(
            energies=spec.eigenvalues[:n_keep].copy(),
            vectors=spec.eigenvectors[:, :n_keep].copy(),
            parities=spec.parities[:n_keep].copy(),
            m_fock=m_fock,
            completeness_defect=defect,
            source="oracle",
        )

    if source == "gfunction":
        # the initial state's energy scale: widen the window until the
        # expansion is complete
        w = params.omega
        lam2 = (params.n_qubits * params.g / params.omega) ** 2
        e_lo = -w * (lam2 + params.delta * params.n_qubits + 2.0)
        e_hi = params.delta * params.n_qubits + 2.0 * w if e_max is None else e_max
        for _ in range(8):
            energies, parities, columns = [], [], []
            for parity in (1, -1):
                for rec in scan_zeros(params, parity, (e_lo, e_hi)):
                    state = reconstruct_eigenstate(params, rec)
                    energies.append(rec.energy)
                    parities.append(parity)
                    columns.append(state.flat(m_fock))
            order = np.argsort(energies)
            vectors = np.column_stack([columns[i] for i in order])
            energies = np.asarray(energies)[order]
            f = vectors.T @ psi0
            defect = 1.0 - float(np.sum(f**2))
            if defect < tolerance:
                return EigenBasis(
                    energies=energies,
                    vectors=vectors,
                    parities=np.asarray(parities)[order],
                    m_fock=m_fock,
                    completeness_defect=defect,
                    source="gfunction",
                )
            if e_max is not None:
                break
            e_hi += 3.0 * w
        raise CompletenessError(
            f"completeness defect {defect:.3e} from the G-function basis "
            f"up to E={e_hi:g}; increase e_max"
        )

    raise ValueError(f"unknown eigenbasis source {source!r}")


def expand_in_eigenbasis(basis: EigenBasis, initial: np.ndarray) -> np.ndarray:
    """Coefficients ``f_n = <n|initial>``; the expansion must be complete.

    Raises :class:`CompletenessError` when the basis misses more than
    ``COMPLETENESS_TOLERANCE`` of the state's weight.
    """
    f = basis.vectors.T @ np.asarray(initial)
    defect = float(np.real(np.vdot(initial, initial)) - np.sum(np.abs(f) ** 2))
    if defect >= COMPLETENESS_TOLERANCE:
        raise CompletenessError(
            f"completeness defect {defect:.3e}; the eigenbasis does not "
            "span this state (increase e_max or m_fock)"
        )
    return f


def evolve(basis: EigenBasis, f: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """Eigenphase evolution: rows are ``|psi(t)>`` over the flat basis."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if not np.all(np.isfinite(t)):
        raise ValueError("t_grid must be finite")
    phases = np.exp(-1j * np.outer(t, basis.energies))
    return (phases * f) @ basis.vectors.T


def _symmetric_embedding(n_qubits: int) -> np.ndarray:
    """Isometry from collective rows to the 2^N symmetric subspace.

    Column ``i`` (``two_m = 2 i - N``) is the normalized superposition of
    all basis states with ``i`` up-spins.
    """
    dim = 1 << n_qubits
    iso = np.zeros((dim, n_qubits + 1))
    ones = np.array([bin(b).count("1") for b in range(dim)])
    for i in range(n_qubits + 1):
        rows = ones == i
        iso[rows, i] = 1.0 / math.sqrt(math.comb(n_qubits, i))
    return iso


def reduce_to_qubits(
    params: ModelParams, psi: np.ndarray, t: float = 0.0
) -> QubitDensityMatrix:
    """Trace out the photons and embed the qubits in the full 2^N space."""
    n = params.n_qubits
    block = np.asarray(psi).reshape(n + 1, -1)
    rho_coll = block @ block.conj().T
    iso = _symmetric_embedding(n)
    rho = iso @ rho_coll @ iso.T
    return QubitDensityMatrix(t=float(t), rho=rho)


def energy_expectation(
    params: ModelParams, psi: np.ndarray, ham: np.ndarray | None = None
) -> float:
    """``<psi|H|psi>`` in the flat product basis.

    Pass a prebuilt ``ham`` (from :func:`dickeg.oracle.build_hamiltonian`
    at the matching cutoff) when evaluating many time points.
    """
    psi = np.asarray(psi)
    if ham is None:
        m_fock = psi.size // (params.n_qubits + 1) - 1
        ham = build_hamiltonian(params, m_fock)
    return float(np.real(np.vdot(psi, ham @ psi)))


def purity(rho: np.ndarray) -> float:
    """``Tr rho^2`` - 1 for pure states, 1/rank-ish for mixed ones."""
    return float(np.real(np.trace(rho @ rho)))
