"""Dense-diagonalization oracle and analytic limit spectra.

This module is the method-independent reference: it diagonalizes the
Hamiltonian in a truncated basis with standard dense linear algebra and
never touches the recurrence/G-function machinery.  Two bases are offered:

* ``fock`` - the product basis ``|m'> x |n>`` with a photon cutoff
  ``m_fock`` (the workhorse reference, also used by the dynamics module);
* ``ecs`` - a variational basis of per-row displaced number states
  ``|m'> x D(-2 m' g/omega)|n>``, which converges dramatically faster at
  strong coupling and is what convergence studies are about.

Both are assembled directly in parity-adapted form.  The Z2 parity operator
is ``S = exp(i pi d^dag d) * X`` with ``X|j, m> = |j, -m>``; it maps a basis
ket ``|m', n>`` (in either basis) to ``(-1)^n |-m', n>``, so the adapted
vectors are ``(|m', n> + s (-1)^n |-m', n>)/sqrt(2)`` for ``m' > 0`` plus,
for even qubit numbers, the bare ``m' = 0`` kets with ``(-1)^n = s``.
Parity labels of the returned eigenstates are exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bosons import displacement_matrix
from .errors import DimensionCapError
from .model import ModelParams, validate_parity
from .recurrence import positive_row_indices

__all__ = [
    "DEFAULT_DIMENSION_CAP",
    "OracleSpectrum",
    "LimitLevel",
    "ConvergencePoint",
    "default_m_fock",
    "build_hamiltonian",
    "parity_matrix",
    "diagonalize_fock",
    "ecs_eigenvalues",
    "convergence_curve",
    "limit_spectrum_weak",
    "limit_spectrum_strong",
]

#: Largest dense dimension ``(n_qubits + 1) * (m_fock + 1)`` the oracle accepts.
DEFAULT_DIMENSION_CAP = 20_000


def default_m_fock(params: ModelParams) -> int:
    """Default photon cutoff: 200 up to six qubits, 400 beyond."""
    return 200 if params.n_qubits <= 6 else 400


@dataclass(frozen=True)
class OracleSpectrum:
    """Reference spectrum with exact parity labels.

    ``eigenvalues`` are ascending; ``parities[i]`` is the sector of state
    ``i``; ``eigenvectors`` (optional) holds product-basis columns indexed
    ``flat = row * (m_fock + 1) + n`` with rows ascending in ``m'``.
    """

    eigenvalues: np.ndarray
    parities: np.ndarray
    eigenvectors: np.ndarray | None
    m_fock: int

    def sector(self, parity: int) -> np.ndarray:
        """Ascending eigenvalues of one parity sector."""
        return self.eigenvalues[self.parities == validate_parity(parity)]


def _couplings(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Absolute off-diagonal elements ``h_up[i] -> i+1`` and ``h_dn[i]``."""
    n = params.n_qubits
    two_m = np.arange(-n, n + 1, 2, dtype=np.int64)
    up4 = n * (n + 2) - two_m * (two_m + 2)
    dn4 = n * (n + 2) - two_m * (two_m - 2)
    h_up = -0.5 * params.delta * np.sqrt(np.maximum(up4, 0).astype(float)) / 2.0
    h_dn = -0.5 * params.delta * np.sqrt(np.maximum(dn4, 0).astype(float)) / 2.0
    return h_up, h_dn


def build_hamiltonian(params: ModelParams, m_fock: int) -> np.ndarray:
    """Dense Hamiltonian in the product basis ``flat = row*(m_fock+1) + n``."""
    n, mdim = params.n_qubits, m_fock + 1
    lvl = np.arange(mdim, dtype=float)
    x_op = np.diag(np.sqrt(lvl[1:]), 1) + np.diag(np.sqrt(lvl[1:]), -1)  # d^dag + d
    h_up, _ = _couplings(params)
    m_vals = (np.arange(n + 1) - n / 2.0)
    ham = np.zeros((n + 1, mdim, n + 1, mdim))
    for i in range(n + 1):
        ham[i, :, i, :] = np.diag(params.omega * lvl) + 2.0 * params.g * m_vals[i] * x_op
        if i + 1 <= n:
            ham[i + 1, :, i, :] = h_up[i] * np.eye(mdim)
            ham[i, :, i + 1, :] = h_up[i] * np.eye(mdim)
    return ham.reshape((n + 1) * mdim, (n + 1) * mdim)


def parity_matrix(params: ModelParams, m_fock: int) -> np.ndarray:
    """The Z2 parity ``S = exp(i pi d^dag d) * X`` in the product basis."""
    n, mdim = params.n_qubits, m_fock + 1
    s = np.zeros((n + 1, mdim, n + 1, mdim))
    signs = np.where(np.arange(mdim) % 2 == 0, 1.0, -1.0)
    for i in range(n + 1):
        s[n - i, :, i, :] = np.diag(signs)
    return s.reshape((n + 1) * mdim, (n + 1) * mdim)


def _sector_block(
    params: ModelParams, m_fock: int, parity: int, basis: str
) -> tuple[np.ndarray, list, np.ndarray | None]:
    """Assemble one parity sector's Hamiltonian block.

    Returns ``(block, pair_rows, allowed_center_levels)`` where
    ``pair_rows`` are the positive row indices (ascending) whose photon
    columns occupy the leading ``k*(m_fock+1)`` slots, followed by the
    ``m' = 0`` levels ``allowed_center_levels`` for even qubit numbers.
    """
    n, mdim = params.n_qubits, m_fock + 1
    g, w = params.g, params.omega
    _, gr = params.reduced()
    pos = list(positive_row_indices(params))
    k = len(pos)
    h_up, h_dn = _couplings(params)
    m_vals = np.arange(n + 1) - n / 2.0
    lvl = np.arange(mdim, dtype=float)
    alt = np.where(np.arange(mdim) % 2 == 0, 1.0, -1.0)
    even = n % 2 == 0
    allowed = np.nonzero(alt == parity)[0] if even else None
    dim = k * mdim + (len(allowed) if even else 0)

    if basis == "fock":
        x_op = np.diag(np.sqrt(lvl[1:]), 1) + np.diag(np.sqrt(lvl[1:]), -1)
        d2 = np.eye(mdim)
        diag_block = lambda i: np.diag(w * lvl) + 2.0 * g * m_vals[i] * x_op
    elif basis == "ecs":
        d2 = displacement_matrix(2.0 * gr, mdim)
        diag_block = lambda i: np.diag(w * lvl - 4.0 * m_vals[i] ** 2 * g * g / w)
    else:
        raise ValueError(f"basis must be 'fock' or 'ecs', got {basis!r}")

    blk = np.zeros((dim, dim))
    for a, i in enumerate(pos):
        sl = slice(a * mdim, (a + 1) * mdim)
        blk[sl, sl] = diag_block(i)
        if a == 0 and not even:
            # lowest positive row couples to its own mirror image
            blk[sl, sl] += h_dn[i] * parity * (d2 @ np.diag(alt))
        if a + 1 < k:
            nxt = slice((a + 1) * mdim, (a + 2) * mdim)
            blk[nxt, sl] = h_up[i] * d2
            blk[sl, nxt] = h_up[i] * d2.T
    if even:
        coff = k * mdim
        blk[coff:, coff:] = np.diag(w * lvl[allowed])
        i1 = pos[0]
        cpl = np.sqrt(2.0) * h_dn[i1] * d2[:, allowed]
        blk[0:mdim, coff:] = cpl
        blk[coff:, 0:mdim] = cpl.T
    return blk, pos, allowed


def _embed_sector(
    params: ModelParams, m_fock: int, parity: int, vecs: np.ndarray
) -> np.ndarray:
    """Map Fock-sector eigenvector columns back to the full product basis."""
    n, mdim = params.n_qubits, m_fock + 1
    pos = list(positive_row_indices(params))
    k = len(pos)
    alt = np.where(np.arange(mdim) % 2 == 0, 1.0, -1.0)
    full = np.zeros(((n + 1) * mdim, vecs.shape[1]))
    inv = 1.0 / np.sqrt(2.0)
    for a, i in enumerate(pos):
        part = vecs[a * mdim : (a + 1) * mdim]
        full[i * mdim : (i + 1) * mdim] += inv * part
        full[(n - i) * mdim : (n - i + 1) * mdim] += inv * parity * (alt[:, None] * part)
    if n % 2 == 0:
        allowed = np.nonzero(alt == parity)[0]
        ic = n // 2
        full[ic * mdim + allowed] = vecs[k * mdim :]
    return full


def diagonalize_fock(
    params: ModelParams,
    m_fock: int | None = None,
    need_vectors: bool = True,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> OracleSpectrum:
    """Reference spectrum from parity-blocked dense diagonalization.

    Parameters
    ----------
    m_fock:
        Photon cutoff (levels ``0..m_fock``); default per
        :func:`default_m_fock`.
    need_vectors:
        If false, skip assembling product-basis eigenvectors (halves the
        memory and is enough for spectra).
    dimension_cap:
        Guard against accidental huge requests: the *full* dimension
        ``(n_qubits+1)*(m_fock+1)`` must not exceed it.

    Raises
    ------
    DimensionCapError
        If the requested dense problem exceeds ``dimension_cap``.
    """
    if m_fock is None:
        m_fock = default_m_fock(params)
    dim_full = (params.n_qubits + 1) * (m_fock + 1)
    if dim_full > dimension_cap:
        raise DimensionCapError(
            f"dense dimension {dim_full} exceeds cap {dimension_cap}; "
            "raise dimension_cap explicitly if this is intended"
        )
    energies, parities, vectors = [], [], []
    for s in (1, -1):
        blk, _, _ = _sector_block(params, m_fock, s, "fock")
        if need_vectors:
            e, v = np.linalg.eigh(blk)
            vectors.append(_embed_sector(params, m_fock, s, v))
        else:
            e = np.linalg.eigvalsh(blk)
        energies.append(e)
        parities.append(np.full(e.shape, s, dtype=int))
    e_all = np.concatenate(energies)
    p_all = np.concatenate(parities)
    order = np.lexsort((-p_all, e_all))  # energy ascending, +1 first on ties
    spec = OracleSpectrum(
        eigenvalues=e_all[order],
        parities=p_all[order],
        eigenvectors=np.concatenate(vectors, axis=1)[:, order] if need_vectors else None,
        m_fock=m_fock,
    )
    return spec


def ecs_eigenvalues(
    params: ModelParams, cutoff: int, parity: int, n_states: int | None = None
) -> np.ndarray:
    """Ascending eigenvalues of one parity sector in the variational
    displaced-frame basis with photon levels ``0..cutoff`` per frame."""
    blk, _, _ = _sector_block(params, cutoff, validate_parity(parity), "ecs")
    e = np.linalg.eigvalsh(blk)
    return e if n_states is None else e[:n_states]


@dataclass(frozen=True)
class ConvergencePoint:
    """One point of a cutoff-convergence study."""

    cutoff: int
    energy: float
    eta: float  # |(E(c) - E(c_prev))/E(c)| against the previous cutoff


def convergence_curve(
    params: ModelParams,
    state_index: int,
    basis: str,
    cutoffs,
    parity: int | None = None,
    m_fock: int | None = None,
) -> list[ConvergencePoint]:
    """Energy of one state versus basis cutoff, with relative increments.

    Parameters
    ----------
    state_index:
        Index of the target state, ascending within the chosen ``parity``
        sector (or within the merged spectrum when ``parity`` is None).
    basis:
        ``'ecs'`` for the displaced-frame variational basis (cutoff =
        photon levels per frame) or ``'fock'`` (cutoff = photon levels of
        the product basis).
    cutoffs:
        Increasing iterable of cutoffs to evaluate.
    """
    if basis not in ("fock", "ecs"):
        raise ValueError(f"basis must be 'fock' or 'ecs', got {basis!r}")
    cutoffs = [int(c) for c in cutoffs]
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    out: list[ConvergencePoint] = []
    prev = None
    for c in cutoffs:
        if parity is None:
            es, ps = [], []
            for s in (1, -1):
                blk, _, _ = _sector_block(params, c, s, basis)
                es.append(np.linalg.eigvalsh(blk))
            e = np.sort(np.concatenate(es))
        else:
            blk, _, _ = _sector_block(params, c, validate_parity(parity), basis)
            e = np.linalg.eigvalsh(blk)
        if state_index >= e.size:
            raise ValueError(
                f"state_index {state_index} out of range at cutoff {c} "
                f"(sector dimension {e.size})"
            )
        val = float(e[state_index])
        eta = np.nan if prev is None else abs((val - prev) / val) if val != 0 else abs(val - prev)
        out.append(ConvergencePoint(cutoff=c, energy=val, eta=float(eta)))
        prev = val
    return out


@dataclass(frozen=True)
class LimitLevel:
    """One level of an analytic limiting spectrum.

    ``two_m`` is the ``J_x``-projection label in the weak-coupling limit
    and the ``J_z`` projection of the displaced frame in the strong one;
    ``n`` is the photon number.
    """

    energy: float
    parity: int
    n: int
    two_m: int


def limit_spectrum_weak(params: ModelParams, e_max: float) -> list[LimitLevel]:
    """The decoupled (g = 0) spectrum ``E = omega n' + delta m'``.

    ``m'`` runs over the ``J_x`` projections; the parity of a level is
    ``(-1)^{n'} * (-1)^{j + m'}`` (the spin factor is the ``X``-eigenvalue
    of the ``J_x`` eigenstate).  Levels are sorted ascending, then by
    parity (+1 first) and ``two_m``.
    """
    out: list[LimitLevel] = []
    n = 0
    while params.omega * n - params.delta * params.j <= e_max:
        for two_m in params.two_m_values:
            e = params.omega * n + params.delta * two_m / 2.0
            if e <= e_max:
                par = (-1) ** n * (-1) ** ((params.n_qubits + two_m) // 2)
                out.append(LimitLevel(energy=e, parity=int(par), n=n, two_m=int(two_m)))
        n += 1
    out.sort(key=lambda r: (r.energy, -r.parity, r.two_m))
    return out


def limit_spectrum_strong(params: ModelParams, e_max: float) -> list[LimitLevel]:
    """The decoupled (delta = 0) spectrum ``E = omega n - 4 m^2 g^2/omega``.

    Levels with ``m != 0`` are doubly degenerate; the pair is reported as
    one level per parity sector (their symmetric/antisymmetric
    combinations).  ``m = 0`` levels (even qubit numbers) carry parity
    ``(-1)^n`` only.
    """
    out: list[LimitLevel] = []
    w = params.omega
    for two_m in params.two_m_values:
        off = (two_m * params.g / 2.0) ** 2 * 4.0 / w  # 4 m^2 g^2 / omega
        if two_m < 0:
            continue
        n = 0
        while w * n - off <= e_max:
            e = w * n - off
            if two_m == 0:
                out.append(LimitLevel(energy=e, parity=(-1) ** n, n=n, two_m=0))
            else:
                out.append(LimitLevel(energy=e, parity=1, n=n, two_m=int(two_m)))
                out.append(LimitLevel(energy=e, parity=-1, n=n, two_m=int(two_m)))
            n += 1
    out.sort(key=lambda r: (r.energy, -r.parity, r.two_m))
    return out
