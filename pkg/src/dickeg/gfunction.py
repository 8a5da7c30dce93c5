"""The G-matrix and its determinant (the spectral G-function).

For ``k = ceil(n_qubits/2)`` positive projections there are ``k`` unit seeds
(one per free coefficient ``a_{m_s, 0}``) and ``k`` matching conditions (one
per displaced frame ``m_r > 0``).  Entry ``[r, s]`` of the G-matrix is the
frame-``m_r`` matching sum generated from unit seed ``s``::

    G[r, s] = sum_n ( c_{m_r, n} - parity * c_{-m_r, n} ) * (2 m_r g/omega)^n ,

where the ``c`` coefficients are produced by projecting the seed-``s``
a-table into frame ``m_r`` and running the displaced recurrence.  The
spectral function is ``G(E) = det G``; its zeros between consecutive poles
are eigenvalues of the corresponding parity sector.

Rows are rescaled by their largest absolute entry before the determinant is
taken (the tables can span hundreds of orders of magnitude); the discarded
magnitude is reported as ``log_scale``, so the true determinant is
``value * exp(log_scale)``.  Zero locations and signs are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, validate_parity
from .recurrence import (
    DEFAULT_N_C,
    POLE_EPSILON,
    a_table,
    c_table,
    positive_row_indices,
    project_initial_c,
)

__all__ = [
    "ExceptionalPole",
    "FockPole",
    "PoleSet",
    "GEvaluation",
    "pole_set",
    "g_matrix",
    "g_values",
    "g_value",
    "det_pivoted",
]


@dataclass(frozen=True)
class ExceptionalPole:
    """A pole ``E = (n - 4 m^2 (g/omega)^2) * omega`` of frame ``m``."""

    two_m: int
    n: int
    energy: float


@dataclass(frozen=True)
class FockPole:
    """An even-system pole ``E = n * omega`` of the slaved ``m' = 0`` row.

    Only levels with ``(-1)^n = parity`` are poles of that sector.
    """

    n: int
    energy: float


@dataclass(frozen=True)
class PoleSet:
    """All G-function poles of one parity sector up to an energy cap."""

    exceptional: tuple[ExceptionalPole, ...]
    fock: tuple[FockPole, ...]

    def energies(self) -> np.ndarray:
        """Sorted array of all pole energies (duplicates merged)."""
        vals = [p.energy for p in self.exceptional] + [p.energy for p in self.fock]
        return np.unique(np.asarray(vals, dtype=float))

    def nearest_distance(self, energy) -> np.ndarray:
        """Distance from ``energy`` (scalar or array) to the nearest pole."""
        e = np.asarray(energy, dtype=float)
        poles = self.energies()
        if poles.size == 0:
            return np.full(e.shape, np.inf)
        return np.min(np.abs(e[..., None] - poles), axis=-1)


def pole_set(params: ModelParams, parity: int, e_max: float) -> PoleSet:
    """Enumerate all G-function poles with ``energy <= e_max``.

    Two families contribute:

    * frame poles ``E = (n - 4 m^2 (g/omega)^2) * omega`` for every
      positive projection ``m`` and ``n = 0, 1, ...``;
    * for even ``n_qubits`` only, the ``m' = 0`` slaved-row poles
      ``E = n * omega`` restricted to ``(-1)^n = parity``.
    """
    parity = validate_parity(parity)
    _, gr = params.reduced()
    w = params.omega
    exc: list[ExceptionalPole] = []
    for i in positive_row_indices(params):
        two_m = 2 * int(i) - params.n_qubits
        off = (two_m * gr) ** 2  # 4 m^2 gr^2
        n = 0
        while (n - off) * w <= e_max:
            exc.append(ExceptionalPole(two_m=two_m, n=n, energy=(n - off) * w))
            n += 1
    fock: list[FockPole] = []
    if params.n_qubits % 2 == 0:
        n = 0 if parity == 1 else 1
        while n * w <= e_max:
            fock.append(FockPole(n=n, energy=n * w))
            n += 2
    return PoleSet(exceptional=tuple(exc), fock=tuple(fock))


def g_matrix(
    params: ModelParams,
    energy,
    parity: int,
    n_c: int = DEFAULT_N_C,
    dtype=np.float64,
    tail_tolerance: float | None = None,
    pole_epsilon: float = POLE_EPSILON,
) -> np.ndarray:
    """Assemble the ``k x k`` G-matrix at one or many energies.

    Returns
    -------
    numpy.ndarray
        Shape ``(k, k) + numpy.shape(energy)``; index ``[r, s]`` is frame
        ``m_r`` (ascending positive projections) against unit seed ``s``
        (same ordering).

    Raises
    ------
    PoleError
        If any energy falls within ``pole_epsilon`` of a pole of either
        family (every frame's recurrence runs for every energy, so the
        whole pole union is excluded).
    """
    parity = validate_parity(parity)
    _, gr = params.reduced()
    pos = positive_row_indices(params)
    k = params.k
    n = params.n_qubits

    er_shape = np.shape(np.asarray(energy))
    gmat = np.zeros((k, k) + er_shape, dtype=dtype)
    levels = np.arange(n_c + 1)
    for s in range(k):
        seed = np.zeros(k, dtype=dtype)
        seed[s] = 1.0
        atab = a_table(
            params, energy, parity, seed, n_c=n_c, dtype=dtype, pole_epsilon=pole_epsilon
        )
        for r, i_row in enumerate(pos):
            two_m = 2 * int(i_row) - n
            c0 = project_initial_c(params, atab, two_m, tail_tolerance=tail_tolerance)
            ctab = c_table(params, energy, c0, two_m, n_c=n_c, pole_epsilon=pole_epsilon)
            weights = (dtype(two_m * gr)) ** levels.astype(dtype)  # (2 m g/omega)^n
            diff = ctab[i_row] - parity * ctab[n - i_row]
            gmat[r, s] = np.einsum("n...,n->...", diff, weights)
    return gmat


def det_pivoted(mats: np.ndarray) -> np.ndarray:
    """Determinant of a batch of small matrices by partial-pivot elimination.

    Works for any real floating dtype, including ``numpy.longdouble``
    (which ``numpy.linalg.det`` does not accept).

    Parameters
    ----------
    mats:
        Array of shape ``(..., k, k)``.

    Returns
    -------
    numpy.ndarray
        Determinants, shape ``(...)``.
    """
    a = np.array(mats, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected (..., k, k) array, got shape {a.shape}")
    batch_shape = a.shape[:-2]
    k = a.shape[-1]
    a = a.reshape(-1, k, k)
    nb = a.shape[0]
    rows = np.arange(nb)
    sign = np.ones(nb, dtype=a.dtype)
    for col in range(k - 1):
        piv = np.argmax(np.abs(a[:, col:, col]), axis=1) + col
        swap = piv != col
        if np.any(swap):
            tmp = a[rows, col, :].copy()
            a[rows, col, :] = a[rows, piv, :]
            a[rows, piv, :] = tmp
            sign[swap] = -sign[swap]
        pivot = a[:, col, col]
        safe = np.where(pivot == 0, np.asarray(1, dtype=a.dtype), pivot)
        factors = a[:, col + 1 :, col] / safe[:, None]
        a[:, col + 1 :, col:] -= factors[:, :, None] * a[:, col, None, col:]
    det = sign * np.prod(np.diagonal(a, axis1=1, axis2=2), axis=1)
    return det.reshape(batch_shape)


def g_values(
    params: ModelParams,
    energies,
    parity: int,
    n_c: int = DEFAULT_N_C,
    dtype=np.float64,
    rescale: bool = True,
    tail_tolerance: float | None = None,
    pole_epsilon: float = POLE_EPSILON,
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the G-function on an array of energies.

    Returns
    -------
    (values, log_scales)
        ``values`` are the row-rescaled determinants and ``log_scales`` the
        accumulated ``sum(log(row_max))``; both have ``numpy.shape(energies)``.
        The unscaled determinant is ``values * exp(log_scales)``.
    """
    gmat = g_matrix(
        params,
        energies,
        parity,
        n_c=n_c,
        dtype=dtype,
        tail_tolerance=tail_tolerance,
        pole_epsilon=pole_epsilon,
    )
    # (k, k, ...) -> (..., k, k)
    a = np.moveaxis(gmat, (0, 1), (-2, -1))
    if rescale:
        rmax = np.max(np.abs(a), axis=-1)
        rmax = np.where(rmax == 0, np.asarray(1, dtype=a.dtype), rmax)
        a = a / rmax[..., None]
        log_scale = np.sum(np.log(rmax), axis=-1)
    else:
        log_scale = np.zeros(a.shape[:-2], dtype=a.dtype)
    return det_pivoted(a), log_scale


def _shift(params: ModelParams) -> float:
    """Energy shift ``x - E = (n_qubits * g)^2 / omega`` used for plots."""
    return (params.n_qubits * params.g) ** 2 / params.omega


@dataclass(frozen=True)
class GEvaluation:
    """One G-function evaluation.

    Attributes
    ----------
    energy:
        The evaluation energy ``E``.
    shifted_energy:
        ``x = E + (n_qubits * g)^2 / omega``, the axis on which frame
        baselines become ``x_n^{(m)} = n + (n_qubits^2 - 4 m^2) g^2 / omega``.
    parity:
        Sector label, +1 or -1.
    value:
        Row-rescaled determinant (sign-true; zero iff the G-function is).
    log_scale:
        ``sum(log(row_max))`` removed by rescaling.
    nearest_pole_distance:
        Distance from ``energy`` to the closest pole of this sector.
    """

    energy: float
    shifted_energy: float
    parity: int
    value: float
    log_scale: float
    nearest_pole_distance: float


def g_value(
    params: ModelParams,
    energy: float,
    parity: int,
    n_c: int = DEFAULT_N_C,
    dtype=np.float64,
    rescale: bool = True,
    tail_tolerance: float | None = None,
    pole_epsilon: float = POLE_EPSILON,
) -> GEvaluation:
    """Evaluate the G-function at a single energy, with diagnostics."""
    e = float(energy)
    val, log_scale = g_values(
        params,
        e,
        parity,
        n_c=n_c,
        dtype=dtype,
        rescale=rescale,
        tail_tolerance=tail_tolerance,
        pole_epsilon=pole_epsilon,
    )
    poles = pole_set(params, parity, e_max=e + 2.0 * params.omega)
    return GEvaluation(
        energy=e,
        shifted_energy=e + _shift(params),
        parity=validate_parity(parity),
        value=float(val),
        log_scale=float(log_scale),
        nearest_pole_distance=float(poles.nearest_distance(e)),
    )
