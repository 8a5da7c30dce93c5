"""Three-term recurrences for the extended-coherent-state coefficient tables.

Two families of tables are generated, both solving the same Schroedinger
projection row by row but in different bosonic frames:

* the **a-table** lives in the undisplaced frame.  Row ``m'`` holds the
  coefficients ``a_{m',n}`` of the unnormalized photon powers
  ``(d^dag)^n |0>``.  Rows with ``m' > 0`` carry free seeds at ``n = 0``;
  negative rows follow from the parity symmetry
  ``a_{-m',n} = parity * (-1)^n * a_{m',n}``, and the ``m' = 0`` row (even
  qubit numbers only) is slaved to ``m' = 1`` with simple poles at the
  parity-allowed integers ``E = n * omega``.

* the **c-table** lives in the displaced frame ``A = d + 2 m (g/omega)`` of
  one chosen ``m > 0``.  All rows ``m' != m`` advance by a three-term
  recurrence; the frame row itself is slaved to its neighbours with poles
  at ``E = (n - 4 m^2 (g/omega)^2) * omega``.

Every table is generated for a batch of energies at once: the trailing axis
of each table matches ``numpy.shape(E)``, so a scalar ``E`` yields a plain
``(rows, n_c + 1)`` table.  ``dtype`` may be ``numpy.float64`` or
``numpy.longdouble``; the latter buys ~3 extra decimal digits of headroom
for large systems where the tables span many orders of magnitude.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, PoleError
from .model import G_MIN, ModelParams, validate_parity

__all__ = [
    "DEFAULT_N_C",
    "POLE_EPSILON",
    "positive_row_indices",
    "row_index",
    "a_table",
    "project_initial_c",
    "c_table",
]

#: Default truncation level for coefficient tables.
DEFAULT_N_C = 20

#: Half-width of the excluded neighbourhood around each pole energy.
POLE_EPSILON = 1e-8


def row_index(params: ModelParams, two_m: int) -> int:
    """Table row index of projection ``two_m`` (rows are ascending in m)."""
    params.check_two_m(two_m)
    return (two_m + params.n_qubits) // 2


def positive_row_indices(params: ModelParams) -> np.ndarray:
    """Row indices with ``m > 0``, ascending; length ``params.k``."""
    n = params.n_qubits
    return np.arange(n // 2 + 1, n + 1)


def _coupling_rows(params: ModelParams, dtype) -> tuple[np.ndarray, np.ndarray]:
    """Per-row couplings ``h_up[i] -> row i+1`` and ``h_dn[i] -> row i-1``.

    These are the reduced off-diagonal elements ``-(delta/omega)/2 * j_m^+-``
    with the boundary elements already zero.
    """
    n = params.n_qubits
    dr, _ = params.reduced()
    two_m = params.two_m_values.astype(np.int64)
    up4 = n * (n + 2) - two_m * (two_m + 2)
    dn4 = n * (n + 2) - two_m * (two_m - 2)
    h_up = -0.5 * dr * np.sqrt(np.maximum(up4, 0).astype(dtype)) / 2.0
    h_dn = -0.5 * dr * np.sqrt(np.maximum(dn4, 0).astype(dtype)) / 2.0
    return h_up, h_dn


def _check_g(params: ModelParams) -> float:
    """Reduced coupling, rejecting the degenerate small-g regime."""
    _, gr = params.reduced()
    if gr < G_MIN:
        raise ValueError(
            f"g/omega = {gr:g} is below g_min = {G_MIN:g}; the recurrence "
            "denominators carry 1/g factors, use the analytic g = 0 spectrum "
            "instead"
        )
    return gr


def _shape_for_rows(vec: np.ndarray, e_ndim: int) -> np.ndarray:
    """Append singleton axes so a per-row vector broadcasts over energies."""
    return vec.reshape(vec.shape + (1,) * e_ndim)


def a_table(
    params: ModelParams,
    energy,
    parity: int,
    seed,
    n_c: int = DEFAULT_N_C,
    dtype=np.float64,
    pole_epsilon: float = POLE_EPSILON,
) -> np.ndarray:
    """Generate the undisplaced-frame coefficient table ``a_{m',n}``.

    Parameters
    ----------
    energy:
        Energy (absolute units) or array of energies.
    parity:
        Z2 sector label, +1 or -1.
    seed:
        Length-``params.k`` values of ``a_{m',0}`` for the positive rows,
        ascending in ``m'``.  The table is linear in the seed.
    n_c:
        Photon truncation; levels ``0..n_c`` are generated.
    dtype:
        ``numpy.float64`` (default) or ``numpy.longdouble``.
    pole_epsilon:
        Rejection radius around the slaved-row poles (even qubit numbers
        only): parity-allowed integers ``E = n * omega``, ``n <= n_c``.

    Returns
    -------
    numpy.ndarray
        Shape ``(n_qubits + 1, n_c + 1) + numpy.shape(energy)``.  Row
        ``i`` corresponds to ``two_m = 2*i - n_qubits``.

    Raises
    ------
    PoleError
        If any energy falls within ``pole_epsilon`` of a slaved-row pole.
    ValueError
        If ``g/omega < g_min`` or the seed has the wrong length.
    """
    parity = validate_parity(parity)
    gr = _check_g(params)
    n = params.n_qubits
    n_c = int(n_c)
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    dtype = np.dtype(dtype).type

    er = np.asarray(energy, dtype=dtype) / dtype(params.omega)
    if not np.all(np.isfinite(er)):
        raise ValueError("energy must be finite")
    seed = np.asarray(seed, dtype=dtype)
    if seed.shape[0] != params.k:
        raise ValueError(f"seed must have length k = {params.k}, got {seed.shape}")

    even = n % 2 == 0
    if even:
        allowed = np.arange(0 if parity == 1 else 1, n_c + 1, 2)
        dist = np.abs(er[..., None] - allowed.astype(dtype))
        bad = dist < pole_epsilon
        if np.any(bad):
            raise PoleError(
                f"{int(np.count_nonzero(np.any(bad, axis=-1)))} energy value(s) "
                f"within {pole_epsilon:g} of a Fock-sector pole E = n*omega "
                f"(parity {parity:+d})"
            )

    pos = positive_row_indices(params)
    neg = n - pos  # mirror rows, same order as pos
    m_pos = _shape_for_rows((pos - n / 2.0).astype(dtype), er.ndim)
    h_up, h_dn = _coupling_rows(params, dtype)
    hup_pos = _shape_for_rows(h_up[pos], er.ndim)
    hdn_pos = _shape_for_rows(h_dn[pos], er.ndim)

    tab = np.zeros((n + 1, n_c + 1) + er.shape, dtype=dtype)
    tab[pos, 0] = _shape_for_rows(seed, er.ndim)
    tab[neg, 0] = parity * tab[pos, 0]
    i_mid = n // 2
    j_fac = dtype(np.sqrt(n * (n + 2)) / 2.0)  # sqrt(j(j+1))
    dr = dtype(params.delta / params.omega)
    if even and parity == 1:
        tab[i_mid, 0] = -tab[i_mid + 1, 0] * dr * 2.0 * j_fac / (2.0 * er)

    up = np.zeros((len(pos),) + er.shape, dtype=dtype)
    for lvl in range(n_c):
        # rows m' > 0 via the solved three-term recurrence
        if pos[-1] == n:
            up[:-1] = tab[pos[:-1] + 1, lvl]
            up[-1] = 0.0
        den = 2.0 * m_pos * dtype(lvl + 1) * dtype(gr)
        num = (er - lvl) * tab[pos, lvl] - hup_pos * up - hdn_pos * tab[pos - 1, lvl]
        nxt = num / den
        if lvl >= 1:
            nxt = nxt - tab[pos, lvl - 1] / dtype(lvl + 1)
        tab[pos, lvl + 1] = nxt
        # mirror rows by parity symmetry, then the slaved m' = 0 row
        sgn = parity * (1 if (lvl + 1) % 2 == 0 else -1)
        tab[neg, lvl + 1] = sgn * tab[pos, lvl + 1]
        if even and (1 if (lvl + 1) % 2 == 0 else -1) == parity:
            tab[i_mid, lvl + 1] = (
                -tab[i_mid + 1, lvl + 1] * dr * 2.0 * j_fac / (2.0 * (er - (lvl + 1)))
            )
    return tab


def project_initial_c(
    params: ModelParams,
    a_tab: np.ndarray,
    frame_two_m: int,
    tail_tolerance: float | None = None,
) -> np.ndarray:
    """Project the a-table onto the displaced vacuum of frame ``m``.

    The overlap ``<0_A | (d^dag)^nu | 0_d>`` for ``A = d + 2 m (g/omega)``
    is proportional to ``(-2 m g/omega)^nu``, so the frame-``m`` initial
    coefficients are the power sums::

        c_{m',0} = sum_nu a_{m',nu} * (-2 m g/omega)^nu .

    Proportionality constants common to all rows are dropped: G-function
    zeros are insensitive to them.

    Parameters
    ----------
    a_tab:
        Output of :func:`a_table`.
    frame_two_m:
        Frame label ``2*m`` with ``m > 0``.
    tail_tolerance:
        Optional bound: if the last retained term of any row's series
        exceeds ``tail_tolerance * |partial sum|``, raise
        :class:`ConvergenceError`.  Default ``None`` skips the check - the
        power sums are asymptotic in character (their terms eventually grow
        with ``nu`` away from eigenvalues), and zero *locations* converge
        long before the tails do.

    Returns
    -------
    numpy.ndarray
        Shape ``(n_qubits + 1,) + energy shape``: one value per row
        *including* the frame row for shape convenience.  The frame row's
        entry is not used downstream; :func:`c_table` replaces it with the
        slaved-row value.
    """
    two_m = params.check_two_m(frame_two_m)
    if two_m <= 0:
        raise ValueError(f"frame_two_m must be positive, got {two_m}")
    dtype = a_tab.dtype.type
    _, gr = params.reduced()
    n_lvl = a_tab.shape[1]
    z = dtype(-two_m * gr)  # -2 m g/omega with two_m = 2m
    powers = z ** np.arange(n_lvl, dtype=dtype)
    c0 = np.einsum("rn...,n->r...", a_tab, powers)
    if tail_tolerance is not None:
        last = np.abs(a_tab[:, n_lvl - 1]) * np.abs(z) ** (n_lvl - 1)
        bad = last > tail_tolerance * np.abs(c0)
        bad &= last > 0
        if np.any(bad):
            raise ConvergenceError(
                f"projection series tail exceeds tail_tolerance = "
                f"{tail_tolerance:g} on {int(np.count_nonzero(bad))} row/energy "
                f"entries (frame two_m = {two_m})"
            )
    return c0


def c_table(
    params: ModelParams,
    energy,
    initial_c: np.ndarray,
    frame_two_m: int,
    n_c: int = DEFAULT_N_C,
    pole_epsilon: float = POLE_EPSILON,
) -> np.ndarray:
    """Generate the frame-``m`` coefficient table ``c_{m',n}``.

    Parameters
    ----------
    energy:
        Energy (absolute units) or array; must match the trailing shape of
        ``initial_c``.
    initial_c:
        Level-0 values per row, as returned by :func:`project_initial_c`
        (its dtype fixes the working precision here).
    frame_two_m:
        Displaced-frame label ``2*m``, ``m > 0``.
    n_c:
        Photon truncation; levels ``0..n_c`` are generated.
    pole_epsilon:
        Rejection radius around the frame-row poles
        ``E = (n - 4 m^2 (g/omega)^2) * omega``, ``n <= n_c``.

    Returns
    -------
    numpy.ndarray
        Shape ``(n_qubits + 1, n_c + 1) + numpy.shape(energy)``.

    Raises
    ------
    PoleError
        If any energy falls within ``pole_epsilon`` of a frame-row pole.
    """
    two_m = params.check_two_m(frame_two_m)
    if two_m <= 0:
        raise ValueError(f"frame_two_m must be positive, got {two_m}")
    gr = _check_g(params)
    n = params.n_qubits
    n_c = int(n_c)
    dtype = np.asarray(initial_c).dtype.type
    m = two_m / 2.0

    er = np.asarray(energy, dtype=dtype) / dtype(params.omega)
    offset = dtype(4.0 * m * m * gr * gr)
    pole_pos = np.arange(n_c + 1, dtype=dtype) - offset
    dist = np.abs(er[..., None] - pole_pos)
    if np.any(dist < pole_epsilon):
        raise PoleError(
            f"{int(np.count_nonzero(np.any(dist < pole_epsilon, axis=-1)))} "
            f"energy value(s) within {pole_epsilon:g} of a frame pole "
            f"E = n - 4 m^2 g^2 (two_m = {two_m})"
        )

    i_f = row_index(params, two_m)
    rows = np.arange(n + 1)
    other = rows[rows != i_f]
    m_row = (rows - n / 2.0).astype(dtype)
    dm = _shape_for_rows((m_row[other] - dtype(m)), er.ndim)  # m' - m, nonzero
    # E - n + 4 m (2 m' - m) g^2 constant piece per row (n enters in the loop)
    cross = _shape_for_rows(
        (4.0 * m * (2.0 * m_row[other] - m) * gr * gr).astype(dtype), er.ndim
    )
    h_up, h_dn = _coupling_rows(params, dtype)
    hup_o = _shape_for_rows(h_up[other], er.ndim)
    hdn_o = _shape_for_rows(h_dn[other], er.ndim)
    hup_f = dtype(h_up[i_f])
    hdn_f = dtype(h_dn[i_f])

    tab = np.zeros((n + 1, n_c + 1) + er.shape, dtype=dtype)
    tab[other, 0] = np.asarray(initial_c)[other]

    def frame_row(lvl: int) -> np.ndarray:
        num = 0.0
        if i_f + 1 <= n:
            num = hup_f * tab[i_f + 1, lvl]
        num = num + hdn_f * tab[i_f - 1, lvl]
        return num / (er - lvl + offset)

    tab[i_f, 0] = frame_row(0)

    up = np.zeros((len(other),) + er.shape, dtype=dtype)
    sel = other + 1 <= n
    for lvl in range(n_c):
        up[sel] = tab[other[sel] + 1, lvl]
        up[~sel] = 0.0
        den = 2.0 * dm * dtype(lvl + 1) * dtype(gr)
        num = (er - lvl + cross) * tab[other, lvl] - hup_o * up - hdn_o * tab[other - 1, lvl]
        nxt = num / den
        if lvl >= 1:
            nxt = nxt - tab[other, lvl - 1] / dtype(lvl + 1)
        tab[other, lvl + 1] = nxt
        tab[i_f, lvl + 1] = frame_row(lvl + 1)
    return tab
