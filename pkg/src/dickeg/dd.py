"""Vectorized double-double arithmetic and a high-precision G pipeline.

The coefficient tables behind the G-function cancel catastrophically for
larger systems: the summed series contain terms that grow roughly like
``(1/(2 m_min g))^n`` while the result stays modest, so at ``n_c = 20``
and twelve qubits roughly fifteen decimal digits are lost before the
determinant is even assembled.  Plain ``float64`` returns noise there and
even 80-bit ``longdouble`` only survives up to ``n_c`` of about 16.

This module provides the next rung: compensated *double-double* arithmetic
(a value is an unevaluated sum ``hi + lo`` of two ``float64``, giving about
31 significant digits) built on the classic error-free transforms, applied
elementwise to numpy arrays.  :func:`g_values_dd` mirrors the ``float``
pipeline in :mod:`dickeg.recurrence` / :mod:`dickeg.gfunction` exactly -
same recurrences, same row rescaling, same pivoted determinant - just in
the wider arithmetic, and with the independent seed columns, projection
frames, and (optionally) two neighbouring truncation depths stacked as
array axes so whole energy grids are processed in a handful of numpy
kernels per recurrence level.

Two details matter for actually realizing the extra digits:

* every constant that is not exactly representable (the ladder couplings
  with their square roots, products like ``2 m (n+1) g``) is itself
  prepared in double-double form - a constant rounded to ``float64``
  injects a 1e-16 relative perturbation per recurrence level, which the
  cancellation then amplifies exactly like arithmetic noise;
* row rescaling uses pure powers of two, so it is exact in the mantissa
  and only contributes to the reported ``log_scale``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PoleError
from .model import ModelParams, validate_parity
from .recurrence import DEFAULT_N_C, POLE_EPSILON, _check_g, positive_row_indices

__all__ = ["DDArray", "a_tables_dd", "exceptional_dets_dd", "g_matrix_dd",
           "g_values_dd", "null_vector_dd", "state_amplitudes_dd"]

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker's splitting constant
_CHUNK = 4096  # max energies processed per internal pass (memory bound)


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    # requires |a| >= |b| elementwise (always true after a plain add)
    s = a + b
    err = b - (s - a)
    return s, err


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DDArray:
    """An array of double-double numbers (elementwise ``hi + lo``).

    Supports the operations the recurrence pipeline needs: +, -, *, /,
    negation, indexing, and in-place slice assignment, all broadcasting
    like the underlying numpy arrays.  Operands may be other ``DDArray``
    instances, plain floats, or float64 arrays; a plain operand is treated
    as exact (lo = 0).
    """

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=np.float64)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=np.float64)

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, shape) -> "DDArray":
        return cls(np.zeros(shape), np.zeros(shape))

    @classmethod
    def sqrt_of(cls, value: float) -> "DDArray":
        """Double-double square root of an exactly representable value."""
        if value < 0:
            raise ValueError("sqrt_of requires a non-negative value")
        if value == 0:
            return cls(0.0)
        s = math.sqrt(value)
        root = cls(s)
        err = (cls(value) - root * root).hi / (2.0 * s)
        return cls(*_quick_two_sum(np.asarray(s), np.asarray(err)))

    def copy(self) -> "DDArray":
        return DDArray(self.hi.copy(), self.lo.copy())

    @property
    def shape(self):
        return self.hi.shape

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    # -- indexing ---------------------------------------------------------
    def __getitem__(self, key) -> "DDArray":
        return DDArray(self.hi[key], self.lo[key])

    def __setitem__(self, key, value) -> None:
        if isinstance(value, DDArray):
            self.hi[key] = value.hi
            self.lo[key] = value.lo
        else:
            self.hi[key] = value
            self.lo[key] = 0.0

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "DDArray":
        if isinstance(other, DDArray):
            return other
        return DDArray(np.asarray(other, dtype=np.float64))

    def __add__(self, other) -> "DDArray":
        o = self._coerce(other)
        s, e = _two_sum(self.hi, o.hi)
        e = e + (self.lo + o.lo)
        return DDArray(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __neg__(self) -> "DDArray":
        return DDArray(-self.hi, -self.lo)

    def __sub__(self, other) -> "DDArray":
        return self.__add__(-self._coerce(other))

    def __rsub__(self, other) -> "DDArray":
        return self._coerce(other).__sub__(self)

    def __mul__(self, other) -> "DDArray":
        o = self._coerce(other)
        p, e = _two_prod(self.hi, o.hi)
        e = e + (self.hi * o.lo + self.lo * o.hi)
        return DDArray(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DDArray":
        o = self._coerce(other)
        q1 = self.hi / o.hi
        r = self - o * DDArray(q1)
        q2 = (r.hi + r.lo) / o.hi
        return DDArray(*_quick_two_sum(q1, q2))

    def __rtruediv__(self, other) -> "DDArray":
        return self._coerce(other).__truediv__(self)

    def abs(self) -> "DDArray":
        neg = self.hi < 0
        return DDArray(np.where(neg, -self.hi, self.hi), np.where(neg, -self.lo, self.lo))


def _dd_where(mask, a: DDArray, b: DDArray) -> DDArray:
    return DDArray(np.where(mask, a.hi, b.hi), np.where(mask, a.lo, b.lo))


def _dd_det(rows: list[list[DDArray]]) -> DDArray:
    """Determinant of a k x k matrix of DD batch entries, partial pivoting."""
    k = len(rows)
    mat = [[rows[r][c].copy() for c in range(k)] for r in range(k)]
    batch_shape = mat[0][0].shape
    sign = np.ones(batch_shape)
    det = DDArray(np.ones(batch_shape))
    for col in range(k):
        # pivot: swap in the row with the largest |entry| in this column
        for r in range(col + 1, k):
            better = np.abs(mat[r][col].hi) > np.abs(mat[col][col].hi)
            if np.any(better):
                sign = np.where(better, -sign, sign)
                for c in range(col, k):
                    a, b = mat[col][c], mat[r][c]
                    mat[col][c] = _dd_where(better, b, a)
                    mat[r][c] = _dd_where(better, a, b)
        pivot = mat[col][col]
        safe = DDArray(np.where(pivot.hi == 0, 1.0, pivot.hi),
                       np.where(pivot.hi == 0, 0.0, pivot.lo))
        det = det * pivot
        for r in range(col + 1, k):
            f = mat[r][col] / safe
            for c in range(col + 1, k):
                mat[r][c] = mat[r][c] - f * mat[col][c]
    return DDArray(sign) * det


def _dd_solve(rows: list[list[DDArray]], rhs: list[DDArray]) -> list[DDArray]:
    """Solve a k x k DD system by Gaussian elimination, partial pivoting.

    A vanishing pivot is replaced by 1, so a (near-)singular system returns
    *some* finite solution - which is exactly what inverse iteration wants:
    the result is then dominated by the null direction.
    """
    k = len(rows)
    mat = [[rows[r][c].copy() for c in range(k)] for r in range(k)]
    b = [rhs[r].copy() for r in range(k)]
    for col in range(k):
        for r in range(col + 1, k):
            better = np.abs(mat[r][col].hi) > np.abs(mat[col][col].hi)
            if np.any(better):
                for c in range(col, k):
                    x, y = mat[col][c], mat[r][c]
                    mat[col][c] = _dd_where(better, y, x)
                    mat[r][c] = _dd_where(better, x, y)
                x, y = b[col], b[r]
                b[col] = _dd_where(better, y, x)
                b[r] = _dd_where(better, x, y)
        pivot = mat[col][col]
        safe = DDArray(np.where(pivot.hi == 0, 1.0, pivot.hi),
                       np.where(pivot.hi == 0, 0.0, pivot.lo))
        for r in range(col + 1, k):
            f = mat[r][col] / safe
            for c in range(col + 1, k):
                mat[r][c] = mat[r][c] - f * mat[col][c]
            b[r] = b[r] - f * b[col]
    out: list[DDArray | None] = [None] * k
    for r in range(k - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, k):
            acc = acc - mat[r][c] * out[c]
        pivot = mat[r][r]
        safe = DDArray(np.where(pivot.hi == 0, 1.0, pivot.hi),
                       np.where(pivot.hi == 0, 0.0, pivot.lo))
        out[r] = acc / safe
    return out


def g_values_dd(
    params: ModelParams,
    energies,
    parity: int,
    n_c: int = DEFAULT_N_C,
    pole_epsilon: float = POLE_EPSILON,
    pair: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Double-double evaluation of the G-function on an energy grid.

    Same contract as :func:`dickeg.gfunction.g_values` (row-rescaled
    determinant plus ``log_scale``), evaluated in ~31-digit arithmetic.
    Energies enter and leave as ``float64``.

    With ``pair=True`` the function evaluates truncations ``n_c`` *and*
    ``n_c + 1`` in one pass (they share all recurrence work) and returns
    arrays with a leading axis of length 2: ``values[0]`` is the ``n_c``
    result, ``values[1]`` the ``n_c + 1`` result.
    """
    parity = validate_parity(parity)
    gr_f = _check_g(params)
    n = params.n_qubits
    dr_f = params.delta / params.omega
    er_f = np.asarray(energies, dtype=np.float64) / params.omega
    if not np.all(np.isfinite(er_f)):
        raise ValueError("energy must be finite")
    eshape = er_f.shape
    depth = n_c + (1 if pair else 0)  # deepest recurrence level used
    even = n % 2 == 0

    # pole exclusion over every level the tables touch
    if even:
        allowed = np.arange(0 if parity == 1 else 1, depth + 1, 2, dtype=float)
        if allowed.size and np.any(np.abs(er_f[..., None] - allowed) < pole_epsilon):
            raise PoleError("energy within pole_epsilon of a Fock-sector pole")
    pos = [int(i) for i in positive_row_indices(params)]
    for i in pos:
        off = ((2 * i - n) * gr_f) ** 2  # 4 m^2 g^2
        dist = np.abs(er_f[..., None] - (np.arange(depth + 1) - off))
        if np.any(dist < pole_epsilon):
            raise PoleError(
                f"energy within pole_epsilon of a frame pole (two_m = {2*i-n})"
            )

    gr = DDArray(params.g / params.omega)
    flat = er_f.reshape(-1)
    vals = []
    logs = []
    for start in range(0, max(flat.size, 1), _CHUNK):
        chunk = flat[start:start + _CHUNK]
        if chunk.size == 0:
            chunk = flat
        v, l = _g_chunk_dd(params, DDArray(chunk), gr, parity, n_c, pair)
        vals.append(v)
        logs.append(l)
        if flat.size == 0:
            break
    values = np.concatenate(vals, axis=-1)
    log_scale = np.concatenate(logs, axis=-1)
    if pair:
        return values.reshape((2,) + eshape), log_scale.reshape((2,) + eshape)
    return values.reshape(eshape), log_scale.reshape(eshape)


def exceptional_dets_dd(
    params: ModelParams,
    two_m: int,
    level: int,
    g_values,
    parity: int,
    n_c: int = DEFAULT_N_C,
    pair: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Lifted-pole determinant for the ``m``-th exceptional family.

    At each coupling ``g`` in the batch the candidate energy is the pole
    energy ``E = level - 4 m^2 g^2`` (in units of omega); the ``m``-frame
    row of the G matrix - unavailable there because of the pole - is
    replaced by the condition that lifts the pole: the numerator of that
    frame's row recurrence, ``h+ c_{m+1,n*} + h- c_{m-1,n*}`` at the pole
    level ``n* = level``, must vanish.  Returns the determinant values and
    log scales, shaped like ``g_values`` (with a leading length-2 axis for
    truncations ``n_c``/``n_c+1`` when ``pair`` is set).

    The caller is responsible for keeping the candidate energies away from
    the *other* frames' poles (and, for even systems, the Fock poles); no
    pole screening is performed here.
    """
    parity = validate_parity(parity)
    if two_m <= 0:
        raise ValueError("exceptional families require two_m > 0")
    if not 0 <= level <= n_c:
        raise ValueError("level must satisfy 0 <= level <= n_c")
    params.check_two_m(two_m)
    g_arr = np.asarray(g_values, dtype=np.float64)
    if not np.all(np.isfinite(g_arr)) or np.any(g_arr <= 0):
        raise ValueError("g_values must be finite and positive")
    gshape = g_arr.shape
    flat = g_arr.reshape(-1) / params.omega
    vals = []
    logs = []
    for start in range(0, max(flat.size, 1), _CHUNK):
        chunk = flat[start:start + _CHUNK]
        if chunk.size == 0:
            chunk = flat
        gr = DDArray(chunk)
        er = DDArray(float(level)) - gr * gr * float(two_m * two_m)
        with np.errstate(all="ignore"):  # dead replaced lane may overflow
            v, l = _g_chunk_dd(params, er, gr, parity, n_c, pair,
                               replace_frame=two_m, replace_level=level)
        vals.append(v)
        logs.append(l)
        if flat.size == 0:
            break
    values = np.concatenate(vals, axis=-1)
    log_scale = np.concatenate(logs, axis=-1)
    if pair:
        return values.reshape((2,) + gshape), log_scale.reshape((2,) + gshape)
    return values.reshape(gshape), log_scale.reshape(gshape)


def a_tables_dd(
    params: ModelParams,
    energy: float,
    parity: int,
    n_c: int = DEFAULT_N_C,
    pole_epsilon: float = POLE_EPSILON,
) -> np.ndarray:
    """All unit-seed Fock-frame coefficient tables at one energy.

    Returns shape ``(k, n_qubits + 1, n_c + 1)`` float64: entry ``[s, i, nu]``
    is the table value for seed column ``s`` at Dicke row ``i`` and photon
    level ``nu``, computed in double-double arithmetic and rounded at the
    end.  The tables are linear in the seed, so a null-vector combination
    of these reconstructs the physical solution.
    """
    parity = validate_parity(parity)
    _check_g(params)
    n = params.n_qubits
    k = params.k
    er_f = float(energy) / params.omega
    if not np.isfinite(er_f):
        raise ValueError("energy must be finite")
    if n % 2 == 0:
        allowed = np.arange(0 if parity == 1 else 1, n_c + 1, 2, dtype=float)
        if allowed.size and np.any(np.abs(er_f - allowed) < pole_epsilon):
            raise PoleError("energy within pole_epsilon of a Fock-sector pole")

    rows = _a_stage_dd(params, np.array([er_f]), parity, n_c, keep_levels=True)
    out = np.empty((k, n + 1, n_c + 1))
    for lvl in range(n_c + 1):
        for i in range(n + 1):
            out[:, i, lvl] = rows[lvl][i].to_float()[:, 0]
    return out


def g_matrix_dd(
    params: ModelParams,
    energy: float,
    parity: int,
    n_c: int = DEFAULT_N_C,
    pole_epsilon: float = POLE_EPSILON,
) -> np.ndarray:
    """Row-rescaled G matrix at one energy, shape (k, k) float64.

    Row rescaling multiplies each row by a positive number, which leaves
    the right null space (and therefore zero locations and null vectors)
    unchanged while keeping entries near unit magnitude.
    """
    parity = validate_parity(parity)
    er = DDArray(np.array([float(energy) / params.omega]))
    gr = DDArray(params.g / params.omega)
    gmat = _g_chunk_dd(params, er, gr, parity, n_c, pair=False,
                       return_matrix=True)
    k = params.k
    out = np.empty((k, k))
    for r in range(k):
        for s in range(k):
            out[r, s] = gmat[r][s].to_float()[0, 0]
    return out


def null_vector_dd(
    params: ModelParams,
    energy: float,
    parity: int,
    n_c: int = DEFAULT_N_C,
) -> tuple[DDArray, np.ndarray]:
    """Near-null seed vector of the G matrix at (an approximate) zero.

    Returns ``(alpha, sigmas)``: a double-double unit seed vector of
    length k and the descending float64 singular values of the row-rescaled
    G matrix.  ``alpha`` starts from the float64 SVD null vector and is
    refined by two inverse-iteration steps carried out in double-double, so
    its accuracy is limited by the energy's distance from the true zero,
    not by float64: an ordinary float64 null vector leaves a relative
    1e-16 admixture of the non-null seed directions, whose exponentially
    growing tables would dominate the reconstructed amplitude tail levels
    sooner than necessary.
    """
    parity = validate_parity(parity)
    er = DDArray(np.array([float(energy) / params.omega]))
    gr = DDArray(params.g / params.omega)
    gmat = _g_chunk_dd(params, er, gr, parity, n_c, pair=False,
                       return_matrix=True)
    k = params.k
    flat = np.empty((k, k))
    for r in range(k):
        for s in range(k):
            flat[r, s] = gmat[r][s].to_float()[0, 0]
    sigmas = np.linalg.svd(flat, compute_uv=False)
    if k == 1:
        return DDArray(np.ones(1)), sigmas
    alpha_f = np.linalg.svd(flat)[2][-1]
    rows = [[gmat[r][s] for s in range(k)] for r in range(k)]
    alpha = [DDArray(np.atleast_1d(alpha_f[s])) for s in range(k)]
    for _ in range(2):  # inverse iteration: amplifies the null direction
        alpha = _dd_solve(rows, alpha)
        top = max(float(np.max(np.abs(a.hi))) for a in alpha)
        alpha = [a * (1.0 / top) for a in alpha]
    hi = np.array([a.hi.ravel()[0] for a in alpha])
    lo = np.array([a.lo.ravel()[0] for a in alpha])
    scale = 1.0 / math.sqrt(float(np.sum(hi * hi)))
    out = DDArray(hi, lo) * scale
    return out, sigmas


def state_amplitudes_dd(
    params: ModelParams,
    energy: float,
    parity: int,
    n_c: int = DEFAULT_N_C,
) -> tuple[np.ndarray, np.ndarray]:
    """Raw ordinary-Fock amplitudes of the eigenstate at a G zero.

    Returns ``(amp, sigmas)`` where ``amp[i, nu]`` (shape
    ``(n_qubits + 1, n_c + 1)``, unnormalized) is the product-basis
    amplitude on Dicke row ``i`` and photon level ``nu``, computed by
    seeding the coefficient recurrence with the refined null vector and
    scaling by sqrt(nu!), all in double-double.  ``sigmas`` are the
    singular values from :func:`null_vector_dd`.

    The trailing levels are dominated by cancellation noise once the
    physical amplitudes have decayed beneath it (the seed tables grow
    roughly like (1/(2 m_min g))^nu while the state decays); callers
    should truncate at the noise floor, which is visible as the level
    where ``max_i |amp[i, nu]|`` stops decreasing.
    """
    parity = validate_parity(parity)
    _check_g(params)
    n = params.n_qubits
    alpha, sigmas = null_vector_dd(params, energy, parity, n_c)
    er_f = np.array([float(energy) / params.omega])
    levels = _a_stage_dd(params, er_f, parity, n_c, keep_levels=True,
                         seed_alpha=alpha)
    amp = np.empty((n + 1, n_c + 1))
    sqf = DDArray(np.ones(1))
    for nu in range(n_c + 1):
        if nu:
            sqf = sqf * DDArray.sqrt_of(float(nu))
        for i in range(n + 1):
            row = levels[nu][i]
            amp[i, nu] = (DDArray(row.hi[0], row.lo[0]) * sqf).to_float()[0]
    return amp, sigmas


def _a_stage_dd(params, er_f, parity, n_c, keep_levels=False, seed_alpha=None):
    """Shared a-table recurrence; rows are DD arrays of shape (S, B).

    With the default unit seeds the S axis runs over the k independent
    seed columns; passing ``seed_alpha`` (a DD vector of k seed values)
    instead produces the single combined table, S = 1, with the
    cancellation between seed columns carried out in double-double.
    Returns the list of per-level row lists when ``keep_levels`` is true,
    otherwise the final two levels only (not used currently).
    """
    n = params.n_qubits
    k = params.k
    gr_f = params.g / params.omega
    dr_f = params.delta / params.omega
    nb = er_f.size
    even = n % 2 == 0

    er = DDArray(er_f)
    gr = DDArray(gr_f)
    two_m_all = np.arange(-n, n + 1, 2, dtype=np.int64)
    half_dr = -0.25 * dr_f
    h_up = [DDArray.sqrt_of(float(max(n * (n + 2) - t * (t + 2), 0))) * half_dr
            for t in two_m_all]
    h_dn = [DDArray.sqrt_of(float(max(n * (n + 2) - t * (t - 2), 0))) * half_dr
            for t in two_m_all]
    i_mid = n // 2
    center_fac = DDArray.sqrt_of(float(n * (n + 2))) * (-0.5 * dr_f)
    pos = [int(i) for i in positive_row_indices(params)]
    n_seed = k if seed_alpha is None else 1
    zero_sb = DDArray.zeros((n_seed, nb))

    seed0 = []
    for i in range(n + 1):
        row = DDArray.zeros((n_seed, nb))
        for s, i_pos in enumerate(pos):
            if seed_alpha is None:
                if i_pos == i:
                    row.hi[s] = 1.0
                if n - i_pos == i:
                    row.hi[s] = float(parity)
            else:
                val = DDArray(np.atleast_1d(seed_alpha.hi[s]),
                              np.atleast_1d(seed_alpha.lo[s]))
                if i_pos == i:
                    row[0] = val
                if n - i_pos == i:
                    row[0] = val * float(parity)
        seed0.append(row)
    if even and parity == 1:
        seed0[i_mid] = seed0[i_mid + 1] * center_fac / er

    levels = [seed0]
    prev, cur = None, seed0
    for lvl in range(n_c):
        nxt = [zero_sb.copy() for _ in range(n + 1)]
        for i in pos:
            two_m = 2 * i - n
            up = cur[i + 1] if i + 1 <= n else zero_sb
            num = (er - float(lvl)) * cur[i] - h_up[i] * up - h_dn[i] * cur[i - 1]
            row = num / (gr * float(two_m * (lvl + 1)))
            if prev is not None:
                row = row - prev[i] / float(lvl + 1)
            nxt[i] = row
            sgn = float(parity * (-1) ** (lvl + 1))
            nxt[n - i] = row * sgn
        if even and (-1) ** (lvl + 1) == parity:
            nxt[i_mid] = nxt[i_mid + 1] * center_fac / (er - float(lvl + 1))
        if keep_levels:
            levels.append(nxt)
        prev, cur = cur, nxt
    return levels if keep_levels else [prev, cur]


def _g_chunk_dd(params, er, gr, parity, n_c, pair, return_matrix=False,
                replace_frame=None, replace_level=0):
    """One stacked pass over a flat chunk.

    ``er`` (energies over omega) and ``gr`` (coupling over omega) arrive as
    ``DDArray``s so callers can prepare them exactly; either may carry the
    batch axis.  When ``replace_frame`` is a positive ``two_m``, the
    energies are understood to sit exactly on that frame's pole at photon
    level ``replace_level``; the frame's G-matrix row is replaced by the
    pole-lifting condition - the vanishing numerator of the frame-row
    recurrence, ``h+ c_{m+1,n*} + h- c_{m-1,n*}`` evaluated per seed from
    that frame's own table - and the frame row's later levels, which sit
    behind the pole division, are allowed to blow up harmlessly in their
    dead lane before the row is overwritten.
    """
    n = params.n_qubits
    k = params.k
    dr_f = params.delta / params.omega
    nt = 2 if pair else 1
    depth = n_c + (1 if pair else 0)
    even = n % 2 == 0
    nb = max(er.hi.size, gr.hi.size)

    # double-double constants (see module docstring)
    gsq = gr * gr
    two_m_all = np.arange(-n, n + 1, 2, dtype=np.int64)
    half_dr = -0.25 * dr_f  # exact: scaling by a power of two
    h_up = [DDArray.sqrt_of(float(max(n * (n + 2) - t * (t + 2), 0))) * half_dr
            for t in two_m_all]
    h_dn = [DDArray.sqrt_of(float(max(n * (n + 2) - t * (t - 2), 0))) * half_dr
            for t in two_m_all]
    i_mid = n // 2
    # center-row slaving factor: -delta * sqrt(j(j+1)) / (E - n)
    center_fac = DDArray.sqrt_of(float(n * (n + 2))) * (-0.5 * dr_f)

    pos = [int(i) for i in positive_row_indices(params)]
    frame_two_m = np.array([2 * i - n for i in pos], dtype=float)

    # ---- a-stage: all k seed columns as an (S, B) axis -------------------
    # rows: list over qubit index i of DDArray (S, B); sliding two-level
    # window, with the frame projections accumulated on the fly
    seed0 = []
    for i in range(n + 1):
        hi = np.zeros((k, nb))
        for s, i_pos in enumerate(pos):
            if i_pos == i:
                hi[s] = 1.0
            if n - i_pos == i:
                hi[s] = float(parity)
        seed0.append(DDArray(hi))
    if even and parity == 1:
        seed0[i_mid] = seed0[i_mid + 1] * center_fac / er

    # projection accumulators: per row, DDArray (F, S, B); z and its powers
    # carried per frame
    z = gr * (-frame_two_m[:, None, None])  # (F, 1, 1) or (F, 1, B)
    zpow = DDArray(np.ones((k, 1, 1)))
    c0 = [row * zpow for row in seed0]  # level-0 contribution, (F, S, B)
    c0_extra = None  # the extra nu = n_c + 1 term for the deeper truncation

    i_exc = (replace_frame + n) // 2 if replace_frame is not None else None

    zero_sb = DDArray.zeros((k, nb))
    prev, cur = None, seed0
    for lvl in range(depth):
        nxt = [zero_sb.copy() for _ in range(n + 1)]
        for i in pos:
            two_m = 2 * i - n
            up = cur[i + 1] if i + 1 <= n else zero_sb
            num = (er - float(lvl)) * cur[i] - h_up[i] * up - h_dn[i] * cur[i - 1]
            row = num / (gr * float(two_m * (lvl + 1)))
            if prev is not None:
                row = row - prev[i] / float(lvl + 1)
            nxt[i] = row
            sgn = float(parity * (-1) ** (lvl + 1))
            nxt[n - i] = row * sgn
        if even and (-1) ** (lvl + 1) == parity:
            nxt[i_mid] = nxt[i_mid + 1] * center_fac / (er - float(lvl + 1))
        zpow = zpow * z
        if lvl + 1 <= n_c:
            for i in range(n + 1):
                c0[i] = c0[i] + nxt[i] * zpow
        else:  # the single level beyond n_c, owned by the deeper truncation
            c0_extra = [nxt[i] * zpow for i in range(n + 1)]
        prev, cur = cur, nxt

    # stack the truncation axis: (T, F, S, B)
    if pair:
        c0_stacked = []
        for i in range(n + 1):
            deep = c0[i] + c0_extra[i]
            c0_stacked.append(DDArray(np.stack([c0[i].hi, deep.hi]),
                                      np.stack([c0[i].lo, deep.lo])))
    else:
        c0_stacked = [DDArray(c0[i].hi[None], c0[i].lo[None]) for i in range(n + 1)]

    # ---- c-stage: (T, F, S, B), frames as masked lanes --------------------
    offset_i = {i: gsq * float((2 * i - n) ** 2) for i in pos}  # 4 m^2 g^2
    frame_mask = {i: (frame_two_m == float(2 * i - n))[None, :, None, None] for i in pos}
    zero_tb = DDArray.zeros((nt, k, k, nb))

    def slave(rows: list[DDArray], i: int, lvl: int) -> DDArray:
        num = zero_tb
        if i + 1 <= n:
            num = num + h_up[i] * rows[i + 1]
        num = num + h_dn[i] * rows[i - 1]
        den = er - float(lvl) + offset_i[i]
        if i == i_exc:  # dead lane: keep the pole division finite
            bad = den.hi == 0.0
            den = DDArray(np.where(bad, 1.0, den.hi), np.where(bad, 0.0, den.lo))
        return num / den

    def numerator_at(rows: list[DDArray]) -> DDArray:
        # lane replace_frame of h+ c_{m+1} + h- c_{m-1}, shape (T, S, B)
        num = None
        if i_exc + 1 <= n:
            x = rows[i_exc + 1]
            num = h_up[i_exc] * DDArray(x.hi[:, r_exc], x.lo[:, r_exc])
        x = rows[i_exc - 1]
        dn_term = h_dn[i_exc] * DDArray(x.hi[:, r_exc], x.lo[:, r_exc])
        return dn_term if num is None else num + dn_term

    gamma = None
    r_exc = pos.index(i_exc) if i_exc is not None else None

    cur = [c0_stacked[i].copy() for i in range(n + 1)]
    for i in pos:  # frame lanes at level 0 are slaved, not free
        cur[i] = _dd_where(frame_mask[i], slave(cur, i, 0), cur[i])
    prev = None
    if i_exc is not None and replace_level == 0:
        gamma = numerator_at(cur)

    # G accumulators: per frame r, DDArray (T, S, B); w powers per frame
    w_r = [gr * float(2 * i - n) for i in pos]
    wpow = [DDArray(np.ones((nt, 1, 1))) for _ in pos]
    gacc = []
    for r, i_r in enumerate(pos):
        diff = cur[i_r][:, r] - cur[n - i_r][:, r] * float(parity)
        gacc.append(diff * wpow[r])

    for lvl in range(depth):
        nxt = [None] * (n + 1)
        for i in range(n + 1):
            two_mp = 2 * i - n
            up = cur[i + 1] if i + 1 <= n else zero_tb
            dn = cur[i - 1] if i - 1 >= 0 else zero_tb
            # 4 m (2 m' - m) g^2 and 2 (m' - m) (n + 1) g, integer parts exact
            cross_int = frame_two_m * (2.0 * two_mp - frame_two_m)
            dm_int = (two_mp - frame_two_m) * (lvl + 1)
            dm_safe = np.where(dm_int == 0.0, 1.0, dm_int)[None, :, None, None]
            cross = gsq * cross_int[None, :, None, None]
            num = (er + (cross - float(lvl))) * cur[i] - h_up[i] * up - h_dn[i] * dn
            row = num / (gr * dm_safe)
            if prev is not None:
                row = row - prev[i] / float(lvl + 1)
            nxt[i] = row
        for i in pos:  # overwrite the slaved frame lanes with same-level data
            nxt[i] = _dd_where(frame_mask[i], slave(nxt, i, lvl + 1), nxt[i])
        if i_exc is not None and lvl + 1 == replace_level:
            gamma = numerator_at(nxt)
        prev, cur = cur, nxt
        for r, i_r in enumerate(pos):
            wpow[r] = wpow[r] * w_r[r]
            diff = cur[i_r][:, r] - cur[n - i_r][:, r] * float(parity)
            contrib = diff * wpow[r]
            if lvl + 1 <= n_c:
                gacc[r] = gacc[r] + contrib
            else:  # level n_c + 1 belongs to the deeper truncation only
                gacc[r][1] = (gacc[r] + contrib)[1]

    # ---- assemble, rescale by powers of two, take the determinant --------
    gmat = [[gacc[r][:, s] for s in range(k)] for r in range(k)]  # (T, B) each
    if i_exc is not None:  # swap in the pole-lifting row, truncation-stacked
        for s in range(k):
            gmat[r_exc][s] = DDArray(gamma.hi[:, s], gamma.lo[:, s])
    log_scale = np.zeros((nt, nb))
    ln2 = math.log(2.0)
    for r in range(k):
        rmax = np.zeros((nt, nb))
        for s in range(k):
            rmax = np.maximum(rmax, np.abs(gmat[r][s].hi))
        expo = np.where(rmax == 0, 0.0, np.round(np.log2(np.where(rmax == 0, 1.0, rmax))))
        inv = np.exp2(-expo)
        for s in range(k):
            gmat[r][s] = gmat[r][s] * inv
        log_scale += expo * ln2

    if return_matrix:
        return gmat
    det = _dd_det(gmat)
    return det.to_float(), log_scale
