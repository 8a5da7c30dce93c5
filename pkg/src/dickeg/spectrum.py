"""Spectrum extraction: stable zeros, eigenstates, exceptional couplings.

The regular spectrum of one parity sector is the set of zeros of that
sector's G function.  Zeros are located by sign-change bracketing on a
dense energy grid inside each pole-free subinterval, refined by bisection
(never secant or Newton steps: G has poles and near-vertical segments
where an interpolating step can escape its bracket), and then *certified*
by the truncation-stability criterion: the same zero is located at
truncations ``n_c`` and ``n_c + 1`` and kept only when the relative shift
``|(E_nc - E_nc1) / E_nc1|`` is below ``stability_tolerance``.  Spurious
zeros - truncation artifacts - fail that test and characteristically
drift upward in energy as the truncation deepens, which is reported as a
diagnostic on the rejected entry.

Because the amount of cancellation in the underlying recurrences grows
with the truncation depth while the depth needed for convergence varies
from state to state (low-lying states converge shallow; states near the
top of the window need more levels), the scan climbs a small *ladder* of
truncations: a full scan runs at a base depth, and only candidates that
failed certification there are re-examined - on fine local grids around
the candidate - at successively deeper truncations.  A zero certified at
any rung stays certified; a candidate that never certifies is reported
as rejected.

Closed-form limits short-circuit the scan: for ``delta`` below
``DELTA_MIN`` the spectrum is the exact pole ladder ``E = n - 4 m^2 g^2``
(plus the decoupled ``m' = 0`` levels ``E = n`` for even systems), and
for ``g`` below ``G_MIN`` it is the decoupled-atom pattern
``E = n - delta * m_x``.  Such records carry ``n_c_used = 0`` and zero
residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dd import exceptional_dets_dd, g_values_dd, state_amplitudes_dd
from .errors import DegenerateNullSpaceError, PoleError
from .gfunction import pole_set
from .model import (
    DELTA_MIN,
    G_MIN,
    ModelParams,
    _as_two_m,
    lambda_crossover,
    validate_parity,
)
from .oracle import diagonalize_fock
from .recurrence import DEFAULT_N_C, POLE_EPSILON

__all__ = [
    "EigenState",
    "RejectedZero",
    "ScanReport",
    "SpectrumRecord",
    "find_exceptional",
    "lambda_crossover",
    "reconstruct_eigenstate",
    "scan_report",
    "scan_zeros",
]

#: Bisection stops once the bracket is narrower than this (in energy units).
ROOT_TOLERANCE = 1e-12

#: A zero is stable when its relative shift between truncations is below this.
STABILITY_TOLERANCE = 1e-8

#: Grid spacing that sets the default number of scan points per subinterval.
GRID_SPACING = 1e-3

#: Half-width of the fine re-scan window around an uncertified candidate.
ESCALATION_WINDOW = 5e-3

#: Grid spacing of the fine re-scan around an uncertified candidate.
ESCALATION_SPACING = 1e-4

#: Two singular values below this fraction of the largest means the null
#: space is effectively two-dimensional (a degeneracy) and no unique
#: eigenstate can be reconstructed.
DEGENERACY_RATIO = 1e-8


@dataclass(frozen=True)
class SpectrumRecord:
    """One certified eigenvalue of a parity sector.

    ``kind`` is ``"regular"`` for G-function zeros and ``"exceptional(m)"``
    (e.g. ``"exceptional(3/2)"``) for closed-form pole eigenvalues.
    ``stability_residual`` is the relative shift of the zero between the
    two truncations that certified it, ``|(E_nc - E_nc1)/E_nc1|``;
    analytic-limit records carry 0.  ``n_c_used`` is the shallower of the
    two truncations (0 for analytic limits).
    """

    energy: float
    parity: int
    kind: str
    stability_residual: float
    n_c_used: int


@dataclass(frozen=True)
class RejectedZero:
    """A sign change that failed certification at every ladder rung.

    ``energy`` is the bisected location at the deepest rung tried (the
    deeper-truncation position when both were found).  ``shifted_up``
    says whether the zero moved up in energy when the truncation deepened
    - the characteristic drift of a truncation artifact - and is ``None``
    when the zero had no partner at the other truncation.  ``reason`` is
    ``"unstable"``, ``"unpaired"``, or ``"tangency"`` (a sign-preserving
    dip of |G| flagged as a possible grazing zero; ``residual`` is then
    ``None`` and no multiplicity is claimed).
    """

    energy: float
    parity: int
    reason: str
    residual: float | None
    shifted_up: bool | None
    n_c_used: int


@dataclass(frozen=True)
class ScanReport:
    """Certified records plus everything the scan rejected, both sorted."""

    records: list[SpectrumRecord]
    rejected: list[RejectedZero]


@dataclass(frozen=True)
class EigenState:
    """A reconstructed eigenstate in the ordinary product basis.

    ``dicke_fock_amplitudes[i, nu]`` is the real amplitude on collective
    row ``i`` (ascending ``two_m = 2*i - n_qubits``) and photon number
    ``nu <= truncation``; the table is normalized to unit norm and obeys
    the sector symmetry ``amp[n - i, nu] = parity * (-1)^nu * amp[i, nu]``
    entrywise.  The overall sign makes the largest-magnitude entry
    positive.
    """

    energy: float
    parity: int
    dicke_fock_amplitudes: np.ndarray
    truncation: int

    def flat(self, m_fock: int) -> np.ndarray:
        """Embed into the flat product basis ``row * (m_fock + 1) + nu``."""
        n_rows, width = self.dicke_fock_amplitudes.shape
        if m_fock + 1 < width:
            raise ValueError("m_fock smaller than the reconstruction cutoff")
        out = np.zeros((n_rows, m_fock + 1))
        out[:, :width] = self.dicke_fock_amplitudes
        return out.reshape(-1)


# ---------------------------------------------------------------------------
# truncation ladder sizing
# ---------------------------------------------------------------------------

def _depth_cap(params: ModelParams) -> int:
    """Deepest truncation the wide arithmetic can certify at this coupling.

    Each recurrence level loses roughly ``log10(rho)`` digits to
    cancellation, ``rho = 1/(2 m_min g)``; with ~31 digits available and
    some slack reserved for the determinant, depths beyond ``26 /
    log10(rho)`` return noise instead of a sharper answer.
    """
    _, gr = params.reduced()
    m_min = 0.5 if params.n_qubits % 2 else 1.0
    rho = 1.0 / (2.0 * m_min * gr)
    if rho <= 2.0:
        return 44
    return max(6, int(26.0 / math.log10(rho)))


def _auto_n_c(params: ModelParams, e_hi: float) -> int:
    """Base truncation for a scan window reaching up to ``e_hi``.

    A state near the top of the window occupies about ``e_hi / omega``
    photons plus the displacement weight ``(2 j g)^2``, with a spread of
    the order of the square root of their product; two spreads plus a
    fixed margin keeps the truncation tail below the stability tolerance
    for the states the window can contain.
    """
    _, gr = params.reduced()
    beta2 = (params.n_qubits * gr) ** 2  # (2 j g)^2
    e_top = max(e_hi / params.omega, 0.0)
    need = e_top + beta2 + 2.0 * math.sqrt((e_top + beta2 + 1.0) * beta2) + 10.0
    return max(8, int(math.ceil(need)))


def _ladder(base: int, step: int, escalations: int, cap: int) -> list[int]:
    """Ascending distinct rung depths, base first, clipped to the cap."""
    rungs: list[int] = []
    for r in range(escalations + 1):
        v = min(base + r * step, cap)
        if not rungs or v > rungs[-1]:
            rungs.append(v)
    return rungs


def suggested_n_c(params: ModelParams, e_max: float) -> int:
    """Truncation depth the scanner would start from for this window.

    Useful for curve plotting and convergence studies that want to match
    the scan's own sizing without hand-tuning.
    """
    return min(_auto_n_c(params, float(e_max)), _depth_cap(params))


# ---------------------------------------------------------------------------
# closed-form limit routes
# ---------------------------------------------------------------------------

def _strong_limit_records(
    params: ModelParams, parity: int, e_lo: float, e_hi: float
) -> list[SpectrumRecord]:
    """Exact spectrum for delta = 0: displaced ladders plus m' = 0 levels."""
    w = params.omega
    _, gr = params.reduced()
    n = params.n_qubits
    out = []
    for two_m in range(2 - (n % 2), n + 1, 2):
        off = (two_m * gr) ** 2
        lvl = max(0, int(math.floor(e_lo / w + off)))
        while (lvl - off) * w <= e_hi:
            e = (lvl - off) * w
            if e >= e_lo:
                out.append(SpectrumRecord(e, parity, "regular", 0.0, 0))
            lvl += 1
    if n % 2 == 0:
        lvl = 0 if parity == 1 else 1
        lvl += 2 * max(0, int(math.ceil((e_lo / w - lvl) / 2)))
        while lvl * w <= e_hi:
            if lvl * w >= e_lo:
                out.append(SpectrumRecord(lvl * w, parity, "regular", 0.0, 0))
            lvl += 2
    out.sort(key=lambda r: r.energy)
    return out


def _weak_limit_records(
    params: ModelParams, parity: int, e_lo: float, e_hi: float
) -> list[SpectrumRecord]:
    """Exact spectrum for g = 0: photon ladder minus the J_x splittings.

    The flip operator acts on a ``J_x`` eigenstate ``|m_x>`` as
    ``(-1)^(j - m_x)``, so the sector of ``|m_x, nu>`` is
    ``(-1)^(nu + j - m_x)``.
    """
    w = params.omega
    n = params.n_qubits
    out = []
    for i in range(n + 1):  # m_x = i - j, so j - m_x = n - i
        e_atom = -params.delta * (i - n / 2.0)
        sector = 1 if (n - i) % 2 == 0 else -1
        lvl = max(0, int(math.ceil((e_lo - e_atom) / w)))
        while e_atom + lvl * w <= e_hi:
            if (1 if lvl % 2 == 0 else -1) * sector == parity:
                out.append(
                    SpectrumRecord(e_atom + lvl * w, parity, "regular", 0.0, 0)
                )
            lvl += 1
    out.sort(key=lambda r: r.energy)
    return out


# ---------------------------------------------------------------------------
# grid scanning machinery
# ---------------------------------------------------------------------------

def _segments(
    params: ModelParams,
    parity: int,
    e_lo: float,
    e_hi: float,
    exclusion: float,
) -> list[tuple[float, float]]:
    """Pole-free closed subintervals of [e_lo, e_hi].

    Poles are enumerated a little past ``e_hi`` so an exclusion zone
    hanging into the window from just outside is still honoured.
    """
    poles = pole_set(params, parity, e_hi + 2.0 * exclusion + 1.0).energies()
    segs: list[tuple[float, float]] = []
    lo = e_lo
    for p in poles:
        if p + exclusion <= e_lo:
            continue
        if p - exclusion >= e_hi:
            break
        hi = min(p - exclusion, e_hi)
        if hi - lo > 4.0 * ROOT_TOLERANCE:
            segs.append((lo, hi))
        lo = max(lo, p + exclusion)
    if e_hi - lo > 4.0 * ROOT_TOLERANCE:
        segs.append((lo, e_hi))
    return segs


def _segment_grid(seg: tuple[float, float], override: int | None) -> np.ndarray:
    lo, hi = seg
    if override is not None:
        pts = max(8, override)
    else:
        pts = max(8, int(math.ceil((hi - lo) / GRID_SPACING)))
    return np.linspace(lo, hi, pts + 1)


def _bisect_batched(params, parity, n_c, jobs, root_tolerance):
    """Refine sign-change brackets by bisection, batched over jobs.

    ``jobs`` is a list of ``(t_index, lo, hi, sign_lo)`` where ``t_index``
    selects the truncation (0: ``n_c``, 1: ``n_c + 1``).  Returns the
    final midpoints in job order.
    """
    if not jobs:
        return []
    t_idx = np.array([j[0] for j in jobs])
    lo = np.array([j[1] for j in jobs])
    hi = np.array([j[2] for j in jobs])
    s_lo = np.array([j[3] for j in jobs])
    sel = (t_idx, np.arange(len(jobs)))
    while True:
        width = hi - lo
        if np.all(width < root_tolerance):
            break
        mid = 0.5 * (lo + hi)
        vals, _ = g_values_dd(params, mid, parity, n_c=n_c, pair=True)
        s_mid = np.sign(vals[sel])
        same = s_mid == s_lo
        lo = np.where(same, mid, lo)
        s_lo = np.where(same, s_mid, s_lo)
        hi = np.where(same, hi, mid)
    return list(0.5 * (lo + hi))


def _scan_grids(params, parity, n_c, grids, root_tolerance):
    """Locate zeros of both truncations on the given grids.

    Returns ``(roots0, roots1, tangency_energies)``: sorted zero lists
    for truncations ``n_c`` and ``n_c + 1``, and grid points where |G|
    dips sharply without a sign change (possible grazing zeros).
    """
    jobs = []
    tangency: list[float] = []
    for pts in grids:
        vals, logs = g_values_dd(params, pts, parity, n_c=n_c, pair=True)
        for t in range(2):
            v = vals[t]
            sgn = np.sign(v)
            flips = np.nonzero(sgn[1:] * sgn[:-1] < 0)[0]
            for ix in flips:
                jobs.append((t, pts[ix], pts[ix + 1], sgn[ix]))
            if t == 1 and pts.size >= 5:
                lg = np.log(np.abs(v) + 1e-300) + logs[t]
                interior = np.arange(1, pts.size - 1)
                dips = interior[
                    (lg[interior] < lg[interior - 1])
                    & (lg[interior] < lg[interior + 1])
                    & (lg[interior] < np.median(lg) - 6.0 * math.log(10.0))
                    & (sgn[interior - 1] * sgn[interior] > 0)
                    & (sgn[interior] * sgn[interior + 1] > 0)
                ]
                tangency.extend(pts[d] for d in dips)
    roots = _bisect_batched(params, parity, n_c, jobs, root_tolerance)
    r0 = sorted(r for (j, r) in zip(jobs, roots) if j[0] == 0)
    r1 = sorted(r for (j, r) in zip(jobs, roots) if j[0] == 1)
    return r0, r1, tangency


def _pair_roots(r0: list[float], r1: list[float]):
    """Mutually-nearest pairing of the two truncations' zero lists.

    Returns ``(pairs, lone0, lone1)`` with ``pairs`` a list of
    ``(e0, e1)``.  Zeros of a converged spectrum pair off one-to-one;
    artifacts typically appear in only one list.
    """
    pairs: list[tuple[float, float]] = []
    lone0: list[float] = []
    lone1 = set(range(len(r1)))
    arr1 = np.asarray(r1)
    for e0 in r0:
        if arr1.size == 0:
            lone0.append(e0)
            continue
        j = int(np.argmin(np.abs(arr1 - e0)))
        # mutual: e0 must also be the nearest r0 element to r1[j]
        back = min(r0, key=lambda x: abs(x - arr1[j]))
        if back == e0 and j in lone1:
            pairs.append((e0, float(arr1[j])))
            lone1.discard(j)
        else:
            lone0.append(e0)
    return pairs, lone0, [r1[j] for j in sorted(lone1)]


def _residual(e0: float, e1: float) -> float:
    den = abs(e1)
    if den == 0.0:
        return abs(e0 - e1)
    return abs(e0 - e1) / den


# ---------------------------------------------------------------------------
# the scan itself
# ---------------------------------------------------------------------------

def scan_report(
    params: ModelParams,
    parity: int,
    e_range: tuple[float, float],
    n_c: int | None = None,
    grid_per_subinterval: int | None = None,
    *,
    root_tolerance: float = ROOT_TOLERANCE,
    stability_tolerance: float = STABILITY_TOLERANCE,
    escalation_step: int = 3,
    max_escalations: int = 3,
    pole_epsilon: float = POLE_EPSILON,
) -> ScanReport:
    """Scan one parity sector for stable zeros; keep the rejects too.

    ``n_c`` sets the base (shallowest) truncation; by default it is sized
    from the window top and the coupling.  ``grid_per_subinterval``
    overrides the number of grid points per pole-free subinterval
    (minimum 8; the default scales with subinterval length so that grid
    steps are about ``GRID_SPACING``).

    Certification requires the same zero at truncations ``n_c`` and
    ``n_c + 1`` with relative shift below ``stability_tolerance``.
    Candidates failing at the base truncation are re-examined on fine
    local grids at up to ``max_escalations`` deeper rungs (spaced
    ``escalation_step`` apart, capped where the arithmetic runs out of
    digits); a zero certified at any rung is kept, with the rung's
    truncation recorded in ``n_c_used``.
    """
    parity = validate_parity(parity)
    e_lo, e_hi = (float(e_range[0]), float(e_range[1]))
    if not (np.isfinite(e_lo) and np.isfinite(e_hi)) or e_lo >= e_hi:
        raise ValueError("e_range must be a finite (low, high) pair")
    if grid_per_subinterval is not None and grid_per_subinterval < 8:
        raise ValueError("grid_per_subinterval must be at least 8")
    dr, gr = params.reduced()
    if dr < DELTA_MIN / params.omega:
        return ScanReport(_strong_limit_records(params, parity, e_lo, e_hi), [])
    if gr < G_MIN / params.omega:
        return ScanReport(_weak_limit_records(params, parity, e_lo, e_hi), [])

    cap = _depth_cap(params)
    base = min(n_c if n_c is not None else _auto_n_c(params, e_hi), cap)
    rungs = _ladder(base, escalation_step, max_escalations, cap)
    exclusion = max(10.0 * pole_epsilon, 1e-7)
    segs = _segments(params, parity, e_lo, e_hi, exclusion)
    if not segs:
        return ScanReport([], [])

    certified: list[SpectrumRecord] = []
    tangency_flags: list[float] = []

    def is_new(e: float) -> bool:
        # identity window for "same zero seen again": generous relative to
        # the stability tolerance because an uncertified sighting at one
        # rung can sit ~residual*|E| away from the certified position
        return all(
            abs(e - rec.energy) > 1e-7 * (1.0 + abs(e)) for rec in certified
        )

    # candidates: energy -> (residual | None, shifted_up | None, rung n_c)
    candidates: dict[float, tuple[float | None, bool | None, int]] = {}

    for rung_no, rung_nc in enumerate(rungs):
        if rung_no == 0:
            grids = [_segment_grid(s, grid_per_subinterval) for s in segs]
        else:
            if not candidates:
                break
            # merge overlapping candidate windows, then clip to segments
            intervals: list[list[float]] = []
            for e_c in sorted(candidates):
                lo, hi = e_c - ESCALATION_WINDOW, e_c + ESCALATION_WINDOW
                if intervals and lo <= intervals[-1][1]:
                    intervals[-1][1] = max(intervals[-1][1], hi)
                else:
                    intervals.append([lo, hi])
            grids = []
            for lo, hi in intervals:
                for s_lo, s_hi in segs:
                    a, b = max(lo, s_lo), min(hi, s_hi)
                    if b - a > 4.0 * ROOT_TOLERANCE:
                        pts = max(8, int(math.ceil((b - a) / ESCALATION_SPACING)))
                        grids.append(np.linspace(a, b, pts + 1))
            if not grids:
                break
        r0, r1, tang = _scan_grids(params, parity, rung_nc, grids, root_tolerance)
        if rung_no == 0:
            tangency_flags = tang
        pairs, lone0, lone1 = _pair_roots(r0, r1)
        new_candidates: dict[float, tuple[float | None, bool | None, int]] = {}
        for e0, e1 in pairs:
            res = _residual(e0, e1)
            if res < stability_tolerance:
                if is_new(e1):
                    certified.append(
                        SpectrumRecord(e1, parity, "regular", res, rung_nc)
                    )
            else:
                new_candidates[e1] = (res, e1 > e0, rung_nc)
        for e in lone0:
            new_candidates[e] = (None, None, rung_nc)
        for e in lone1:
            new_candidates[e] = (None, None, rung_nc)
        if rung_no == 0:
            candidates = {
                e: diag for e, diag in new_candidates.items() if is_new(e)
            }
        else:
            # keep a candidate alive only while it stays uncertified; carry
            # the freshest diagnostics for it
            survivors: dict[float, tuple[float | None, bool | None, int]] = {}
            for e_c, old_diag in candidates.items():
                if not is_new(e_c):
                    continue
                near = [
                    (e, d) for e, d in new_candidates.items()
                    if abs(e - e_c) <= ESCALATION_WINDOW
                ]
                if near:
                    e_new, diag = min(near, key=lambda t: abs(t[0] - e_c))
                    survivors[e_new] = diag
                else:
                    survivors[e_c] = old_diag
            candidates = survivors

    def is_stale(e: float, res: float | None) -> bool:
        # a failed sighting of a zero that certified at a deeper rung sits
        # within a few times its own inter-truncation shift of the
        # certified position; such entries are bookkeeping, not physics
        window = 1e-7 * (1.0 + abs(e))
        if res is not None:
            window = max(window, 4.0 * res * (1.0 + abs(e)))
        return any(abs(e - rec.energy) <= window for rec in certified)

    rejected = [
        RejectedZero(e, parity, "unstable" if res is not None else "unpaired",
                     res, up, used)
        for e, (res, up, used) in candidates.items()
        if not is_stale(e, res)
    ]
    rejected.extend(
        RejectedZero(e, parity, "tangency", None, None, rungs[0])
        for e in tangency_flags
        if is_new(e)
    )
    certified.sort(key=lambda r: r.energy)
    rejected.sort(key=lambda r: r.energy)
    return ScanReport(certified, rejected)


def scan_zeros(
    params: ModelParams,
    parity: int,
    e_range: tuple[float, float],
    n_c: int | None = None,
    grid_per_subinterval: int | None = None,
    **kwargs,
) -> list[SpectrumRecord]:
    """Certified stable zeros of one parity sector, ascending in energy.

    See :func:`scan_report` for the full machinery and keyword options;
    this convenience wrapper drops the rejected-zero diagnostics.
    """
    return scan_report(
        params, parity, e_range, n_c, grid_per_subinterval, **kwargs
    ).records


# ---------------------------------------------------------------------------
# eigenstate reconstruction
# ---------------------------------------------------------------------------

def _polish_zero(params, energy, parity, n_c, pole_epsilon):
    """Tighten a zero to float64 resolution by sign bisection."""
    width = 4.0 * ROOT_TOLERANCE
    for _ in range(4):
        lo, hi = energy - width, energy + width
        try:
            vals, _ = g_values_dd(params, np.array([lo, hi]), parity, n_c=n_c,
                                  pole_epsilon=pole_epsilon)
        except PoleError:
            return energy
        s_lo, s_hi = np.sign(vals[0]), np.sign(vals[1])
        if s_lo * s_hi < 0:
            break
        width *= 8.0
    else:
        return energy
    while hi - lo > 4.0 * np.spacing(max(abs(lo), abs(hi))):
        mid = 0.5 * (lo + hi)
        v, _ = g_values_dd(params, np.array([mid]), parity, n_c=n_c,
                           pole_epsilon=pole_epsilon)
        if np.sign(v[0]) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reconstruct_eigenstate(
    params: ModelParams,
    record: SpectrumRecord,
    *,
    extra_levels: int = 8,
    degeneracy_ratio: float = DEGENERACY_RATIO,
) -> EigenState:
    """Normalized product-basis eigenstate at a certified regular zero.

    The zero is first re-bisected to float64 resolution (the seed vector
    inherits the energy's accuracy), the near-null seed vector of the G
    matrix is refined in wide arithmetic, and the seeded recurrence tables
    are converted to ordinary-Fock amplitudes.  Levels beyond the point
    where the amplitudes stop decaying - the cancellation noise floor -
    are cut to zero before normalization.

    Raises
    ------
    DegenerateNullSpaceError
        If the two smallest singular values of the G matrix are both
        below ``degeneracy_ratio`` times the largest: the zero sits on a
        (numerical) degeneracy and has no unique seed direction.
    ValueError
        If the record is not a regular zero.
    """
    if record.kind != "regular":
        raise ValueError("only regular zeros have reconstructible states")
    parity = validate_parity(record.parity)
    n_c = max(record.n_c_used, 8) + extra_levels
    n_c = min(n_c, _depth_cap(params) + extra_levels)
    energy = _polish_zero(params, record.energy, parity, n_c, POLE_EPSILON)
    amp, sigmas = state_amplitudes_dd(params, energy, parity, n_c=n_c)
    if sigmas.size >= 2 and sigmas[-2] / sigmas[0] < degeneracy_ratio:
        raise DegenerateNullSpaceError(
            f"two singular values below {degeneracy_ratio:g} of the largest "
            f"at E = {energy:.12g}; cannot isolate a single null direction"
        )
    # cut the noise tail: keep levels up to the first minimum of the
    # per-level magnitude, past which cancellation noise grows again
    t = np.max(np.abs(amp), axis=0)
    cut = int(np.argmin(t))
    amp = amp[:, : cut + 1]
    amp /= np.linalg.norm(amp)
    imax = np.unravel_index(np.argmax(np.abs(amp)), amp.shape)
    if amp[imax] < 0:
        amp = -amp
    return EigenState(
        energy=float(energy),
        parity=parity,
        dicke_fock_amplitudes=amp,
        truncation=cut,
    )


# ---------------------------------------------------------------------------
# exceptional couplings
# ---------------------------------------------------------------------------

def _exceptional_crossing_ok(params, two_m, level, g, depth, margin):
    """True when E = level - (two_m g)^2 stays clear of other poles at g."""
    gr = g / params.omega
    estar = level - (two_m * gr) ** 2
    n = params.n_qubits
    for tm2 in range(2 - (n % 2), n + 1, 2):
        if tm2 == two_m:
            continue
        for lp in range(depth + 1):
            if abs(estar - (lp - (tm2 * gr) ** 2)) < margin:
                return False
    if n % 2 == 0:
        for lp in range(0, depth + 1):
            if abs(estar - lp) < margin:
                return False
    return True


def find_exceptional(
    params: ModelParams,
    parity: int,
    m,
    n: int,
    g_range: tuple[float, float],
    g_step: float = 1e-3,
    *,
    verify_tolerance: float = 1e-6,
    m_fock: int | None = None,
) -> list[float]:
    """Couplings where the sector has the exact eigenvalue E = n - 4m^2 g^2.

    Sweeps ``g`` over ``g_range`` on a uniform grid, evaluating the
    determinant whose ``m``-frame row is replaced by the pole-lifting
    condition at energy ``E(g) = n - 4 m^2 g^2``, brackets its sign
    changes, bisects each in ``g``, and keeps a root only when

    * it is stable between truncations,
    * ``E(g)`` is not sitting on a *different* frame's pole there (the
      determinant flips sign across such crossings without a zero), and
    * an independent dense diagonalization at that coupling confirms an
      eigenvalue of this sector within ``verify_tolerance`` of ``E(g)``.

    ``m`` may be a :class:`DickeIndex` or an integer ``two_m``; it must be
    positive.  The returned couplings are ascending.  An empty list is a
    perfectly normal outcome - the condition is only met at isolated
    couplings, if at all.
    """
    parity = validate_parity(parity)
    two_m = _as_two_m(m)
    if two_m <= 0:
        raise ValueError("exceptional families require m > 0")
    if n < 0:
        raise ValueError("the photon level n must be non-negative")
    g_lo, g_hi = float(g_range[0]), float(g_range[1])
    if not (np.isfinite(g_lo) and np.isfinite(g_hi)) or not 0 < g_lo < g_hi:
        raise ValueError("g_range must satisfy 0 < low < high")
    if g_step <= 0:
        raise ValueError("g_step must be positive")

    grid = np.arange(g_lo, g_hi + 0.5 * g_step, g_step)
    roots: list[float] = []
    # the truncation requirement grows with displacement, so sweep in
    # chunks of equal auto-sized depth
    start = 0
    while start < grid.size - 1:
        probe = ModelParams(params.n_qubits, params.delta, grid[-1],
                            params.omega)
        n_c = min(_auto_n_c(ModelParams(params.n_qubits, params.delta,
                                        grid[start], params.omega), float(n)),
                  _depth_cap(probe))
        stop = grid.size
        for j in range(start + 1, grid.size):
            pj = ModelParams(params.n_qubits, params.delta, grid[j],
                             params.omega)
            if min(_auto_n_c(pj, float(n)), _depth_cap(pj)) != n_c:
                stop = j + 1  # keep one overlap point so brackets survive
                break
        seg = grid[start:stop]
        n_c = max(n_c, n + 2)
        keep = np.array([
            _exceptional_crossing_ok(params, two_m, n, g, n_c + 1, 1e-4)
            for g in seg
        ])
        dets, _ = exceptional_dets_dd(params, two_m, n, seg, parity, n_c=n_c,
                                      pair=True)
        sgn = np.sign(dets)
        jobs = []
        for t in range(2):
            flips = np.nonzero(
                (sgn[t, 1:] * sgn[t, :-1] < 0) & keep[1:] & keep[:-1]
            )[0]
            jobs.extend((t, seg[ix], seg[ix + 1], sgn[t, ix]) for ix in flips)
        # bisect both truncations at once; a genuine root appears in both
        # lists at nearly the same coupling
        if jobs:
            t_idx = np.array([j[0] for j in jobs])
            lo = np.array([j[1] for j in jobs])
            hi = np.array([j[2] for j in jobs])
            s_lo = np.array([j[3] for j in jobs])
            sel = (t_idx, np.arange(len(jobs)))
            while np.any(hi - lo > 1e-13):
                mid = 0.5 * (lo + hi)
                v, _ = exceptional_dets_dd(params, two_m, n, mid, parity,
                                           n_c=n_c, pair=True)
                s_m = np.sign(v[sel])
                same = s_m == s_lo
                lo = np.where(same, mid, lo)
                s_lo = np.where(same, s_m, s_lo)
                hi = np.where(same, hi, mid)
            mids = 0.5 * (lo + hi)
            roots0 = sorted(mids[t_idx == 0])
            roots1 = sorted(mids[t_idx == 1])
        else:
            roots0, roots1 = [], []
        for r1 in roots1:
            if not roots0:
                continue
            r0 = min(roots0, key=lambda x: abs(x - r1))
            if abs(r0 - r1) > 1e-7:
                continue
            if not _exceptional_crossing_ok(params, two_m, n, r1, n_c + 1,
                                            1e-6):
                continue
            roots.append(r1)
        start = stop - 1 if stop < grid.size else grid.size

    # independent verification: the sector spectrum must actually contain
    # the closed-form eigenvalue at each root
    verified = []
    for g in sorted(roots):
        pr = ModelParams(params.n_qubits, params.delta, g, params.omega)
        estar = (n - (two_m * (g / params.omega)) ** 2) * params.omega
        spec = diagonalize_fock(pr, m_fock=m_fock, need_vectors=False)
        sector = spec.sector(parity)
        if sector.size and np.min(np.abs(sector - estar)) < verify_tolerance:
            if not verified or abs(verified[-1] - g) > 1e-9:
                verified.append(float(g))
    return verified
