"""A small dense semidefinite-programming solver for block LMI problems.

Solves problems of the form::

    minimize    c . y
    subject to  F_b(y) >= 0   for every block b,

where each block is an affine Hermitian-matrix function of the real
vector ``y``,

    F_b(y) = F0_b + unsvec( sum_t  sign_t * M_t @ y[slice_t] ),

with ``M_t`` an orthogonal linear map on the real ``svec`` coordinates
(or ``None`` for the identity).  This shape covers entanglement-witness
programs, where ``y`` concatenates a few Hermitian matrices and the maps
are partial transposes.

The algorithm is an infeasible-start primal-dual interior-point method
in the Nesterov-Todd scaling, with a Mehrotra-style adaptive centering
parameter ``sigma = (gap_aff/gap)^3`` (predictor step length only; no
second-order corrector - at these tiny block sizes a couple of extra
iterations are cheaper than the bookkeeping).  Starting from a strictly
feasible ``y0`` with dual slacks set to the block values keeps dual
feasibility exact throughout, so each iteration only drives the primal
residual and the complementarity gap to zero: it forms the Schur matrix
``H[i, j] = sum_b Tr(F_i W_b F_j W_b)`` from per-block symmetrized
Kronecker products of the scaling matrices and solves one dense
symmetric system per centering value.

All matrices are complex Hermitian internally; ``svec`` packs them into
real vectors isometrically (diagonal, then sqrt(2)-scaled real and
imaginary upper triangles) so Frobenius inner products become dot
products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailureError

__all__ = ["Block", "SdpSolution", "solve_sdp", "svec", "unsvec"]


def svec(a: np.ndarray) -> np.ndarray:
    """Isometric real packing of a Hermitian matrix (dimension d^2)."""
    d = a.shape[0]
    iu, ju = np.triu_indices(d, k=1)
    root2 = np.sqrt(2.0)
    return np.concatenate([
        np.real(np.diagonal(a)),
        root2 * np.real(a[iu, ju]),
        root2 * np.imag(a[iu, ju]),
    ])


def unsvec(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    iu, ju = np.triu_indices(d, k=1)
    n_off = iu.size
    a = np.zeros((d, d), dtype=complex)
    a[np.arange(d), np.arange(d)] = v[:d]
    upper = (v[d:d + n_off] + 1j * v[d + n_off:]) / np.sqrt(2.0)
    a[iu, ju] = upper
    a[ju, iu] = np.conj(upper)
    return a


def _svec_basis(d: int) -> np.ndarray:
    """All svec basis elements as a dense (d^2, d, d) tensor."""
    n = d * d
    basis = np.zeros((n, d, d), dtype=complex)
    for alpha in range(n):
        e = np.zeros(n)
        e[alpha] = 1.0
        basis[alpha] = unsvec(e, d)
    return basis


def _sym_kron(w: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Matrix of ``K[a, b] = Tr(E_a W E_b W)`` over the svec basis.

    Symmetric positive definite for Hermitian positive definite ``W``.
    """
    m = np.einsum("ij,njk,kl->nil", w, basis, w, optimize=True)
    flat_e = np.conj(basis.reshape(basis.shape[0], -1))
    flat_m = m.reshape(m.shape[0], -1)
    return np.real(flat_e @ flat_m.T)


def _sqrt_and_invsqrt(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian square root and inverse of a positive definite matrix."""
    e, v = np.linalg.eigh((a + a.conj().T) / 2.0)
    e = np.clip(e, 1e-300, None)
    root = (v * np.sqrt(e)) @ v.conj().T
    inv = (v / e) @ v.conj().T
    return root, inv


def _nt_scaling(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Nesterov-Todd point ``W = X^1/2 (X^1/2 S X^1/2)^-1/2 X^1/2``."""
    rx, _ = _sqrt_and_invsqrt(x)
    mid = rx @ s @ rx
    e, v = np.linalg.eigh((mid + mid.conj().T) / 2.0)
    e = np.clip(e, 1e-300, None)
    mid_isqrt = (v / np.sqrt(e)) @ v.conj().T
    w = rx @ mid_isqrt @ rx
    return (w + w.conj().T) / 2.0


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha in (0, 1] keeping ``x + alpha dx`` positive definite."""
    try:
        lo = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    m = np.linalg.solve(lo, dx)
    m = np.linalg.solve(lo, m.conj().T).conj().T
    lam = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
    if lam >= 0.0:
        return 1.0
    return min(1.0, -1.0 / lam)


@dataclass(frozen=True)
class Block:
    """One LMI block ``F0 + unsvec(sum sign * map @ y[slc])``.

    ``terms`` entries are ``(slc, map, sign)`` with ``slc`` a slice of
    ``y`` of length ``d^2`` and ``map`` a real orthogonal ``(d^2, d^2)``
    matrix on svec coordinates, or ``None`` for the identity.
    """

    f0: np.ndarray
    terms: tuple[tuple[slice, np.ndarray | None, float], ...]

    def value(self, y: np.ndarray) -> np.ndarray:
        d = self.f0.shape[0]
        v = np.zeros(d * d)
        for slc, mat, sign in self.terms:
            v += sign * (y[slc] if mat is None else mat @ y[slc])
        return self.f0 + unsvec(v, d)

    def collect(self, vec: np.ndarray, out: np.ndarray) -> None:
        """Accumulate the adjoint: ``out[i] += Tr(F_i B)`` with vec=svec(B)."""
        for slc, mat, sign in self.terms:
            out[slc] += sign * (vec if mat is None else mat.T @ vec)


@dataclass(frozen=True)
class SdpSolution:
    """Solver output: optimizer, objective, and convergence certificates."""

    y: np.ndarray
    objective: float
    duality_gap: float
    primal_residual: float
    status: str
    iterations: int


def solve_sdp(
    c: np.ndarray,
    blocks: list[Block],
    y0: np.ndarray,
    tolerance: float = 1e-7,
    max_iterations: int = 100,
) -> SdpSolution:
    """Run the interior-point iteration; see the module docstring.

    ``y0`` must make every block strictly positive definite (a strictly
    feasible start).

    Raises
    ------
    SolverFailureError
        If the iteration stalls before reaching at least near-optimal
        accuracy (gap and primal residual below ``sqrt(tolerance)``).
    """
    n_y = c.size
    dims = [b.f0.shape[0] for b in blocks]
    bases = {d: _svec_basis(d) for d in set(dims)}
    n_total = sum(dims)

    y = np.asarray(y0, dtype=float).copy()
    slack = []
    for b in blocks:
        s = b.value(y)
        if np.linalg.eigvalsh(s).min() <= 0.0:
            raise SolverFailureError("y0 is not strictly feasible")
        slack.append(s)
    xs = [np.eye(d, dtype=complex) for d in dims]

    status = "failed"
    it = 0
    gap = np.inf
    r_p_norm = np.inf
    for it in range(1, max_iterations + 1):
        gap = sum(np.real(np.trace(x @ s)) for x, s in zip(xs, slack))
        mu = gap / n_total
        a_vec = np.zeros(n_y)
        for b, x in zip(blocks, xs):
            b.collect(svec(x), a_vec)
        r_p_norm = float(np.linalg.norm(c - a_vec))
        if gap < tolerance and r_p_norm < tolerance:
            status = "optimal"
            break

        # scaling-dependent quantities, once per iteration
        ws = [_nt_scaling(x, s) for x, s in zip(xs, slack)]
        s_invs = [_sqrt_and_invsqrt(s)[1] for s in slack]
        g_vec = np.zeros(n_y)
        h = np.zeros((n_y, n_y))
        for b, w, s_inv, d in zip(blocks, ws, s_invs, dims):
            b.collect(svec(s_inv), g_vec)
            k = _sym_kron(w, bases[d])
            for slc_i, mat_i, sign_i in b.terms:
                ki = k if mat_i is None else mat_i.T @ k
                for slc_j, mat_j, sign_j in b.terms:
                    kij = ki if mat_j is None else ki @ mat_j
                    h[slc_i, slc_j] += (sign_i * sign_j) * kij
        h = (h + h.T) / 2.0
        try:
            h_chol = np.linalg.cholesky(h + 1e-13 * np.trace(h) / n_y
                                        * np.eye(n_y))
        except np.linalg.LinAlgError:
            break

        def newton(sigma_mu: float):
            # dual feasibility is exact (slacks track y), so the Newton
            # system reduces to H dy = sigma mu g - c
            rhs = sigma_mu * g_vec - c
            dy = np.linalg.solve(h_chol.conj().T, np.linalg.solve(h_chol, rhs))
            d_slack = []
            d_x = []
            for b, x, w, s_inv, d in zip(blocks, xs, ws, s_invs, dims):
                ds_vec = np.zeros(d * d)
                for slc, mat, sign in b.terms:
                    ds_vec += sign * (dy[slc] if mat is None else mat @ dy[slc])
                ds = unsvec(ds_vec, d)
                dx = sigma_mu * s_inv - x - w @ ds @ w
                d_x.append((dx + dx.conj().T) / 2.0)
                d_slack.append(ds)
            return dy, d_x, d_slack

        # predictor (sigma = 0) gauges achievable progress
        _, dx_aff, ds_aff = newton(0.0)
        alpha_aff = min(
            min(_max_step(x, dx) for x, dx in zip(xs, dx_aff)),
            min(_max_step(s, ds) for s, ds in zip(slack, ds_aff)),
        )
        gap_aff = sum(
            np.real(np.trace((x + alpha_aff * dx) @ (s + alpha_aff * ds)))
            for x, dx, s, ds in zip(xs, dx_aff, slack, ds_aff)
        )
        sigma = min(1.0, max(0.0, gap_aff / gap) ** 3)

        dy, dxs, dss = newton(sigma * mu)
        step = 0.98 * min(
            min(_max_step(x, dx) for x, dx in zip(xs, dxs)),
            min(_max_step(s, ds) for s, ds in zip(slack, dss)),
        )
        if step < 1e-12:
            break
        y = y + step * dy
        xs = [x + step * dx for x, dx in zip(xs, dxs)]
        slack = [s + step * ds for s, ds in zip(slack, dss)]

    if status != "optimal":
        if gap < np.sqrt(tolerance) and r_p_norm < np.sqrt(tolerance):
            status = "near_optimal"
        else:
            raise SolverFailureError(
                f"SDP stalled after {it} iterations: gap={gap:.3e}, "
                f"primal residual={r_p_norm:.3e}"
            )
    return SdpSolution(
        y=y,
        objective=float(c @ y),
        duality_gap=float(gap),
        primal_residual=r_p_norm,
        status=status,
        iterations=it,
    )
