"""Small bosonic-mode utilities shared across modules.

Everything here operates on a truncated Fock space ``{|0>, ..., |size-1>}``.
The displacement matrix uses the exact closed form of the untruncated
operator's matrix elements (associated Laguerre polynomials), which is both
cheaper and more accurate than exponentiating a truncated generator.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

__all__ = ["annihilation", "number_op", "displacement_matrix"]


def annihilation(size: int) -> np.ndarray:
    """Annihilation operator ``d`` on a ``size``-dimensional Fock space."""
    return np.diag(np.sqrt(np.arange(1.0, size)), k=1)


def number_op(size: int) -> np.ndarray:
    """Number operator ``d^dag d`` on a ``size``-dimensional Fock space."""
    return np.diag(np.arange(size, dtype=float))


def displacement_matrix(beta: float, size: int) -> np.ndarray:
    """Fock-basis matrix of the displacement operator ``D(beta)``, real beta.

    ``D(beta) = exp(beta (d^dag - d))``, so ``D(beta)|0>`` is the coherent
    state of amplitude ``beta``.  Element ``[n, nu] = <n|D(beta)|nu>`` is::

        sqrt(min! / max!) * (sgn * beta)^|n-nu| * exp(-beta^2/2)
            * L_min^{(|n-nu|)}(beta^2) ,

    with ``sgn = +1`` for ``n >= nu`` and ``-1`` otherwise, ``min/max`` the
    smaller/larger of ``n, nu``, and ``L`` the associated Laguerre
    polynomial.  The prefactor is assembled in log space so large index
    offsets cannot overflow intermediates.

    Parameters
    ----------
    beta:
        Real displacement amplitude.
    size:
        Fock-space truncation; the result is ``size x size``.

    Returns
    -------
    numpy.ndarray
        The (approximately orthogonal) displacement matrix.  Columns are
        exact matrix elements of the untruncated operator, so column norms
        fall below 1 only when the displaced state leaks past ``size``.
    """
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    beta = float(beta)
    if beta == 0.0:
        return np.eye(size)

    n = np.arange(size)
    nn, vv = np.meshgrid(n, n, indexing="ij")  # nn = row (bra), vv = column (ket)
    lo = np.minimum(nn, vv)
    diff = np.abs(nn - vv)

    lag = eval_genlaguerre(lo, diff, beta * beta)
    log_pref = (
        diff * np.log(abs(beta))
        + 0.5 * (gammaln(lo + 1) - gammaln(lo + diff + 1))
        - 0.5 * beta * beta
    )
    sign_beta = np.where(nn >= vv, np.sign(beta), -np.sign(beta)) ** diff
    return sign_beta * np.exp(log_pref) * lag
