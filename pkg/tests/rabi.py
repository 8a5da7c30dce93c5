"""Independent single-qubit (Rabi) reference, used only by the test suite.

For one qubit the model reduces to the quantum Rabi model
``H = -(delta/2) sigma_x + d^dag d + g (d^dag + d) sigma_z`` (our
``n_qubits = 1`` Hamiltonian, written with ``J = sigma/2`` and ``omega = 1``).
Its spectrum is given by zeros of a scalar transcendental function built
from one three-term recurrence - implemented here from scratch, sharing no
code with the package under test.

Conventions: ``x = E + g^2``, ``db = delta / 2``.  The coefficients::

    K_0 = 1,   (n+1) K_{n+1} = f_n K_n - K_{n-1},
    f_n = 2 g + ( n - x + db^2 / (x - n) ) / (2 g) ,

define, for each parity ``s = +-1``,

    G_s(x) = sum_n K_n * [ 1 + s * db / (x - n) ] * g^n .

Zeros of ``G_s`` over ``x`` in ``(n, n+1)`` intervals give eigenvalues
``E = x - g^2`` of parity sector ``s``; poles sit at integer ``x``.
"""

from __future__ import annotations

import numpy as np

__all__ = ["rabi_g", "rabi_spectrum"]


def rabi_g(energy: float, parity: int, delta: float, g: float, n_max: int = 120) -> float:
    """Scalar Rabi G-function at one energy (omega = 1 units)."""
    x = energy + g * g
    db = 0.5 * delta
    total = 0.0
    k_prev = 0.0
    k = 1.0
    gpow = 1.0
    for n in range(n_max + 1):
        total += k * (1.0 + parity * db / (x - n)) * gpow
        f = 2.0 * g + (n - x + db * db / (x - n)) / (2.0 * g)
        k, k_prev = (f * k - k_prev) / (n + 1), k
        gpow *= g
    return total


def rabi_spectrum(
    delta: float,
    g: float,
    e_min: float,
    e_max: float,
    parity: int,
    n_max: int = 120,
    grid: int = 2000,
    tol: float = 1e-13,
) -> list[float]:
    """All Rabi eigenvalues of one parity in ``[e_min, e_max]`` by bisection.

    Scans each pole-free interval of ``x`` on a fine grid and bisects every
    sign change of ``G_s``.
    """
    eps = 1e-9
    x_lo, x_hi = e_min + g * g, e_max + g * g
    # pole-free subintervals between consecutive integers
    edges = [x_lo] + [float(n) for n in range(int(np.floor(x_lo)) + 1, int(np.ceil(x_hi)))] + [x_hi]
    zeros: list[float] = []
    for a, b in zip(edges[:-1], edges[1:]):
        lo, hi = a + eps, b - eps
        if hi <= lo:
            continue
        xs = np.linspace(lo, hi, grid)
        vals = np.array([rabi_g(x - g * g, parity, delta, g, n_max) for x in xs])
        sgn = np.sign(vals)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            xa, xb = xs[i], xs[i + 1]
            fa = vals[i]
            while xb - xa > tol:
                xm = 0.5 * (xa + xb)
                fm = rabi_g(xm - g * g, parity, delta, g, n_max)
                if fa * fm <= 0:
                    xb = xm
                else:
                    xa, fa = xm, fm
            zeros.append(0.5 * (xa + xb) - g * g)
    return sorted(zeros)
