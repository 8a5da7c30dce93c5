"""Model parameters and Dicke-basis matrix elements.

The Hamiltonian treated throughout the package is the finite-size Dicke
model of ``n_qubits`` identical two-level atoms coupled to one bosonic mode::

    H = -delta * J_x + omega * d^dag d + 2 g (d^dag + d) J_z ,

acting on the maximal-spin sector ``j = n_qubits / 2``.  The collective
coupling is ``lam = g * sqrt(n_qubits)``; ``g`` is the canonical parameter
stored on :class:`ModelParams`.  The collective basis is ``|j, m>`` with
``m = -j, ..., j`` in integer steps; since ``m`` is half-integer for odd
``n_qubits``, indices are carried as the integer ``two_m = 2*m`` everywhere.

Displaced-frame conventions
---------------------------
For a frame labelled by ``m`` (one of the Dicke values), the displaced boson
operator is ``A = d + 2*m*(g/omega)``.  In row ``m'`` of frame ``m`` the
diagonal part of ``H`` becomes::

    omega * A^dag A  +  linear * (A^dag + A)  +  constant ,

with ``linear`` and ``constant`` given by :func:`diag_element_displaced`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DELTA_MIN",
    "G_MIN",
    "PARITIES",
    "DickeIndex",
    "ModelParams",
    "DisplacedDiagonal",
    "dicke_two_m_values",
    "ladder_element",
    "offdiag_element",
    "diag_element_displaced",
    "lambda_crossover",
    "validate_parity",
]

#: Qubit splittings below this are treated as exactly zero (analytic route).
DELTA_MIN = 1e-10

#: Couplings below this are treated as exactly zero (analytic route).  The
#: recurrence engine rejects ``0 < g < G_MIN`` since its denominators carry
#: ``1/g`` factors that are meaningless in that regime.
G_MIN = 1e-10

#: Allowed parity labels for the Z2 symmetry sectors.
PARITIES = (1, -1)


def validate_parity(parity: int) -> int:
    """Return ``parity`` if it is +1 or -1, else raise ``ValueError``."""
    if parity not in PARITIES:
        raise ValueError(f"parity must be +1 or -1, got {parity!r}")
    return int(parity)


@dataclass(frozen=True, order=True)
class DickeIndex:
    """A collective angular-momentum projection, stored as ``two_m = 2*m``.

    Using the doubled value keeps the index exactly representable for both
    integer (even ``n_qubits``) and half-integer (odd ``n_qubits``) spins.
    """

    two_m: int

    @property
    def m(self) -> float:
        """The projection quantum number ``m`` as a float."""
        return self.two_m / 2.0

    def __post_init__(self) -> None:
        if not isinstance(self.two_m, (int, np.integer)):
            raise TypeError(f"two_m must be an integer, got {self.two_m!r}")


def _as_two_m(idx: "DickeIndex | int") -> int:
    """Normalize a ``DickeIndex`` or raw integer ``two_m`` to an int."""
    if isinstance(idx, DickeIndex):
        return idx.two_m
    if isinstance(idx, (int, np.integer)):
        return int(idx)
    raise TypeError(f"expected DickeIndex or integer two_m, got {idx!r}")


def dicke_two_m_values(n_qubits: int) -> np.ndarray:
    """All ``two_m`` values ``-n_qubits, -n_qubits+2, ..., n_qubits``."""
    return np.arange(-n_qubits, n_qubits + 1, 2)


@dataclass(frozen=True)
class ModelParams:
    """Immutable physical parameters of one Dicke-model instance.

    Parameters
    ----------
    n_qubits:
        Number of two-level atoms ``N >= 1``.  The collective spin is
        ``j = N/2``.
    delta:
        Qubit level splitting ``delta >= 0``.
    g:
        Single-atom coupling ``g >= 0``.  The collective coupling is
        ``lam = g * sqrt(N)``; use :meth:`from_lambda` to construct from it.
    omega:
        Field frequency ``omega > 0`` (default 1, the natural energy unit).
    """

    n_qubits: int
    delta: float
    g: float
    omega: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.n_qubits, (int, np.integer)) or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ValueError(f"delta must be finite and >= 0, got {self.delta!r}")
        if not math.isfinite(self.g) or self.g < 0:
            raise ValueError(f"g must be finite and >= 0, got {self.g!r}")
        if not math.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "omega", float(self.omega))

    @classmethod
    def from_lambda(
        cls, n_qubits: int, delta: float, lam: float, omega: float = 1.0
    ) -> "ModelParams":
        """Construct from the collective coupling ``lam = g * sqrt(N)``."""
        return cls(n_qubits=n_qubits, delta=delta, g=lam / math.sqrt(n_qubits), omega=omega)

    @property
    def lam(self) -> float:
        """Collective coupling ``lam = g * sqrt(n_qubits)``."""
        return self.g * math.sqrt(self.n_qubits)

    @property
    def j(self) -> float:
        """Collective spin length ``j = n_qubits / 2``."""
        return self.n_qubits / 2.0

    @property
    def k(self) -> int:
        """Number of positive Dicke projections, ``ceil(n_qubits / 2)``.

        This is the dimension of the G-matrix: one row per frame ``m > 0``
        and one column per unit seed.
        """
        return (self.n_qubits + 1) // 2

    @property
    def two_m_values(self) -> np.ndarray:
        """All ``two_m`` values for this spin, ascending."""
        return dicke_two_m_values(self.n_qubits)

    def reduced(self) -> tuple[float, float]:
        """Dimensionless couplings ``(delta/omega, g/omega)``.

        All recurrence and G-function internals work in units of ``omega``;
        energies cross the public API in absolute units and are scaled at
        the boundary.
        """
        return self.delta / self.omega, self.g / self.omega

    def check_two_m(self, idx: "DickeIndex | int") -> int:
        """Validate that ``idx`` belongs to this spin; return ``two_m``."""
        two_m = _as_two_m(idx)
        if abs(two_m) > self.n_qubits or (two_m - self.n_qubits) % 2 != 0:
            raise ValueError(
                f"two_m={two_m} is not a projection of j={self.j} "
                f"(n_qubits={self.n_qubits})"
            )
        return two_m


def ladder_element(params: ModelParams, idx: "DickeIndex | int", direction: int) -> float:
    """Collective ladder matrix element ``j_m^+-``.

    Parameters
    ----------
    params:
        Model instance (only ``n_qubits`` matters here).
    idx:
        Row index ``m`` (as :class:`DickeIndex` or integer ``two_m``).
    direction:
        +1 for ``<m+1| J_+ |m>``, -1 for ``<m-1| J_- |m>``.

    Returns
    -------
    float
        ``sqrt(j(j+1) - m(m + direction))``, which vanishes automatically at
        the boundary rows ``m = +-j`` in the raising/lowering direction.
    """
    two_m = params.check_two_m(idx)
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction!r}")
    n = params.n_qubits
    # 4*(j(j+1) - m(m+dir)) = N(N+2) - two_m*(two_m + 2*dir), exactly in ints
    val4 = n * (n + 2) - two_m * (two_m + 2 * direction)
    if val4 < 0:  # one step past the boundary: element is zero by convention
        return 0.0
    return math.sqrt(val4) / 2.0


def offdiag_element(params: ModelParams, idx: "DickeIndex | int", direction: int) -> float:
    """Off-diagonal Hamiltonian element ``<m+dir| H |m> = -(delta/2) j_m^+-``.

    This is the only coupling between Dicke rows; it comes from
    ``-delta * J_x = -(delta/2)(J_+ + J_-)``.
    """
    return -0.5 * params.delta * ladder_element(params, idx, direction)


@dataclass(frozen=True)
class DisplacedDiagonal:
    """Affine part of a diagonal Hamiltonian block in a displaced frame.

    The full block is ``omega * A^dag A + linear * (A^dag + A) + constant``.
    """

    constant: float
    linear: float


def diag_element_displaced(
    params: ModelParams,
    idx_row: "DickeIndex | int",
    idx_frame: "DickeIndex | int",
) -> DisplacedDiagonal:
    """Diagonal block of ``H`` for row ``m'`` written in frame ``m``.

    Substituting ``d = A - 2*m*(g/omega)`` into
    ``omega * d^dag d + 2 m' g (d^dag + d)`` gives::

        omega * A^dag A + 2 (m'-m) g (A^dag + A) - 4 m (2 m'-m) g^2 / omega .

    Returns
    -------
    DisplacedDiagonal
        ``constant = -4 m (2 m'-m) g^2 / omega`` and
        ``linear = 2 (m'-m) g``.  In the eigenframe ``m' = m`` the linear
        term vanishes and the constant is the parabola offset ``-4 m^2 g^2
        / omega``.
    """
    two_mp = params.check_two_m(idx_row)
    two_m = params.check_two_m(idx_frame)
    g, w = params.g, params.omega
    constant = -two_m * (2 * two_mp - two_m) * g * g / w
    linear = (two_mp - two_m) * g
    return DisplacedDiagonal(constant=constant, linear=linear)


def lambda_crossover(n_qubits: int) -> float:
    """Coupling ``lam_c = sqrt(N/(N-1)) / 2`` where subinterval zero counts
    switch from the weak-coupling to the strong-coupling pattern.

    Undefined for ``n_qubits = 1`` (a single qubit has no subinterval
    structure to reorganize), so that raises ``ValueError``.
    """
    if n_qubits < 2:
        raise ValueError("lambda_crossover requires n_qubits >= 2")
    return 0.5 * math.sqrt(n_qubits / (n_qubits - 1.0))
