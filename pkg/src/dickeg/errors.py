"""Exception hierarchy for dickeg.

All package-specific failures derive from :class:`DickegError` so callers can
catch the whole family at once.  Bad arguments (wrong types, out-of-domain
indices, malformed configuration) raise the builtin ``ValueError`` /
``TypeError`` instead - those signal caller bugs, not numerical conditions.
"""

from __future__ import annotations


class DickegError(Exception):
    """Base class for all dickeg numerical/runtime errors."""


class PoleError(DickegError):
    """An energy argument lies within ``pole_epsilon`` of a G-function pole.

    Recurrence denominators vanish at pole energies, so coefficient tables
    and G-matrix entries are undefined there.  Scanning code is expected to
    exclude pole neighbourhoods up front; this error firing means a caller
    asked for an evaluation inside one.
    """


class ConvergenceError(DickegError):
    """A truncated series failed an explicitly requested tail bound."""


class CompletenessError(DickegError):
    """An eigenbasis expansion misses too much of the requested state.

    Raised when ``1 - sum(|<psi_k|psi_0>|^2)`` exceeds the completeness
    tolerance, i.e. the supplied basis (energy-filtered or too small a
    photon cutoff) cannot represent the initial state faithfully.
    """


class DegenerateNullSpaceError(DickegError):
    """The G-matrix null space at a zero is (numerically) more than 1-D.

    Eigenstate reconstruction needs an isolated null vector; two comparable
    small singular values mean the zero sits at (or numerically on top of)
    a degeneracy and the seed vector is not unique.
    """


class SolverFailureError(DickegError):
    """The interior-point SDP solver did not reach the requested tolerance."""


class DimensionCapError(DickegError):
    """A requested dense diagonalization exceeds the configured size cap."""
