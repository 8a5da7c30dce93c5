"""Coefficient recurrences checked against the dense Hamiltonian.

The central check: a table generated by the three-term recurrence,
rescaled entrywise by sqrt(nu!), is a *formal* eigenvector of the
product-basis Hamiltonian - ``(H - E) psi`` vanishes on every photon
component below the truncation edge, for any seed, any energy, any
parity.  That property is what makes the G-function construction exact,
and it is testable without knowing any eigenvalue.
"""

import numpy as np
import pytest
from scipy.special import gammaln

from dickeg import (
    DEFAULT_N_C,
    ConvergenceError,
    ModelParams,
    PoleError,
    a_table,
    build_hamiltonian,
    c_table,
    project_initial_c,
)
from dickeg.recurrence import positive_row_indices, row_index


def sqrt_factorials(n_c):
    return np.exp(0.5 * gammaln(np.arange(n_c + 1) + 1.0))


class TestRowIndexing:
    def test_row_index(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=0.25)
        assert row_index(p, -3) == 0
        assert row_index(p, 3) == 3
        assert row_index(p, 1) == 2

    def test_positive_rows(self):
        p3 = ModelParams(n_qubits=3, delta=0.7, g=0.25)
        p4 = ModelParams(n_qubits=4, delta=0.7, g=0.25)
        assert list(positive_row_indices(p3)) == [2, 3]  # two_m = 1, 3
        assert list(positive_row_indices(p4)) == [3, 4]  # two_m = 2, 4


class TestATableIsFormalEigenvector:
    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("parity", [1, -1])
    def test_interior_residual_vanishes(self, n, parity, rng):
        p = ModelParams(n_qubits=n, delta=0.8, g=0.3)
        n_c = 14
        seed = rng.standard_normal(p.k)
        energy = 0.7234  # nothing special about it - any non-pole works
        tab = a_table(p, energy, parity, seed, n_c=n_c)
        assert tab.shape == (n + 1, n_c + 1)

        psi = (tab * sqrt_factorials(n_c)).reshape(-1)
        h = build_hamiltonian(p, m_fock=n_c)
        resid = ((h - energy * np.eye(h.shape[0])) @ psi).reshape(n + 1, n_c + 1)
        interior = np.max(np.abs(resid[:, :n_c]))
        assert interior < 1e-12 * max(1.0, np.max(np.abs(psi)))

    def test_linearity_in_seed(self, p3, rng):
        s1 = rng.standard_normal(p3.k)
        s2 = rng.standard_normal(p3.k)
        t1 = a_table(p3, 0.3, 1, s1, n_c=10)
        t2 = a_table(p3, 0.3, 1, s2, n_c=10)
        t12 = a_table(p3, 0.3, 1, s1 + 2.0 * s2, n_c=10)
        np.testing.assert_allclose(t12, t1 + 2.0 * t2, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("n,parity", [(3, 1), (3, -1), (4, 1), (4, -1)])
    def test_mirror_symmetry(self, n, parity, rng):
        p = ModelParams(n_qubits=n, delta=0.8, g=0.3)
        tab = a_table(p, -0.45, parity, rng.standard_normal(p.k), n_c=12)
        signs = parity * (-1.0) ** np.arange(13)
        for i in range(n + 1):
            np.testing.assert_allclose(
                tab[n - i], signs * tab[i], rtol=1e-12, atol=1e-13
            )

    def test_energy_array_broadcast(self, p3, rng):
        seed = rng.standard_normal(p3.k)
        es = np.array([0.1, 0.3, 0.7])
        tab = a_table(p3, es, 1, seed, n_c=8)
        assert tab.shape == (4, 9, 3)
        for i, e in enumerate(es):
            np.testing.assert_allclose(
                tab[..., i], a_table(p3, e, 1, seed, n_c=8), rtol=1e-13
            )

    def test_longdouble_dtype(self, p3, rng):
        seed = rng.standard_normal(p3.k)
        t64 = a_table(p3, 0.37, 1, seed, n_c=10)
        tld = a_table(p3, 0.37, 1, seed, n_c=10, dtype=np.longdouble)
        assert tld.dtype == np.longdouble
        np.testing.assert_allclose(
            tld.astype(float), t64, rtol=1e-10, atol=1e-12
        )


class TestATableGuards:
    def test_wrong_seed_length(self, p3):
        with pytest.raises(ValueError):
            a_table(p3, 0.3, 1, [1.0, 0.0, 0.0], n_c=8)  # k = 2 for N = 3

    def test_tiny_coupling_rejected(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=1e-12)
        with pytest.raises(ValueError):
            a_table(p, 0.3, 1, [1.0, 0.0], n_c=8)

    def test_slaved_row_pole_even_n(self, p2):
        # even N: the center row divides by (E - n omega) on parity-allowed
        # integers; parity +1 owns even n, parity -1 odd n
        with pytest.raises(PoleError):
            a_table(p2, 2.0, 1, [1.0], n_c=8)
        a_table(p2, 2.0, -1, [1.0], n_c=8)  # fine in the other sector
        with pytest.raises(PoleError):
            a_table(p2, 3.0, -1, [1.0], n_c=8)
        a_table(p2, 3.0, 1, [1.0], n_c=8)

    def test_odd_n_has_no_integer_poles(self, p3):
        for e in (0.0, 1.0, 2.0):
            a_table(p3, e, 1, [1.0, 0.0], n_c=8)  # must not raise


class TestProjection:
    def test_power_sum_definition(self, p3, rng):
        seed = rng.standard_normal(p3.k)
        tab = a_table(p3, 0.3, 1, seed, n_c=10)
        _, gr = p3.reduced()
        for two_m in (1, 3):
            got = project_initial_c(p3, tab, two_m)
            want = tab @ (-two_m * gr) ** np.arange(11)
            np.testing.assert_allclose(got, want, rtol=1e-13)

    def test_nonpositive_frame_rejected(self, p3, rng):
        tab = a_table(p3, 0.3, 1, rng.standard_normal(p3.k), n_c=8)
        with pytest.raises(ValueError):
            project_initial_c(p3, tab, -1)

    def test_tail_tolerance_trips(self, p3, rng):
        # away from an eigenvalue the projection series does not settle,
        # so a demanding tail bound must raise
        tab = a_table(p3, 0.2917, 1, rng.standard_normal(p3.k), n_c=30)
        with pytest.raises(ConvergenceError):
            project_initial_c(p3, tab, 3, tail_tolerance=1e-30)
        project_initial_c(p3, tab, 3)  # no bound, no complaint


class TestCTable:
    def test_frame_pole_guard(self, p3):
        # frame two_m = 3 at g = 0.25: poles at E = n - 0.5625
        tab = a_table(p3, 0.4375 + 0.5, 1, [1.0, 0.0], n_c=8)
        c0 = project_initial_c(p3, tab, 3)
        with pytest.raises(PoleError):
            c_table(p3, 0.4375, c0, 3, n_c=8)

    def test_default_truncation_matches_explicit(self, p3, rng):
        seed = rng.standard_normal(p3.k)
        tab = a_table(p3, 0.3, 1, seed, n_c=DEFAULT_N_C)
        c0 = project_initial_c(p3, tab, 1)
        np.testing.assert_allclose(
            c_table(p3, 0.3, c0, 1),
            c_table(p3, 0.3, c0, 1, n_c=DEFAULT_N_C),
            rtol=0,
            atol=0,
        )
