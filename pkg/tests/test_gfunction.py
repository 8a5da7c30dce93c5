"""G-function evaluation: determinants, poles, scaling, and the N = 1 limit.

For one qubit the model is the quantum Rabi model, whose spectrum has a
classic scalar transcendental characterization; ``rabi.py`` next to this
file implements it from scratch.  The package's 1 x 1 determinant must
vanish at exactly the same energies.
"""

import numpy as np
import pytest
from rabi import rabi_spectrum

from dickeg import (
    GEvaluation,
    ModelParams,
    PoleError,
    g_matrix,
    g_value,
    g_values,
    pole_set,
)
from dickeg.gfunction import det_pivoted


def bisect_zeros(params, parity, e_lo, e_hi, n_c, grid=1200):
    """Simple sign-change bisection of the package G-function."""
    poles = pole_set(params, parity, e_max=e_hi + 1.0).energies()
    edges = np.concatenate(
        [[e_lo], np.sort(poles[(poles > e_lo) & (poles < e_hi)]), [e_hi]]
    )
    zeros = []
    for a, b in zip(edges[:-1], edges[1:]):
        xs = np.linspace(a + 1e-6, b - 1e-6, grid)
        vals, _ = g_values(params, xs, parity, n_c=n_c)
        sgn = np.sign(vals)
        for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
            lo, hi, flo = xs[i], xs[i + 1], vals[i]
            while hi - lo > 1e-13:
                mid = 0.5 * (lo + hi)
                fm, _ = g_values(params, mid, parity, n_c=n_c)
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
    return zeros


class TestDetPivoted:
    def test_matches_numpy_on_random_batches(self, rng):
        for k in (1, 2, 4, 6):
            mats = rng.standard_normal((7, k, k))
            np.testing.assert_allclose(
                det_pivoted(mats), np.linalg.det(mats), rtol=1e-10, atol=1e-12
            )

    def test_longdouble_supported(self, rng):
        mats = rng.standard_normal((3, 3, 3)).astype(np.longdouble)
        got = det_pivoted(mats)
        assert got.dtype == np.longdouble
        np.testing.assert_allclose(
            got.astype(float), np.linalg.det(mats.astype(float)), rtol=1e-10
        )

    def test_singular_matrix(self):
        m = np.ones((2, 2))
        assert det_pivoted(m) == pytest.approx(0.0, abs=1e-15)


class TestPoleSet:
    def test_two_frame_families_n3(self, p3):
        # g = 0.25: frame 2m = 1 gives poles n - 0.0625, frame 2m = 3
        # gives n - 0.5625
        ps = pole_set(p3, 1, e_max=3.0)
        es = np.sort(ps.energies())
        expect = np.sort(
            [n - 0.0625 for n in range(4)] + [n - 0.5625 for n in range(4)]
        )
        got_small = es[(es >= expect.min() - 1e-9) & (es <= 3.0)]
        np.testing.assert_allclose(
            got_small[: expect.size], expect, rtol=0, atol=1e-12
        )

    def test_even_n_includes_integer_poles(self, p2):
        # the slaved center row adds parity-allowed integers
        for parity, allowed in ((1, (0.0, 2.0)), (-1, (1.0, 3.0))):
            es = pole_set(p2, parity, e_max=3.5).energies()
            for e in allowed:
                assert np.min(np.abs(es - e)) < 1e-12

    def test_nearest_distance(self, p3):
        ps = pole_set(p3, 1, e_max=3.0)
        e = 0.5
        want = np.min(np.abs(ps.energies() - e))
        assert ps.nearest_distance(e) == pytest.approx(want)


class TestGValues:
    def test_scalar_matches_array(self, p3):
        es = np.array([0.2, 0.5, 1.1])
        vals, logs = g_values(p3, es, 1, n_c=15)
        for i, e in enumerate(es):
            v, s = g_values(p3, float(e), 1, n_c=15)
            assert v == pytest.approx(vals[i], rel=1e-13)
            assert s == pytest.approx(logs[i], rel=1e-13)

    def test_rescaled_equals_raw(self, p3):
        # value * exp(log_scale) must reproduce the unscaled determinant
        es = np.array([0.2, 0.5, 1.1])
        v1, s1 = g_values(p3, es, 1, n_c=12)
        v0, s0 = g_values(p3, es, 1, n_c=12, rescale=False)
        np.testing.assert_allclose(s0, 0.0)
        np.testing.assert_allclose(v1 * np.exp(s1), v0, rtol=1e-10)

    def test_pole_rejection(self, p3):
        with pytest.raises(PoleError):
            g_values(p3, 1.0 - 0.0625, 1, n_c=12)

    def test_g_matrix_shape(self, p3):
        gm = g_matrix(p3, np.zeros((2, 3)) + 0.4, 1, n_c=10)
        assert gm.shape == (2, 2, 2, 3)

    def test_g_value_diagnostics(self, p3):
        ev = g_value(p3, 0.4, -1, n_c=12)
        assert isinstance(ev, GEvaluation)
        # x = E + (N g)^2 / omega
        assert ev.shifted_energy == pytest.approx(0.4 + (3 * 0.25) ** 2)
        ps = pole_set(p3, -1, e_max=0.4 + 2.0)
        assert ev.nearest_pole_distance == pytest.approx(
            float(ps.nearest_distance(0.4))
        )
        assert ev.parity == -1
        assert np.isfinite(ev.value) and np.isfinite(ev.log_scale)


class TestRabiLimit:
    """N = 1 zeros against the independent scalar Rabi implementation."""

    @pytest.mark.parametrize("parity", [1, -1])
    def test_zero_sets_agree(self, parity):
        delta, g = 0.7, 0.35
        p = ModelParams(n_qubits=1, delta=delta, g=g)
        ours = bisect_zeros(p, parity, -0.5, 3.0, n_c=30)
        ref = rabi_spectrum(delta, g, -0.5, 3.0, parity, n_max=120)
        assert len(ours) == len(ref)
        np.testing.assert_allclose(ours, ref, rtol=0, atol=1e-9)

    def test_strong_coupling_zero_sets_agree(self):
        delta, g = 1.0, 0.8
        p = ModelParams(n_qubits=1, delta=delta, g=g)
        ours = bisect_zeros(p, 1, -1.2, 1.5, n_c=40)
        ref = rabi_spectrum(delta, g, -1.2, 1.5, 1, n_max=160)
        assert len(ours) == len(ref)
        np.testing.assert_allclose(ours, ref, rtol=0, atol=1e-8)
