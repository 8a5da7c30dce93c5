"""Dense-diagonalization reference: symmetry, residuals, and known limits."""

import numpy as np
import pytest
from rabi import rabi_spectrum

from dickeg import (
    DimensionCapError,
    ModelParams,
    build_hamiltonian,
    convergence_curve,
    diagonalize_fock,
    default_m_fock,
    ecs_eigenvalues,
    limit_spectrum_strong,
    limit_spectrum_weak,
    parity_matrix,
)


class TestHamiltonianAndParity:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_hermitian(self, n):
        p = ModelParams(n_qubits=n, delta=0.7, g=0.3)
        h = build_hamiltonian(p, m_fock=25)
        np.testing.assert_allclose(h, h.T, atol=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_parity_is_symmetry(self, n):
        p = ModelParams(n_qubits=n, delta=0.7, g=0.3)
        h = build_hamiltonian(p, m_fock=25)
        s = parity_matrix(p, m_fock=25)
        np.testing.assert_allclose(s @ s, np.eye(s.shape[0]), atol=1e-14)
        np.testing.assert_allclose(s @ h, h @ s, atol=1e-12)

    def test_diagonal_structure(self, p3):
        # photon energy on the diagonal, coupling 2 m' g on the photon
        # off-diagonal of each row block
        h = build_hamiltonian(p3, m_fock=6)
        width = 7
        for i, two_m in enumerate((-3, -1, 1, 3)):
            blk = h[i * width:(i + 1) * width, i * width:(i + 1) * width]
            np.testing.assert_allclose(np.diag(blk), np.arange(7.0), atol=1e-14)
            assert blk[0, 1] == pytest.approx(two_m * p3.g * 1.0)
            assert blk[1, 2] == pytest.approx(two_m * p3.g * np.sqrt(2.0))


class TestDiagonalizeFock:
    def test_eigen_residuals_and_labels(self, p3):
        spec = diagonalize_fock(p3, m_fock=60)
        h = build_hamiltonian(p3, m_fock=60)
        s = parity_matrix(p3, m_fock=60)
        assert np.all(np.diff(spec.eigenvalues) >= -1e-12)
        # spot-check the lowest dozen states
        for i in range(12):
            v = spec.eigenvectors[:, i]
            e = spec.eigenvalues[i]
            assert np.linalg.norm(h @ v - e * v) < 1e-10
            np.testing.assert_allclose(s @ v, spec.parities[i] * v, atol=1e-10)

    def test_sector_split(self, p3):
        spec = diagonalize_fock(p3, m_fock=60, need_vectors=False)
        both = np.sort(np.concatenate([spec.sector(1), spec.sector(-1)]))
        np.testing.assert_allclose(both, spec.eigenvalues, atol=0)

    def test_default_m_fock(self):
        small = ModelParams(n_qubits=6, delta=0.7, g=0.1)
        large = ModelParams(n_qubits=7, delta=0.7, g=0.1)
        assert default_m_fock(small) == 200
        assert default_m_fock(large) == 400

    def test_dimension_cap(self, p3):
        with pytest.raises(DimensionCapError):
            diagonalize_fock(p3, m_fock=50_000)

    def test_rabi_limit(self):
        delta, g = 0.7, 0.35
        p = ModelParams(n_qubits=1, delta=delta, g=g)
        spec = diagonalize_fock(p, m_fock=150, need_vectors=False)
        for parity in (1, -1):
            ref = rabi_spectrum(delta, g, -0.6, 3.0, parity, n_max=140)
            got = spec.sector(parity)
            got = got[(got > -0.6) & (got < 3.0)]
            assert got.size == len(ref)
            np.testing.assert_allclose(got, ref, atol=1e-9)


class TestAnalyticLimits:
    def test_weak_limit_matches_diagonalization(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=0.0)
        spec = diagonalize_fock(p, m_fock=40, need_vectors=False)
        levels = limit_spectrum_weak(p, e_max=3.0)
        want = sorted(lv.energy for lv in levels)
        got = spec.eigenvalues[spec.eigenvalues <= 3.0 + 1e-12]
        np.testing.assert_allclose(got[: len(want)], want, atol=1e-10)
        # parity labels agree level by level
        for lv in levels:
            sector = spec.sector(lv.parity)
            assert np.min(np.abs(sector - lv.energy)) < 1e-10

    def test_strong_limit_matches_diagonalization(self):
        p = ModelParams(n_qubits=3, delta=0.0, g=0.3)
        spec = diagonalize_fock(p, m_fock=60, need_vectors=False)
        levels = limit_spectrum_strong(p, e_max=2.0)
        for lv in levels:
            sector = spec.sector(lv.parity)
            assert np.min(np.abs(sector - lv.energy)) < 1e-9
        # displaced-oscillator degeneracy pattern: E = n - 4 m^2 g^2
        es = sorted({(lv.n, abs(lv.two_m)) for lv in levels})
        for n, a in es:
            assert any(
                abs(lv.energy - (n - a * a * 0.09)) < 1e-12
                for lv in levels
                if abs(lv.two_m) == a and lv.n == n
            )


class TestEcsBasis:
    def test_matches_fock_at_modest_cutoff(self, p3):
        spec = diagonalize_fock(p3, m_fock=200, need_vectors=False)
        for parity in (1, -1):
            got = ecs_eigenvalues(p3, 18, parity, n_states=3)
            np.testing.assert_allclose(got, spec.sector(parity)[:3], atol=1e-10)

    def test_variational_from_above(self, p3):
        # the variational estimate decreases monotonically toward truth
        e_by_cut = [ecs_eigenvalues(p3, c, 1, n_states=1)[0] for c in (4, 8, 12, 16)]
        assert all(b <= a + 1e-13 for a, b in zip(e_by_cut, e_by_cut[1:]))

    def test_faster_than_fock_at_strong_coupling(self):
        p = ModelParams.from_lambda(12, 0.7, 0.35)
        truth = diagonalize_fock(p, m_fock=300, need_vectors=False).sector(1)[0]
        ecs_err = abs(ecs_eigenvalues(p, 12, 1, n_states=1)[0] - truth)
        from dickeg.oracle import _sector_block

        blk, _, _ = _sector_block(p, 12, 1, "fock")
        fock_err = abs(np.linalg.eigvalsh(blk)[0] - truth)
        assert ecs_err < 1e-3 * fock_err


class TestConvergenceCurve:
    def test_eta_definition(self, p2):
        pts = convergence_curve(p2, 0, basis="ecs", cutoffs=[4, 6, 8], parity=1)
        assert np.isnan(pts[0].eta)
        assert pts[1].eta == pytest.approx(
            abs((pts[1].energy - pts[0].energy) / pts[1].energy)
        )

    def test_validation(self, p2):
        with pytest.raises(ValueError):
            convergence_curve(p2, 0, basis="chebyshev", cutoffs=[4, 6])
        with pytest.raises(ValueError):
            convergence_curve(p2, 0, basis="ecs", cutoffs=[6, 4])
        with pytest.raises(ValueError):
            convergence_curve(p2, 99999, basis="ecs", cutoffs=[4, 6], parity=1)

    def test_merged_parities(self, p2):
        # parity=None tracks the state's index in the merged spectrum
        pts = convergence_curve(p2, 1, basis="fock", cutoffs=[30, 40])
        merged = diagonalize_fock(p2, m_fock=40, need_vectors=False).eigenvalues
        assert pts[-1].energy == pytest.approx(merged[1], abs=1e-12)
