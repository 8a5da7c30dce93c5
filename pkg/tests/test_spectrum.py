"""Zero scanning, certification, eigenstate reconstruction, exceptional sweeps.

Every expected number here is cross-checked against the dense
diagonalization oracle inside the test itself - the scanner and the
oracle share no numerical machinery.
"""

import numpy as np
import pytest

from dickeg import (
    ModelParams,
    SpectrumRecord,
    build_hamiltonian,
    diagonalize_fock,
    find_exceptional,
    limit_spectrum_strong,
    limit_spectrum_weak,
    parity_matrix,
    reconstruct_eigenstate,
    scan_report,
    scan_zeros,
    suggested_n_c,
)


@pytest.fixture(scope="module")
def p3_oracle(p3):
    return diagonalize_fock(p3, m_fock=200, need_vectors=False)


class TestScanAgainstOracle:
    @pytest.mark.parametrize("parity", [1, -1])
    def test_one_to_one_in_window(self, p3, p3_oracle, parity):
        lo, hi = -0.8, 0.6
        recs = scan_zeros(p3, parity, (lo, hi))
        orc = p3_oracle.sector(parity)
        orc = orc[(orc >= lo) & (orc <= hi)]
        assert len(recs) == orc.size
        for r, e in zip(recs, orc):
            assert r.parity == parity
            assert r.kind == "regular"
            assert abs(r.energy - e) < 1e-9
            assert r.stability_residual < 1e-8

    def test_records_sorted_and_wrapper_consistent(self, p3):
        rep = scan_report(p3, 1, (-0.8, 0.6))
        energies = [r.energy for r in rep.records]
        assert energies == sorted(energies)
        assert [r.energy for r in scan_zeros(p3, 1, (-0.8, 0.6))] == energies

    def test_empty_window(self, p3):
        # no eigenvalue of either sector lives in this sliver
        assert scan_zeros(p3, 1, (-0.95, -0.90)) == []

    def test_validation(self, p3):
        with pytest.raises(ValueError):
            scan_report(p3, 1, (0.5, 0.5))
        with pytest.raises(ValueError):
            scan_report(p3, 1, (0.0, float("inf")))
        with pytest.raises(ValueError):
            scan_report(p3, 1, (0.0, 1.0), grid_per_subinterval=4)
        with pytest.raises(ValueError):
            scan_report(p3, 2, (0.0, 1.0))


class TestArtifactRejection:
    """A deliberately shallow base truncation plants a spurious candidate;
    certification must refuse it and keep the genuine level."""

    def test_shallow_scan_still_certifies_only_truth(self, p3, p3_oracle):
        rep = scan_report(p3, 1, (-0.8, 0.6), n_c=8)
        orc = p3_oracle.sector(1)
        orc = orc[(orc >= -0.8) & (orc <= 0.6)]
        assert len(rep.records) == orc.size
        for r, e in zip(rep.records, orc):
            assert abs(r.energy - e) < 1e-8
        # everything else the shallow grid turned up was rejected, not kept
        for z in rep.rejected:
            assert z.reason in ("unstable", "unpaired", "tangency")
            assert np.min(np.abs(orc - z.energy)) > 1e-6 or z.reason == "tangency"


class TestAnalyticRoutes:
    def test_strong_limit_scan(self):
        p = ModelParams(n_qubits=3, delta=0.0, g=0.3)
        spec = diagonalize_fock(p, m_fock=80, need_vectors=False)
        for parity in (1, -1):
            recs = scan_zeros(p, parity, (-1.0, 1.5))
            orc = spec.sector(parity)
            orc = orc[(orc >= -1.0) & (orc <= 1.5)]
            assert len(recs) == orc.size
            np.testing.assert_allclose(
                [r.energy for r in recs], orc, atol=1e-8
            )
            # analytic records advertise themselves: no truncation used
            assert all(r.n_c_used == 0 and r.stability_residual == 0.0 for r in recs)
        # and they agree with the closed-form level list
        levels = limit_spectrum_strong(p, e_max=1.5)
        want = sorted(lv.energy for lv in levels if lv.parity == 1 and lv.energy >= -1.0)
        got = [r.energy for r in scan_zeros(p, 1, (-1.0, 1.5))]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_weak_limit_scan(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=0.0)
        spec = diagonalize_fock(p, m_fock=60, need_vectors=False)
        for parity in (1, -1):
            recs = scan_zeros(p, parity, (-1.2, 1.5))
            orc = spec.sector(parity)
            orc = orc[(orc >= -1.2) & (orc <= 1.5)]
            np.testing.assert_allclose(
                [r.energy for r in recs], orc, atol=1e-10
            )
        levels = limit_spectrum_weak(p, e_max=1.5)
        want = sorted(lv.energy for lv in levels if lv.parity == -1 and lv.energy >= -1.2)
        got = [r.energy for r in scan_zeros(p, -1, (-1.2, 1.5))]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_near_weak_limit_continuity(self):
        # just above the analytic threshold the scanned spectrum must sit
        # close to the decoupled pattern
        p = ModelParams(n_qubits=3, delta=0.7, g=1e-4)
        recs = scan_zeros(p, 1, (-1.1, 0.0))
        levels = sorted(
            lv.energy for lv in limit_spectrum_weak(p, e_max=0.0)
            if lv.parity == 1 and lv.energy >= -1.1
        )
        assert len(recs) == len(levels)
        np.testing.assert_allclose(
            [r.energy for r in recs], levels, atol=1e-4
        )


class TestReconstruction:
    def test_eigenstate_invariants(self, p3, p3_oracle):
        rec = scan_zeros(p3, 1, (-0.8, 0.0))[0]
        st = reconstruct_eigenstate(p3, rec)
        amp = st.dicke_fock_amplitudes
        assert amp.shape[0] == 4
        assert np.linalg.norm(amp) == pytest.approx(1.0, abs=1e-12)
        # sector symmetry amp[N-i, nu] = parity (-1)^nu amp[i, nu]
        signs = (-1.0) ** np.arange(amp.shape[1])
        for i in range(4):
            np.testing.assert_allclose(
                amp[3 - i], signs * amp[i], rtol=0, atol=1e-10
            )
        # it really is an eigenvector of the dense Hamiltonian
        m_fock = 120
        v = st.flat(m_fock)
        h = build_hamiltonian(p3, m_fock)
        assert np.linalg.norm(h @ v - rec.energy * v) < 1e-6
        # largest entry is positive (sign convention)
        assert amp.ravel()[np.argmax(np.abs(amp))] > 0

    def test_parity_of_reconstruction(self, p3, p3_oracle):
        e0 = p3_oracle.sector(-1)[0]
        rec = scan_zeros(p3, -1, (e0 - 0.05, e0 + 0.05))[0]
        st = reconstruct_eigenstate(p3, rec)
        m_fock = 60
        v = st.flat(m_fock)
        s = parity_matrix(p3, m_fock)
        np.testing.assert_allclose(s @ v, -v, atol=1e-9)

    def test_flat_requires_room(self, p3):
        rec = scan_zeros(p3, 1, (-0.8, 0.0))[0]
        st = reconstruct_eigenstate(p3, rec)
        with pytest.raises(ValueError):
            st.flat(st.truncation - 1)

    def test_only_regular_zeros(self, p3):
        fake = SpectrumRecord(
            energy=0.4375, parity=1, kind="exceptional(3/2)",
            stability_residual=0.0, n_c_used=20,
        )
        with pytest.raises(ValueError):
            reconstruct_eigenstate(p3, fake)


class TestFindExceptional:
    def test_isolated_root_with_oracle_confirmation(self, p3):
        # family 2m = 3, photon level n = 0: E(g) = -9 g^2
        roots_minus = find_exceptional(p3, -1, 3, 0, (0.04, 0.08))
        roots_plus = find_exceptional(p3, 1, 3, 0, (0.04, 0.08))
        assert len(roots_minus) == 1
        assert roots_plus == []  # the sectors differ
        g0 = roots_minus[0]
        e0 = -9.0 * g0 * g0
        pe = ModelParams(n_qubits=3, delta=p3.delta, g=g0)
        spec = diagonalize_fock(pe, m_fock=200, need_vectors=False)
        assert np.min(np.abs(spec.sector(-1) - e0)) < 1e-6
        assert np.min(np.abs(spec.sector(1) - e0)) > 1e-2

    def test_m_type_checking(self, p3):
        with pytest.raises(TypeError):
            find_exceptional(p3, 1, 1.5, 0, (0.04, 0.08))
        with pytest.raises(ValueError):
            find_exceptional(p3, 1, -3, 0, (0.04, 0.08))
        with pytest.raises(ValueError):
            find_exceptional(p3, 1, 3, -1, (0.04, 0.08))
        with pytest.raises(ValueError):
            find_exceptional(p3, 1, 3, 0, (0.08, 0.04))


class TestSizing:
    def test_suggested_n_c(self, p3):
        shallow = suggested_n_c(p3, 0.5)
        deep = suggested_n_c(p3, 5.0)
        assert 0 < shallow <= deep
        # stronger coupling needs deeper tables
        strong = ModelParams(n_qubits=3, delta=0.7, g=0.6)
        assert suggested_n_c(strong, 0.5) > shallow
