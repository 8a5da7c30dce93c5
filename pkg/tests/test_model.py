"""Parameters, collective-spin matrix elements, and the displaced diagonal."""

import math

import numpy as np
import pytest

from dickeg import (
    DickeIndex,
    DisplacedDiagonal,
    ModelParams,
    diag_element_displaced,
    dicke_two_m_values,
    ladder_element,
    lambda_crossover,
    offdiag_element,
)
from dickeg.model import validate_parity


class TestModelParams:
    def test_basic_construction_and_derived(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=0.25, omega=1.0)
        assert p.j == pytest.approx(1.5)
        assert p.k == 2  # ceil(N/2)
        assert p.lam == pytest.approx(0.25 * math.sqrt(3))

    def test_from_lambda_roundtrip(self):
        p = ModelParams.from_lambda(12, 0.7, 0.35)
        assert p.g == pytest.approx(0.35 / math.sqrt(12))
        assert p.lam == pytest.approx(0.35)

    def test_reduced_units(self):
        p = ModelParams(n_qubits=2, delta=1.4, g=0.5, omega=2.0)
        dr, gr = p.reduced()
        assert dr == pytest.approx(0.7)
        assert gr == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_qubits=0, delta=1.0, g=0.1),
            dict(n_qubits=-2, delta=1.0, g=0.1),
            dict(n_qubits=2, delta=-0.1, g=0.1),
            dict(n_qubits=2, delta=1.0, g=-0.1),
            dict(n_qubits=2, delta=1.0, g=0.1, omega=0.0),
            dict(n_qubits=2, delta=float("nan"), g=0.1),
            dict(n_qubits=2, delta=1.0, g=float("inf")),
        ],
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)

    def test_zero_delta_and_zero_g_allowed(self):
        ModelParams(n_qubits=3, delta=0.0, g=0.25)
        ModelParams(n_qubits=3, delta=0.7, g=0.0)

    def test_k_values(self):
        for n, k in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (12, 6)]:
            assert ModelParams(n_qubits=n, delta=1.0, g=0.1).k == k

    def test_check_two_m(self):
        p = ModelParams(n_qubits=3, delta=1.0, g=0.1)
        assert p.check_two_m(3) == 3
        assert p.check_two_m(-1) == -1
        with pytest.raises(ValueError):
            p.check_two_m(2)  # wrong parity for odd N
        with pytest.raises(ValueError):
            p.check_two_m(5)  # exceeds 2j


class TestDickeIndex:
    def test_two_m_values(self):
        assert list(dicke_two_m_values(3)) == [-3, -1, 1, 3]
        assert list(dicke_two_m_values(4)) == [-4, -2, 0, 2, 4]
        p = ModelParams(n_qubits=3, delta=1.0, g=0.1)
        assert list(p.two_m_values) == [-3, -1, 1, 3]

    def test_half_integer_projection(self):
        ix = DickeIndex(two_m=3)
        assert ix.m == pytest.approx(1.5)

    def test_non_integer_two_m_rejected(self):
        with pytest.raises(TypeError):
            DickeIndex(two_m=1.5)


class TestParity:
    def test_validate_parity(self):
        assert validate_parity(1) == 1
        assert validate_parity(-1) == -1
        with pytest.raises(ValueError):
            validate_parity(0)
        with pytest.raises(ValueError):
            validate_parity(2)


class TestLadder:
    """Collective raising/lowering elements against sqrt(j(j+1) - m(m+-1))."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
    def test_matches_angular_momentum_formula(self, n):
        p = ModelParams(n_qubits=n, delta=1.0, g=0.1)
        j = n / 2.0
        for two_m in dicke_two_m_values(n):
            m = two_m / 2.0
            for direction in (+1, -1):
                got = ladder_element(p, two_m, direction)
                inside = j * (j + 1) - m * (m + direction)
                want = math.sqrt(inside) if inside > 0 else 0.0
                assert got == pytest.approx(want, abs=1e-14)

    def test_boundary_vanishes(self):
        p = ModelParams(n_qubits=3, delta=1.0, g=0.1)
        assert ladder_element(p, 3, +1) == 0.0
        assert ladder_element(p, -3, -1) == 0.0

    def test_offdiag_element(self):
        p = ModelParams(n_qubits=3, delta=0.7, g=0.1)
        assert offdiag_element(p, 1, +1) == pytest.approx(
            -0.5 * 0.7 * ladder_element(p, 1, +1)
        )


class TestDisplacedDiagonal:
    """The displaced-frame diagonal against an explicit operator identity.

    In frame m the photon part of the row-m' diagonal must satisfy
    ``omega A^dag A + lin (A^dag + A) + const = omega d^dag d + 2 m' g (d^dag + d)``
    with ``A = d + (2m g / omega) I``, as operators on a truncated Fock
    space (top row/column discarded to avoid edge effects).
    """

    @pytest.mark.parametrize("n,frame_two_m", [(2, 2), (3, 1), (3, 3), (4, 2)])
    def test_operator_identity(self, n, frame_two_m):
        from dickeg.bosons import annihilation, number_op

        p = ModelParams(n_qubits=n, delta=0.9, g=0.17, omega=1.3)
        size = 12
        d = annihilation(size)
        num = number_op(size)
        eye = np.eye(size)
        _, gr = p.reduced()
        a_op = d + frame_two_m * gr * eye  # A = d + 2mg/omega

        for two_mp in dicke_two_m_values(n):
            dd = diag_element_displaced(p, two_mp, frame_two_m)
            assert isinstance(dd, DisplacedDiagonal)
            lhs = (
                p.omega * a_op.T @ a_op
                + dd.linear * (a_op.T + a_op)
                + dd.constant * eye
            )
            rhs = p.omega * num + two_mp * p.g * (d.T + d)
            assert np.max(np.abs((lhs - rhs)[:-1, :-1])) < 1e-12

    def test_frame_row_is_pure_displacement(self):
        # in its own frame a row has no residual linear term
        p = ModelParams(n_qubits=3, delta=0.7, g=0.25)
        dd = diag_element_displaced(p, 3, 3)
        assert dd.linear == pytest.approx(0.0, abs=1e-15)
        # constant = -(2m g)^2 / omega for the frame row
        assert dd.constant == pytest.approx(-((3 * 0.25) ** 2))


class TestLambdaCrossover:
    def test_formula(self):
        # 0.5 * sqrt(N / (N - 1))
        for n in (2, 3, 12):
            assert lambda_crossover(n) == pytest.approx(
                0.5 * math.sqrt(n / (n - 1.0))
            )

    def test_n12_five_significant_figures(self):
        assert f"{lambda_crossover(12):.5g}" == "0.52223"

    def test_single_qubit_rejected(self):
        with pytest.raises(ValueError):
            lambda_crossover(1)
