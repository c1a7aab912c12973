"""Measures, quadrature, atoms, and the point-mass perturbation."""

import io
from fractions import Fraction

import numpy as np
import pytest

import opuc_entropy as oe
from opuc_entropy.errors import (
    IntegrationError,
    InvalidParameterError,
    ResolutionError,
)


def block_fixture(n=200, scale=0.25):
    return oe.profile_for_length(n, scale)[::-1] / 2


class TestMeasureSpec:
    def test_zero_prefix_is_lebesgue(self):
        m = oe.bernstein_szego([0.0])
        grid = oe.grid_for_degree(1)
        dens, _ = oe.density_on_grid(m, grid)
        assert np.allclose(dens, 1.0)

    def test_mass_invariant_enforced(self):
        with pytest.raises(InvalidParameterError):
            oe.MeasureSpec(np.zeros(1), atoms=((0.0, 0.5),), normalization=1.0)

    def test_atom_validation(self):
        with pytest.raises(InvalidParameterError):
            oe.add_atom(oe.lebesgue(), -0.1)
        s = oe.add_atom(oe.lebesgue(), 1.0)
        with pytest.raises(InvalidParameterError):
            oe.add_atom(s, 0.5)  # already has an atom at theta = 0

    def test_extend_schur(self):
        assert np.array_equal(oe.extend_schur([0.1], []), [0.1])
        assert np.array_equal(oe.extend_schur([0.1], [0.2, 0.3]), [0.1, 0.2, 0.3])
        with pytest.raises(InvalidParameterError):
            oe.extend_schur([0.1], [0.6])
        with pytest.raises(InvalidParameterError):
            oe.extend_schur([0.1], [-0.05])

    def test_serialization_round_trip(self):
        m = oe.add_atom(oe.bernstein_szego([0.5, -0.25, 1e-17]), 0.125)
        buf = io.StringIO()
        oe.save_measure(m, buf)
        back = oe.load_measure(io.StringIO(buf.getvalue()))
        assert np.array_equal(back.schur_prefix, m.schur_prefix)
        assert back.atoms == m.atoms
        assert back.normalization == m.normalization


class TestQuadrature:
    def test_total_mass(self):
        for m in (oe.lebesgue(), oe.bernstein_szego([0.5]),
                  oe.add_atom(oe.bernstein_szego([0.5]), 0.2)):
            grid = oe.grid_for_degree(m.degree)
            q = oe.integrate(m, grid, np.ones(grid.size), np.ones(len(m.atoms)))
            assert q.value == pytest.approx(1.0, abs=1e-12)
            assert q.converged

    def test_non_finite_integrand_rejected(self):
        m = oe.lebesgue()
        grid = oe.grid_for_degree(1)
        vals = np.ones(grid.size)
        vals[3] = np.inf
        with pytest.raises(IntegrationError):
            oe.integrate(m, grid, vals)

    def test_orthonormality(self):
        g = block_fixture(200)
        m = oe.bernstein_szego(g)
        grid = oe.grid_for_degree(len(g), 2)
        n = 150
        pair = oe.evaluate(g, n, grid)
        scale = np.exp(oe.leading_coefficient_log(g, n))
        vals = np.abs(scale * pair.phi) ** 2
        q = oe.integrate(m, grid, vals)
        assert q.value == pytest.approx(1.0, abs=1e-7)

    def test_first_moment_consistency(self):
        m = oe.add_atom(oe.bernstein_szego([0.5]), 0.2)
        grid = oe.grid_for_degree(4)
        q = oe.integrate(m, grid, np.conj(grid.z), np.ones(1))
        c = oe.moments_from_measure(m, 1)
        assert q.value == pytest.approx(float(c[1]), abs=1e-12)


class TestMoments:
    def test_lebesgue(self):
        c = oe.moments_from_measure(oe.lebesgue(), 4)
        assert np.allclose(c, [1, 0, 0, 0, 0], atol=1e-14)

    def test_pure_atom_limit(self):
        # kappa -> 0 continuity at zero mass
        m = oe.bernstein_szego([0.5])
        base = oe.moments_from_measure(m, 3)
        tiny = oe.moments_from_measure(oe.add_atom(m, 1e-8), 3)
        assert np.max(np.abs(tiny - base)) <= 2e-8

    def test_lebesgue_plus_unit_atom(self):
        c = oe.moments_from_measure(oe.add_atom(oe.lebesgue(), 1.0), 2)
        assert np.allclose(c, [1.0, 0.5, 0.5], atol=1e-14)

    def test_atom_moment_recursion(self):
        m = oe.bernstein_szego([0.5])
        base = oe.moments_from_measure(m, 3)
        pert = oe.moments_from_measure(oe.add_atom(m, 0.2), 3)
        assert np.max(np.abs(pert - (base + 0.2) / 1.2)) <= 1e-12

    def test_resolution_guard(self):
        with pytest.raises(ResolutionError):
            oe.moments_from_measure(oe.lebesgue(), 3000, oe.CircleGrid(4096))

    def test_round_trip_against_levinson(self):
        g = np.array([0.4, -0.2, 0.3, 0.1, -0.25, 0.15])
        m = oe.bernstein_szego(g)
        c = oe.moments_from_measure(m, 6, oe.grid_for_degree(6, 2))
        back = oe.schur_from_moments(np.real(c), 6)
        assert np.max(np.abs(back - g)) <= 1e-8


class TestSzegoIntegral:
    def test_lebesgue_zero(self):
        r = oe.szego_integral(oe.lebesgue())
        assert abs(r.quadrature) <= 1e-14
        assert r.analytic == 0.0

    def test_half_parameter(self):
        r = oe.szego_integral(oe.bernstein_szego([0.5]))
        assert r.analytic == pytest.approx(np.log(0.75), rel=1e-15)
        assert abs(r.quadrature - r.analytic) <= 1e-8

    def test_identity_on_profiles(self):
        for n in (50, 200):
            g = block_fixture(n)
            r = oe.szego_integral(oe.bernstein_szego(g), oe.grid_for_degree(n, 2))
            assert abs(r.quadrature - r.analytic) <= 1e-7

    def test_atom_lowers_log_integral(self):
        g = block_fixture(100)
        base = oe.szego_integral(oe.bernstein_szego(g))
        pert = oe.szego_integral(oe.add_atom(oe.bernstein_szego(g), 0.25))
        assert pert.analytic == pytest.approx(base.analytic - np.log(1.25), rel=1e-12)
        assert abs(pert.quadrature - pert.analytic) <= 1e-7


class TestKappaChoice:
    def test_lebesgue(self):
        k = oe.kappa_choice(np.zeros(8), 4)
        assert k.value == pytest.approx(0.25, rel=1e-14)

    def test_half(self):
        k = oe.kappa_choice([0.5, 0.0], 2)
        assert k.value == pytest.approx(0.25, rel=1e-13)

    def test_monotone_in_degree(self):
        g = block_fixture(640)
        logs = [oe.kappa_choice(g, n).log for n in (100, 300, 640)]
        assert logs[0] > logs[1] > logs[2]


class TestGeronimus:
    def test_kappa_to_zero(self):
        g = block_fixture(100)
        grid = oe.grid_for_degree(100)
        base = oe.evaluate(g, 100, grid)
        pert = oe.geronimus_perturbed_phi(g, 100, 1e-13, grid)
        assert np.max(np.abs(pert.phi - base.phi)) <= 1e-8

    @pytest.mark.parametrize("n", [10, 100, 1000, 2000])
    def test_half_value(self, n):
        gh = np.full(n, 0.25 / np.sqrt(n))
        carrier = gh[::-1] / 2.0
        kap = oe.kappa_choice(carrier, n)
        grid = oe.grid_for_degree(n)
        pert = oe.geronimus_perturbed_phi(carrier, n, kap.value, grid)
        base = oe.evaluate(carrier, n, grid)
        gap = pert.log_value_at_one - (base.log_value_at_one - np.log(2.0))
        assert abs(gap) <= 1e-9

    def test_small_case_against_moment_oracle(self):
        schur = [0.3, 0.2]
        kappa = 0.1
        moms = oe.exact_moments_from_schur(schur, 4)
        kf = Fraction(kappa)
        pert_moms = [(c + kf) / (1 + kf) for c in moms]
        oracle = oe.gram_schmidt_oracle(pert_moms, 2)
        pair = oe.geronimus_perturbed_phi(np.array(schur), 2, kappa, oe.grid_for_degree(2))
        got = oe.coefficients_from_grid(pair)
        assert np.max(np.abs(got - oracle)) <= 1e-8

    def test_modulus_symmetry_of_perturbed(self):
        g = block_fixture(50)
        pair = oe.geronimus_perturbed_phi(g, 50, 0.01, oe.grid_for_degree(50))
        assert pair.modulus_gap() <= 1e-10


class TestPerturbedParameters:
    def test_matches_moment_oracle(self):
        schur = [0.3, 0.2]
        kappa = 0.1
        moms = oe.exact_moments_from_schur(schur, 5)
        kf = Fraction(kappa)
        pert_moms = [(c + kf) / (1 + kf) for c in moms]
        ext = oe.schur_of_perturbed(np.array(schur), kappa, 4)
        for n in range(4):
            oracle = oe.gram_schmidt_oracle(pert_moms, n + 1)
            assert ext[n] == pytest.approx(oracle[0], abs=1e-12)

    def test_product_identity_of_extraction(self):
        g = block_fixture(80)
        kap = oe.kappa_choice(g, 80)
        ext = oe.schur_of_perturbed(g, kap.value, 80)
        pert = oe.geronimus_perturbed_phi(g, 80, kap.value, oe.grid_for_degree(80))
        assert np.sum(np.log1p(ext)) == pytest.approx(pert.log_value_at_one, abs=1e-10)
