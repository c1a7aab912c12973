"""Recurrence, kernels, and exact-arithmetic oracles."""

import numpy as np
import pytest

import opuc_entropy as oe
from opuc_entropy.errors import (
    DegenerateMeasureError,
    InvalidParameterError,
    OutOfRangeError,
)


def test_zero_parameter_gives_monomials():
    grid = oe.grid_for_degree(7)
    pair = oe.evaluate(np.zeros(8), 7, grid)
    assert np.allclose(pair.phi, grid.z**7)
    assert np.allclose(np.abs(pair.phi), 1.0)
    assert pair.value_at_one == 1.0


def test_single_step_half():
    grid = oe.grid_for_degree(1)
    pair = oe.szego_step(oe.initial_pair(grid), 0.5)
    assert pair.value_at_one == 1.5
    assert pair.log_value_at_one == pytest.approx(np.log(1.5), rel=1e-15)
    assert np.allclose(pair.phi, grid.z + 0.5)


def test_product_identity_at_one():
    rng = np.random.default_rng(0)
    g = rng.uniform(-0.9, 0.9, 30)
    grid = oe.grid_for_degree(30)
    pair = oe.evaluate(g, 30, grid)
    assert pair.value_at_one == pytest.approx(np.prod(1 + g), rel=1e-13)
    # log channel and linear channel agree
    assert np.exp(pair.log_value_at_one) == pytest.approx(pair.value_at_one, rel=1e-12)


def test_modulus_symmetry():
    rng = np.random.default_rng(1)
    for _ in range(5):
        g = rng.uniform(-0.9, 0.9, 12)
        pair = oe.evaluate(g, 12, oe.grid_for_degree(12))
        assert pair.modulus_gap() <= 1e-10


def test_evaluate_example_point_three():
    pair = oe.evaluate([0.3, 0.3], 2, oe.grid_for_degree(2))
    assert pair.value_at_one == pytest.approx(1.69, abs=1e-15)


def test_invalid_parameters_rejected():
    with pytest.raises(InvalidParameterError):
        oe.as_schur([0.2, 1.0])
    with pytest.raises(InvalidParameterError):
        oe.as_schur(np.array([0.1 + 0.2j]))
    with pytest.raises(InvalidParameterError):
        oe.szego_step(oe.initial_pair(oe.grid_for_degree(1)), 1.5)
    with pytest.raises(OutOfRangeError):
        oe.evaluate([0.1], 2, oe.grid_for_degree(2))


def test_grid_invariants():
    with pytest.raises(InvalidParameterError):
        oe.CircleGrid(15)  # odd and tiny
    grid = oe.CircleGrid(1024)
    with pytest.raises(InvalidParameterError):
        grid.check_degree(100)  # needs 16*100+512 = 2112


def test_leading_coefficient_example():
    assert oe.leading_coefficient_log([0.5], 1) == pytest.approx(
        -0.5 * np.log(0.75), rel=1e-14
    )
    assert oe.leading_coefficient_log(np.zeros(5), 5) == 0.0


def test_kappa_identity():
    rng = np.random.default_rng(2)
    g = rng.uniform(-0.8, 0.8, 40)
    log_k = oe.leading_coefficient_log(g, 40)
    assert np.exp(2 * log_k) * np.prod(1 - g**2) == pytest.approx(1.0, rel=1e-12)


def test_kappa_bounded_iff_square_summable():
    # partial sums of log kappa are monotone; square-summable tails stall them
    g = 0.5 / (1.0 + np.arange(4000.0))
    logs = [oe.leading_coefficient_log(g, n) for n in (1000, 2000, 4000)]
    assert logs[2] - logs[1] < logs[1] - logs[0]
    assert logs[2] < 0.5 * np.sum(g**2) / (1 - 0.25) + 1.0


def test_cd_kernel_lebesgue_and_half():
    assert oe.cd_kernel_at_one(np.zeros(10), 7).value == pytest.approx(8.0, rel=1e-14)
    k = oe.cd_kernel_at_one([0.5], 1)
    assert k.value == pytest.approx(4.0, rel=1e-13)
    assert k.log == pytest.approx(np.log(4.0), rel=1e-13)


def test_cd_kernel_log_survives_overflow():
    g = np.full(3000, 0.3)
    k = oe.cd_kernel_at_one(g, 3000)
    assert np.isinf(k.value)
    assert np.isfinite(k.log) and k.log > 1000


def test_normalized_sweep_matches_evaluate():
    rng = np.random.default_rng(3)
    g = rng.uniform(-0.6, 0.6, 25)
    grid = oe.grid_for_degree(25)
    pair = oe.evaluate(g, 25, grid)
    psi, _, log_one = oe.normalized_sweep(g, 25, grid)
    assert log_one == pytest.approx(pair.log_value_at_one, rel=1e-14)
    assert np.allclose(psi * pair.value_at_one, pair.phi, rtol=1e-11)


class TestOracles:
    def test_lebesgue_moments_give_monomial(self):
        coeffs = oe.gram_schmidt_oracle([1.0, 0.0, 0.0, 0.0], 3)
        assert np.array_equal(coeffs, [0.0, 0.0, 0.0, 1.0])

    def test_two_by_two(self):
        moms = oe.exact_moments_from_schur([0.5], 1)
        assert float(moms[1]) == -0.5
        coeffs = oe.gram_schmidt_oracle(moms, 1)
        assert np.array_equal(coeffs, [0.5, 1.0])

    def test_oracle_matches_recurrence(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            g = rng.uniform(-0.9, 0.9, 12)
            moms = oe.exact_moments_from_schur(g, 12)
            oracle = oe.gram_schmidt_oracle(moms, 12)
            pair = oe.evaluate(g, 12, oe.grid_for_degree(12))
            got = oe.coefficients_from_grid(pair)
            assert np.max(np.abs(got - oracle)) <= 1e-9

    def test_oracle_rejects_degenerate(self):
        # single atom at z=1: all moments 1; measure on one point
        with pytest.raises(DegenerateMeasureError):
            oe.gram_schmidt_oracle([1.0, 1.0, 1.0], 2)

    def test_oracle_degree_cap(self):
        with pytest.raises(OutOfRangeError):
            oe.gram_schmidt_oracle([1.0] * 40, 16)

    def test_levinson_round_trip(self):
        rng = np.random.default_rng(5)
        g = rng.uniform(-0.7, 0.7, 6)
        moms = [float(c) for c in oe.exact_moments_from_schur(g, 6)]
        back = oe.schur_from_moments(moms, 6)
        assert np.max(np.abs(back - g)) <= 1e-8
