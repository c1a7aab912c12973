"""Entropy reports, bounds, and gauge integrals."""

import numpy as np
import pytest

import opuc_entropy as oe


def block_fixture(n, scale=0.25):
    return oe.profile_for_length(n, scale)[::-1] / 2


def random_fixtures(count=4, n=24, bound=0.3, seed=7):
    rng = np.random.default_rng(seed)
    return [rng.uniform(-bound, bound, n) for _ in range(count)]


def test_lebesgue_entropy_zero():
    rep = oe.entropy_integral(oe.lebesgue(), np.zeros(8), 5)
    assert abs(rep.entropy) <= 1e-14
    assert abs(rep.entropy_plus) <= 1e-14


def test_entropy_zero_at_full_degree():
    # at n = d the a.c. integrand reduces to log|Phi_d| whose mean vanishes
    g = np.array([0.5, 0.3])
    rep = oe.entropy_integral(oe.bernstein_szego(g), g, 2)
    assert abs(rep.entropy) <= 1e-12


def test_atom_dominance_hand_value():
    s = oe.add_atom(oe.lebesgue(), 1.0)
    rep = oe.entropy_integral(s, [0.5, 0.5], 2)
    hand = 0.5 * (2.25**2) * np.log(2.25)
    assert rep.atom_contribution == pytest.approx(hand, rel=1e-14)
    assert rep.ac_contribution == pytest.approx(rep.entropy - hand, abs=1e-12)


def test_split_identities():
    for g in random_fixtures():
        m = oe.bernstein_szego(g)
        rep = oe.entropy_integral(m, g, len(g) - 4)
        assert rep.entropy == pytest.approx(rep.entropy_plus - rep.entropy_minus, abs=1e-9)
        assert rep.entropy == pytest.approx(
            rep.ac_contribution + rep.atom_contribution, abs=1e-9
        )


def test_upper_bound_and_sqrt_scaling():
    g = block_fixture(200)
    m = oe.bernstein_szego(g)
    rep = oe.entropy_integral(m, g, 200, oversample=2)
    bound = oe.entropy_upper_bound(g, 200)
    assert rep.entropy <= bound + rep.quadrature_error
    assert bound <= np.sqrt(200) * np.linalg.norm(g) + 1e-12
    assert rep.entropy / np.sqrt(200) <= np.linalg.norm(g) + 1e-3


def test_upper_bound_strict_on_random():
    for g in random_fixtures(3, 20):
        m = oe.bernstein_szego(g)
        rep = oe.entropy_integral(m, g, 20)
        assert rep.entropy < oe.entropy_upper_bound(g, 20)


def test_log_minus_bound():
    ok, val = oe.log_minus_check(oe.lebesgue(), np.zeros(4), 2)
    assert ok and abs(val) <= 1e-12
    ok, val = oe.log_minus_check(oe.bernstein_szego([0.5]), [0.5], 1)
    assert ok and 0.0 <= val < 1.0
    # pointwise ceiling 1/(2e) for the a.c. part of any probability measure
    for g in random_fixtures(3, 16, bound=0.5, seed=3):
        ok, val = oe.log_minus_check(oe.bernstein_szego(g), g, 12)
        assert ok and val < 1.0


def test_monic_orthonormal_shift():
    # eps_n = kappa_n^2 * monic entropy + log kappa_n (normalization is 1)
    g = np.array([0.4, -0.3, 0.2, 0.1])
    m = oe.bernstein_szego(g)
    n = 3
    monic = oe.entropy_integral(m, g, n, monic=True)
    ortho = oe.entropy_integral(m, g, n, monic=False)
    log_k = oe.leading_coefficient_log(g, n)
    expected = np.exp(2 * log_k) * monic.entropy + log_k
    assert ortho.entropy == pytest.approx(expected, abs=1e-10)


def test_unrepresentable_atom_goes_log_domain():
    # force a gigantic polynomial value at the atom
    g = np.full(3000, 0.3)
    measure = oe.add_atom(oe.lebesgue(), 1.0)
    rep = oe.entropy_integral(measure, g, 3000, grid=oe.CircleGrid(16 * 3000 + 512))
    assert not rep.representable
    assert np.isinf(rep.entropy_plus)
    assert np.isfinite(rep.atom_term_log)
    expected = np.log(0.5) + 2 * rep.log_value_at_one + np.log(rep.log_value_at_one)
    assert rep.atom_term_log == pytest.approx(expected, rel=1e-12)


class TestGauges:
    def test_builtin_validation(self):
        assert not oe.validate_gauge(oe.BUILTIN_GAUGES["linear"])
        for name in ("x_log_x", "x_log2_x", "x_pow_1_1"):
            assert oe.validate_gauge(oe.BUILTIN_GAUGES[name])

    def test_linear_edge_is_normalization(self):
        g = block_fixture(64)
        m = oe.bernstein_szego(g)
        rep = oe.gauge_integral(m, g, 48, "linear", monic=False, grid=oe.grid_for_degree(64, 2))
        assert rep.value == pytest.approx(1.0, abs=1e-7)

    def test_xlogx_lebesgue_zero(self):
        rep = oe.gauge_integral(oe.lebesgue(), np.zeros(6), 4, "x_log_x")
        assert abs(rep.value) <= 1e-12

    def test_xlogx_is_twice_entropy(self):
        g = block_fixture(100)
        m = oe.add_atom(oe.bernstein_szego(g), 0.1)
        schur = oe.schur_of_perturbed(g, 0.1, 101)
        gauge = oe.gauge_integral(m, schur, 80, "x_log_x")
        ent = oe.entropy_integral(m, schur, 80, monic=True)
        assert gauge.value == pytest.approx(2.0 * ent.entropy, abs=1e-8)

    def test_atom_order_respects_gauge_order(self):
        # atom value above 1: the pointwise order on [1, inf) transfers
        g = np.full(40, 0.2)
        m = oe.add_atom(oe.lebesgue(), 0.5)
        atoms = {
            name: oe.gauge_integral(m, g, 40, name).atom_contribution
            for name in ("linear", "x_pow_1_1", "x_log_x", "x_log2_x")
        }
        assert 1.0 < atoms["linear"] <= atoms["x_pow_1_1"] <= atoms["x_log_x"] <= atoms["x_log2_x"]

    def test_tabulated_gauge_overflow_flags(self):
        tab = oe.Gauge("tabulated", lambda x: np.minimum(x * x, 1e300), log_fn=None)
        g = np.full(3000, 0.3)
        m = oe.add_atom(oe.lebesgue(), 1.0)
        rep = oe.gauge_integral(m, g, 3000, tab, grid=oe.CircleGrid(16 * 3000 + 512))
        assert not rep.representable
