"""Function-space layer: grids, harmonics, calculus on the sphere."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuzzysphere.sphere_fn import (
    SpherePoint,
    angles_from_vectors,
    build_grid,
    constant,
    coordinate,
    derivative_values,
    dphi_coeffs,
    grad_pairing,
    harmonic,
    heat_flow,
    laplacian,
    legendre,
    multiply,
    poisson_bracket,
    project,
    random_function,
    rodrigues,
    rotate_function,
)


class TestSpherePoint:
    def test_vector_is_unit(self):
        p = SpherePoint(1.1, 2.3)
        assert np.linalg.norm(p.vector) == pytest.approx(1.0, abs=1e-15)

    def test_polar_angle_range_enforced(self):
        with pytest.raises(ValueError):
            SpherePoint(-0.1, 0.0)
        with pytest.raises(ValueError):
            SpherePoint(np.pi + 0.1, 0.0)

    def test_angles_from_vectors_round_trip(self):
        p = SpherePoint(0.7, -1.2)
        th, ph = angles_from_vectors(p.vector[None, :])
        assert th[0] == pytest.approx(0.7, abs=1e-12)
        assert np.cos(ph[0] - (-1.2)) == pytest.approx(1.0, abs=1e-12)


class TestQuadratureGrid:
    def test_weights_normalized(self):
        g = build_grid(12)
        assert g.weights.sum() == pytest.approx(1.0, abs=1e-14)

    def test_mean_of_harmonics_vanishes(self):
        # the grid must integrate every resolvable harmonic except l=0 to zero
        g = build_grid(10)
        basis = g.basis(5)
        means = g.weights @ basis
        assert means[0] == pytest.approx(1.0, abs=1e-13)
        assert np.abs(means[1:]).max() < 1e-13

    def test_orthonormality_at_exact_degree(self):
        g = build_grid(12)
        basis = g.basis(6)
        gram = basis.T @ (g.weights[:, None] * basis)
        assert np.abs(gram - np.eye(gram.shape[0])).max() < 1e-12

    def test_build_grid_is_cached(self):
        assert build_grid(8) is build_grid(8)

    def test_basis_cache_reuses_columns(self):
        g = build_grid(16)
        b4 = g.basis(4)
        b6 = g.basis(6)
        assert np.array_equal(b6[:, : b4.shape[1]], b4)


class TestSphereFunction:
    def test_constant_mean_and_values(self):
        f = constant(2.5)
        assert f.mean() == pytest.approx(2.5, abs=1e-15)
        g = build_grid(4)
        assert np.abs(f.values_on(g) - 2.5).max() < 1e-15

    def test_coordinate_functions_satisfy_sphere_equation(self):
        g = build_grid(8)
        total = sum(coordinate(a).values_on(g) ** 2 for a in range(3))
        assert np.abs(total - 1.0).max() < 1e-13

    def test_coordinate_accepts_axis_names(self):
        for name, idx in (("x", 0), ("y", 1), ("z", 2)):
            assert np.array_equal(coordinate(name).coeffs, coordinate(idx).coeffs)

    def test_legendre_is_one_at_north_pole(self):
        for n in (1, 2, 5, 12):
            f = legendre(n)
            assert f.values(np.array([0.0]), np.array([0.0]))[0] == pytest.approx(
                1.0, abs=1e-12
            )

    def test_legendre_one_is_z(self):
        assert np.allclose(legendre(1).coeffs, coordinate(2).coeffs, atol=1e-15)

    def test_coeff_lookup(self):
        f = harmonic(3, -2)
        assert f.coeff(3, -2) == pytest.approx(1.0)
        assert f.coeff(3, 2) == 0.0
        assert f.coeff(5, 0) == 0.0

    def test_with_band_pads_and_truncates(self):
        f = random_function(3, seed=1)
        up = f.with_band(5)
        assert up.band_limit == 5
        assert np.array_equal(up.coeffs[: f.coeffs.size], f.coeffs)
        down = up.with_band(3)
        assert np.array_equal(down.coeffs, f.coeffs)

    def test_arithmetic(self):
        f = random_function(2, seed=2)
        g = random_function(3, seed=3)
        h = 2.0 * f - g
        grid = build_grid(8)
        expect = 2.0 * f.values_on(grid) - g.values_on(grid)
        assert np.abs(h.values_on(grid) - expect).max() < 1e-13

    def test_sup_norm_of_legendre(self):
        # |P_n| <= 1 with the maximum attained at the poles
        for n in (2, 3, 7):
            assert legendre(n).sup_norm() == pytest.approx(1.0, abs=1e-9)

    def test_random_function_normalized_and_reproducible(self):
        f = random_function(4, seed=9)
        g = random_function(4, seed=9)
        assert np.array_equal(f.coeffs, g.coeffs)
        assert f.sup_norm() == pytest.approx(1.0, abs=1e-9)


class TestProjection:
    def test_round_trip(self):
        f = random_function(5, seed=11)
        g = build_grid(10)
        back = project(f.values_on(g), g, 5)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-12

    def test_rejects_unresolvable_band(self):
        g = build_grid(6)
        with pytest.raises(ValueError):
            project(np.zeros(g.size), g, 4)


class TestMultiply:
    def test_z_squared(self):
        # z^2 = (2 P_2 + 1)/3
        z = coordinate(2)
        prod = multiply(z, z)
        expect = (2.0 / 3.0) * legendre(2) + constant(1.0 / 3.0)
        assert np.abs(prod.coeffs - expect.with_band(2).coeffs).max() < 1e-14

    def test_band_truncation_argument(self):
        f = random_function(3, seed=5)
        full = multiply(f, f)
        cut = multiply(f, f, band_limit=2)
        assert cut.band_limit == 2
        assert np.abs(cut.coeffs - full.coeffs[: cut.coeffs.size]).max() < 1e-13

    @given(st.integers(0, 200), st.integers(0, 200))
    @settings(max_examples=20, deadline=None)
    def test_commutative(self, sa, sb):
        f = random_function(2, seed=sa)
        g = random_function(3, seed=sb)
        assert np.allclose(multiply(f, g).coeffs, multiply(g, f).coeffs, atol=1e-13)


class TestCalculus:
    def test_laplacian_eigenvalue(self):
        # positive convention: each degree-l harmonic scales by 2 l (l+1)
        for l, m in ((1, 0), (2, 1), (4, -3)):
            f = harmonic(l, m)
            lap = laplacian(f)
            assert np.allclose(lap.coeffs, 2.0 * l * (l + 1) * f.coeffs, atol=1e-13)

    def test_heat_flow_spectral_action(self):
        f = harmonic(3, 2)
        t = 0.17
        flowed = heat_flow(f, t)
        assert np.allclose(flowed.coeffs, np.exp(-2.0 * 3 * 4 * t) * f.coeffs)

    def test_heat_flow_rejects_negative_time(self):
        with pytest.raises(ValueError):
            heat_flow(constant(1.0), -0.1)

    def test_heat_flow_preserves_mean(self):
        f = random_function(4, seed=21)
        assert heat_flow(f, 0.3).mean() == pytest.approx(f.mean(), abs=1e-14)

    def test_grad_pairing_of_z(self):
        # (grad z, grad z) = 2 (1 - z^2) in the scaled round metric
        z = coordinate(2)
        pair = grad_pairing(z, z)
        g = build_grid(8)
        expect = 2.0 * (1.0 - z.values_on(g) ** 2)
        assert np.abs(pair.values_on(g) - expect).max() < 1e-12

    def test_grad_pairing_symmetric(self):
        f = random_function(2, seed=31)
        g = random_function(3, seed=32)
        assert np.allclose(
            grad_pairing(f, g).coeffs, grad_pairing(g, f).coeffs, atol=1e-13
        )

    def test_dphi_matches_finite_difference(self):
        f = random_function(4, seed=41)
        df = dphi_coeffs(f)
        th = np.array([0.9, 1.7])
        ph = np.array([0.3, 2.0])
        h = 1e-6
        numeric = (f.values(th, ph + h) - f.values(th, ph - h)) / (2 * h)
        assert np.abs(df.values(th, ph) - numeric).max() < 1e-7

    def test_derivative_values_match_finite_difference(self):
        f = random_function(3, seed=42)
        g = build_grid(8)
        ft, fp = derivative_values(f, g)
        h = 1e-6
        nt = (f.values(g.theta + h, g.phi) - f.values(g.theta - h, g.phi)) / (2 * h)
        assert np.abs(ft - nt).max() < 1e-6
        np_ = (f.values(g.theta, g.phi + h) - f.values(g.theta, g.phi - h)) / (2 * h)
        assert np.abs(fp - np_).max() < 1e-6


class TestPoissonBracket:
    def test_coordinate_brackets_cyclic(self):
        # {x, y} = 2 z and cyclic permutations
        g = build_grid(8)
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            br = poisson_bracket(coordinate(a), coordinate(b))
            expect = 2.0 * coordinate(c).values_on(g)
            assert np.abs(br.values_on(g) - expect).max() < 1e-12

    def test_z_generates_axis_rotation(self):
        # {z, f} = -2 df/dphi
        f = random_function(3, seed=51)
        br = poisson_bracket(coordinate(2), f)
        expect = -2.0 * dphi_coeffs(f)
        assert np.abs(br.coeffs - expect.with_band(br.band_limit).coeffs).max() < 1e-12

    @given(st.integers(0, 100), st.integers(0, 100))
    @settings(max_examples=15, deadline=None)
    def test_antisymmetric(self, sa, sb):
        f = random_function(2, seed=sa)
        g = random_function(2, seed=sb)
        lhs = poisson_bracket(f, g)
        rhs = poisson_bracket(g, f)
        assert np.allclose(lhs.coeffs, -rhs.coeffs, atol=1e-11)

    def test_leibniz_rule(self):
        f = random_function(2, seed=61)
        g = random_function(2, seed=62)
        h = random_function(2, seed=63)
        lhs = poisson_bracket(f, multiply(g, h))
        rhs = multiply(g, poisson_bracket(f, h)) + multiply(h, poisson_bracket(f, g))
        band = max(lhs.band_limit, rhs.band_limit)
        diff = lhs.with_band(band).coeffs - rhs.with_band(band).coeffs
        assert np.abs(diff).max() < 1e-11

    def test_constant_is_central(self):
        f = random_function(3, seed=71)
        br = poisson_bracket(constant(3.0), f)
        assert np.abs(br.coeffs).max() < 1e-13


class TestRotation:
    def test_rodrigues_is_orthogonal(self):
        r = rodrigues(np.array([1.0, 2.0, -0.5]), 0.8)
        assert np.abs(r @ r.T - np.eye(3)).max() < 1e-14
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-14)

    def test_rotate_function_matches_pointwise(self):
        f = random_function(3, seed=81)
        r = rodrigues(np.array([0.3, -1.0, 0.7]), 1.1)
        rf = rotate_function(f, r)
        g = build_grid(10)
        # rotated function at x equals original at R^{-1} x
        back = g.vectors @ r  # row-vector action of R^{-1}
        th, ph = angles_from_vectors(back)
        assert np.abs(rf.values_on(g) - f.values(th, ph)).max() < 1e-11

    def test_rotation_preserves_band_and_norm(self):
        f = random_function(4, seed=82)
        r = rodrigues(np.array([0.0, 1.0, 0.0]), 0.4)
        rf = rotate_function(f, r)
        assert rf.band_limit == f.band_limit
        assert np.linalg.norm(rf.coeffs) == pytest.approx(
            np.linalg.norm(f.coeffs), abs=1e-12
        )

    def test_laplacian_commutes_with_rotation(self):
        f = random_function(3, seed=83)
        r = rodrigues(np.array([1.0, 1.0, 1.0]), 2.0)
        a = laplacian(rotate_function(f, r))
        b = rotate_function(laplacian(f), r)
        assert np.abs(a.coeffs - b.coeffs).max() < 1e-11
