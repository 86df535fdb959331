import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpcalc.grid import (
    Grid,
    GridFunction,
    GridMismatchError,
    NonFiniteMultiplierError,
    Spectrum,
    apply_multiplier,
    constant_function,
    direct_dft,
    forward_transform,
    inverse_transform,
    lp_norm,
    pointwise_product,
    pure_mode,
)


def random_function(grid, seed=0):
    rng = np.random.default_rng(seed)
    return GridFunction(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


class TestGridConstruction:
    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            Grid(1, 100, 64.0)
        with pytest.raises(ValueError):
            Grid(1, 4, 64.0)
        with pytest.raises(ValueError):
            Grid(3, 64, 64.0)
        with pytest.raises(ValueError):
            Grid(1, 64, -1.0)

    def test_frequency_set(self, grid1d):
        xi = grid1d.axis_frequencies()
        assert xi.size == grid1d.points
        # symmetric about zero except the single most-negative mode
        assert np.isclose(xi.min(), -grid1d.nyquist)
        assert np.isclose(xi.max(), grid1d.nyquist - 2 * np.pi / grid1d.length)
        pos = np.sort(xi[xi > 0])
        neg = np.sort(-xi[(xi < 0) & (xi > xi.min())])
        assert np.allclose(pos, neg)

    def test_immutability(self, grid1d):
        f = constant_function(grid1d, 2.0)
        with pytest.raises(ValueError):
            f.values[0] = 0.0


class TestForwardTransform:
    def test_constant_concentrates_at_zero(self, grid1d):
        F = forward_transform(constant_function(grid1d, 1.0))
        vol = grid1d.volume
        assert np.isclose(F.coefficients[0], vol, rtol=1e-13)
        rest = np.abs(F.coefficients.flatten()[1:])
        assert rest.max() <= 1e-12 * vol

    def test_pure_mode_single_coefficient(self, grid1d):
        f = pure_mode(grid1d, 5)
        F = forward_transform(f)
        assert np.isclose(F.coefficients[5], grid1d.volume, rtol=1e-12)
        others = np.abs(np.delete(F.coefficients, 5))
        assert others.max() <= 1e-10 * grid1d.volume

    def test_matches_direct_dft_on_trig_polynomial(self):
        grid = Grid(1, 64, 32.0)
        rng = np.random.default_rng(7)
        modes = rng.choice(np.arange(-20, 20), size=5, replace=False)
        amps = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        vals = np.zeros(grid.shape, dtype=complex)
        x = grid.axis_points()
        for k, a in zip(modes, amps):
            vals += a * np.exp(1j * (2 * np.pi * k / grid.length) * x)
        f = GridFunction(grid, vals)
        fast = forward_transform(f).coefficients
        slow = direct_dft(f).coefficients
        assert np.abs(fast - slow).max() <= 1e-10 * np.abs(slow).max()

    def test_direct_dft_2d(self, grid2d):
        f = random_function(grid2d, 3)
        fast = forward_transform(f).coefficients
        slow = direct_dft(f).coefficients
        assert np.abs(fast - slow).max() <= 1e-10 * np.abs(slow).max()


class TestInverseTransform:
    def test_zero_spectrum(self, grid1d):
        F = Spectrum(grid1d, np.zeros(grid1d.shape))
        assert np.all(inverse_transform(F).values == 0)

    def test_single_mode_synthesis(self, grid1d):
        coeffs = np.zeros(grid1d.shape, dtype=complex)
        coeffs[3] = grid1d.volume
        f = inverse_transform(Spectrum(grid1d, coeffs))
        expected = pure_mode(grid1d, 3)
        assert np.abs(f.values - expected.values).max() <= 1e-12

    def test_round_trip(self, grid1d):
        f = random_function(grid1d, 11)
        g = inverse_transform(forward_transform(f))
        assert np.abs(g.values - f.values).max() <= 1e-12 * np.abs(f.values).max()

    def test_round_trip_2d(self, grid2d):
        f = random_function(grid2d, 12)
        g = inverse_transform(forward_transform(f))
        assert np.abs(g.values - f.values).max() <= 1e-12 * np.abs(f.values).max()


class TestParseval:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_fixed_ratio(self, grid1d, seed):
        f = random_function(grid1d, seed)
        sample_l2 = np.linalg.norm(f.values)
        coeff_l2 = np.linalg.norm(forward_transform(f).coefficients)
        assert np.isclose(coeff_l2 / sample_l2, grid1d.parseval_ratio, rtol=1e-12)

    def test_lp_norm_matches_parseval(self, grid1d):
        f = random_function(grid1d, 5)
        F = forward_transform(f)
        via_spectrum = np.sqrt((np.abs(F.coefficients) ** 2).sum() / grid1d.volume)
        assert np.isclose(lp_norm(f, 2), via_spectrum, rtol=1e-10)


class TestLinearity:
    @given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=20, deadline=None)
    def test_transform_linear(self, seed, a, b):
        grid = Grid(1, 64, 16.0)
        f = random_function(grid, seed)
        g = random_function(grid, seed + 1)
        lhs = forward_transform(GridFunction(grid, a * f.values + b * g.values)).coefficients
        rhs = a * forward_transform(f).coefficients + b * forward_transform(g).coefficients
        scale = abs(a) * np.linalg.norm(f.values) + abs(b) * np.linalg.norm(g.values) + 1e-30
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale * grid.parseval_ratio


class TestMultiplier:
    def test_identity(self, grid1d):
        f = random_function(grid1d, 2)
        g = apply_multiplier(lambda xi: np.ones_like(xi), 1.0, f)
        assert np.abs(g.values - f.values).max() <= 1e-12 * np.abs(f.values).max()

    def test_eigenfunction(self, grid1d):
        f = pure_mode(grid1d, 4)
        xi0 = 2 * np.pi * 4 / grid1d.length
        g = apply_multiplier(lambda xi: np.abs(xi) ** 2, 1.0, f)
        assert np.abs(g.values - xi0**2 * f.values).max() <= 1e-10 * xi0**2

    def test_composition(self, grid1d):
        f = random_function(grid1d, 8)
        a = lambda xi: 1.0 / (1.0 + xi**2)
        b = lambda xi: np.exp(1j * xi / 10.0)
        left = apply_multiplier(a, 1.0, apply_multiplier(b, 1.0, f))
        right = apply_multiplier(lambda xi: a(xi) * b(xi), 1.0, f)
        assert np.abs(left.values - right.values).max() <= 1e-12 * np.abs(f.values).max()

    def test_nonfinite_rejected_with_frequency(self, grid1d):
        f = random_function(grid1d, 9)

        def singular(xi):
            with np.errstate(divide="ignore"):
                return 1.0 / xi

        with pytest.raises(NonFiniteMultiplierError) as err:
            apply_multiplier(singular, 1.0, f)
        assert "frequency" in str(err.value)


class TestLpNorm:
    def test_constant(self, grid1d):
        f = constant_function(grid1d, -3.0)
        for p in (0.5, 1, 2, 4):
            assert np.isclose(lp_norm(f, p), 3.0 * grid1d.volume ** (1.0 / p), rtol=1e-12)
        assert np.isclose(lp_norm(f, np.inf), 3.0)

    def test_homogeneity(self, grid1d):
        f = random_function(grid1d, 13)
        for p in (0.7, 1, 2, np.inf):
            assert np.isclose(lp_norm(2.0 * f, p), 2.0 * lp_norm(f, p), rtol=1e-12)


class TestPointwiseProduct:
    def test_identity_factor(self, grid1d):
        f = random_function(grid1d, 1)
        assert np.array_equal(pointwise_product(f, constant_function(grid1d, 1.0)).values, f.values)

    def test_modes_add(self, grid1d):
        f = pure_mode(grid1d, 3)
        g = pure_mode(grid1d, -7)
        fg = pointwise_product(f, g)
        assert np.abs(fg.values - pure_mode(grid1d, -4).values).max() <= 1e-12

    def test_grid_mismatch(self, grid1d):
        other = Grid(1, 128, 64.0)
        with pytest.raises(GridMismatchError):
            pointwise_product(constant_function(grid1d), constant_function(other))
