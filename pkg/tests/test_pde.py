import numpy as np
import pytest

from lpcalc.bilinear import BilinearSymbol, builtin_symbol
from lpcalc.grid import Grid, GridFunction, Spectrum, inverse_transform, lp_norm, pure_mode
from lpcalc.norms import sobolev_norm
from lpcalc.partition import build_resolution
from lpcalc.pde import (
    EvolutionSpec,
    log_schrodinger_solve,
    log_symbol,
    picard_solve,
    propagator,
)
from tests.conftest import random_band_limited


@pytest.fixture(scope="module")
def grid():
    # Nyquist ~ 50: level-3 data leave alias headroom for the quadratic terms
    return Grid(1, 1024, 64.0)


def small_datum(grid, target=0.01, level=3, seed=77):
    f = random_band_limited(grid, level, seed)
    scale = target / sobolev_norm(f, grid.n / 2.0)
    return scale * f


def zero_symbol():
    return BilinearSymbol(lambda xi, eta: np.zeros(np.broadcast_shapes(np.shape(xi), np.shape(eta))), 0.0, 3, True, 1, "zero")


class TestPropagator:
    def test_identity_at_zero_time(self, grid):
        f = random_band_limited(grid, 3, 1)
        g = propagator(2.0, 0.0, f)
        assert np.abs(g.values - f.values).max() <= 1e-14

    def test_single_mode_phase_rotation(self, grid):
        f = pure_mode(grid, 6)
        xi0 = 2 * np.pi * 6 / grid.length
        t, s = 0.3, 2.0
        g = propagator(s, t, f)
        expected = np.exp(1j * t * xi0**s) * f.values
        assert np.abs(g.values - expected).max() <= 1e-12

    def test_unitary(self, grid):
        f = random_band_limited(grid, 4, 2)
        for t in (0.1, 1.0, 3.7):
            assert np.isclose(lp_norm(propagator(2.0, t, f), 2), lp_norm(f, 2), rtol=1e-12)

    def test_group_law(self, grid):
        f = random_band_limited(grid, 4, 3)
        a = propagator(1.5, 0.4, propagator(1.5, 0.35, f))
        b = propagator(1.5, 0.75, f)
        assert np.abs(a.values - b.values).max() <= 1e-12 * np.abs(b.values).max()


class TestPicard:
    def test_linear_case_exact(self, grid):
        spec = EvolutionSpec(
            dispersion=2.0, initial=small_datum(grid), symbol=zero_symbol(), horizon=0.1, tolerance=1e-12
        )
        state = picard_solve(spec)
        assert state.converged and state.iterations == 1
        assert state.residual <= 1e-12
        # trajectory equals the free evolution at every midpoint node
        for t, u in zip(state.times, state.trajectory):
            expected = propagator(2.0, t, spec.initial)
            assert np.abs(u.values - expected.values).max() <= 1e-12

    def test_zero_datum(self, grid):
        zero = GridFunction(grid, np.zeros(grid.shape))
        spec = EvolutionSpec(dispersion=2.0, initial=zero, symbol=builtin_symbol("one"), horizon=0.1)
        state = picard_solve(spec)
        assert state.converged
        assert max(np.abs(u.values).max() for u in state.trajectory) == 0.0

    def test_small_data_contraction(self, grid):
        spec = EvolutionSpec(
            dispersion=2.0,
            initial=small_datum(grid),
            symbol=builtin_symbol("one"),
            horizon=0.1,
            tolerance=1e-8,
            max_iterations=20,
        )
        state = picard_solve(spec)
        assert state.converged
        assert state.iterations <= 20
        assert state.residual <= 1e-8
        assert state.halvings == 0
        # geometric decay of the updates
        assert all(factor < 1.0 for factor in state.contraction_factors)

    def test_divergence_reported_without_halving(self, grid):
        big = small_datum(grid, target=200.0)
        spec = EvolutionSpec(
            dispersion=2.0,
            initial=big,
            symbol=builtin_symbol("one"),
            horizon=2.0,
            max_iterations=12,
            max_halvings=0,
        )
        state = picard_solve(spec)
        assert not state.converged
        assert state.growth_factor is not None and state.growth_factor >= 1.0

    def test_halving_recovers_convergence(self, grid):
        datum = small_datum(grid, target=18.0)
        spec = EvolutionSpec(
            dispersion=2.0,
            initial=datum,
            symbol=builtin_symbol("one"),
            horizon=1.6,
            max_iterations=25,
            max_halvings=6,
        )
        state = picard_solve(spec)
        assert state.converged
        assert state.halvings >= 1
        assert state.horizon < 1.6

    def test_quadrature_second_order(self, grid):
        datum = small_datum(grid, target=0.2)
        finals = {}
        for nodes in (16, 32, 64):
            spec = EvolutionSpec(
                dispersion=2.0,
                initial=datum,
                symbol=builtin_symbol("one"),
                horizon=0.2,
                tolerance=1e-13,
                max_iterations=40,
                nodes=nodes,
            )
            finals[nodes] = picard_solve(spec).final
        err_coarse = sobolev_norm(finals[16] - finals[64], 0.5)
        err_fine = sobolev_norm(finals[32] - finals[64], 0.5)
        order = np.log2(err_coarse / err_fine)
        assert order >= 1.8

    def test_damping_bound_recorded(self, grid):
        spec = EvolutionSpec(dispersion=2.0, initial=small_datum(grid), symbol=zero_symbol())
        assert np.isclose(spec.damping_bound, 1.0, rtol=1e-12)

    def test_wideband_datum_rejected(self, grid):
        rho = grid.frequency_modulus()
        coeffs = np.where(rho <= grid.nyquist * 0.9, 1.0, 0.0)
        wide = inverse_transform(Spectrum(grid, coeffs))
        with pytest.raises(ValueError):
            EvolutionSpec(dispersion=2.0, initial=wide, symbol=zero_symbol())


class TestLogSchrodinger:
    def test_symbol_at_least_one(self):
        rho = np.linspace(0, 100, 1001)
        assert np.all(log_symbol(rho) >= 1.0)

    def test_zero_right_hand_side(self, grid):
        res = build_resolution(4)
        zero = GridFunction(grid, np.zeros(grid.shape))
        u, report = log_schrodinger_solve(zero_symbol(), zero, zero, res)
        assert np.abs(u.values).max() == 0.0
        assert report.residual == 0.0 or np.isnan(report.residual) is False

    def test_single_output_mode(self, grid):
        res = build_resolution(4)
        f = pure_mode(grid, 7)
        g = pure_mode(grid, 4)
        u, report = log_schrodinger_solve(builtin_symbol("one"), f, g, res)
        xi_out = 2 * np.pi * 11 / grid.length
        expected = pure_mode(grid, 11).values / (1.0 + np.log1p(xi_out**2))
        assert np.abs(u.values - expected).max() <= 1e-10
        assert report.residual <= 1e-10

    def test_round_trip_and_ratio(self, grid):
        res = build_resolution(4)
        f = random_band_limited(grid, 3, 5)
        g = random_band_limited(grid, 3, 6)
        u, report = log_schrodinger_solve(builtin_symbol("one"), f, g, res)
        assert report.residual <= 1e-10
        assert np.isfinite(report.ratio) and report.ratio > 0

    def test_ensemble_ratio_bounded_no_trend(self, grid):
        from lpcalc.experiments import fit_trend

        res = build_resolution(5)
        rows = []
        for seed, level in [(1, 2), (2, 2), (3, 3), (4, 3), (5, 4), (6, 4)]:
            f = random_band_limited(grid, level, seed)
            g = random_band_limited(grid, level, seed + 100)
            _, report = log_schrodinger_solve(builtin_symbol("one"), f, g, res)
            rows.append((level, report.ratio))
        ratios = np.array([r for _, r in rows])
        assert ratios.max() / ratios.min() <= 16.0
        assert fit_trend([l for l, _ in rows], ratios) <= 0.05
