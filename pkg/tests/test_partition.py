import numpy as np
import pytest

from lpcalc.grid import Grid, pure_mode
from lpcalc.partition import (
    AnnulusCutoffs,
    LevelRangeError,
    NyquistError,
    band_project,
    build_alternative_resolution,
    build_resolution,
    default_profile,
    smooth_exp_transition,
)
from tests.conftest import random_band_limited


class TestProfile:
    def test_plateaus_exact(self):
        eta = smooth_exp_transition
        assert np.all(eta(np.array([-2.0, -0.1, 0.0])) == 1.0)
        assert np.all(eta(np.array([1.0, 1.5, 8.0])) == 0.0)

    def test_monotone_and_bounded_differences(self):
        report = default_profile().validate(max_order=6)
        assert report["monotone"]
        for order in range(1, 7):
            assert report[f"divided_difference_{order}_bounded"]


class TestBuild:
    def test_rejects_small_level(self):
        with pytest.raises(ValueError):
            build_resolution(1)

    def test_nyquist_check_names_required_size(self):
        grid = Grid(1, 1024, 64.0)  # Nyquist ~ 50.3 < 2^8
        with pytest.raises(NyquistError) as err:
            build_resolution(7, grid=grid)
        assert "N = 8192" in str(err.value)
        # and the stated size passes
        build_resolution(7, grid=Grid(1, 8192, 64.0))

    def test_partition_identity(self):
        res = build_resolution(5)
        rho = np.linspace(0.0, 16.0, 3001)
        assert res.partition_residual(rho) <= 1e-12

    def test_band_support(self):
        res = build_resolution(5)
        assert res.band(2, np.array([1.0]))[0] == 0.0
        assert res.band(2, np.array([2.0 - 1e-9]))[0] == 0.0
        assert res.band(2, np.array([8.0]))[0] == 0.0

    def test_plateau_at_dyadic_points(self):
        res = build_resolution(6)
        for j in range(1, 7):
            assert np.isclose(res.band(j, np.array([2.0**j]))[0], 1.0, atol=1e-14)

    def test_telescoping_identity(self):
        res = build_resolution(6)
        rho = np.linspace(0.0, 100.0, 4001)
        assert res.telescoping_residual(rho) <= 1e-12

    def test_derivative_decay_uniform_in_level(self):
        res = build_resolution(6)
        decay = res.derivative_decay(max_order=4)
        for order, constant in decay.items():
            assert np.isfinite(constant)
            assert constant < 10.0 ** (2 * order)  # scale-free constant, no 2^j growth


class TestBandProject:
    def test_plateau_mode_unchanged(self, grid1d, resolution4):
        k = int(round(7.0 * grid1d.length / (2 * np.pi)))  # |xi| ~ 7 in phi_3's plateau
        f = pure_mode(grid1d, k)
        xi0 = 2 * np.pi * k / grid1d.length
        assert np.isclose(resolution4.band(3, np.array([xi0]))[0], 1.0)
        g = band_project(resolution4, 3, f)
        assert np.abs(g.values - f.values).max() <= 1e-12

    def test_mode_outside_support_vanishes(self, grid1d, resolution4):
        f = pure_mode(grid1d, 3)  # |xi| ~ 0.29, far below supp phi_3
        g = band_project(resolution4, 3, f)
        assert np.abs(g.values).max() <= 1e-14

    def test_band_sum_reconstructs(self, grid1d, resolution4):
        f = random_band_limited(grid1d, 3, seed=21)
        total = sum(band_project(resolution4, j, f).values for j in range(5))
        assert np.abs(total - f.values).max() <= 1e-10 * max(np.abs(f.values).max(), 1e-30)

    def test_level_out_of_range(self, grid1d, resolution4):
        f = pure_mode(grid1d, 1)
        with pytest.raises(LevelRangeError):
            band_project(resolution4, 5, f)


class TestAlternativeResolution:
    def test_invariants_hold(self):
        res = build_alternative_resolution(5)
        checks = res.check_invariants()
        assert checks["partition_residual"] <= 1e-12
        assert checks["telescoping_residual"] <= 1e-12
        assert checks["support_violation"] <= 1e-12
        assert checks["plateau_at_dyadic"] <= 1e-12

    def test_visibly_different_profile(self):
        base = build_resolution(5)
        alt = build_alternative_resolution(5)
        rho = np.linspace(0.5, 4.0, 1001)
        assert np.abs(base.band(1, rho) - alt.band(1, rho)).max() >= 0.05

    def test_same_band_sums_for_band_limited(self, grid1d):
        base = build_resolution(4)
        alt = build_alternative_resolution(4)
        f = random_band_limited(grid1d, 3, seed=5)
        s1 = sum(band_project(base, j, f).values for j in range(5))
        s2 = sum(band_project(alt, j, f).values for j in range(5))
        assert np.abs(s1 - s2).max() <= 1e-10 * np.abs(f.values).max()


class TestAnnulusCutoffs:
    def test_supports_and_plateaus(self):
        report = AnnulusCutoffs().check_supports()
        for name, entry in report.items():
            assert entry["support_violation"] <= 1e-12, name
            assert entry["plateau_violation"] <= 1e-12, name

    def test_2d_partition_on_grid(self, grid2d):
        res = build_resolution(2, grid=grid2d)
        rho = grid2d.frequency_modulus()
        total = sum(res.band(j, rho) for j in range(3))
        inside = rho <= 2.0
        assert np.abs(total[inside] - 1.0).max() <= 1e-12
