"""Empirical verification harness for the embedding and product inequalities.

Inequalities with unspecified constants are checked as bounded-ratio,
no-trend statements: over a seeded ensemble of random band-limited
functions spanning a sweep of bandwidth levels, the ratio of the two sides
must stay inside a band and show no systematic growth with bandwidth
(least-squares slope of log ratio against level at most 0.05).

The sharpness scan drives the counterexample construction: a function with
prescribed logarithmic spectral decay whose square's weighted norm grows
like a power of log of the truncation radius; the growth exponent is
recovered by an offset-corrected power fit and compared with the predicted
value, after the same fit has been validated on a scalar quadrature oracle
of the identical functional form.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid import (
    Grid,
    GridFunction,
    Spectrum,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    pointwise_product,
)
from .norms import (
    DyadicCubeSet,
    SpaceSpec,
    besov_norm,
    sobolev_norm,
    tl_infinity_norm,
    triebel_lizorkin_norm,
    xw_norm,
)
from .partition import ResolutionOfUnity
from .weights import AdmissibleWeight

__all__ = [
    "Ensemble",
    "RatioReport",
    "GateError",
    "SharpnessProfile",
    "SharpnessReport",
    "embedding_ratio",
    "product_estimate_ratio",
    "resolution_independence_check",
    "besov_tl_embedding_check",
    "telescoping_growth_check",
    "sharpness_scan",
    "sharpness_convolution_check",
    "scalar_log_power_oracle",
    "offset_power_fit",
    "fit_trend",
    "tail_function",
    "member_map",
]


class GateError(ValueError):
    """Parameters fall outside the hypotheses of the checked statement."""


def member_map(fn, items):
    """Map preserving order, threaded when LPCALC_THREADS asks for it."""
    items = list(items)
    threads = int(os.environ.get("LPCALC_THREADS", "1") or "1")
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def band_limited_noise(grid: Grid, level: int, rng, decay: float) -> GridFunction:
    """Real random function with Gaussian spectrum in {0 < |xi| <= 2^level}.

    Coefficient magnitudes fall off like <xi>^-decay; the field is made real
    by Hermitian symmetrisation.
    """
    rho = grid.frequency_modulus()
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * (1.0 + rho**2) ** (
        -decay / 2.0
    )
    coeffs[rho > 2.0**level] = 0.0
    f = inverse_transform(Spectrum(grid, coeffs))
    return GridFunction(grid, f.values + np.conj(f.values))


@dataclass(frozen=True)
class Ensemble:
    """Reproducible family of random band-limited functions.

    Members cycle through the bandwidth levels; member i draws from the
    substream (seed, i), so the family is stable under count changes.
    ``smoothness`` tunes the spectral decay exponent smoothness + n/2 + eps.
    """

    seed: int
    count: int
    levels: tuple
    smoothness: float = 0.5
    epsilon: float = 0.1

    def level_of(self, index: int) -> int:
        return int(self.levels[index % len(self.levels)])

    def members(self, grid: Grid):
        decay = self.smoothness + grid.n / 2.0 + self.epsilon
        for i in range(self.count):
            rng = np.random.default_rng([self.seed, i])
            yield i, self.level_of(i), band_limited_noise(grid, self.level_of(i), rng, decay)

    def pairs(self, grid: Grid):
        decay = self.smoothness + grid.n / 2.0 + self.epsilon
        for i in range(self.count):
            level = self.level_of(i)
            f = band_limited_noise(grid, level, np.random.default_rng([self.seed, i, 0]), decay)
            g = band_limited_noise(grid, level, np.random.default_rng([self.seed, i, 1]), decay)
            yield i, level, f, g


def fit_trend(levels, values) -> float:
    """Least-squares slope of log(value) against bandwidth level."""
    levels = np.asarray(levels, dtype=float)
    values = np.asarray(values, dtype=float)
    good = values > 0
    if good.sum() < 2 or np.unique(levels[good]).size < 2:
        return 0.0
    return float(np.polyfit(levels[good], np.log(values[good]), 1)[0])


@dataclass(frozen=True)
class RatioReport:
    name: str
    params: dict
    levels: tuple
    ratios: tuple
    trend_slope: float
    extra: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else float("nan")

    @property
    def min_ratio(self) -> float:
        return min(self.ratios) if self.ratios else float("nan")

    @property
    def band(self) -> float:
        if not self.ratios:
            return float("nan")
        return self.max_ratio / self.min_ratio if self.min_ratio > 0 else np.inf

    def within(self, band_bound: float = 16.0, slope_tol: float = 0.05) -> bool:
        return bool(np.isfinite(self.band) and self.band <= band_bound and self.trend_slope <= slope_tol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "levels": list(self.levels),
            "ratios": list(self.ratios),
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "band": self.band,
            "trend_slope": self.trend_slope,
            **{k: v for k, v in self.extra.items()},
        }


def _report(name, params, rows, extra=None) -> RatioReport:
    levels = tuple(level for level, _ in rows)
    ratios = tuple(float(r) for _, r in rows)
    return RatioReport(name, params, levels, ratios, fit_trend(levels, ratios), extra or {})


def embedding_ratio(
    ensemble: Ensemble,
    grid: Grid,
    resolution: ResolutionOfUnity,
    cubes: DyadicCubeSet,
    p: float,
    q: float,
) -> RatioReport:
    """Per-member ratio of the oscillation-plus-scale norm to the critical-index norm.

    The scale weight carries exponent 1/r' with r = max(1, p); for p beyond
    every finite value only q <= 2 is admitted.
    """
    if p == np.inf and q > 2:
        raise GateError(f"the p = inf branch needs q <= 2, got q = {q}")
    r = max(1.0, p)
    exponent = 0.0 if r == 1.0 else (1.0 if r == np.inf else 1.0 - 1.0 / r)
    weight = AdmissibleWeight.prototype(exponent)

    def one(item):
        _, level, f = item
        num = xw_norm(f, weight, resolution, cubes)
        if p == np.inf:
            den = tl_infinity_norm(f, SpaceSpec(0.0, np.inf, q, n=grid.n), resolution, cubes)
        else:
            den = triebel_lizorkin_norm(f, SpaceSpec(grid.n / p, p, q, n=grid.n), resolution)
        return level, num / den

    rows = member_map(one, ensemble.members(grid))
    return _report("embedding_ratio", {"p": p, "q": q, "weight_exponent": exponent}, rows)


def product_estimate_ratio(
    ensemble: Ensemble,
    grid: Grid,
    resolution: ResolutionOfUnity,
    p: float,
    q: float,
) -> RatioReport:
    """Ratio of the weighted product norm to the product of the factor norms."""
    if not np.isfinite(p):
        raise GateError("the product estimate needs finite p")
    gate = min(1.0, p, q)
    if not gate > p / (p + 1.0):
        raise GateError(f"min(1, p, q) = {gate:g} must exceed p/(p+1) = {p / (p + 1):g}")
    r = max(1.0, p)
    exponent = 0.0 if r == 1.0 else 1.0 - 1.0 / r
    inverse_weight = AdmissibleWeight.prototype(-exponent)
    s = grid.n / p
    plain = SpaceSpec(s, p, q, n=grid.n)
    weighted = SpaceSpec(s, p, q, weight=inverse_weight, n=grid.n)

    def one(item):
        _, level, f, g = item
        fg = pointwise_product(f, g)
        num = triebel_lizorkin_norm(fg, weighted, resolution)
        den = triebel_lizorkin_norm(f, plain, resolution) * triebel_lizorkin_norm(g, plain, resolution)
        return level, num / den

    rows = member_map(one, ensemble.pairs(grid))
    return _report("product_estimate_ratio", {"p": p, "q": q, "weight_exponent": -exponent}, rows)


def resolution_independence_check(
    ensemble: Ensemble,
    grid: Grid,
    res_a: ResolutionOfUnity,
    res_b: ResolutionOfUnity,
    cubes: DyadicCubeSet,
    s: float = 0.0,
    q: float = 2.0,
    weight: AdmissibleWeight | None = None,
) -> RatioReport:
    """Ratio of the p = inf norms computed under two different resolutions."""
    spec = SpaceSpec(s, np.inf, q, weight=weight, n=grid.n)

    def one(item):
        _, level, f = item
        na = tl_infinity_norm(f, spec, res_a, cubes)
        nb = tl_infinity_norm(f, spec, res_b, cubes)
        if na == 0.0 and nb == 0.0:
            return level, None
        return level, na / nb

    rows = [(lvl, r) for lvl, r in member_map(one, ensemble.members(grid)) if r is not None]
    return _report("resolution_independence", {"s": s, "q": q}, rows)


def besov_tl_embedding_check(
    ensemble: Ensemble,
    grid: Grid,
    resolution: ResolutionOfUnity,
    cubes: DyadicCubeSet,
    kind: str,
    **params,
) -> RatioReport:
    """Classical embedding ratio checks between the Besov and diagonal scales.

    kind "into_infinity": target the p = inf space from the Besov space one
    derivative up, ratio target/source.  kind "into_besov": source the
    finite-p space, gate p <= q1 and matching differential dimension.
    """
    if kind == "into_infinity":
        p, q, s = params["p"], params["q"], params.get("s", 0.0)
        src = SpaceSpec(s + grid.n / p, p, np.inf, n=grid.n)
        dst = SpaceSpec(s, np.inf, q, n=grid.n)

        def one(item):
            _, level, f = item
            return level, tl_infinity_norm(f, dst, resolution, cubes) / besov_norm(f, src, resolution)

        rows = member_map(one, ensemble.members(grid))
        return _report("besov_into_infinity", {"p": p, "q": q, "s": s}, rows)

    if kind == "into_besov":
        p, q, s = params["p"], params["q"], params["s"]
        p1, q1, s1 = params["p1"], params["q1"], params["s1"]
        if not p < p1:
            raise GateError(f"need p < p1, got p = {p}, p1 = {p1}")
        if not np.isclose(s - grid.n / p, s1 - grid.n / p1):
            raise GateError(f"differential dimensions differ: s - n/p = {s - grid.n / p:g}, s1 - n/p1 = {s1 - grid.n / p1:g}")
        if not p <= q1:
            raise GateError(f"the embedding holds exactly when p <= q1; got p = {p}, q1 = {q1}")
        src = SpaceSpec(s, p, q, n=grid.n)
        dst = SpaceSpec(s1, p1, q1, n=grid.n)

        def one(item):
            _, level, f = item
            return level, besov_norm(f, dst, resolution) / triebel_lizorkin_norm(f, src, resolution)

        rows = member_map(one, ensemble.members(grid))
        return _report("tl_into_besov", {"p": p, "q": q, "s": s, "p1": p1, "q1": q1, "s1": s1}, rows)

    raise ValueError(f"unknown embedding kind {kind!r}")


def telescoping_growth_check(
    f: GridFunction,
    r: float,
    resolution: ResolutionOfUnity,
) -> RatioReport:
    """Low-pass suprema against the predicted logarithmic growth, level by level.

    Reports ||phi0(2^-j D) f||_inf / ((1 + j log 2)^{1/r'} ||f||_{B^0_{inf,r}}).
    """
    if r < 1.0:
        raise GateError("the telescoping bound needs r >= 1")
    besov = besov_norm(f, SpaceSpec(0.0, np.inf, r, n=f.grid.n), resolution)
    ball = resolution.ball_multiplier()
    conj_exp = 0.0 if r == 1.0 else 1.0 - 1.0 / r
    rows = []
    for j in range(resolution.j_max + 1):
        piece = apply_multiplier(ball, 2.0**-j, f)
        denom = (1.0 + j * np.log(2.0)) ** conj_exp * besov
        rows.append((j, float(np.abs(piece.values).max()) / denom))
    return _report("telescoping_growth", {"r": r}, rows)


# ---------------------------------------------------------------------------
# sharpness counterexample


@dataclass(frozen=True)
class SharpnessProfile:
    """Spectral-decay exponent delta > 1/2 and weight exponent gamma.

    The square's weighted norm grows like log^alpha of the truncation radius
    with alpha = 3 - 4 delta - 2 gamma; alpha >= 0 marks divergence.
    """

    delta: float
    gamma: float
    k_range: tuple = (2, 7)

    def __post_init__(self):
        if not self.delta > 0.5:
            raise ValueError(f"membership needs delta > 1/2, got {self.delta}")

    @property
    def alpha(self) -> float:
        return 3.0 - 4.0 * self.delta - 2.0 * self.gamma

    @property
    def divergent(self) -> bool:
        return self.alpha >= 0.0

    def radii(self) -> np.ndarray:
        ks = np.arange(self.k_range[0], self.k_range[1] + 1)
        return 2.0**ks * np.e


def tail_function(grid: Grid, delta: float, radius: float) -> GridFunction:
    """The inverse transform of 1_{e < |xi| <= R} / (|xi|^n log^delta |xi|)."""
    rho = grid.frequency_modulus()
    with np.errstate(divide="ignore", invalid="ignore"):
        coeffs = np.where(
            (rho > np.e) & (rho <= radius),
            1.0 / np.where(rho > np.e, rho**grid.n * np.log(np.maximum(rho, 1.1)) ** delta, 1.0),
            0.0,
        )
    return inverse_transform(Spectrum(grid, coeffs))


def offset_power_fit(radii, values):
    """Fit values ~ a (log R)^alpha + c; returns (alpha, a, c, rms_residual).

    For each candidate exponent the best (a, c) is a linear problem; the
    exponent is located by a scan plus ternary refinement.  Exact data of
    this form is recovered exactly, which the scalar oracle verifies before
    any norm data is trusted.
    """
    x = np.log(np.asarray(radii, dtype=float))
    y = np.asarray(values, dtype=float)

    def sse(alpha):
        basis = np.stack([x**alpha, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        r = y - basis @ coef
        return float(r @ r), coef

    candidates = np.concatenate([np.linspace(-2.0, -0.01, 200), np.linspace(0.01, 2.0, 400)])
    errors = [sse(a)[0] for a in candidates]
    i = int(np.argmin(errors))
    lo = candidates[max(0, i - 1)]
    hi = candidates[min(len(candidates) - 1, i + 1)]
    for _ in range(80):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if sse(m1)[0] < sse(m2)[0]:
            hi = m2
        else:
            lo = m1
    alpha = 0.5 * (lo + hi)
    err, coef = sse(alpha)
    return float(alpha), float(coef[0]), float(coef[1]), float(np.sqrt(err / len(y)))


def scalar_log_power_oracle(delta: float, gamma: float, k_range=(2, 16), points: int = 200_001):
    """Quadrature values of the model integral and the fitted growth exponent.

    I(R) = 2 * integral over [2e, R] of log^{2-4delta-2gamma}(r)/r dr, the
    scalar skeleton of the norm growth; returns (radii, values, alpha_hat).
    """
    beta = 2.0 - 4.0 * delta - 2.0 * gamma
    radii = 2.0 ** np.arange(k_range[0], k_range[1] + 1) * np.e
    r = np.exp(np.linspace(np.log(2.0 * np.e), np.log(radii[-1]), points))
    integrand = np.log(r) ** beta / r
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(r))])
    values = 2.0 * np.interp(np.log(radii), np.log(r), cumulative)
    alpha_hat, *_ = offset_power_fit(radii, values)
    return radii, values, float(alpha_hat)


def sharpness_convolution_check(grid: Grid, delta: float, radius: float, samples: int = 12) -> dict:
    """Self-convolution of the truncated spectrum against its closed-form lower bound."""
    f = tail_function(grid, delta, radius)
    conv = forward_transform(pointwise_product(f, f)).coefficients
    rho = grid.frequency_modulus()
    targets = np.geomspace(2.0 * np.e * 1.05, radius * 0.9, samples)
    worst = np.inf
    for t in targets:
        idx = int(np.argmin(np.abs(rho - t)))
        xi = float(rho.flat[idx])
        bound = (np.log(xi - np.e) ** (1.0 - delta) - 1.0) / (
            (1.0 - delta) * (2.0 * xi - np.e) ** grid.n * np.log(2.0 * xi - np.e) ** delta
        )
        if bound <= 0:
            continue
        worst = min(worst, float(np.real(conv.flat[idx])) / bound)
    return {"min_ratio": worst, "passes": bool(worst >= 0.95)}


@dataclass(frozen=True)
class SharpnessReport:
    profile: SharpnessProfile
    radii: tuple
    growth_values: tuple          # S(R), the squared weighted norm of the square
    membership_norms: tuple       # partial Sobolev norms of the truncations
    oracle_alpha: float
    alpha_hat: float | None       # fitted growth exponent (divergent branch)
    cauchy: dict | None           # increment statistics (convergent branch)

    def to_dict(self) -> dict:
        return {
            "delta": self.profile.delta,
            "gamma": self.profile.gamma,
            "alpha_true": self.profile.alpha,
            "divergent": self.profile.divergent,
            "radii": list(self.radii),
            "growth_values": list(self.growth_values),
            "membership_norms": list(self.membership_norms),
            "oracle_alpha": self.oracle_alpha,
            "alpha_hat": self.alpha_hat,
            "cauchy": self.cauchy,
        }


def sharpness_scan(
    profile: SharpnessProfile,
    grid: Grid,
    resolution: ResolutionOfUnity,
) -> SharpnessReport:
    """Membership and growth scan for the logarithmic counterexample.

    Truncation radii are clipped to half the grid's Nyquist bound so the
    pointwise square stays alias-free.
    """
    radii = profile.radii()
    max_radius = grid.nyquist / 2.0
    radii = radii[radii <= max_radius]
    if radii.size < 4:
        raise ValueError("grid too coarse for the requested radius sweep")
    weight = AdmissibleWeight.prototype(-profile.gamma)
    spec = SpaceSpec(grid.n / 2.0, 2.0, 2.0, weight=weight, n=grid.n)

    growth = []
    membership = []
    for R in radii:
        f = tail_function(grid, profile.delta, R)
        membership.append(sobolev_norm(f, grid.n / 2.0))
        square = pointwise_product(f, f)
        growth.append(triebel_lizorkin_norm(square, spec, resolution) ** 2)

    _, _, oracle_alpha = scalar_log_power_oracle(profile.delta, profile.gamma, (profile.k_range[0], 16))

    alpha_hat = None
    cauchy = None
    if profile.divergent:
        alpha_hat, *_ = offset_power_fit(radii, growth)
    else:
        increments = np.diff(growth)
        cauchy = {
            "increments": [float(v) for v in increments],
            "decreasing": bool(np.all(np.diff(increments) < 0)),
            "last_over_first": float(increments[-1] / increments[0]) if increments[0] != 0 else np.inf,
        }
    return SharpnessReport(
        profile,
        tuple(float(r) for r in radii),
        tuple(float(v) for v in growth),
        tuple(float(v) for v in membership),
        oracle_alpha,
        alpha_hat,
        cauchy,
    )
