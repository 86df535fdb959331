"""Function-space norms on grid functions.

Implemented scales, all built from dyadic frequency blocks:

* Besov: weighted l^q sum of block L^p norms.
* Triebel-Lizorkin with a generalised-smoothness weight (p finite): L^p norm
  of the weighted l^q sum of pointwise block values.
* The p = infinity variant: a supremum of block-sum averages over dyadic
  cubes of side at most one, plus the low-pass supremum.
* bmo / BMO: mean oscillation over cubes (bmo adds plain means over cubes of
  side at least one).
* The oscillation-plus-scale norm X_w: BMO plus the supremum over dyadic
  scales t of the low-pass supremum divided by w(t).

Every j-sum is truncated at the resolution's top level; inputs must be
band-limited under 2^j_max (checked), which makes the truncation exact
rather than approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, Spectrum, apply_multiplier, forward_transform, inverse_transform, lp_norm
from .partition import ResolutionOfUnity
from .weights import AdmissibleWeight, RegularizedWeight, power_weight, regularize

__all__ = [
    "SpaceSpec",
    "DyadicCubeSet",
    "BandLeakageError",
    "LiftingReport",
    "besov_norm",
    "triebel_lizorkin_norm",
    "tl_infinity_norm",
    "bmo_norm",
    "big_bmo_norm",
    "xw_norm",
    "sobolev_norm",
    "lifting_check",
    "build_cubes",
    "block_norms",
]


class BandLeakageError(ValueError):
    """Spectral mass above the top dyadic level would make the truncated sums wrong."""


@dataclass(frozen=True)
class SpaceSpec:
    """Indices (s, p, q) and an optional generalised-smoothness weight.

    ``weight=None`` means the constant weight, i.e. the classical spaces.
    """

    s: float
    p: float
    q: float
    weight: AdmissibleWeight | None = None
    n: int = 1

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError(f"p and q must be positive, got p={self.p}, q={self.q}")

    @property
    def tau(self) -> float:
        """The paraproduct smoothness threshold n(1/min(1,p,q) - 1)."""
        return self.n * (1.0 / min(1.0, self.p, self.q) - 1.0)

    @property
    def r(self) -> float:
        return max(1.0, self.p)

    @property
    def r_conj(self) -> float:
        """Conjugate exponent of r = max(1, p); infinity when r = 1."""
        return np.inf if self.r == 1.0 else self.r / (self.r - 1.0)

    def dyadic_weight(self, j: np.ndarray) -> np.ndarray:
        if self.weight is None:
            return np.ones_like(np.asarray(j, dtype=float))
        return self.weight.dyadic(j)


# ---------------------------------------------------------------------------
# dyadic cubes


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class DyadicCubeSet:
    """Dyadic cube tilings of the torus, with half-shifted translates.

    ``small`` holds (side, samples_per_axis) for sides 2^-k <= 1 down to the
    sample spacing; ``large`` the same for sides 2, 4, ..., L.  Requires the
    period L to be a power of two so every scale tiles the sample lattice
    exactly.
    """

    grid: Grid
    small: tuple
    large: tuple

    def scales(self, kind: str) -> tuple:
        if kind == "small":
            return self.small
        if kind == "large":
            return self.large
        if kind == "all":
            return self.small + self.large
        raise ValueError(f"unknown cube scale kind {kind!r}")


def build_cubes(grid: Grid) -> DyadicCubeSet:
    ratio = grid.points / grid.length
    if grid.length < 1 or not float(np.log2(grid.length)).is_integer() or not _is_power_of_two(int(round(ratio))):
        raise ValueError("cube norms require a power-of-two period with dyadic sample alignment")
    small = []
    k = 0
    while True:
        side = 2.0**-k
        m = int(round(side * ratio))
        if m < 1:
            break
        small.append((side, m))
        k += 1
    large = []
    m_exp = 1
    while 2.0**m_exp <= grid.length:
        side = 2.0**m_exp
        large.append((side, int(round(side * ratio))))
        m_exp += 1
    return DyadicCubeSet(grid, tuple(small), tuple(large))


def _cube_views(values: np.ndarray, m: int, n: int):
    """Yield (family_name, blocked view) for the aligned and half-shifted tilings."""
    N = values.shape[0]
    shifts = [0] if m <= 1 else [0, m // 2]
    for sx in shifts:
        rolled = np.roll(values, -sx, axis=0) if sx else values
        if n == 1:
            yield (sx,), rolled.reshape(N // m, m)
        else:
            for sy in shifts:
                r2 = np.roll(rolled, -sy, axis=1) if sy else rolled
                yield (sx, sy), r2.reshape(N // m, m, N // m, m).swapaxes(1, 2).reshape(N // m, N // m, m * m)


def _block_axes(n: int):
    return -1  # blocked views above always put cube samples on the last axis


def _max_cube_mean(values: np.ndarray, m: int, n: int):
    """Max over cubes (all shift families) of the in-cube mean of ``values`` (real)."""
    best = -np.inf
    where = None
    for family, view in _cube_views(values, m, n):
        means = view.mean(axis=_block_axes(n))
        idx = int(np.argmax(means))
        if means.flat[idx] > best:
            best = float(means.flat[idx])
            where = (family, idx)
    return best, where


def _max_cube_oscillation(values: np.ndarray, m: int, n: int):
    """Max over cubes of the mean absolute deviation from the in-cube mean."""
    best = -np.inf
    where = None
    for family, view in _cube_views(values, m, n):
        mu = view.mean(axis=-1, keepdims=True)
        osc = np.abs(view - mu).mean(axis=-1)
        idx = int(np.argmax(osc))
        if osc.flat[idx] > best:
            best = float(osc.flat[idx])
            where = (family, idx)
    return best, where


# ---------------------------------------------------------------------------
# dyadic blocks


def _band_guard(f: GridFunction, resolution: ResolutionOfUnity, tol: float = 1e-10) -> None:
    F = forward_transform(f)
    rho = f.grid.frequency_modulus()
    total = float(np.linalg.norm(F.coefficients))
    if total == 0.0:
        return
    outside = rho > 2.0**resolution.j_max
    if outside.any():
        leak = float(np.linalg.norm(F.coefficients[outside]))
        if leak > tol * total:
            raise BandLeakageError(
                f"spectral mass above 2^{resolution.j_max} (relative l2 leak {leak / total:.2e}); "
                "raise j_max or band-limit the input"
            )


def block_values(f: GridFunction, resolution: ResolutionOfUnity) -> list:
    """|phi_j(D) f| for j = 0..j_max as real sample arrays (one FFT each way)."""
    F = forward_transform(f)
    rho = f.grid.frequency_modulus()
    out = []
    for j in range(resolution.j_max + 1):
        mult = resolution.band(j, rho)
        piece = inverse_transform(Spectrum(f.grid, mult * F.coefficients))
        out.append(np.abs(piece.values))
    return out


def block_norms(f: GridFunction, spec: SpaceSpec, resolution: ResolutionOfUnity) -> list:
    """Per-level weighted block norms 2^{js} w(2^-j) ||phi_j(D) f||_p."""
    blocks = block_values(f, resolution)
    out = []
    for j, b in enumerate(blocks):
        a_j = 2.0 ** (j * spec.s) * float(spec.dyadic_weight(np.array(j)))
        out.append(a_j * lp_norm(GridFunction(f.grid, b), spec.p))
    return out


def _factors(spec: SpaceSpec, j_max: int) -> np.ndarray:
    j = np.arange(j_max + 1)
    return 2.0 ** (j * spec.s) * spec.dyadic_weight(j)


def besov_norm(f: GridFunction, spec: SpaceSpec, resolution: ResolutionOfUnity) -> float:
    """Besov norm; defined for the constant weight only."""
    if spec.weight is not None and not (spec.weight.is_prototype and spec.weight.lam == 0 and spec.weight.mu == 0):
        raise ValueError("the Besov scale here is unweighted; use weight=None")
    _band_guard(f, resolution)
    blocks = block_values(f, resolution)
    factors = _factors(spec, resolution.j_max)
    norms = np.array([lp_norm(GridFunction(f.grid, b), spec.p) for b in blocks])
    terms = factors * norms
    if spec.q == np.inf:
        return float(terms.max())
    return float((terms**spec.q).sum() ** (1.0 / spec.q))


def triebel_lizorkin_norm(f: GridFunction, spec: SpaceSpec, resolution: ResolutionOfUnity) -> float:
    """Weighted Triebel-Lizorkin norm for finite p."""
    if spec.p == np.inf:
        raise ValueError("use tl_infinity_norm for p = inf")
    _band_guard(f, resolution)
    blocks = block_values(f, resolution)
    factors = _factors(spec, resolution.j_max)
    stacked = np.stack([a * b for a, b in zip(factors, blocks)])
    if spec.q == np.inf:
        inner = stacked.max(axis=0)
    else:
        inner = (stacked**spec.q).sum(axis=0) ** (1.0 / spec.q)
    return lp_norm(GridFunction(f.grid, inner), spec.p)


def tl_infinity_norm(
    f: GridFunction,
    spec: SpaceSpec,
    resolution: ResolutionOfUnity,
    cubes: DyadicCubeSet,
    details: bool = False,
):
    """The p = infinity norm: low-pass supremum plus the dyadic-cube block-average supremum."""
    if spec.q == np.inf:
        raise ValueError("the p = inf space needs finite q")
    _band_guard(f, resolution)
    blocks = block_values(f, resolution)
    factors = _factors(spec, resolution.j_max)
    powered = np.stack([(a * b) ** spec.q for a, b in zip(factors, blocks)])
    # suffix sums over levels: entry k holds sum_{j >= k} (a_j |block_j|)^q;
    # the j = 0 block is carried by the separate low-pass term, so cube sums
    # start no lower than level one (an equivalent, non-double-counting form)
    suffix = np.cumsum(powered[::-1], axis=0)[::-1]
    term0 = float(np.abs(blocks[0]).max())
    best = 0.0
    argmax = None
    for side, m in cubes.small:
        k = max(int(round(-np.log2(side))), 1)
        if k > resolution.j_max:
            continue
        value, where = _max_cube_mean(suffix[k], m, f.grid.n)
        value = max(value, 0.0) ** (1.0 / spec.q)
        if value > best:
            best = value
            argmax = {"side": side, "shift": list(where[0]), "index": where[1], "value": value}
    total = term0 + best
    if details:
        return total, {"low_pass_sup": term0, "cube_sup": best, "argmax_cube": argmax}
    return total


def bmo_norm(f: GridFunction, cubes: DyadicCubeSet, details: bool = False):
    """Local mean-oscillation norm: oscillation on small cubes, plain means on large ones."""
    values = f.values
    best_osc, arg_osc = 0.0, None
    for side, m in cubes.small:
        if side >= 1.0:
            continue
        v, where = _max_cube_oscillation(values, m, f.grid.n)
        if v > best_osc:
            best_osc, arg_osc = v, {"side": side, "shift": list(where[0]), "index": where[1]}
    best_mean = 0.0
    for side, m in [(s, m) for s, m in cubes.small if s >= 1.0] + list(cubes.large):
        v, _ = _max_cube_mean(np.abs(values), m, f.grid.n)
        best_mean = max(best_mean, v)
    total = best_osc + best_mean
    if details:
        return total, {"oscillation_sup": best_osc, "large_mean_sup": best_mean, "argmax_cube": arg_osc}
    return total


def big_bmo_norm(f: GridFunction, cubes: DyadicCubeSet) -> float:
    """Mean oscillation over every cube scale (no large-cube mean term)."""
    values = f.values
    best = 0.0
    for side, m in cubes.scales("all"):
        v, _ = _max_cube_oscillation(values, m, f.grid.n)
        best = max(best, v)
    return best


def xw_norm(
    f: GridFunction,
    weight: AdmissibleWeight,
    resolution: ResolutionOfUnity,
    cubes: DyadicCubeSet,
    details: bool = False,
):
    """BMO plus sup over dyadic scales t of ||low_pass(tD) f||_inf / w(t).

    The weight must be non-increasing (or constant); otherwise the scale
    term has no chance of being finite uniformly and the construction is
    rejected.
    """
    if not weight.non_increasing:
        raise ValueError("the oscillation-plus-scale norm needs a non-increasing (or constant) weight")
    bmo_part = big_bmo_norm(f, cubes)
    ball = resolution.ball_multiplier()
    best = 0.0
    best_t = None
    for j in range(-resolution.j_max, resolution.j_max + 1):
        t = 2.0**-j
        piece = apply_multiplier(ball, t, f)
        v = float(np.abs(piece.values).max()) / float(weight.value(t))
        if v > best:
            best, best_t = v, t
    total = bmo_part + best
    if details:
        return total, {"bmo_part": bmo_part, "scale_sup": best, "argmax_scale": best_t}
    return total


def sobolev_norm(f: GridFunction, s: float) -> float:
    """Plancherel form of the L^2 Sobolev norm (the p = q = 2 diagonal space)."""
    F = forward_transform(f)
    rho2 = sum(m**2 for m in f.grid.frequency_mesh())
    weight = (1.0 + rho2) ** s
    return float(np.sqrt((weight * np.abs(F.coefficients) ** 2).sum() / f.grid.volume))


@dataclass(frozen=True)
class LiftingReport:
    weighted_norm: float
    lifted_norm: float
    ratio: float

    def to_dict(self) -> dict:
        return {"weighted_norm": self.weighted_norm, "lifted_norm": self.lifted_norm, "ratio": self.ratio}


def lifting_check(
    f: GridFunction,
    spec: SpaceSpec,
    weight: AdmissibleWeight,
    resolution: ResolutionOfUnity,
    cubes: DyadicCubeSet | None = None,
    exponent: float = 1.0,
    reg: RegularizedWeight | None = None,
) -> LiftingReport:
    """Compare the weighted norm of f with the plain norm of the lifted function.

    The lift applies the regularised weight raised to ``exponent`` as a
    Fourier multiplier; the weighted side uses the weight raised to the same
    power.  For p = inf a cube set is required, and powers other than one
    need q > 1.
    """
    if spec.p == np.inf and cubes is None:
        raise ValueError("p = inf needs a dyadic cube set")
    if spec.p == np.inf and exponent != 1.0 and not (spec.q > 1):
        raise ValueError("powered lifts at p = inf need q > 1")
    w_pow = weight if exponent == 1.0 else power_weight(weight, exponent)
    weighted_spec = SpaceSpec(spec.s, spec.p, spec.q, weight=w_pow, n=spec.n)
    plain_spec = SpaceSpec(spec.s, spec.p, spec.q, weight=None, n=spec.n)
    reg = reg or regularize(weight, resolution)
    lifted = apply_multiplier(reg.multiplier(exponent), 1.0, f)
    if spec.p == np.inf:
        weighted_norm = tl_infinity_norm(f, weighted_spec, resolution, cubes)
        lifted_norm = tl_infinity_norm(lifted, plain_spec, resolution, cubes)
    else:
        weighted_norm = triebel_lizorkin_norm(f, weighted_spec, resolution)
        lifted_norm = triebel_lizorkin_norm(lifted, plain_spec, resolution)
    ratio = weighted_norm / lifted_norm if lifted_norm > 0 else np.inf if weighted_norm > 0 else 1.0
    return LiftingReport(weighted_norm, lifted_norm, float(ratio))
