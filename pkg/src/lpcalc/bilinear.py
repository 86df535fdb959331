"""Bilinear frequency-symbol operators and their decompositions.

An operator here acts on a pair of grid functions through a symbol
sigma(x, xi, eta):

    T(f, g)(x) = L^-2n  sum_{xi, eta}  sigma(x, xi, eta) fhat(xi) ghat(eta)
                 exp(i x (xi + eta)),

the discrete form of the double frequency integral with normalised
measure.  The direct double sum is the reference implementation; an
FFT-accelerated path (x-independent symbols via a 2n-dimensional
multiplier, elementary families via per-band products) must agree with it
and carries the speed.

The calculus splits a symbol into a piece where the first frequency
dominates and a mirrored piece, expands each dyadic piece into a Fourier
series of separable terms, and bounds everything through finite-difference
growth seminorms.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from ._diff import diff_along, trim_along
from .grid import Grid, GridFunction, Spectrum, forward_transform, inverse_transform
from .partition import AnnulusCutoffs, ResolutionOfUnity

__all__ = [
    "BilinearSymbol",
    "SymbolDecomposition",
    "ElementarySymbolSeries",
    "ElementaryFamily",
    "SeriesTailError",
    "SupportError",
    "apply_bilinear",
    "bs_seminorm",
    "bs_seminorm_sweep",
    "split_paraproduct",
    "fourier_coefficients",
    "apply_elementary",
    "apply_series",
    "assemble_elementary_symbol",
    "builtin_symbol",
    "BUILTIN_SYMBOLS",
]


class SeriesTailError(ValueError):
    """The truncated Fourier series reconstructs its symbol piece too poorly."""

    def __init__(self, message: str, tail: float):
        super().__init__(message)
        self.tail = tail


class SupportError(ValueError):
    """An elementary family violates its declared frequency support pattern."""


@dataclass(frozen=True)
class BilinearSymbol:
    """A symbol sigma(x, xi, eta) with a declared growth order.

    ``evaluator`` takes flattened coordinate components: for x-independent
    symbols in one dimension ``sigma(xi, eta)``, otherwise
    ``sigma(x, xi, eta)`` (two-dimensional symbols receive two arrays per
    slot).  All arguments arrive as broadcastable arrays.

    A symbol of the separable form sigma = sum_i a_i(xi) b_i(eta) may
    declare ``factors`` as a tuple of (a_i, b_i) multiplier callables (grid
    multiplier convention, one frequency component array per axis); the
    application then runs through per-factor products instead of the full
    frequency matrix.
    """

    evaluator: callable
    order: float = 0.0
    smoothness: int = 3
    x_independent: bool = True
    n: int = 1
    name: str = ""
    factors: tuple | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    def frequency_matrix(self, grid: Grid) -> np.ndarray:
        """Symbol sampled on the (xi, eta) product lattice (x-independent only).

        Sampled once per grid under exclusion, then shared read-only.
        """
        if not self.x_independent:
            raise ValueError("frequency matrix exists only for x-independent symbols")
        key = (grid.n, grid.points, grid.length)
        with self._lock:
            if key not in self._cache:
                if grid.n == 1:
                    xi = grid.axis_frequencies()
                    vals = self.evaluator(xi[:, None], xi[None, :])
                else:
                    ax = grid.axis_frequencies()
                    x1 = ax[:, None, None, None]
                    x2 = ax[None, :, None, None]
                    e1 = ax[None, None, :, None]
                    e2 = ax[None, None, None, :]
                    vals = self.evaluator(x1, x2, e1, e2)
                vals = np.asarray(vals, dtype=np.complex128)
                vals = np.broadcast_to(vals, (grid.points,) * (2 * grid.n)).copy()
                if not np.all(np.isfinite(vals)):
                    raise ValueError(f"symbol {self.name or '<anonymous>'} is not finite on the grid frequencies")
                vals.setflags(write=False)
                self._cache[key] = vals
            return self._cache[key]

    def __call__(self, *args):
        return self.evaluator(*args)


def _x_phases(grid: Grid) -> np.ndarray:
    x = grid.axis_points()
    xi = grid.axis_frequencies()
    return np.exp(1j * np.outer(x, xi))


def _apply_direct_1d(sym: BilinearSymbol, F: np.ndarray, G: np.ndarray, grid: Grid, chunk: int = 32) -> np.ndarray:
    E = _x_phases(grid)
    x = grid.axis_points()
    xi = grid.axis_frequencies()
    out = np.empty(grid.points, dtype=np.complex128)
    if sym.x_independent:
        M = sym.frequency_matrix(grid) * F[:, None] * G[None, :]
        for lo in range(0, grid.points, chunk):
            hi = min(lo + chunk, grid.points)
            out[lo:hi] = np.einsum("ck,kl,cl->c", E[lo:hi], M, E[lo:hi], optimize=True)
    else:
        for lo in range(0, grid.points, chunk):
            hi = min(lo + chunk, grid.points)
            S = np.asarray(
                sym.evaluator(x[lo:hi, None, None], xi[None, :, None], xi[None, None, :]),
                dtype=np.complex128,
            )
            if not np.all(np.isfinite(S)):
                raise ValueError(f"symbol {sym.name or '<anonymous>'} is not finite on the grid frequencies")
            S = np.broadcast_to(S, (hi - lo, grid.points, grid.points))
            M = S * (F[None, :, None] * G[None, None, :])
            out[lo:hi] = np.einsum("ckl,ck,cl->c", M, E[lo:hi], E[lo:hi], optimize=True)
    return out / grid.volume**2


def _apply_direct_2d(sym: BilinearSymbol, F: np.ndarray, G: np.ndarray, grid: Grid) -> np.ndarray:
    if grid.points > 16:
        raise ValueError("the direct double sum in two dimensions is limited to N <= 16")
    ax = grid.axis_frequencies()
    xs = grid.point_mesh()
    X1 = xs[0].reshape(-1)
    X2 = xs[1].reshape(-1)
    E1 = ax[:, None, None, None]
    E2 = ax[None, :, None, None]
    H1 = ax[None, None, :, None]
    H2 = ax[None, None, None, :]
    out = np.empty(grid.size, dtype=np.complex128)
    FG = F[:, :, None, None] * G[None, None, :, :]
    for i in range(grid.size):
        if sym.x_independent:
            S = sym.evaluator(E1, E2, H1, H2)
        else:
            S = sym.evaluator(X1[i], X2[i], E1, E2, H1, H2)
        phase = np.exp(1j * (X1[i] * (E1 + H1) + X2[i] * (E2 + H2)))
        out[i] = (np.asarray(S, dtype=np.complex128) * FG * phase).sum()
    return out.reshape(grid.shape) / grid.volume**2


def _apply_fft(sym: BilinearSymbol, F: np.ndarray, G: np.ndarray, grid: Grid) -> np.ndarray:
    M = sym.frequency_matrix(grid)
    if grid.n == 1:
        W = np.fft.ifft2(M * F[:, None] * G[None, :])
        return np.einsum("mm->m", W) / grid.cell_volume**2
    prod = M * F[:, :, None, None] * G[None, None, :, :]
    W = np.fft.ifftn(prod, axes=(0, 1, 2, 3))
    return np.einsum("abab->ab", W) / grid.cell_volume**2


def _apply_factored(sym: BilinearSymbol, F: np.ndarray, G: np.ndarray, grid: Grid) -> np.ndarray:
    mesh = grid.frequency_mesh()
    out = np.zeros(grid.shape, dtype=np.complex128)
    for a, b in sym.factors:
        fa = np.fft.ifftn(np.asarray(a(*mesh), dtype=np.complex128) * F) / grid.cell_volume
        gb = np.fft.ifftn(np.asarray(b(*mesh), dtype=np.complex128) * G) / grid.cell_volume
        out += fa * gb
    return out


def apply_bilinear(sym: BilinearSymbol, f: GridFunction, g: GridFunction, method: str = "auto") -> GridFunction:
    """Apply the bilinear operator for ``sym`` to a pair of grid functions.

    method: "direct" for the reference double sum, "fft" for the
    2n-dimensional multiplier path (x-independent symbols only),
    "factored" for declared separable factorisations, "auto" picks the
    cheapest available.
    """
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("operands live on different grids")
    grid = f.grid
    F = forward_transform(f).coefficients
    G = forward_transform(g).coefficients
    if method == "auto":
        method = "factored" if sym.factors else ("fft" if sym.x_independent else "direct")
    if method == "factored":
        if not sym.factors:
            raise ValueError("the symbol declares no separable factorisation")
        values = _apply_factored(sym, F, G, grid)
    elif method == "fft":
        if not sym.x_independent:
            raise ValueError("the fft path needs an x-independent symbol")
        values = _apply_fft(sym, F, G, grid)
    elif method == "direct":
        values = _apply_direct_1d(sym, F, G, grid) if grid.n == 1 else _apply_direct_2d(sym, F, G, grid)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFunction(grid, values)


# ---------------------------------------------------------------------------
# growth seminorms


def _bs_table(
    sym: BilinearSymbol, order_n: int, span: float, spacing: float, x_points: int = 17, x_period: float = 64.0
) -> dict:
    """Sup of the weighted mixed differences over a uniform (x, xi, eta) lattice."""
    if sym.n != 1:
        raise ValueError("growth seminorms are implemented for one-dimensional symbols")
    half = int(span / spacing)
    freq = spacing * np.arange(-half, half + 1)
    if sym.x_independent:
        vals = np.asarray(sym.evaluator(freq[:, None], freq[None, :]), dtype=np.complex128)
        vals = np.broadcast_to(vals, (freq.size, freq.size))[None, :, :]
        x_spacing = 1.0
    else:
        # each differencing pass trims four points, so the lattice must
        # leave room for the highest x order
        x_points = max(x_points, 4 * order_n + 5)
        x = np.linspace(0.0, x_period, x_points, endpoint=False)
        x_spacing = x[1] - x[0]
        vals = np.asarray(
            sym.evaluator(x[:, None, None], freq[None, :, None], freq[None, None, :]), dtype=np.complex128
        )
        vals = np.broadcast_to(vals, (x.size, freq.size, freq.size))
    table = {}
    for a in range(order_n + 1):
        if sym.x_independent and a > 0:
            # no x dependence: every x derivative vanishes identically
            table.update({(a, b, c): 0.0 for b in range(order_n + 1) for c in range(order_n + 1)})
            continue
        da = diff_along(vals, a, x_spacing, axis=0)
        for b in range(order_n + 1):
            dab = diff_along(da, b, spacing, axis=1)
            for c in range(order_n + 1):
                dabc = diff_along(dab, c, spacing, axis=2)
                xi_abs = np.abs(trim_along(freq, b))[None, :, None]
                eta_abs = np.abs(trim_along(freq, c))[None, None, :]
                weight = (1.0 + xi_abs + eta_abs) ** (-(sym.order + a - b - c))
                table[(a, b, c)] = float((np.abs(dabc) * weight).max())
    return table


def bs_seminorm(sym: BilinearSymbol, order_n: int = 3, span: float = 16.0, spacing: float = 0.25) -> float:
    """Finite-difference growth seminorm: the largest weighted mixed difference."""
    if order_n > 3:
        raise ValueError("seminorm order capped at 3")
    return max(_bs_table(sym, order_n, span, spacing).values())


@dataclass(frozen=True)
class BsSweepReport:
    spans: tuple
    values: tuple          # seminorm per span
    trend_slope: float
    stable: bool

    def to_dict(self) -> dict:
        return {
            "spans": list(self.spans),
            "values": list(self.values),
            "trend_slope": self.trend_slope,
            "stable": self.stable,
        }


def bs_seminorm_sweep(sym: BilinearSymbol, order_n: int = 3, spans=(8.0, 16.0, 32.0), spacing: float = 0.25) -> BsSweepReport:
    """Seminorm across an expanding lattice; growth exposes out-of-class symbols."""
    values = tuple(bs_seminorm(sym, order_n, span, spacing) for span in spans)
    logs = np.log(np.maximum(values, 1e-300))
    slope = float(np.polyfit(np.arange(len(values)), logs, 1)[0])
    return BsSweepReport(tuple(spans), values, slope, bool(slope <= 0.05))


# ---------------------------------------------------------------------------
# paraproduct split


def _piece_first(sym: BilinearSymbol, resolution: ResolutionOfUnity, j: int) -> BilinearSymbol:
    """sigma * phi_j(xi) * phi0(2^-j eta): first frequency in the level-j annulus."""

    if sym.x_independent:

        def ev(xi, eta):
            return (
                np.asarray(sym.evaluator(xi, eta))
                * resolution.band(j, np.abs(xi))
                * resolution.low_pass(np.abs(eta) * 2.0**-j)
            )

    else:

        def ev(x, xi, eta):
            return (
                np.asarray(sym.evaluator(x, xi, eta))
                * resolution.band(j, np.abs(xi))
                * resolution.low_pass(np.abs(eta) * 2.0**-j)
            )

    return BilinearSymbol(ev, sym.order, sym.smoothness, sym.x_independent, sym.n, f"{sym.name}|first[{j}]")


def _piece_second(sym: BilinearSymbol, resolution: ResolutionOfUnity, k: int) -> BilinearSymbol:
    """sigma * phi0(2^-k+1 xi) * phi_k(eta): second frequency dominates."""

    if sym.x_independent:

        def ev(xi, eta):
            return (
                np.asarray(sym.evaluator(xi, eta))
                * resolution.low_pass(np.abs(xi) * 2.0 ** (-k + 1))
                * resolution.band(k, np.abs(eta))
            )

    else:

        def ev(x, xi, eta):
            return (
                np.asarray(sym.evaluator(x, xi, eta))
                * resolution.low_pass(np.abs(xi) * 2.0 ** (-k + 1))
                * resolution.band(k, np.abs(eta))
            )

    return BilinearSymbol(ev, sym.order, sym.smoothness, sym.x_independent, sym.n, f"{sym.name}|second[{k}]")


@dataclass(frozen=True)
class SymbolDecomposition:
    """The two-sided paraproduct split of a symbol over a dyadic resolution."""

    symbol: BilinearSymbol
    resolution: ResolutionOfUnity
    first_pieces: tuple    # levels 0..j_max, first frequency dominant
    second_pieces: tuple   # levels 1..j_max, second frequency dominant

    def reconstruction_residual(
        self, span: float | None = None, points: int = 257, x_samples: int = 5, x_period: float = 64.0
    ) -> float:
        """Sup over a frequency box of |sum of pieces - symbol|.

        The box is restricted to the region where both partition tails are
        complete, half the top dyadic level per axis.
        """
        span = span or 2.0 ** (self.resolution.j_max - 1)
        freq = np.linspace(-span, span, points)
        xi = freq[:, None]
        eta = freq[None, :]
        if self.symbol.x_independent:
            xs = [None]
        else:
            xs = np.linspace(0.0, x_period, x_samples, endpoint=False)
        worst = 0.0
        for x in xs:
            args = (xi, eta) if x is None else (x, xi, eta)
            total = np.zeros((points, points), dtype=np.complex128)
            for piece in self.first_pieces + self.second_pieces:
                total = total + np.asarray(piece.evaluator(*args), dtype=np.complex128)
            target = np.broadcast_to(np.asarray(self.symbol.evaluator(*args), dtype=np.complex128), total.shape)
            worst = max(worst, float(np.abs(total - target).max()))
        return worst


def split_paraproduct(sym: BilinearSymbol, resolution: ResolutionOfUnity) -> SymbolDecomposition:
    """Split sigma into frequency-dominance pieces along the dyadic resolution."""
    first = tuple(_piece_first(sym, resolution, j) for j in range(resolution.j_max + 1))
    second = tuple(_piece_second(sym, resolution, k) for k in range(1, resolution.j_max + 1))
    return SymbolDecomposition(sym, resolution, first, second)


# ---------------------------------------------------------------------------
# Fourier-series expansion of the dyadic pieces


@dataclass(frozen=True)
class ElementarySymbolSeries:
    """Separable Fourier expansion of one first-dominant piece.

    coefficients[k + k_max, l + k_max] holds the series coefficient for the
    modulation pair (k, l); for x-dependent symbols an extra trailing axis
    runs over the grid samples.  The measured ``tail`` is the sup-norm error
    of reconstructing the windowed piece from the truncated series.
    """

    level: int
    k_max: int
    coefficients: np.ndarray
    tail: float
    decay_exponent_k: float
    decay_exponent_l: float
    normalized_decay_max: float   # sup of 2^{-jm} (1+|k|)^4 (1+|l|)^4 |c|
    order: float

    def coefficient(self, k: int, ell: int):
        return self.coefficients[k + self.k_max, ell + self.k_max]


def fourier_coefficients(
    sym: BilinearSymbol,
    resolution: ResolutionOfUnity,
    j: int,
    k_max: int = 16,
    cutoffs: AnnulusCutoffs | None = None,
    lattice: int = 512,
    tail_tol: float = 0.05,
    grid: Grid | None = None,
) -> ElementarySymbolSeries:
    """Fourier-series coefficients of the rescaled, windowed level-j piece.

    The analysed function is sigma(x, 2^j u, 2^j v) ring(u) ball3(v) on the
    square [-pi, pi)^2 (the ball window replaces the ring when j = 0), so
    the modulated series times phi_j(xi) phi0(2^-j eta) reconstructs the
    dyadic piece.  The reported tail is the masked sup-norm reconstruction
    error; a tail above ``tail_tol`` raises SeriesTailError carrying it.
    """
    if sym.n != 1:
        raise ValueError("series expansion is implemented for one-dimensional symbols")
    if not (0 <= j <= resolution.j_max):
        raise ValueError(f"level {j} outside resolution range")
    cutoffs = cutoffs or AnnulusCutoffs(resolution.profile)
    M = int(lattice)
    u = -np.pi + 2.0 * np.pi * np.arange(M) / M
    win_u = cutoffs.ring(u) if j >= 1 else cutoffs.ball3(u)
    win_v = cutoffs.ball3(u)
    window = win_u[:, None] * win_v[None, :]
    scale = 2.0**j
    k_idx = np.fft.fftfreq(M, d=1.0 / M).astype(int)
    phase2 = (-1.0) ** np.abs(k_idx[:, None] + k_idx[None, :])
    ks = np.arange(-k_max, k_max + 1)
    sel = [k % M for k in ks]
    mask = resolution.band(j, scale * np.abs(u))[:, None] * resolution.low_pass(np.abs(u))[None, :]

    def analyse(h):
        """Coefficients on the symmetric index box plus the masked truncation error."""
        raw = np.fft.fft2(h) / M**2
        trunc = np.zeros_like(raw)
        trunc[np.ix_(sel, sel)] = raw[np.ix_(sel, sel)]
        recon = np.fft.ifft2(trunc) * M**2
        err = float((np.abs(recon - h) * mask).max())
        return (raw * phase2)[np.ix_(sel, sel)], err

    if sym.x_independent:
        h = np.asarray(sym.evaluator(scale * u[:, None], scale * u[None, :]), dtype=np.complex128)
        coeffs, tail = analyse(np.broadcast_to(h, (M, M)) * window)
    else:
        if grid is None:
            raise ValueError("x-dependent series needs the target grid for the x samples")
        x_axis = grid.axis_points()
        coeffs = np.empty((ks.size, ks.size, x_axis.size), dtype=np.complex128)
        tail = 0.0
        for i, x in enumerate(x_axis):
            h = np.asarray(sym.evaluator(x, scale * u[:, None], scale * u[None, :]), dtype=np.complex128)
            coeffs[:, :, i], err = analyse(np.broadcast_to(h, (M, M)) * window)
            tail = max(tail, err)

    mags = np.abs(coeffs) if sym.x_independent else np.abs(coeffs).max(axis=2)
    kk = np.abs(ks)
    prof_k = np.array([mags[kk == a].max() for a in range(1, k_max + 1)])
    prof_l = np.array([mags[:, kk == a].max() for a in range(1, k_max + 1)])

    def fit_decay(prof):
        good = prof > 1e-300
        if good.sum() < 3:
            return float("inf")
        a = np.log1p(np.arange(1, k_max + 1, dtype=float))[good]
        return float(-np.polyfit(a, np.log(prof[good]), 1)[0])

    norm_factor = (1.0 + kk[:, None]) ** 4 * (1.0 + kk[None, :]) ** 4
    normalized = float((norm_factor * mags).max() * 2.0 ** (-j * sym.order))

    series = ElementarySymbolSeries(
        j, k_max, coeffs, tail, fit_decay(prof_k), fit_decay(prof_l), normalized, sym.order
    )
    if tail > tail_tol:
        raise SeriesTailError(
            f"series tail {tail:.3e} at k_max={k_max} exceeds tolerance {tail_tol:.3e} for level {j}",
            tail,
        )
    return series


# ---------------------------------------------------------------------------
# elementary families and their application


@dataclass(frozen=True)
class ElementaryFamily:
    """Separable terms m_j(x) a_j(xi) b_j(eta) with a declared support pattern.

    kind "first" expects a_j supported in dyadic annuli (a ball at level 0)
    and b_j in dyadic balls; kind "second" mirrors the roles.  Coefficients
    may be scalars, per-sample arrays, or callables of the coordinate mesh.
    """

    levels: tuple
    coefficients: tuple
    first_multipliers: tuple
    second_multipliers: tuple
    kind: str = "first"

    def support_check(self, span_levels: int = 2, points: int = 2048) -> None:
        for j, a, b in zip(self.levels, self.first_multipliers, self.second_multipliers):
            ann, ball = (a, b) if self.kind == "first" else (b, a)
            top = 2.0 ** (j + span_levels)
            rho = np.linspace(0.0, 4.0 * top, points)
            ann_vals = np.abs(np.asarray(ann(rho)))
            ball_vals = np.abs(np.asarray(ball(rho)))
            bad_ball = ball_vals[rho > top].max() if np.any(rho > top) else 0.0
            outside = (rho > top) | (rho < (2.0 ** (j - span_levels) if j >= 1 else -1.0))
            bad_ann = ann_vals[outside].max() if outside.any() else 0.0
            if bad_ann > 1e-12 or bad_ball > 1e-12:
                raise SupportError(
                    f"level {j}: multiplier mass outside the declared pattern "
                    f"(annulus leak {bad_ann:.2e}, ball leak {bad_ball:.2e})"
                )


def _coefficient_values(m, grid: Grid):
    if callable(m):
        return np.asarray(m(*grid.point_mesh()), dtype=np.complex128)
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        return arr
    return arr.reshape(grid.shape)


def _radial_multiply(F: Spectrum, mult) -> GridFunction:
    rho = F.grid.frequency_modulus()
    return inverse_transform(Spectrum(F.grid, np.asarray(mult(rho), dtype=np.complex128) * F.coefficients))


def apply_elementary(family: ElementaryFamily, f: GridFunction, g: GridFunction, check_support: bool = True) -> GridFunction:
    """Sum of m_j(x) (a_j(D) f)(x) (b_j(D) g)(x) over the family terms."""
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("operands live on different grids")
    if check_support:
        family.support_check()
    grid = f.grid
    F = forward_transform(f)
    G = forward_transform(g)
    acc = np.zeros(grid.shape, dtype=np.complex128)
    for m, a, b in zip(family.coefficients, family.first_multipliers, family.second_multipliers):
        fa = _radial_multiply(F, a).values
        gb = _radial_multiply(G, b).values
        acc += _coefficient_values(m, grid) * fa * gb
    return GridFunction(grid, acc)


def assemble_elementary_symbol(family: ElementaryFamily, n: int = 1) -> BilinearSymbol:
    """The family summed back into a pointwise symbol (for cross-checking paths)."""
    x_independent = not any(callable(m) or np.ndim(m) > 0 for m in family.coefficients)

    if x_independent:

        def ev(xi, eta):
            total = 0.0
            for m, a, b in zip(family.coefficients, family.first_multipliers, family.second_multipliers):
                total = total + complex(m) * np.asarray(a(np.abs(xi))) * np.asarray(b(np.abs(eta)))
            return total

    else:

        def ev(x, xi, eta):
            total = 0.0
            for m, a, b in zip(family.coefficients, family.first_multipliers, family.second_multipliers):
                mv = m(x) if callable(m) else np.asarray(m, dtype=np.complex128)
                total = total + mv * np.asarray(a(np.abs(xi))) * np.asarray(b(np.abs(eta)))
            return total

    return BilinearSymbol(ev, 0.0, 3, x_independent, n, "assembled")


def apply_series(
    series_list,
    resolution: ResolutionOfUnity,
    f: GridFunction,
    g: GridFunction,
) -> GridFunction:
    """Apply the truncated series expansions of the first-dominant pieces.

    Each term pairs a modulated annulus multiplier on f with a modulated
    dilated ball multiplier on g; coefficients may carry an x dependence.
    """
    grid = f.grid
    if grid.n != 1:
        raise ValueError("series application is implemented for one-dimensional grids")
    F = forward_transform(f)
    G = forward_transform(g)
    xi = grid.frequency_mesh()
    rho = grid.frequency_modulus()
    acc = np.zeros(grid.shape, dtype=np.complex128)
    for series in series_list:
        j = series.level
        scale = 2.0**-j
        band = resolution.band(j, rho)
        ball = resolution.low_pass(rho * scale)
        ks = np.arange(-series.k_max, series.k_max + 1)
        # cache the per-k modulated band projections of f and per-l of g
        f_parts = {}
        g_parts = {}
        for k in ks:
            mod = np.exp(1j * k * scale * xi[0])
            f_parts[k] = inverse_transform(Spectrum(grid, mod * band * F.coefficients)).values
            g_parts[k] = inverse_transform(Spectrum(grid, mod * ball * G.coefficients)).values
        for ik, k in enumerate(ks):
            for il, ell in enumerate(ks):
                c = series.coefficients[ik, il]
                if np.ndim(c) == 0 and c == 0:
                    continue
                coeff = c if np.ndim(c) == 0 else c.reshape(grid.shape)
                acc += coeff * f_parts[k] * g_parts[ell]
    return GridFunction(grid, acc)


# ---------------------------------------------------------------------------
# built-in symbols


def _one_multiplier(*freqs):
    return np.ones(np.broadcast_shapes(*(np.shape(c) for c in freqs)))


def _sym_one():
    return BilinearSymbol(
        lambda xi, eta: np.ones(np.broadcast_shapes(np.shape(xi), np.shape(eta))),
        0.0,
        3,
        True,
        1,
        "one",
        factors=((_one_multiplier, _one_multiplier),),
    )


def _sym_bracket(order):
    def make():
        return BilinearSymbol(
            lambda xi, eta: (1.0 + xi**2 + eta**2) ** (order / 2.0), float(order), 3, True, 1, f"bracket{order:+d}"
        )

    return make


def _sym_separable():
    return BilinearSymbol(
        lambda xi, eta: 1.0 / (1.0 + xi**2) + 0.0 * eta,
        0.0,
        3,
        True,
        1,
        "separable",
        factors=((lambda xi: 1.0 / (1.0 + xi**2), _one_multiplier),),
    )


def _sym_modulated():
    def ev(x, xi, eta):
        return (1.0 + 0.5 * np.cos(2.0 * np.pi * x / 64.0)) / (1.0 + 0.1 * (xi**2 + eta**2) / (1.0 + xi**2 + eta**2))

    return BilinearSymbol(ev, 0.0, 3, False, 1, "modulated")


def _sym_chirp():
    return BilinearSymbol(lambda xi, eta: np.exp(1j * xi**2) + 0.0 * eta, 0.0, 3, True, 1, "chirp")


BUILTIN_SYMBOLS = {
    "one": _sym_one,
    "bracket+1": _sym_bracket(1),
    "bracket-1": _sym_bracket(-1),
    "separable": _sym_separable,
    "modulated": _sym_modulated,
    "chirp": _sym_chirp,
}


def builtin_symbol(name: str) -> BilinearSymbol:
    key = name.removeprefix("builtin:")
    if key not in BUILTIN_SYMBOLS:
        raise KeyError(f"unknown built-in symbol {name!r}; choices: {sorted(BUILTIN_SYMBOLS)}")
    return BUILTIN_SYMBOLS[key]()
