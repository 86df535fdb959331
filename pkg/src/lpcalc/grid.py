"""Sampled periodic functions and their discrete Fourier calculus.

Everything in the package lives on a uniform grid over the torus [0, L)^n
with n in {1, 2}.  A :class:`GridFunction` holds complex samples, a
:class:`Spectrum` holds discrete Fourier coefficients indexed by the
frequencies ``xi_k = 2*pi*k/L`` with integer ``k`` in ``[-N/2, N/2)`` per
axis.  The transform pair is normalised so that the coefficient at ``k``
approximates the continuum integral ``int f(x) exp(-i x xi_k) dx`` by the
trapezoid rule on the torus, and synthesis carries the dual weight
``L^-n`` per mode (the ``(2pi)^-n d xi`` convention in frequency).

Both value types are immutable; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "Spectrum",
    "GridMismatchError",
    "NonFiniteMultiplierError",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "lp_norm",
    "pointwise_product",
    "constant_function",
    "pure_mode",
    "sample_function",
    "direct_dft",
]


class GridMismatchError(ValueError):
    """Two operands do not live on the same grid."""


class NonFiniteMultiplierError(ValueError):
    """A Fourier multiplier produced a non-finite value at a grid frequency."""


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L)^n.

    Parameters
    ----------
    n : int
        Dimension, 1 or 2.
    points : int
        Samples per axis N; a power of two, at least 8.
    length : float
        Physical period L > 0 of each axis.
    """

    n: int
    points: int
    length: float = 64.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not _is_power_of_two(self.points) or self.points < 8:
            raise ValueError(f"points per axis must be a power of two >= 8, got {self.points}")
        if not (self.length > 0):
            raise ValueError(f"period must be positive, got {self.length}")

    @property
    def spacing(self) -> float:
        """Sample spacing h = L/N."""
        return self.length / self.points

    @property
    def shape(self) -> tuple:
        return (self.points,) * self.n

    @property
    def size(self) -> int:
        return self.points**self.n

    @property
    def nyquist(self) -> float:
        """Largest representable |frequency| per axis, pi*N/L."""
        return np.pi * self.points / self.length

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    @property
    def volume(self) -> float:
        return self.length**self.n

    @property
    def parseval_ratio(self) -> float:
        """Coefficient-l2 over sample-l2 norm ratio, (h*L)^(n/2)."""
        return (self.spacing * self.length) ** (self.n / 2.0)

    def axis_points(self) -> np.ndarray:
        return self.spacing * np.arange(self.points)

    def axis_frequencies(self) -> np.ndarray:
        """Frequencies 2*pi*k/L for k in [-N/2, N/2), FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.length / self.points)

    def point_mesh(self) -> tuple:
        """Coordinate arrays, one per axis, each shaped like the grid."""
        axes = [self.axis_points()] * self.n
        return tuple(np.meshgrid(*axes, indexing="ij")) if self.n > 1 else (self.axis_points(),)

    def frequency_mesh(self) -> tuple:
        """Frequency component arrays, one per axis, each shaped like the grid."""
        axes = [self.axis_frequencies()] * self.n
        return tuple(np.meshgrid(*axes, indexing="ij")) if self.n > 1 else (self.axis_frequencies(),)

    def frequency_modulus(self) -> np.ndarray:
        mesh = self.frequency_mesh()
        return np.sqrt(sum(m**2 for m in mesh))


def _freeze(values: np.ndarray, shape: tuple) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.complex128).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridFunction:
    """Complex samples of a function on a grid; immutable after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if np.asarray(self.values).size != self.grid.size:
            raise ValueError(
                f"sample count {np.asarray(self.values).size} does not match grid size {self.grid.size}"
            )
        object.__setattr__(self, "values", _freeze(self.values, self.grid.shape))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _require_same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _require_same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "GridFunction":
        if isinstance(scalar, GridFunction):
            raise TypeError("use pointwise_product for samplewise products")
        return GridFunction(self.grid, self.values * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)


@dataclass(frozen=True)
class Spectrum:
    """Discrete Fourier coefficients on a grid, FFT index ordering."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        if np.asarray(self.coefficients).size != self.grid.size:
            raise ValueError(
                f"coefficient count {np.asarray(self.coefficients).size} does not match grid size {self.grid.size}"
            )
        object.__setattr__(self, "coefficients", _freeze(self.coefficients, self.grid.shape))


def _require_same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError(f"grids differ: {f.grid} vs {g.grid}")


def forward_transform(f: GridFunction) -> Spectrum:
    """Discrete analysis transform: coefficient(k) = h^n * sum_x f(x) exp(-i x xi_k)."""
    coeffs = f.grid.cell_volume * np.fft.fftn(f.values)
    return Spectrum(f.grid, coeffs)


def inverse_transform(F: Spectrum) -> GridFunction:
    """Synthesis: f(x) = L^-n * sum_k coefficient(k) exp(i x xi_k); exact inverse of analysis."""
    values = np.fft.ifftn(F.coefficients) / F.grid.cell_volume
    return GridFunction(F.grid, values)


def _evaluate_multiplier(a, grid: Grid, t: float) -> np.ndarray:
    mesh = grid.frequency_mesh()
    vals = np.asarray(a(*(t * m for m in mesh)), dtype=np.complex128)
    vals = np.broadcast_to(vals, grid.shape)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        freq = tuple(float(m[tuple(bad)]) for m in mesh)
        raise NonFiniteMultiplierError(
            f"multiplier is not finite at scaled frequency t*xi = {tuple(t * c for c in freq)} (t={t})"
        )
    return vals


def apply_multiplier(a, t: float, f: GridFunction) -> GridFunction:
    """Apply the Fourier multiplier ``a`` at scale ``t``: output spectrum is a(t*xi_k) * fhat(k).

    ``a`` is called with one frequency-component array per axis (a single
    signed array in one dimension) and must return finite values on every
    scaled grid frequency.
    """
    if t <= 0:
        raise ValueError(f"multiplier scale must be positive, got {t}")
    vals = _evaluate_multiplier(a, f.grid, t)
    F = forward_transform(f)
    return inverse_transform(Spectrum(f.grid, vals * F.coefficients))


def multiply_spectrum(a, t: float, F: Spectrum) -> Spectrum:
    """Spectrum-side multiplier application, same conventions as apply_multiplier."""
    vals = _evaluate_multiplier(a, F.grid, t)
    return Spectrum(F.grid, vals * F.coefficients)


def lp_norm(f: GridFunction, p: float) -> float:
    """Quadrature L^p norm: (h^n sum |f|^p)^(1/p); the sample maximum for p = inf.

    Values p < 1 are allowed and yield the usual quasi-norm.
    """
    mags = np.abs(f.values)
    if p == np.inf:
        return float(mags.max()) if mags.size else 0.0
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return float((f.grid.cell_volume * (mags**p).sum()) ** (1.0 / p))


def pointwise_product(f: GridFunction, g: GridFunction) -> GridFunction:
    """Samplewise product on a shared grid."""
    _require_same_grid(f, g)
    return GridFunction(f.grid, f.values * g.values)


def constant_function(grid: Grid, value=1.0) -> GridFunction:
    return GridFunction(grid, np.full(grid.shape, complex(value)))


def pure_mode(grid: Grid, k, amplitude=1.0) -> GridFunction:
    """The exponential exp(i xi_k . x) for an integer frequency index vector k."""
    k = np.atleast_1d(np.asarray(k, dtype=int))
    if k.size != grid.n:
        raise ValueError(f"mode index must have {grid.n} components")
    mesh = grid.point_mesh()
    phase = sum((2.0 * np.pi * ki / grid.length) * x for ki, x in zip(k, mesh))
    return GridFunction(grid, complex(amplitude) * np.exp(1j * phase))


def sample_function(grid: Grid, fn) -> GridFunction:
    """Sample a callable of the coordinate arrays onto the grid."""
    return GridFunction(grid, np.asarray(fn(*grid.point_mesh()), dtype=np.complex128))


def direct_dft(f: GridFunction) -> Spectrum:
    """Brute-force O(N^2n) analysis transform; the oracle for forward_transform."""
    grid = f.grid
    xs = grid.point_mesh()
    freqs = grid.frequency_mesh()
    flat_vals = f.values.reshape(-1)
    flat_x = np.stack([x.reshape(-1) for x in xs], axis=1)
    flat_xi = np.stack([w.reshape(-1) for w in freqs], axis=1)
    phase = flat_xi @ flat_x.T
    coeffs = grid.cell_volume * (np.exp(-1j * phase) @ flat_vals)
    return Spectrum(grid, coeffs.reshape(grid.shape))
