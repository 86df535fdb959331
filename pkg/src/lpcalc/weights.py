"""Admissible weights, their regularised multipliers, and symbol-class checks.

An admissible weight is a monotone positive function on (0, 1], extended
constantly above one, whose values at 2^-j and 2^-2j stay within fixed
two-sided constants of each other.  The workhorse family is

    w(t) = (1 + log+ 1/t)^lam * (1 + log(1 + log+ 1/t))^mu,   lam*mu >= 0,

with natural logarithms throughout.  Smoothing the dyadic values through a
resolution of unity produces the regularised multiplier, a smooth radial
function comparable to w(1/<xi>) that drives every lifting computation.

Derivative bounds are checked as central finite differences swept over a
family of lattice resolutions; a bounded, trend-free sweep is the numerical
stand-in for the symbol estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._diff import diff_along, trim_along
from .partition import ResolutionOfUnity

__all__ = [
    "AdmissibleWeight",
    "RegularizedWeight",
    "AdmissibilityError",
    "AdmissibilityReport",
    "CompWeightsBound",
    "SymbolDecayReport",
    "eval_weight",
    "check_admissible",
    "comp_weights_bound",
    "comparable_values",
    "regularize",
    "power_weight",
    "check_symbol_decay",
    "zero_order_symbol_check",
]


class AdmissibilityError(ValueError):
    """The supplied weight violates the admissibility requirements."""


def _log_plus(x: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, np.log(x))


@dataclass(frozen=True)
class AdmissibleWeight:
    """A monotone weight on (0, 1], constant above one.

    Either a two-parameter logarithmic prototype (lam, mu with lam*mu >= 0)
    or a user-supplied monotone table of values at t = 2^-j, j = 0..J,
    interpolated geometrically between dyadic nodes.
    """

    lam: float | None = None
    mu: float | None = None
    table: tuple | None = None
    name: str = ""

    @staticmethod
    def prototype(lam: float, mu: float = 0.0) -> "AdmissibleWeight":
        if lam * mu < 0:
            raise AdmissibilityError(f"prototype requires lam*mu >= 0, got lam={lam}, mu={mu}")
        return AdmissibleWeight(lam=float(lam), mu=float(mu), name=f"log^{lam:g}" + (f"loglog^{mu:g}" if mu else ""))

    @staticmethod
    def constant() -> "AdmissibleWeight":
        return AdmissibleWeight(lam=0.0, mu=0.0, name="1")

    @staticmethod
    def from_table(values, name: str = "table") -> "AdmissibleWeight":
        values = tuple(float(v) for v in values)
        if len(values) < 2:
            raise AdmissibilityError("table needs at least two dyadic nodes")
        if any(v <= 0 for v in values):
            raise AdmissibilityError("table values must be positive")
        diffs = np.diff(values)
        if not (np.all(diffs >= 0) or np.all(diffs <= 0)):
            raise AdmissibilityError("table is not monotone on its dyadic nodes")
        return AdmissibleWeight(table=values, name=name)

    @property
    def is_prototype(self) -> bool:
        return self.table is None

    @property
    def non_increasing(self) -> bool:
        """True when w does not increase as a function of t on (0, 1]."""
        vals = self.dyadic(np.arange(0, 24))
        return bool(np.all(np.diff(vals) >= -1e-15))

    def value(self, t):
        """w(t) for positive t, with w(t) = w(1) for t >= 1."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise ValueError("weight argument must be positive")
        if self.is_prototype:
            u = _log_plus(1.0 / t)
            return (1.0 + u) ** self.lam * (1.0 + np.log1p(u)) ** self.mu
        j = np.maximum(0.0, -np.log2(t))
        vals = np.asarray(self.table, dtype=float)
        jmax = len(vals) - 1
        j0 = np.clip(np.floor(j).astype(int), 0, jmax - 1)
        theta = np.clip(j - j0, 0.0, 1.0)
        # geometric interpolation preserves the dyadic comparison constants
        return vals[j0] ** (1.0 - theta) * vals[j0 + 1] ** theta

    def dyadic(self, j):
        """w(2^-j) for integer levels j (values at j < 0 equal w(1))."""
        j = np.asarray(j, dtype=float)
        return self.value(2.0 ** (-np.maximum(j, 0.0)))

    def power(self, exponent: float) -> "AdmissibleWeight":
        if self.is_prototype:
            return AdmissibleWeight(
                lam=self.lam * exponent, mu=self.mu * exponent, name=f"({self.name})^{exponent:g}"
            )
        return AdmissibleWeight.from_table(
            tuple(v**exponent for v in self.table), name=f"({self.name})^{exponent:g}"
        )


def eval_weight(w: AdmissibleWeight, t) -> float | np.ndarray:
    """Evaluate the weight; scalar in, scalar out."""
    out = w.value(t)
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


@dataclass(frozen=True)
class AdmissibilityReport:
    c: float
    d: float
    ratios: tuple
    trend_slope: float
    ok: bool
    message: str = ""

    def to_dict(self) -> dict:
        return {"c": self.c, "d": self.d, "trend_slope": self.trend_slope, "ok": self.ok, "message": self.message}


def check_admissible(w: AdmissibleWeight, levels: int) -> AdmissibilityReport:
    """Extremal ratios w(2^-2j)/w(2^-j) over j <= levels, with a growth-trend guard."""
    if levels < 4:
        raise ValueError("need at least four levels")
    j = np.arange(0, levels + 1)
    ratios = w.dyadic(2 * j) / w.dyadic(j)
    c, d = float(ratios.min()), float(ratios.max())
    logr = np.log(ratios[1:])
    slope = float(np.polyfit(j[1:], logr, 1)[0]) if len(j) > 2 else 0.0
    growing = slope > 0.01 and d / max(c, 1e-300) > 8.0
    vals = w.dyadic(j)
    monotone = bool(np.all(np.diff(vals) >= -1e-12) or np.all(np.diff(vals) <= 1e-12))
    ok = monotone and c > 0 and not growing
    msg = "" if ok else ("dyadic values are not monotone" if not monotone else "comparison ratio grows without bound")
    return AdmissibilityReport(c, d, tuple(float(r) for r in ratios), slope, ok, msg)


@dataclass(frozen=True)
class CompWeightsBound:
    b: float | None
    c1: float
    c2: float
    ok: bool

    def to_dict(self) -> dict:
        return {"b": self.b, "C1": self.c1, "C2": self.c2, "ok": self.ok}


def comparable_values(w: AdmissibleWeight, levels: int = 24, spread: int = 2) -> tuple:
    """Two-sided bound [d1, d2] on w(t)/w(s) over dyadic pairs with t/s in [1/4, 4].

    Scanned over all tabulated node pairs at most ``spread`` dyadic steps
    apart; comparable arguments force comparable weight values.
    """
    j = np.arange(0, levels + 1)
    vals = w.dyadic(j)
    ratios = [1.0]
    for gap in range(1, spread + 1):
        ratios.extend((vals[gap:] / vals[:-gap]).tolist())
        ratios.extend((vals[:-gap] / vals[gap:]).tolist())
    return float(min(ratios)), float(max(ratios))


# constants box for the polynomial comparison bound: the smallest exponent b
# is reported for which both constants stay within a factor two of one
_COMP_BOX = 2.0


def comp_weights_bound(w: AdmissibleWeight, levels: int) -> CompWeightsBound:
    """Smallest quarter-integer b with C1 (1+j-k)^-b <= w(2^-j)/w(2^-k) <= C2 (1+j-k)^b
    for all 0 <= k <= j <= levels and moderate constants C1, C2."""
    if levels < 4:
        raise ValueError("need at least four levels")
    j = np.arange(0, levels + 1)
    vals = w.dyadic(j)
    jj, kk = np.meshgrid(j, j, indexing="ij")
    mask = jj >= kk
    ratio = (vals[jj] / vals[kk])[mask]
    gap = (1.0 + jj - kk)[mask].astype(float)
    for b in np.arange(0.0, 4.0 + 1e-9, 0.25):
        c2 = max(1.0, float((ratio / gap**b).max()))
        c1 = min(1.0, float((ratio * gap**b).min()))
        if c2 <= _COMP_BOX and c1 >= 1.0 / _COMP_BOX:
            return CompWeightsBound(float(b), c1, c2, True)
    return CompWeightsBound(None, 0.0, float("inf"), False)


@dataclass(frozen=True)
class RegularizedWeight:
    """The smooth multiplier sum_j w(2^-j) phi_j(xi) built on a resolution of unity."""

    weight: AdmissibleWeight
    resolution: ResolutionOfUnity
    dyadic_values: tuple = field(default=())
    equivalence_constant: float = field(default=0.0)

    def evaluate(self, rho) -> np.ndarray:
        """Multiplier value at radii rho = |xi|."""
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for j, wj in enumerate(self.dyadic_values):
            out += wj * self.resolution.band(j, rho)
        return out

    def reference(self, rho) -> np.ndarray:
        """The comparison function w(1/<xi>)."""
        rho = np.asarray(rho, dtype=float)
        return self.weight.value(1.0 / np.sqrt(1.0 + rho**2))

    def multiplier(self, exponent: float = 1.0):
        """Grid multiplier for the regularisation raised to a power."""

        def mult(*freqs):
            rho = np.sqrt(sum(np.asarray(f) ** 2 for f in freqs))
            vals = self.evaluate(rho)
            if exponent == 1.0:
                return vals
            return np.where(vals > 0, vals, 1.0) ** exponent if exponent < 0 else vals**exponent

        return mult


def regularize(w: AdmissibleWeight, resolution: ResolutionOfUnity, check_points: int = 2048) -> RegularizedWeight:
    """Build the regularised multiplier and record its equivalence constant."""
    dyadic = tuple(float(v) for v in w.dyadic(np.arange(resolution.j_max + 1)))
    reg = RegularizedWeight(w, resolution, dyadic)
    rho = np.linspace(0.0, 2.0**resolution.j_max, check_points)
    ratio = reg.evaluate(rho) / reg.reference(rho)
    constant = float(max(ratio.max(), 1.0 / ratio.min()))
    return RegularizedWeight(w, resolution, dyadic, constant)


def power_weight(w: AdmissibleWeight, exponent: float, levels: int = 24) -> AdmissibleWeight:
    """The weight w^exponent, re-checked for admissibility."""
    if exponent == 0.0:
        return AdmissibleWeight.constant()
    out = w.power(exponent)
    report = check_admissible(out, max(levels, 4))
    if not report.ok:
        raise AdmissibilityError(f"power {exponent:g} breaks admissibility: {report.message}")
    return out


@dataclass(frozen=True)
class SymbolDecayReport:
    """Per-order seminorm sweep for a scalar frequency symbol."""

    seminorms: dict          # order -> tuple of sup values, one per lattice in the sweep
    lattice_sizes: tuple
    bounded: bool
    trend_slopes: dict       # order -> least-squares slope of log sup vs sweep index

    def worst(self, order: int) -> float:
        return max(self.seminorms[order])

    def to_dict(self) -> dict:
        return {
            "lattice_sizes": list(self.lattice_sizes),
            "seminorms": {str(k): list(v) for k, v in self.seminorms.items()},
            "trend_slopes": {str(k): v for k, v in self.trend_slopes.items()},
            "bounded": self.bounded,
        }


def _sweep_report(fn, normalizer, order: int, period: float, lattice_sizes, span_cap: float) -> SymbolDecayReport:
    """Seminorm sweep at fixed frequency spacing 2*pi/period and growing range.

    Doubling the lattice size doubles the covered frequency range, so a
    growing supremum across the sweep exposes a symbol whose decay fails at
    large frequency, while resolved bounded symbols give a flat profile.
    """
    spacing = 2.0 * np.pi / period
    seminorms = {}
    slopes = {}
    for alpha in range(order + 1):
        sups = []
        for size in lattice_sizes:
            half = int(size) // 2
            if np.isfinite(span_cap):
                half = min(half, int(span_cap / spacing))
            xi = spacing * np.arange(-half, half + 1)
            vals = np.asarray(fn(xi), dtype=np.complex128)
            d = diff_along(vals, alpha, spacing)
            xi_t = trim_along(xi, alpha)
            bracket = np.sqrt(1.0 + xi_t**2)
            sups.append(float((np.abs(d) * bracket**alpha / normalizer(xi_t)).max()))
        seminorms[alpha] = tuple(sups)
        logs = np.log(np.maximum(sups, 1e-300))
        slopes[alpha] = float(np.polyfit(np.arange(len(sups)), logs, 1)[0]) if len(sups) > 1 else 0.0
    bounded = all(_passes(v, slopes[k]) for k, v in seminorms.items())
    return SymbolDecayReport(seminorms, tuple(int(s) for s in lattice_sizes), bounded, slopes)


def _passes(sups, slope) -> bool:
    """Boundedness verdict for one difference order of a seminorm sweep.

    Flat profiles pass outright.  Slow growth on a finite lattice cannot be
    told apart from convergence toward a remote supremum, so mild growth is
    accepted as long as it decelerates and stays within a factor two overall;
    sustained fast growth fails.
    """
    sups = np.asarray(sups, dtype=float)
    if not np.all(np.isfinite(sups)):
        return False
    if sups.max() <= 1e-8 or slope <= 0.05:
        return True
    logs = np.log(np.maximum(sups, 1e-300))
    increments = np.diff(logs)
    decelerating = bool(np.all(np.diff(increments) <= 1e-2))
    return decelerating and logs[-1] - logs[0] <= np.log(2.0)


def check_symbol_decay(
    reg: RegularizedWeight,
    exponent: float = 1.0,
    order: int = 4,
    period: float = 64.0,
    lattice_sizes=(256, 512, 1024),
) -> SymbolDecayReport:
    """Finite-difference decay check for the regularised weight or its powers.

    For each difference order alpha <= order, reports the lattice supremum of
    |delta^alpha w^exponent(xi)| <xi>^alpha / w(1/<xi>)^exponent across a
    dyadic sweep of lattice sizes; passing means no growth trend.
    """
    if order > 4:
        raise ValueError("finite-difference order capped at 4")
    span_cap = 2.0 ** (reg.resolution.j_max - 1)

    def self_vals(xi):
        return reg.evaluate(np.abs(xi)) ** exponent

    def normalizer(xi):
        return reg.reference(np.abs(xi)) ** exponent

    return _sweep_report(self_vals, normalizer, order, period, lattice_sizes, span_cap)


def zero_order_symbol_check(
    a,
    order: int = 4,
    period: float = 64.0,
    lattice_sizes=(256, 512, 1024),
    span_cap: float = np.inf,
) -> SymbolDecayReport:
    """Empirical zero-order symbol seminorms sup <xi>^alpha |delta^alpha a(xi)|.

    ``a`` is a callable of a signed one-dimensional frequency array.
    """
    if order > 4:
        raise ValueError("finite-difference order capped at 4")
    return _sweep_report(a, lambda xi: np.ones_like(xi), order, period, lattice_sizes, span_cap)
