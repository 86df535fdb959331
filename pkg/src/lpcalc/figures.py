"""Figure rendering for the command-line reports.

Every subcommand that writes a CSV series also renders it as a PNG next to
the delimited output; these helpers keep the styling in one place and stay
on the Agg backend so headless runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_series", "render_ratio_report", "render_sharpness"]

_META = {"Software": "lpcalc"}


def _finish(fig, ax, path, title, xlabel, ylabel):
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=144, metadata=_META)
    plt.close(fig)


def render_series(path, x, y, xlabel, ylabel, title, logx=False, logy=False, fit=None, bound=None):
    """Plot one series, optionally with a fitted curve and a horizontal bound."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.plot(x, y, "o-", ms=4, lw=1.2, label=ylabel)
    if fit is not None:
        fx, fy, label = fit
        ax.plot(fx, fy, "--", lw=1.0, label=label)
    if bound is not None:
        ax.axhline(bound, color="crimson", lw=1.0, ls=":", label=f"bound {bound:g}")
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    if fit is not None or bound is not None:
        ax.legend(fontsize=8)
    _finish(fig, ax, path, title, xlabel, ylabel)


def render_ratio_report(path, report, band_bound=None):
    """Scatter the per-member ratios against bandwidth level with the trend line."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    levels = np.asarray(report.levels, dtype=float)
    ratios = np.asarray(report.ratios, dtype=float)
    ax.semilogy(levels + 0.03 * np.arange(len(levels)) % 0.25, ratios, "o", ms=4, alpha=0.7, label="ratios")
    if len(levels) >= 2 and np.unique(levels).size >= 2:
        xs = np.linspace(levels.min(), levels.max(), 50)
        mid = np.exp(np.log(ratios).mean())
        ax.semilogy(xs, mid * np.exp(report.trend_slope * (xs - levels.mean())), "--", lw=1.0,
                    label=f"trend slope {report.trend_slope:+.3f}")
    if band_bound is not None and len(ratios):
        ax.axhline(ratios.min() * band_bound, color="crimson", ls=":", lw=1.0, label=f"band x{band_bound:g}")
    ax.legend(fontsize=8)
    _finish(fig, ax, path, report.name, "bandwidth level", "ratio")


def render_sharpness(path, report):
    """Growth of the squared weighted norm against log log of the radius."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    x = np.log(np.log(np.asarray(report.radii)))
    y = np.asarray(report.growth_values)
    ax.plot(x, y, "o-", ms=4, lw=1.2, label="S(R)")
    if report.alpha_hat is not None:
        from .experiments import offset_power_fit

        alpha, a, c, _ = offset_power_fit(report.radii, report.growth_values)
        xs = np.linspace(x.min(), x.max(), 100)
        ax.plot(xs, a * np.exp(xs * alpha) + c, "--", lw=1.0, label=f"fit exponent {alpha:.3f}")
    ax.legend(fontsize=8)
    _finish(
        fig,
        ax,
        path,
        f"growth scan (delta={report.profile.delta:g}, gamma={report.profile.gamma:g})",
        "log log R",
        "squared weighted norm",
    )
