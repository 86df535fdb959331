"""Command-line front end.

Subcommands map one-to-one onto the library's checks and solvers; every run
prints a JSON report to stdout and exits 0 only when all enclosed checks
pass (1 on check failure, 2 on usage or parameter-gate errors, 3 on I/O
failure).  With --outdir the report is also written to disk together with
CSV series and matplotlib-rendered PNG figures of the same data.

A JSON config file may supply any defaults (--config); explicit flags win.
Ensemble work respects the LPCALC_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bilinear import builtin_symbol, fourier_coefficients, split_paraproduct
from .experiments import (
    Ensemble,
    GateError,
    SharpnessProfile,
    band_limited_noise,
    besov_tl_embedding_check,
    embedding_ratio,
    product_estimate_ratio,
    resolution_independence_check,
    sharpness_scan,
)
from .grid import Grid, pure_mode
from .lpgf import LpgfError, read_lpgf, write_csv, write_lpgf
from .norms import (
    SpaceSpec,
    besov_norm,
    big_bmo_norm,
    bmo_norm,
    build_cubes,
    lifting_check,
    block_norms,
    sobolev_norm,
    tl_infinity_norm,
    triebel_lizorkin_norm,
    xw_norm,
)
from .partition import build_alternative_resolution, build_resolution
from .pde import EvolutionSpec, log_schrodinger_solve, picard_solve
from .report import Report
from .weights import (
    AdmissibleWeight,
    check_admissible,
    comp_weights_bound,
    regularize,
)

__all__ = ["main", "build_parser"]


def _parse_levels(text: str) -> tuple:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in text.split(",") if tok)


def _parse_weight(text: str) -> AdmissibleWeight:
    if not text or text in ("1", "one", "const"):
        return AdmissibleWeight.constant()
    parts = [float(tok) for tok in text.split(",")]
    lam = parts[0]
    mu = parts[1] if len(parts) > 1 else 0.0
    return AdmissibleWeight.prototype(lam, mu)


def _parse_extended(text: str) -> float:
    return np.inf if text in ("inf", "Inf", "infinity") else float(text)


def _default_jmax(grid: Grid) -> int:
    # smallest level whose partial sum of bands covers the whole lattice
    return max(2, int(np.ceil(np.log2(grid.nyquist))))


def _grid_from(args) -> Grid:
    return Grid(getattr(args, "dimension", 1), args.npoints, args.period)


def _add_grid_flags(p, npoints=4096, period=64.0, jmax=None):
    p.add_argument("--npoints", type=int, default=npoints, help="samples per axis (power of two)")
    p.add_argument("--period", type=float, default=period, help="torus period per axis")
    p.add_argument("--dimension", type=int, default=1, choices=(1, 2))
    p.add_argument("--jmax", type=int, default=jmax, help="top dyadic level (default: cover the lattice)")


def _add_ensemble_flags(p, count=20, levels="4:7"):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=count)
    p.add_argument("--levels", type=_parse_levels, default=_parse_levels(levels),
                   help="bandwidth levels, as lo:hi or comma list")


def _add_output_flags(p):
    p.add_argument("--outdir", type=Path, default=None, help="write report.json, CSV and PNG here")
    p.add_argument("--config", type=Path, default=None, help="JSON file of option defaults")


def _resolution_for(args, grid):
    jmax = args.jmax if args.jmax else _default_jmax(grid)
    return build_resolution(jmax)


def _write_series(outdir: Path, name: str, header, rows, renderer=None):
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{name}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    if renderer is not None:
        renderer(outdir / f"{name}.png")


def _emit_ratio_outputs(args, report_obj, ratio_report, band_bound=16.0):
    if args.outdir:
        from .figures import render_ratio_report

        _write_series(
            args.outdir,
            ratio_report.name,
            ["member", "level", "ratio"],
            [(i, lvl, float(r)) for i, (lvl, r) in enumerate(zip(ratio_report.levels, ratio_report.ratios))],
            renderer=lambda p: render_ratio_report(p, ratio_report, band_bound),
        )


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_norm(args) -> Report:
    f = read_lpgf(args.input)
    grid = f.grid
    report = Report("lpcalc", __version__, "norm", config=_echo(args))
    resolution = _resolution_for(args, grid)
    weight = _parse_weight(args.weight)
    weight_arg = None if (weight.is_prototype and weight.lam == 0 and weight.mu == 0) else weight
    spec = SpaceSpec(args.s, args.p, args.q, weight=weight_arg, n=grid.n)
    space = args.space.lower()
    details = None
    if space == "besov":
        value = besov_norm(f, spec, resolution)
    elif space == "f":
        value = triebel_lizorkin_norm(f, spec, resolution)
    elif space == "finf":
        value, details = tl_infinity_norm(f, spec, resolution, build_cubes(grid), details=True)
    elif space == "bmo":
        value, details = bmo_norm(f, build_cubes(grid), details=True)
    elif space == "bigbmo":
        value = big_bmo_norm(f, build_cubes(grid))
    elif space == "xw":
        value, details = xw_norm(f, weight, resolution, build_cubes(grid), details=True)
    elif space == "sobolev":
        value = sobolev_norm(f, args.s)
    else:
        raise GateError(f"unknown space {args.space!r}")
    report.add_info("norm", value=float(value), space=space)
    if space in ("besov", "f", "finf"):
        blocks = block_norms(f, spec, resolution)
        report.add_info("blocks", values=[float(b) for b in blocks])
        if args.outdir:
            from .figures import render_series

            js = list(range(len(blocks)))
            _write_series(
                args.outdir,
                "blocks",
                ["level", "weighted_block_norm"],
                list(zip(js, map(float, blocks))),
                renderer=lambda p: render_series(
                    p, js, blocks, "level", "weighted block norm", f"{space} blocks", logy=True
                ),
            )
    if details:
        report.add_info("details", **details)
    return report


def cmd_partition_check(args) -> Report:
    grid = _grid_from(args)
    jmax = args.jmax or 7
    builder = build_alternative_resolution if args.alt else build_resolution
    resolution = builder(jmax)
    rho = grid.frequency_modulus().reshape(-1)
    report = Report("lpcalc", __version__, "partition-check", config=_echo(args))
    inside = rho[rho <= 2.0 ** (jmax - 1)]
    report.add_check("partition_identity_residual", resolution.partition_residual(inside), 1e-12)
    report.add_check("telescoping_residual", resolution.telescoping_residual(rho), 1e-12)
    checks = resolution.check_invariants(rho)
    report.add_check("support_violation", checks["support_violation"], 1e-12)
    report.add_check("plateau_at_dyadic", checks["plateau_at_dyadic"], 1e-12)
    decay = resolution.derivative_decay(max_order=4)
    for order, constant in decay.items():
        report.add_check(f"derivative_decay_order_{order}", constant, 10.0 ** (2 * order))
    if args.outdir:
        from .figures import render_series

        sample = np.linspace(0.0, float(inside.max()) if inside.size else 1.0, 512)
        residual = np.abs(sum(resolution.band(j, sample) for j in range(jmax + 1)) - 1.0)
        _write_series(
            args.outdir,
            "partition_residual",
            ["radius", "residual"],
            list(zip(sample.tolist(), residual.tolist())),
            renderer=lambda p: render_series(
                p, sample, np.maximum(residual, 1e-18), "|xi|", "|sum - 1|", "partition identity residual", logy=True
            ),
        )
    return report


def cmd_weight_check(args) -> Report:
    weight = AdmissibleWeight.prototype(args.lam, args.mu)
    report = Report("lpcalc", __version__, "weight-check", config=_echo(args))
    adm = check_admissible(weight, args.levels)
    comp = comp_weights_bound(weight, args.levels)
    resolution = build_resolution(args.jmax or 8)
    reg = regularize(weight, resolution)
    report.add_check("admissible", 0.0 if adm.ok else 1.0, 0.5, c=adm.c, d=adm.d)
    report.add_check("comparison_bound", 0.0 if comp.ok else 1.0, 0.5, b=comp.b, C1=comp.c1, C2=comp.c2)
    report.add_check("equivalence_C", reg.equivalence_constant, 4.0 if abs(args.lam) <= 1 and abs(args.mu) <= 1 else None)
    report.add_info(
        "summary",
        c=adm.c,
        d=adm.d,
        C1=comp.c1,
        C2=comp.c2,
        b=comp.b,
        equivalence_C=reg.equivalence_constant,
    )
    if args.outdir:
        from .figures import render_series

        j = np.arange(0, args.levels + 1)
        vals = weight.dyadic(j)
        _write_series(
            args.outdir,
            "weight_dyadic",
            ["level", "value"],
            list(zip(j.tolist(), vals.tolist())),
            renderer=lambda p: render_series(p, j, vals, "level j", "w(2^-j)", "dyadic weight profile"),
        )
    return report


def cmd_decompose(args) -> Report:
    sym = builtin_symbol(args.symbol)
    resolution = build_resolution(args.jmax or 4)
    grid = _grid_from(args) if not sym.x_independent else None
    report = Report("lpcalc", __version__, "decompose", config=_echo(args))
    decomp = split_paraproduct(sym, resolution)
    residual = decomp.reconstruction_residual()
    report.add_check("split_reconstruction_residual", residual, 1e-10)
    rows = []
    normalized = []
    for j in range(resolution.j_max + 1):
        series = fourier_coefficients(
            sym, resolution, j, k_max=args.kmax, lattice=args.lattice, tail_tol=np.inf, grid=grid
        )
        rows.append((j, series.tail, series.decay_exponent_k, series.decay_exponent_l, series.normalized_decay_max))
        normalized.append(series.normalized_decay_max)
        report.add_info(
            f"series_level_{j}",
            tail=series.tail,
            decay_exponent_k=series.decay_exponent_k,
            decay_exponent_l=series.decay_exponent_l,
            normalized_decay=series.normalized_decay_max,
        )
    worst_tail = max(r[1] for r in rows)
    report.add_check("series_tail_max", worst_tail, args.tail_tol)
    slope = float(np.polyfit(np.arange(1, len(normalized)), np.log(np.maximum(normalized[1:], 1e-300)), 1)[0]) if len(normalized) > 2 else 0.0
    report.add_check("normalized_decay_trend_slope", slope, 0.05)
    if args.outdir:
        from .figures import render_series

        js = [r[0] for r in rows]
        tails = [r[1] for r in rows]
        _write_series(
            args.outdir,
            "series_tails",
            ["level", "tail", "decay_k", "decay_l", "normalized_decay"],
            rows,
            renderer=lambda p: render_series(
                p, js, tails, "level j", "reconstruction tail", f"series tails ({sym.name}, K={args.kmax})", logy=True
            ),
        )
    return report


def _ensemble_from(args) -> Ensemble:
    return Ensemble(seed=args.seed, count=args.count, levels=args.levels)


def cmd_embed_check(args) -> Report:
    grid = _grid_from(args)
    resolution = _resolution_for(args, grid)
    cubes = build_cubes(grid)
    ensemble = _ensemble_from(args)
    report = Report("lpcalc", __version__, "embed-check", config=_echo(args), seed=args.seed)
    if args.kind == "refined":
        ratio = embedding_ratio(ensemble, grid, resolution, cubes, args.p, args.q)
    elif args.kind == "into-infinity":
        ratio = besov_tl_embedding_check(ensemble, grid, resolution, cubes, "into_infinity", p=args.p, q=args.q)
    elif args.kind == "into-besov":
        ratio = besov_tl_embedding_check(
            ensemble, grid, resolution, cubes, "into_besov",
            p=args.p, q=args.q, s=args.s, p1=args.p1, q1=args.q1, s1=args.s1,
        )
    else:
        raise GateError(f"unknown embedding kind {args.kind!r}")
    report.add_check("ratio_band", ratio.band, 16.0)
    report.add_check("trend_slope", ratio.trend_slope, 0.05)
    report.add_info("ratios", details=ratio.to_dict())
    _emit_ratio_outputs(args, report, ratio)
    return report


def cmd_product_check(args) -> Report:
    grid = _grid_from(args)
    resolution = _resolution_for(args, grid)
    ensemble = _ensemble_from(args)
    report = Report("lpcalc", __version__, "product-check", config=_echo(args), seed=args.seed)
    ratio = product_estimate_ratio(ensemble, grid, resolution, args.p, args.q)
    report.add_check("ratio_band", ratio.band, 16.0)
    report.add_check("trend_slope", ratio.trend_slope, 0.05)
    report.add_info("ratios", details=ratio.to_dict())
    _emit_ratio_outputs(args, report, ratio)
    return report


def cmd_resolution_check(args) -> Report:
    grid = _grid_from(args)
    jmax = args.jmax if args.jmax else _default_jmax(grid)
    res_a = build_resolution(jmax)
    res_b = build_alternative_resolution(jmax)
    cubes = build_cubes(grid)
    ensemble = _ensemble_from(args)
    report = Report("lpcalc", __version__, "resolution-check", config=_echo(args), seed=args.seed)
    ratio = resolution_independence_check(ensemble, grid, res_a, res_b, cubes, s=args.s, q=args.q)
    report.add_check("ratio_band", ratio.band, 16.0)
    report.add_check("trend_slope", ratio.trend_slope, 0.05)
    report.add_info("ratios", details=ratio.to_dict())
    _emit_ratio_outputs(args, report, ratio)
    return report


def cmd_lift_check(args) -> Report:
    grid = _grid_from(args)
    resolution = _resolution_for(args, grid)
    cubes = build_cubes(grid)
    weight = AdmissibleWeight.prototype(args.weight_lam, args.weight_mu)
    reg = regularize(weight, resolution)
    ensemble = _ensemble_from(args)
    report = Report("lpcalc", __version__, "lift-check", config=_echo(args), seed=args.seed)
    rows = []
    spec = SpaceSpec(args.s, args.p, args.q, n=grid.n)
    for _, level, f in ensemble.members(grid):
        out = lifting_check(f, spec, weight, resolution, cubes=cubes, exponent=args.lam, reg=reg)
        rows.append((level, out.ratio))
    from .experiments import RatioReport, fit_trend

    levels = tuple(l for l, _ in rows)
    ratios = tuple(float(r) for _, r in rows)
    ratio = RatioReport("lifting_ratio", {"s": args.s, "p": args.p, "q": args.q, "lam": args.lam},
                        levels, ratios, fit_trend(levels, ratios))
    report.add_check("ratio_band", ratio.band, 16.0)
    report.add_check("trend_slope", ratio.trend_slope, 0.05)
    report.add_info("ratios", details=ratio.to_dict())
    _emit_ratio_outputs(args, report, ratio)
    return report


def cmd_sharpness(args) -> Report:
    grid = _grid_from(args)
    jmax = args.jmax if args.jmax else _default_jmax(grid)
    resolution = build_resolution(jmax)
    profile = SharpnessProfile(args.delta, args.gamma, k_range=(args.kmin, args.kmax))
    report = Report("lpcalc", __version__, "sharpness", config=_echo(args))
    scan = sharpness_scan(profile, grid, resolution)
    alpha_true = profile.alpha
    report.add_check(
        "oracle_exponent_error",
        abs(scan.oracle_alpha - alpha_true),
        0.02 * abs(alpha_true) if alpha_true != 0 else 0.02,
        oracle_alpha=scan.oracle_alpha,
        alpha_true=alpha_true,
    )
    membership_increments = np.diff(scan.membership_norms)
    report.add_check(
        "membership_cauchy",
        0.0 if bool(np.all(np.diff(membership_increments) < 0)) else 1.0,
        0.5,
        increments=[float(v) for v in membership_increments],
    )
    if scan.alpha_hat is not None:
        report.add_check(
            "growth_exponent_error",
            abs(scan.alpha_hat - alpha_true),
            0.05,
            alpha_hat=scan.alpha_hat,
            alpha_true=alpha_true,
        )
    if scan.cauchy is not None:
        report.add_check(
            "partial_norms_cauchy",
            scan.cauchy["last_over_first"] if scan.cauchy["decreasing"] else np.inf,
            0.10,
            **scan.cauchy,
        )
    report.add_info("scan", **scan.to_dict())
    if args.outdir:
        from .figures import render_sharpness

        _write_series(
            args.outdir,
            "sharpness",
            ["radius", "growth", "membership"],
            list(zip(scan.radii, scan.growth_values, scan.membership_norms)),
            renderer=lambda p: render_sharpness(p, scan),
        )
    return report


def cmd_pde(args) -> Report:
    u0 = read_lpgf(args.u0)
    sym = builtin_symbol(args.sigma)
    spec = EvolutionSpec(
        dispersion=args.s,
        initial=u0,
        symbol=sym,
        horizon=args.horizon,
        tolerance=args.tol,
        max_iterations=args.max_iterations,
        nodes=args.nodes,
        max_halvings=args.halvings,
    )
    state = picard_solve(spec)
    report = Report("lpcalc", __version__, "pde", config=_echo(args))
    report.add_check("converged", 0.0 if state.converged else 1.0, 0.5)
    report.add_check("residual", state.residual, args.tol)
    report.add_info("iteration", **state.to_dict())
    if args.outdir:
        from .figures import render_series

        args.outdir.mkdir(parents=True, exist_ok=True)
        write_lpgf(state.final, args.outdir / "final.lpgf")
        for idx, u in enumerate(state.trajectory):
            write_lpgf(u, args.outdir / f"trajectory_{idx:03d}.lpgf")
        its = list(range(1, len(state.update_norms) + 1))
        _write_series(
            args.outdir,
            "updates",
            ["iteration", "update_norm"],
            list(zip(its, map(float, state.update_norms))),
            renderer=lambda p: render_series(
                p, its, state.update_norms, "iteration", "update norm", "fixed-point updates", logy=True
            ),
        )
    return report


def cmd_logschrodinger(args) -> Report:
    f = read_lpgf(args.inputs[0])
    g = read_lpgf(args.inputs[1])
    sym = builtin_symbol(args.sigma)
    resolution = _resolution_for(args, f.grid)
    u, out = log_schrodinger_solve(sym, f, g, resolution, p=args.p, q=args.q)
    report = Report("lpcalc", __version__, "logschrodinger", config=_echo(args))
    report.add_check("equation_residual", out.residual, 1e-10)
    report.add_info("norms", **out.to_dict())
    if args.outdir:
        args.outdir.mkdir(parents=True, exist_ok=True)
        write_lpgf(u, args.outdir / "solution.lpgf")
        write_csv(u, args.outdir / "solution.csv")
    return report


def cmd_make_input(args) -> Report:
    grid = _grid_from(args)
    if args.kind == "noise":
        rng = np.random.default_rng(args.seed)
        f = band_limited_noise(grid, args.level, rng, decay=1.1)
    elif args.kind == "mode":
        f = pure_mode(grid, args.mode_index)
    else:
        raise GateError(f"unknown input kind {args.kind!r}")
    if args.sobolev_target is not None:
        current = sobolev_norm(f, grid.n / 2.0)
        f = (args.sobolev_target / current) * f
    f = args.scale * f
    write_lpgf(f, args.out)
    report = Report("lpcalc", __version__, "make-input", config=_echo(args), seed=args.seed)
    report.add_info("written", path=str(args.out), sobolev_half=sobolev_norm(f, grid.n / 2.0))
    return report


# ---------------------------------------------------------------------------
# parser and dispatch


def _echo(args) -> dict:
    skip = {"func", "config", "outdir"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, Path):
            value = str(value)
        if isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpcalc",
        description="dyadic function-space norms, bilinear symbol calculus, and empirical inequality checks",
    )
    parser.add_argument("--version", action="version", version=f"lpcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="compute a function-space norm of an LPGF file")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--space", default="f", help="besov|f|finf|bmo|bigbmo|xw|sobolev")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--p", type=_parse_extended, default=2.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    p.add_argument("--weight", default="", help="prototype weight exponents lam[,mu]")
    p.add_argument("--jmax", type=int, default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("partition-check", help="residuals of the dyadic partition invariants")
    _add_grid_flags(p, npoints=1024, period=64.0, jmax=7)
    p.add_argument("--alt", action="store_true", help="check the alternative profile instead")
    _add_output_flags(p)
    p.set_defaults(func=cmd_partition_check)

    p = sub.add_parser("weight-check", help="admissibility and regularisation constants of a weight")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=16)
    p.add_argument("--jmax", type=int, default=8)
    _add_output_flags(p)
    p.set_defaults(func=cmd_weight_check)

    p = sub.add_parser("decompose", help="paraproduct split and series expansion of a built-in symbol")
    p.add_argument("--symbol", default="builtin:one")
    p.add_argument("--kmax", type=int, default=16)
    p.add_argument("--lattice", type=int, default=512)
    p.add_argument("--tail-tol", dest="tail_tol", type=_parse_extended, default=np.inf)
    _add_grid_flags(p, npoints=256, period=64.0, jmax=4)
    _add_output_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("embed-check", help="embedding inequality ratio sweeps")
    p.add_argument("--kind", default="refined", choices=("refined", "into-infinity", "into-besov"))
    p.add_argument("--p", type=_parse_extended, default=2.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--p1", type=_parse_extended, default=4.0)
    p.add_argument("--q1", type=_parse_extended, default=2.0)
    p.add_argument("--s1", type=float, default=0.25)
    _add_grid_flags(p)
    _add_ensemble_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_embed_check)

    p = sub.add_parser("product-check", help="product estimate ratio sweep")
    p.add_argument("--p", type=_parse_extended, default=2.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    _add_grid_flags(p)
    _add_ensemble_flags(p, levels="4:6")
    _add_output_flags(p)
    p.set_defaults(func=cmd_product_check)

    p = sub.add_parser("resolution-check", help="norm equivalence under a different resolution of unity")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    _add_grid_flags(p)
    _add_ensemble_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_resolution_check)

    p = sub.add_parser("lift-check", help="weighted norm against the lifted plain norm")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--p", type=_parse_extended, default=2.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    p.add_argument("--lam", type=float, default=1.0, help="power applied to the weight")
    p.add_argument("--weight-lam", dest="weight_lam", type=float, default=1.0)
    p.add_argument("--weight-mu", dest="weight_mu", type=float, default=0.0)
    _add_grid_flags(p)
    _add_ensemble_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_lift_check)

    p = sub.add_parser("sharpness", help="membership and growth scan of the logarithmic counterexample")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, default=7)
    _add_grid_flags(p, npoints=16384, period=64.0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("pde", help="Picard iteration for the dispersive initial-value problem")
    p.add_argument("--s", type=float, default=2.0, help="dispersion exponent")
    p.add_argument("--u0", required=True, type=Path)
    p.add_argument("--horizon", "--T", dest="horizon", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--nodes", type=int, default=32)
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=20)
    p.add_argument("--halvings", type=int, default=6)
    p.add_argument("--sigma", default="builtin:one")
    _add_output_flags(p)
    p.set_defaults(func=cmd_pde)

    p = sub.add_parser("logschrodinger", help="logarithmic stationary solve and norm report")
    p.add_argument("--inputs", nargs=2, required=True, type=Path)
    p.add_argument("--p", type=_parse_extended, default=2.0)
    p.add_argument("--q", type=_parse_extended, default=2.0)
    p.add_argument("--sigma", default="builtin:one")
    p.add_argument("--jmax", type=int, default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_logschrodinger)

    p = sub.add_parser("make-input", help="write a band-limited LPGF input file")
    p.add_argument("--kind", default="noise", choices=("noise", "mode"))
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--mode-index", dest="mode_index", type=int, default=5)
    p.add_argument("--sobolev-target", dest="sobolev_target", type=float, default=None,
                   help="rescale to this critical Sobolev norm before applying --scale")
    p.add_argument("--out", required=True, type=Path)
    _add_grid_flags(p, npoints=1024, period=64.0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_make_input)

    return parser


def _apply_config(parser, argv):
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", type=Path, default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config is not None:
        with open(known.config) as fh:
            defaults = json.load(fh)
        if not isinstance(defaults, dict):
            raise LpgfError("config file must hold a JSON object of option defaults")
        parser.set_defaults(**defaults)
        for action in parser._subparsers._group_actions:
            for sub in action.choices.values():
                sub.set_defaults(**{k: v for k, v in defaults.items()})
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"lpcalc: {exc}", file=sys.stderr)
        return 3
    try:
        report = args.func(args)
    except (LpgfError, OSError) as exc:
        print(f"lpcalc: {exc}", file=sys.stderr)
        return 3
    except (GateError, KeyError, ValueError) as exc:
        print(f"lpcalc: {exc}", file=sys.stderr)
        return 2
    text = report.to_json()
    sys.stdout.write(text)
    if args.outdir:
        args.outdir.mkdir(parents=True, exist_ok=True)
        report.write(args.outdir / "report.json")
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
