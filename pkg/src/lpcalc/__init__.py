"""Numerical Littlewood-Paley calculus on the periodic torus.

Dyadic frequency decompositions, generalised-smoothness function-space
norms, bilinear symbol calculus with paraproduct and elementary-series
decompositions, empirical inequality checks, and small spectral PDE
solvers, all on sampled periodic functions.
"""

__version__ = "0.1.0"

from .grid import (
    Grid,
    GridFunction,
    Spectrum,
    apply_multiplier,
    constant_function,
    forward_transform,
    inverse_transform,
    lp_norm,
    pointwise_product,
    pure_mode,
    sample_function,
)
from .norms import (
    SpaceSpec,
    besov_norm,
    big_bmo_norm,
    bmo_norm,
    build_cubes,
    lifting_check,
    sobolev_norm,
    tl_infinity_norm,
    triebel_lizorkin_norm,
    xw_norm,
)
from .partition import (
    AnnulusCutoffs,
    ResolutionOfUnity,
    band_project,
    build_alternative_resolution,
    build_resolution,
)
from .bilinear import (
    BilinearSymbol,
    apply_bilinear,
    apply_elementary,
    bs_seminorm,
    builtin_symbol,
    fourier_coefficients,
    split_paraproduct,
)
from .experiments import Ensemble, SharpnessProfile, sharpness_scan
from .lpgf import read_lpgf, write_lpgf
from .pde import EvolutionSpec, log_schrodinger_solve, picard_solve, propagator
from .weights import (
    AdmissibleWeight,
    check_admissible,
    comp_weights_bound,
    comparable_values,
    eval_weight,
    power_weight,
    regularize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
