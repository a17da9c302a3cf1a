"""Littlewood-Paley and Besov diagnostics for sub-Laplacians on finite Cayley graphs."""

from .besov import BesovParams, besov_dyadic_norm, besov_equivalence_report, besov_heat_norm
from .functional_calculus import (
    DegreeCapError,
    SpectralFilter,
    apply_multiplier,
    convolve,
    delta,
    heat_kernel,
    kernel_of,
    spectral_power_apply,
    wave_cosine,
)
from .group_lattice import GroupSpec, build_group, growth_profile, word_metric
from .littlewood_paley import (
    FilterBank,
    decompose,
    lp_equivalence_stats,
    lp_norm,
    make_ensemble,
    make_filter_bank,
    square_function,
)
from .multipliers import (
    builtin_family,
    cutoff_phi,
    heat,
    heat_power,
    multiplier_norm,
    psi_from_phi,
    telescope_check,
)
from .sublaplacian import apply_X, build_sublaplacian

__version__ = "0.1.0"

__all__ = [
    "BesovParams", "besov_dyadic_norm", "besov_equivalence_report", "besov_heat_norm",
    "DegreeCapError", "SpectralFilter", "apply_multiplier", "convolve", "delta", "heat_kernel",
    "kernel_of", "spectral_power_apply", "wave_cosine",
    "GroupSpec", "build_group", "growth_profile", "word_metric",
    "FilterBank", "decompose", "lp_equivalence_stats", "lp_norm", "make_ensemble",
    "make_filter_bank", "square_function",
    "builtin_family", "cutoff_phi", "heat", "heat_power", "multiplier_norm", "psi_from_phi",
    "telescope_check",
    "apply_X", "build_sublaplacian",
]
