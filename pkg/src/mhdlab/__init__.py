"""Spectral simulation and verification laboratory for incompressible MHD
near a vertical background magnetic field on the periodic torus."""

__version__ = "0.1.0"

from .grid import Grid
from .fields import SpectralField, random_field, single_mode, zero_field
from .multipliers import (MultiplierSpec, apply_multiplier, fractional_laplacian,
                          leray_project, riesz_vertical)
from .norms import mode_split, seminorm, sobolev, homogeneous
from .products import dealiased_product, transform_roundtrip
from .solver import (BlowUpError, MhdState, RunConfig, Stepper,
                     linear_propagator, make_initial_data, run, step)
from .symmetry import check_spectral_constraint, check_symmetry_pair, symmetrize_pair
from .diagnostics import (DiagnosticsRecord, FunctionalReport, RateFit,
                          assemble_functionals, fit_decay, lemma_energy_terms,
                          theorem_rate)
from .commutator import (CommutatorOp, CommutatorSample, commutator_lhs,
                         commutator_rhs, ratio_campaign)

__all__ = [
    "Grid", "SpectralField", "random_field", "single_mode", "zero_field",
    "MultiplierSpec", "apply_multiplier", "fractional_laplacian",
    "leray_project", "riesz_vertical", "mode_split", "seminorm", "sobolev",
    "homogeneous", "dealiased_product", "transform_roundtrip", "BlowUpError",
    "MhdState", "RunConfig", "Stepper", "linear_propagator",
    "make_initial_data", "run", "step", "check_spectral_constraint",
    "check_symmetry_pair", "symmetrize_pair", "DiagnosticsRecord",
    "FunctionalReport", "RateFit", "assemble_functionals", "fit_decay",
    "lemma_energy_terms", "theorem_rate", "CommutatorOp", "CommutatorSample",
    "commutator_lhs", "commutator_rhs", "ratio_campaign",
]
