"""Desk-scale numerics for the spectral norm of products ``B A`` of a fixed
matrix ``B`` with ``||B|| <= 1`` and a random matrix ``A`` with independent
entries: samplers, norm solvers, nets, tail bounds, the constructive
transforms behind the norm bounds, and a Monte Carlo harness that fits the
unspecified constants."""

from .bfactors import BFactorSpec, InfeasibleProfile, build_b, column_split
from .distributions import EntryDistribution, sample, sample_matrix, theoretical_profile
from .experiments import ExperimentConfig, ExperimentReport, TrialRecord, fit_constant, run_experiment
from .concentration import EmpiricalTail, TailBound, audit_domination, canonical_audit
from .matrix import DimensionError, InvariantViolation, as_matrix, column_profile
from .nets import build_sphere_net, classify_vector, enumerate_level_net
from .pipeline import dyadic_decompose, gaussianize, symmetrize, truncate
from .seeding import derive_seed, make_rng
from .spectral import SpectralResult, singular_values_full, smallest_singular_value, spectral_norm

__all__ = [
    "BFactorSpec",
    "DimensionError",
    "EmpiricalTail",
    "EntryDistribution",
    "ExperimentConfig",
    "ExperimentReport",
    "InfeasibleProfile",
    "InvariantViolation",
    "SpectralResult",
    "TailBound",
    "TrialRecord",
    "as_matrix",
    "audit_domination",
    "build_b",
    "build_sphere_net",
    "canonical_audit",
    "classify_vector",
    "column_profile",
    "column_split",
    "derive_seed",
    "dyadic_decompose",
    "enumerate_level_net",
    "fit_constant",
    "gaussianize",
    "make_rng",
    "run_experiment",
    "sample",
    "sample_matrix",
    "singular_values_full",
    "smallest_singular_value",
    "spectral_norm",
    "symmetrize",
    "theoretical_profile",
    "truncate",
]

__version__ = "0.1.0"
