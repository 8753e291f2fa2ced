"""Quadratic L-functions over F_q[x] for the hyperelliptic ensemble, and checks of their identities."""

from .argument import N_theta, S_K_from_primes, S_K_from_zeros, S_K_theta, S_theta, gap_bound
from .characters import QuadraticCharacter, chi_D, jacobi, jacobi_by_factoring, residue_symbol
from .ensemble import EnsembleConfig, RunRecord, batch_run, enumerate_H, sample_D
from .ff_core import FieldElement, FqContext, field_arith, fq_quadratic_character
from .fmodel import (
    ModelZeroSet,
    clustering_check,
    f_k_arg,
    f_k_deriv,
    f_k_value,
    f_value,
    find_fk_zeros,
    n_k_count,
    rh_check_fk,
    simplicity_stats,
)
from .hybrid import HybridEval, hybrid_check, p_k, truncation_profile, z_k
from .lfunction import LData, compute_coeffs, compute_zeros, lpoly, psi_sum, trace_check
from .poly import Poly, build_prime_table, enumerate_monic, is_irreducible, parse_poly, poly_arith
from .report import build_report, render

__version__ = "0.1.0"

__all__ = [
    "FieldElement", "FqContext", "field_arith", "fq_quadratic_character",
    "Poly", "poly_arith", "is_irreducible", "enumerate_monic", "build_prime_table", "parse_poly",
    "QuadraticCharacter", "chi_D", "jacobi", "jacobi_by_factoring", "residue_symbol",
    "LData", "compute_coeffs", "compute_zeros", "lpoly", "psi_sum", "trace_check",
    "HybridEval", "hybrid_check", "p_k", "z_k", "truncation_profile",
    "S_theta", "S_K_theta", "S_K_from_zeros", "S_K_from_primes", "gap_bound", "N_theta",
    "ModelZeroSet", "f_value", "f_k_value", "f_k_arg", "f_k_deriv", "find_fk_zeros",
    "rh_check_fk", "clustering_check", "n_k_count", "simplicity_stats",
    "EnsembleConfig", "RunRecord", "sample_D", "enumerate_H", "batch_run",
    "build_report", "render",
]
