"""Stability bounds for sparse convolutions on the integers."""

from convstab.alpha_bounds import (
    StabilityReport, alpha_lower_detbound, alpha_upper_alternating, beta,
    monotonicity_table, stability_report, verify_inequality)
from convstab.autocorr_toeplitz import (
    AutocorrToeplitz, autocorrelation, build_matrix, det_eigen_lower_bound,
    principal_submatrix, quadratic_form, smallest_eigenvalue, symbol_eval, symbol_min)
from convstab.errors import BudgetError, ConvstabError, IndexOverflowError, InputError
from convstab.freiman import (
    CompressionResult, FreimanMap, compress_support, dimension_bound, embed,
    is_freiman_homomorphism, is_freiman_isomorphism)
from convstab.sparse_seq import (
    SparseSequence, SupportSet, canonicalize_shift, circular_convolve, convolve, norm)

__version__ = "0.1.0"
