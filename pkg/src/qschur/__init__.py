"""Quaternionic Schur analysis: star-series algebra, S-resolvents,
realizations of quaternionic linear systems, and Schur multipliers."""

from .errors import *  # noqa: F401,F403
from .quaternion import QI, QJ, QK, Quaternion, UnitImaginary, decompose, sphere_point
from .qlinalg import QMatrix, complex_adjoint, herm_psd, inverse, operator_norm, range_basis, rank_h
from .series import MatrixQSeries, QSeries, evaluate, extend_from_slice, shift, star_mul, star_reciprocal
from .scalc import in_s_spectrum, neumann_vs_closed, pencil, s_resolvent, spectrum_probe
from .realization import (
    Realization,
    companion,
    markov,
    minimal_realization,
    product,
    rational_quotient,
    transfer_series,
    unitary_equivalence,
)
from .linsys import SystemTrace, simulate, transfer_consistency, z_transform
from .kernels import GramCertificate, SchurMultiplier, certify_multiplier, hardy_kernel, ks_kernel, toeplitz
from .schur import blaschke, coisometry_kernel_check, schur_algorithm, schur_transform, shift_realization

__version__ = "0.1.0"
