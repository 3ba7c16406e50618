"""Numeric tolerances used across the library, collected in one place.

Structural checks (Hermiticity, trace normalization, positivity of density
matrices) use the tight 1e-10 scale; derived numerical results (expectation
values, eigendecomposition residuals) use the looser 1e-8 scale.
"""

# Structural tolerances for quantum objects.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

# Numerical-result tolerances.
IMAG_EXPECTATION_ATOL = 1e-8
RECONSTRUCTION_ATOL = 1e-8

# Time evolution: trace drift handling per recorded sample.
TRACE_RENORM_THRESHOLD = 1e-12
TRACE_ABORT_THRESHOLD = 1e-6

# Feature standardization: floor applied to per-column standard deviations.
STD_FLOOR = 1e-12

# Kronecker products refuse to build operators larger than this.
KRON_DIM_LIMIT = 2**12
