"""Dense matrix inversion by variable-coefficient Schultz-type iteration."""

from ._hyperpower import (
    coeffs_from_spectrum,
    generate,
    gram,
    invert,
    jacobi_eigenvalues,
    read_matrix_market,
    scalar_recurrence,
    solve_coeffs,
    verify,
    write_matrix_market,
)

__all__ = [
    "coeffs_from_spectrum",
    "generate",
    "gram",
    "invert",
    "jacobi_eigenvalues",
    "read_matrix_market",
    "scalar_recurrence",
    "solve_coeffs",
    "verify",
    "write_matrix_market",
]
