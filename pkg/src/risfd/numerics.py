"""Dense complex matrix helpers shared by the physical-layer code.

All matrices are 2-D ``numpy.ndarray`` of ``complex128`` in row-major
(C) order. Values are treated as immutable once created; every helper
returns a fresh array and never mutates its inputs.
"""

from __future__ import annotations

import numpy as np

CMat = np.ndarray


def cmat(entries) -> CMat:
    """Build a 2-D complex128 matrix from any nested sequence."""
    a = np.array(entries, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def assert_finite(a: CMat) -> CMat:
    """Raise if any entry is NaN or infinite; returns the input."""
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise FloatingPointError("matrix contains non-finite entries")
    return a


def matmul(a: CMat, b: CMat) -> CMat:
    """Complex matrix product with an explicit shape check."""
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul expects 2-D matrices")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def hermitian(a: CMat) -> CMat:
    """Conjugate transpose."""
    return a.conj().T.copy()


def frob_norm(a: CMat) -> float:
    """Frobenius norm, sqrt of the summed squared entry magnitudes."""
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))
