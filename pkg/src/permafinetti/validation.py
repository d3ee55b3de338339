"""Input validation helpers."""

import numpy as np

from .errors import DomainError

UNIT_TOL = 1e-12
ZERO_SUM_TOL = 1e-10


def check_matrix(Z, *, name="Z"):
    """Validate ``Z`` as an N x n complex matrix with 1 <= n <= N.

    Returns a fresh ``complex128`` array; the input is never modified.
    """
    arr = np.array(Z, dtype=np.complex128)
    if arr.ndim != 2:
        raise DomainError(f"{name} must be two-dimensional, got shape {arr.shape}")
    N, n = arr.shape
    if n < 1 or n > N:
        raise DomainError(f"{name} must satisfy 1 <= n <= N, got N={N}, n={n}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def check_vector(v, *, name="v", length=None):
    arr = np.array(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a nonempty vector, got shape {arr.shape}")
    if length is not None and arr.size != length:
        raise DomainError(f"{name} must have length {length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def is_unit_bounded(Z):
    """True when every entry has modulus at most ``1 + 1e-12``."""
    return bool(np.max(np.abs(np.asarray(Z)), initial=0.0) <= 1.0 + UNIT_TOL)


def require_unit_bounded(Z, *, name="Z"):
    if not is_unit_bounded(Z):
        raise DomainError(f"{name} must have all entries of modulus <= 1")


def has_zero_column_sums(A):
    A = np.asarray(A)
    sums = np.abs(A.sum(axis=0))
    scale = np.maximum(1.0, np.abs(A).sum(axis=0))
    return bool(np.all(sums <= ZERO_SUM_TOL * scale))


def require_zero_column_sums(A, *, name="A"):
    if not has_zero_column_sums(A):
        raise DomainError(f"{name} must have zero column sums")
