"""Polynomials in n variables modulo the squares of the variables.

Such a polynomial is determined by 2**n complex coefficients, one per subset
S of {0, ..., n-1}; ``coeffs[mask]`` is the coefficient of the monomial
prod_{k in S} x_k where ``mask`` has bit k set iff k is in S.
"""

from functools import lru_cache

import numpy as np

from .config import get_caps
from .errors import DomainError, ResourceLimitError


def check_bitmask_size(n, cap=None):
    if cap is None:
        cap = get_caps().bitmask_n
    if n > cap:
        mib = (2**n) * 16 / 2**20
        raise ResourceLimitError(
            f"n={n} exceeds the bitmask cap {cap}: a dense multilinear polynomial "
            f"needs 2^{n} complex coefficients ({mib:.0f} MiB per array)"
        )


@lru_cache(maxsize=32)
def popcounts(n):
    """Array of |S| for every mask S in range(2**n)."""
    idx = np.arange(2**n, dtype=np.int64)
    counts = np.zeros(2**n, dtype=np.int64)
    for k in range(n):
        counts += (idx >> k) & 1
    counts.flags.writeable = False
    return counts


def _split(arr, k, n):
    # View with bit k as the middle axis: [..., 0, ...] has k unset.
    return arr.reshape(arr.shape[:-1] + (2 ** (n - 1 - k), 2, 2**k))


class MultilinearPoly:
    """Dense element of C[x_1..x_n] / (x_1^2, ..., x_n^2)."""

    __slots__ = ("n_vars", "coeffs")

    def __init__(self, coeffs, n_vars=None):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.ndim != 1:
            raise DomainError("coefficient array must be one-dimensional")
        if n_vars is None:
            n_vars = int(coeffs.size).bit_length() - 1
        if coeffs.size != 2**n_vars:
            raise DomainError(f"expected 2^{n_vars} coefficients, got {coeffs.size}")
        self.n_vars = n_vars
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(2**n, dtype=np.complex128), n)

    @classmethod
    def constant(cls, n, value=1.0):
        c = np.zeros(2**n, dtype=np.complex128)
        c[0] = value
        return cls(c, n)

    @classmethod
    def affine(cls, const, linear):
        """The form ``const + sum_k linear[k] x_k``."""
        linear = np.asarray(linear, dtype=np.complex128)
        n = linear.size
        c = np.zeros(2**n, dtype=np.complex128)
        c[0] = const
        c[1 << np.arange(n)] = linear
        return cls(c, n)

    def __repr__(self):
        return f"MultilinearPoly(n_vars={self.n_vars}, nonzero={np.count_nonzero(self.coeffs)})"

    def coeff(self, subset):
        """Coefficient of prod_{k in subset} x_k (0-based variable indices)."""
        mask = 0
        for k in subset:
            mask |= 1 << k
        return complex(self.coeffs[mask])

    @property
    def top(self):
        """Coefficient of x_1 x_2 ... x_n."""
        return complex(self.coeffs[-1])

    def homogeneous_part(self, degree):
        c = np.where(popcounts(self.n_vars) == degree, self.coeffs, 0)
        return MultilinearPoly(c, self.n_vars)

    def copy(self):
        return MultilinearPoly(self.coeffs.copy(), self.n_vars)

    def _check_same(self, other):
        if other.n_vars != self.n_vars:
            raise DomainError(f"variable count mismatch: {self.n_vars} vs {other.n_vars}")

    def __add__(self, other):
        if isinstance(other, MultilinearPoly):
            self._check_same(other)
            return MultilinearPoly(self.coeffs + other.coeffs, self.n_vars)
        return self + MultilinearPoly.constant(self.n_vars, other)

    __radd__ = __add__

    def __neg__(self):
        return MultilinearPoly(-self.coeffs, self.n_vars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultilinearPoly):
            self._check_same(other)
            return MultilinearPoly(subset_convolution(self.coeffs, other.coeffs, self.n_vars), self.n_vars)
        return MultilinearPoly(self.coeffs * other, self.n_vars)

    def __rmul__(self, other):
        return MultilinearPoly(self.coeffs * other, self.n_vars)

    def __truediv__(self, scalar):
        return MultilinearPoly(self.coeffs / scalar, self.n_vars)

    def __pow__(self, exponent):
        if exponent < 0 or int(exponent) != exponent:
            raise DomainError("only nonnegative integer powers are defined")
        result = MultilinearPoly.constant(self.n_vars)
        for _ in range(int(exponent)):
            result = result * self
        return result

    def mul_affine(self, const, linear):
        """Multiply by ``const + sum_k linear[k] x_k``."""
        return MultilinearPoly(_mul_affine(self.coeffs, const, linear, self.n_vars), self.n_vars)

    def top_of_product(self, other):
        """Coefficient of x_1...x_n in ``self * other`` without forming the product."""
        self._check_same(other)
        return complex(np.dot(self.coeffs, other.coeffs[::-1]))

    def allclose(self, other, rtol=1e-12, atol=1e-12):
        self._check_same(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))


def _mul_affine(coeffs, const, linear, n):
    linear = np.asarray(linear, dtype=np.complex128)
    if linear.shape != (n,):
        raise DomainError(f"linear part must have {n} coefficients, got shape {linear.shape}")
    out = coeffs * const
    for k in range(n):
        if linear[k] != 0:
            tgt = _split(out, k, n)
            tgt[..., 1, :] += linear[k] * _split(coeffs, k, n)[..., 0, :]
    return out


def subset_convolution(f, g, n):
    """h[S] = sum over T subset of S of f[T] g[S \\ T], by ranked zeta transforms.

    O(n^2 2^n) time and O(n 2^n) memory.
    """
    if n == 0:
        return f * g
    pc = popcounts(n)
    size = 2**n
    cols = np.arange(size)
    F = np.zeros((n + 1, size), dtype=np.complex128)
    G = np.zeros((n + 1, size), dtype=np.complex128)
    F[pc, cols] = f
    G[pc, cols] = g
    for k in range(n):
        a = _split(F, k, n)
        a[..., 1, :] += a[..., 0, :]
        b = _split(G, k, n)
        b[..., 1, :] += b[..., 0, :]
    H = np.zeros_like(F)
    for r in range(n + 1):
        for i in range(r + 1):
            H[r] += F[i] * G[r - i]
    for k in range(n):
        h = _split(H, k, n)
        h[..., 1, :] -= h[..., 0, :]
    return H[pc, cols]


def subset_products(rows):
    """Table ``P[j, S] = prod_{k in S} rows[j, k]`` for every row j and mask S."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    N, n = rows.shape
    out = np.ones((N, 2**n), dtype=np.complex128)
    for k in range(n):
        v = _split(out, k, n)
        v[..., 1, :] = v[..., 0, :] * rows[:, k, None, None]
    return out


def linear_power(linear, m):
    """``(sum_k linear[k] x_k)**m`` modulo squares.

    Only monomials of degree m survive and each carries ``m! prod_{k in S} linear[k]``.
    """
    linear = np.asarray(linear, dtype=np.complex128)
    n = linear.size
    if m > n:
        return MultilinearPoly.zeros(n)
    prods = subset_products(linear[None, :])[0]
    fact = float(np.prod(np.arange(1, m + 1, dtype=np.float64)))
    return MultilinearPoly(np.where(popcounts(n) == m, fact * prods, 0), n)


def ml_affine_product(forms, cap=None):
    """Product of affine forms in the quotient ring.

    Parameters
    ----------
    forms : iterable of (const, linear)
        Each form is ``const + sum_k linear[k] x_k``; all linear parts share
        the same length n.
    cap : int, optional
        Maximum n; defaults to the configured bitmask cap.
    """
    forms = list(forms)
    if not forms:
        raise DomainError("at least one affine form is required")
    n = len(np.asarray(forms[0][1]))
    if n < 1:
        raise DomainError("affine forms need at least one variable")
    check_bitmask_size(n, cap)
    coeffs = np.zeros(2**n, dtype=np.complex128)
    coeffs[0] = 1.0
    for const, linear in forms:
        coeffs = _mul_affine(coeffs, const, linear, n)
    return MultilinearPoly(coeffs, n)
