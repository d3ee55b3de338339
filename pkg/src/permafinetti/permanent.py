"""Exact permanents of rectangular complex matrices.

For an N x n matrix Z with n <= N the permanent is the sum, over all
injections j of the columns into the rows, of prod_k Z[j_k, k].
"""

import itertools
import math
from functools import lru_cache

import numpy as np

from .config import get_caps
from .errors import DomainError, ResourceLimitError
from .multilinear import check_bitmask_size, ml_affine_product
from .validation import check_matrix, check_vector

_CACHED_INJECTIONS = 10**6
_CHUNK = 2**16


def injection_count(N, n):
    """N! / (N - n)!, the number of terms in the permanent."""
    return math.perm(N, n)


def falling_ratio(N, m):
    """(N - m)! / N! as a float, folded one factor at a time."""
    r = 1.0
    for i in range(m):
        r /= N - i
    return r


@lru_cache(maxsize=64)
def _injection_table(N, n):
    table = np.array(list(itertools.permutations(range(N), n)), dtype=np.intp).reshape(-1, n)
    table.flags.writeable = False
    return table


def _injection_chunks(N, n):
    if injection_count(N, n) <= _CACHED_INJECTIONS:
        yield _injection_table(N, n)
        return
    it = itertools.permutations(range(N), n)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def per_naive(Z, *, cap=None, normalized=False):
    """Permanent by enumerating every injection.

    This is the reference route the faster ones are checked against.
    """
    Z = check_matrix(Z)
    N, n = Z.shape
    if cap is None:
        cap = get_caps().naive_terms
    terms = injection_count(N, n)
    if terms > cap:
        raise ResourceLimitError(
            f"naive permanent of a {N}x{n} matrix needs {terms:.3e} terms, above the cap {cap:.0e}; "
            "use the generating-function route"
        )
    cols = np.arange(n)
    # The normalized form rescales the matrix by N so that the falling-factorial
    # ratio is applied as N^n (N-n)!/N! at the end instead of dividing a huge sum.
    scale = 1.0 / N if normalized else 1.0
    total = 0j
    for block in _injection_chunks(N, n):
        total += (Z[block, cols] * scale).prod(axis=1).sum()
    if normalized:
        for i in range(n):
            total *= N / (N - i)
    return complex(total)


def _genfunc_top(Z, scale, cap):
    N, n = Z.shape
    check_bitmask_size(n, cap)
    poly = ml_affine_product(((1.0, row * scale) for row in Z), cap=cap)
    return poly.top


def per_genfunc(Z, *, cap=None):
    """Permanent as the coefficient of x_1...x_n in prod_j (1 + sum_k Z[j,k] x_k).

    Costs O(N n 2^n) arithmetic and 2^n complex numbers of memory.
    """
    Z = check_matrix(Z)
    return _genfunc_top(Z, 1.0, cap)


def per_identical_columns(col, n):
    """Permanent of the N x n matrix whose every column equals ``col``.

    Uses Per = n! [y^n] prod_j (1 + col_j y), truncated at degree n.
    """
    col = check_vector(col, name="col")
    N = col.size
    if n < 1 or n > N:
        raise DomainError(f"need 1 <= n <= N, got n={n}, N={N}")
    poly = np.zeros(n + 1, dtype=np.complex128)
    poly[0] = 1.0
    for c in col:
        poly[1:] = poly[1:] + c * poly[:-1]
    return complex(poly[n] * math.factorial(n))


def per_normalized(Z, *, method="auto", caps=None):
    """(N - n)! / N! * Per Z.

    ``method`` is ``"genfunc"``, ``"naive"`` or ``"auto"``; auto uses the
    generating function whenever n fits the bitmask cap.
    """
    Z = check_matrix(Z)
    N, n = Z.shape
    caps = caps or get_caps()
    if method == "auto":
        if n <= caps.bitmask_n:
            method = "genfunc"
        elif injection_count(N, n) <= caps.naive_terms:
            method = "naive"
        else:
            raise ResourceLimitError(
                f"{N}x{n} permanent is infeasible: n exceeds the bitmask cap {caps.bitmask_n} "
                f"and {injection_count(N, n):.3e} terms exceed the naive cap {caps.naive_terms:.0e}"
            )
    if method == "naive":
        return per_naive(Z, cap=caps.naive_terms, normalized=True)
    if method != "genfunc":
        raise DomainError(f"unknown method {method!r}")
    value = _genfunc_top(Z, 1.0 / N, caps.bitmask_n)
    for i in range(n):
        value *= N / (N - i)
    return complex(value)


def permanent(Z, *, method="auto", caps=None):
    """Per Z by the requested route (see :func:`per_normalized`)."""
    Z = check_matrix(Z)
    N, n = Z.shape
    caps = caps or get_caps()
    if method == "auto":
        method = "genfunc" if n <= caps.bitmask_n else "naive"
    if method == "genfunc":
        return per_genfunc(Z, cap=caps.bitmask_n)
    if method == "naive":
        return per_naive(Z, cap=caps.naive_terms)
    raise DomainError(f"unknown method {method!r}")
