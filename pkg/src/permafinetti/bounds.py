"""Explicit constants and error bounds for the permanent expansion.

Besides the bounds themselves, the ``lemma_*_pair`` helpers return the two
sides of each auxiliary inequality so that property suites can check them.
"""

import csv
import dataclasses
import io
import math

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .expansion import analyze, gamma_d
from .multilinear import MultilinearPoly
from .validation import (
    check_matrix,
    check_vector,
    require_unit_bounded,
    require_zero_column_sums,
)

ROOT_XTOL = 1e-12
ROOT_MAXITER = 200
ROOT_BRACKET = (1e-9, 1.0 - 1e-9)
_DIRECT_LIMIT = 120


def _pow(base, exponent):
    # 0**0 == 1 everywhere.
    if exponent == 0:
        return 1.0
    return base**exponent


def c_const(l):
    """C_l = (e^l l! / l^(l + 1/2))^(1/2)."""
    if l < 1 or int(l) != l:
        raise DomainError(f"l must be a positive integer, got {l}")
    l = int(l)
    if l <= 170:
        # e^l l! / l^l as a running product of e*i/l keeps every factor O(1).
        acc = 1.0
        for i in range(1, l + 1):
            acc *= math.e * i / l
        return math.sqrt(acc / math.sqrt(l))
    log_value = l + math.lgamma(l + 1) - (l + 0.5) * math.log(l)
    return math.exp(0.5 * log_value)


def _root_sides(x, l):
    """Both sides of the defining equation for x_l, divided by x^((l+1)/2)."""
    c2 = 2**0.25 * c_const(2)
    geometric = (1.0 - x ** (l - 1)) / (1.0 - x) if l > 1 else 0.0
    scale = x ** ((l + 1) / 2)
    lhs = (2.0 + c2 * x * geometric**0.75) / scale
    rhs = (l + 1) ** 0.25 * c_const(l + 1) / (1.0 - x) ** 0.75
    return lhs, rhs


def root_equation_residual(x, l):
    """LHS - RHS of the undivided equation defining x_l."""
    lhs, rhs = _root_sides(x, l)
    scale = x ** ((l + 1) / 2)
    return (lhs - rhs) * scale


def x_root(l):
    """Unique root in (0, 1) of

        2 + 2^(1/4) C_2 x ((1 - x^(l-1)) / (1 - x))^(3/4)
            = (l+1)^(1/4) C_{l+1} x^((l+1)/2) / (1 - x)^(3/4).

    After division by x^((l+1)/2) the left side decreases and the right side
    increases, so bisection on their difference converges to the root.
    """
    if l < 1 or int(l) != l:
        raise DomainError(f"l must be a positive integer, got {l}")

    def diff(x):
        lhs, rhs = _root_sides(x, int(l))
        return lhs - rhs

    return bisect(diff, *ROOT_BRACKET, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=ROOT_MAXITER)


def kappa_upper(l):
    """Upper bound (l+1)^(1/4) C_{l+1} / (1 - x_l)^(3/4) for kappa_l."""
    return (l + 1) ** 0.25 * c_const(l + 1) / (1.0 - x_root(l)) ** 0.75


@dataclasses.dataclass(frozen=True)
class ConstantsRow:
    l: int
    C: float
    x: float
    kappa_upper: float


def constants_table(lmax):
    """Rows l = 1..lmax of (C_l, x_l, kappa_upper(l))."""
    if lmax < 1:
        raise DomainError("lmax must be at least 1")
    return [ConstantsRow(l, c_const(l), x_root(l), kappa_upper(l)) for l in range(1, lmax + 1)]


def constants_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["l", "C_l", "x_l", "kappa_upper_l"])
    for r in rows:
        writer.writerow([r.l, f"{r.C:.12g}", f"{r.x:.12g}", f"{r.kappa_upper:.12g}"])
    return buf.getvalue()


def _check_order(params, l):
    if not 1 <= l <= params.n:
        raise DomainError(f"order must lie in [1, n={params.n}], got {l}")


def _require_params_unit_bounded(params):
    if not params.unit_bounded:
        raise DomainError("bound requires a matrix with all entries of modulus <= 1")


def _require_gamma_below_one(params, alternative):
    if not params.gamma < 1:
        raise DomainError(f"bound needs gamma < 1 (gamma = {params.gamma:.6g}); use {alternative} instead")


def err_bound_main(params, l):
    """(l+1)^(1/4) C_{l+1} gamma^((l+1)/2) / (1 - gamma)^(3/4), valid for gamma < 1."""
    _check_order(params, l)
    _require_params_unit_bounded(params)
    _require_gamma_below_one(params, "err_bound_kappa")
    g = params.gamma
    return (l + 1) ** 0.25 * c_const(l + 1) * g ** ((l + 1) / 2) / (1.0 - g) ** 0.75


def err_bound_kappa(params, l):
    """kappa_upper(l) * gamma^((l+1)/2); no restriction on gamma."""
    _check_order(params, l)
    _require_params_unit_bounded(params)
    return kappa_upper(l) * params.gamma ** ((l + 1) / 2)


def err_bound_h1(params):
    """Bound on |normalized Per - prod of column means| for gamma < 1."""
    _require_params_unit_bounded(params)
    _require_gamma_below_one(params, "err_bound_kappa")
    g = params.gamma
    return gamma_d(params, 0.5) + 3**0.25 * c_const(3) * g**1.5 / (1.0 - g) ** 0.75


def _row_cubic_sum(params):
    """sqrt(3) sum_j ((1/N^2) sum_k |a[j,k]|^2 min{n/3, 1/(1-beta)})^(3/2)."""
    N, n, beta = params.N, params.n, params.beta
    factor = n / 3 if beta >= 1 else min(n / 3, 1.0 / (1.0 - beta))
    row_energy = (np.abs(params.deviations) ** 2).sum(axis=1)
    return math.sqrt(3) * float(((row_energy * factor / N**2) ** 1.5).sum())


def err_bound_h2(Z):
    """Bound on |normalized Per - H_2| for n >= 2 and gamma < 1."""
    Z = check_matrix(Z)
    require_unit_bounded(Z)
    params = analyze(Z)
    if params.n < 2:
        raise DomainError("second-order bound needs n >= 2")
    _require_gamma_below_one(params, "err_bound_kappa")
    g = params.gamma
    return _row_cubic_sum(params) + 2**0.5 * c_const(4) * g**2 / (1.0 - g) ** 0.75


def bound_g2(params):
    """(refined, coarse) bounds on |G_2|; refined <= coarse = gamma(1/2)."""
    _require_params_unit_bounded(params)
    N, n, beta = params.N, params.n, params.beta
    if n < 2:
        raise DomainError("G_2 bound needs n >= 2")
    coarse = gamma_d(params, 0.5)
    power = _pow(beta, (n - 2) / 2)
    spread = max(power, 0.5 * n * (1.0 - beta) * power)
    refined = coarse * spread * N * (n - 1) / ((N - 1) * n)
    return refined, coarse


def bound_g3(Z):
    """Row-cubic majorant of |G_3|; still evaluated when n < 3 (where G_3 = 0)."""
    Z = check_matrix(Z)
    require_unit_bounded(Z)
    return _row_cubic_sum(analyze(Z))


def _log_hadamard_prefactor(N, m):
    """log of N^(N/2) / ((N-m)^((N-m)/2) m^(m/2)), with 0^0 = 1."""
    out = 0.5 * N * math.log(N)
    if N > m:
        out -= 0.5 * (N - m) * math.log(N - m)
    if m > 0:
        out -= 0.5 * m * math.log(m)
    return out


def _hadamard_prefactor(N, m):
    if N <= _DIRECT_LIMIT:
        return N ** (N / 2) / (_pow(N - m, (N - m) / 2) * _pow(m, m / 2))
    return math.exp(_log_hadamard_prefactor(N, m))


def _sqrt_prod(values):
    """sqrt(prod(values)) for nonnegative values, via logs only on under/overflow."""
    values = np.asarray(values, dtype=float)
    if np.any(values == 0):
        return 0.0
    p = float(np.prod(values))
    if np.isfinite(p) and p >= np.finfo(float).tiny:
        return math.sqrt(p)
    return math.exp(0.5 * float(np.log(values).sum()))


def _factorial(n):
    return float(math.factorial(n)) if n <= 170 else math.inf


def _factorial_ratio(N, m):
    """N! / (N-m)! as a float."""
    out = 1.0
    for i in range(m):
        out *= N - i
    return out


def hadamard_zero_colsum(A):
    """n! N^(N/2) / ((N-n)^((N-n)/2) n^(n/2)) prod_k sqrt(alpha_k) >= |Per A|."""
    A = check_matrix(A, name="A")
    require_zero_column_sums(A)
    N, n = A.shape
    root = _sqrt_prod((np.abs(A) ** 2).mean(axis=0))
    return 0.0 if root == 0 else _factorial(n) * _hadamard_prefactor(N, n) * root


def hadamard_square(Z):
    """N! prod_k ((1/N) sum_j |z[j,k]|^2)^(1/2) >= |Per Z| for square Z."""
    Z = check_matrix(Z)
    N, n = Z.shape
    if N != n:
        raise DomainError(f"square matrix required, got {N}x{n}")
    root = _sqrt_prod((np.abs(Z) ** 2).mean(axis=0))
    return 0.0 if root == 0 else _factorial(N) * root


def hadamard_embed(A):
    """(N!/(N-n)!) prod_k sqrt(alpha_k), from padding A with columns of ones."""
    A = check_matrix(A, name="A")
    require_zero_column_sums(A)
    N, n = A.shape
    root = _sqrt_prod((np.abs(A) ** 2).mean(axis=0))
    return 0.0 if root == 0 else _factorial_ratio(N, n) * root


def bobkov_bound(n, N):
    """The earlier bound 16 n / N."""
    if not 1 <= n <= N:
        raise DomainError(f"need 1 <= n <= N, got n={n}, N={N}")
    return 16.0 * n / N


def lemma_coeff_pair(w1, w2, m):
    """Sides of |[y^m] prod_k (w1_k + w2_k y)| <= C(n,m) mean|w2|^m/2 mean|w1|^(n-m)/2."""
    w1 = check_vector(w1, name="w1")
    w2 = check_vector(w2, name="w2", length=w1.size)
    n = w1.size
    if not 0 <= m <= n:
        raise DomainError(f"m must lie in [0, n={n}], got {m}")
    poly = np.zeros(n + 1, dtype=np.complex128)
    poly[0] = 1.0
    for a, b in zip(w1, w2):
        poly[1:] = a * poly[1:] + b * poly[:-1]
        poly[0] = a * poly[0]
    lhs = abs(poly[m])
    rhs = math.comb(n, m) * _pow(np.mean(np.abs(w2) ** 2), m / 2) * _pow(np.mean(np.abs(w1) ** 2), (n - m) / 2)
    return float(lhs), float(rhs)


def lemma_mixed_pair(A, b, m):
    """Sides of the mixed coefficient bound for a zero-column-sum A and vector b.

    lhs = |[x_1..x_n] (sum_k b_k x_k)^(n-m) prod_j (1 + sum_k A[j,k] x_k)|
    rhs = n! N^(N/2) alpha^(m/2) beta_b^((n-m)/2) / ((N-m)^((N-m)/2) m^(m/2))
    """
    A = np.array(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[1] < 1:
        raise DomainError("A must be a nonempty two-dimensional array")
    N, n = A.shape
    b = check_vector(b, name="b", length=n)
    require_zero_column_sums(A)
    if not 0 <= m <= min(n, N):
        raise DomainError(f"m must lie in [0, min(n, N)={min(n, N)}], got {m}")
    poly = MultilinearPoly.constant(n)
    for row in A:
        poly = poly.mul_affine(1.0, row)
    for _ in range(n - m):
        poly = poly.mul_affine(0.0, b)
    lhs = abs(poly.top)
    alpha = float(np.mean(np.abs(A) ** 2))
    beta_b = float(np.mean(np.abs(b) ** 2))
    scale = _pow(alpha, m / 2) * _pow(beta_b, (n - m) / 2)
    rhs = 0.0 if scale == 0 else _factorial(n) * _hadamard_prefactor(N, m) * scale
    return float(lhs), float(rhs)


def lemma_geom_pair(r, t, x):
    """Sides of sum_{m=0}^r (m+1)^t x^m <= ((1 - x^(r+1)) / (1 - x))^(1+t)."""
    if r < 0 or int(r) != r:
        raise DomainError(f"r must be a nonnegative integer, got {r}")
    if not (0.0 <= t <= 1.0 and 0.0 <= x <= 1.0):
        raise DomainError("t and x must lie in [0, 1]")
    m = np.arange(int(r) + 1)
    lhs = float(np.sum((m + 1.0) ** t * np.array([_pow(x, k) for k in m])))
    geometric = float(r + 1) if x == 1.0 else (1.0 - x ** (r + 1)) / (1.0 - x)
    return lhs, geometric ** (1.0 + t)


def maclaurin_means(g):
    """(e_l / C(n, l))^(1/l) for l = 1..n, where e_l are elementary symmetric sums of g.

    For nonnegative g the sequence is non-increasing.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g < 0):
        raise DomainError("g must be a nonempty vector of nonnegative reals")
    n = g.size
    e = np.zeros(n + 1)
    e[0] = 1.0
    for v in g:
        e[1:] = e[1:] + v * e[:-1]
    return np.array([(e[l] / math.comb(n, l)) ** (1.0 / l) for l in range(1, n + 1)])
