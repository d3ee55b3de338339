"""Expansion of the normalized permanent around the product of column means.

Writing each entry as column mean plus deviation, Z[j,k] = zbar[k] + a[j,k],
the normalized permanent (N-n)!/N! Per Z splits into terms G_0, ..., G_n with
G_0 = prod_k zbar[k] and G_1 = 0. The partial sums H_l = G_0 + ... + G_l
approximate it with an error controlled by the smallness parameter gamma.
"""

import dataclasses
import itertools
import math

import numpy as np

from .errors import DomainError
from .multilinear import (
    MultilinearPoly,
    check_bitmask_size,
    ml_affine_product,
    popcounts,
    subset_products,
)
from .permanent import falling_ratio
from .validation import check_matrix, is_unit_bounded


@dataclasses.dataclass(frozen=True, eq=False)
class ExpansionParams:
    """Column means, deviations and the derived scalars alpha, beta, gamma."""

    N: int
    n: int
    column_means: np.ndarray
    deviations: np.ndarray
    column_second_moments: np.ndarray
    alpha: float
    beta: float
    gamma: float
    unit_bounded: bool

    def deviation_form(self, j):
        """Row j of the deviations as the linear form U_j(x) = sum_k a[j,k] x_k."""
        return MultilinearPoly.affine(0.0, self.deviations[j])

    def to_dict(self):
        return {
            "N": self.N,
            "n": self.n,
            "column_means": self.column_means,
            "column_second_moments": self.column_second_moments,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "unit_bounded": self.unit_bounded,
        }


def _min_with_inverse_gap(cap, beta):
    # min{cap, 1/(1-beta)} with 1/0 read as +inf; beta >= 1 only occurs for
    # matrices that are not unit bounded and is treated the same way.
    if beta >= 1.0:
        return cap
    return min(cap, 1.0 / (1.0 - beta))


def analyze(Z):
    """Compute :class:`ExpansionParams` for the matrix ``Z``."""
    Z = check_matrix(Z)
    N, n = Z.shape
    zbar = Z.mean(axis=0)
    a = Z - zbar
    # Re-centre once more so that column sums vanish to roundoff.
    a -= a.mean(axis=0)
    alpha_k = (np.abs(a) ** 2).mean(axis=0)
    alpha = float(alpha_k.mean())
    beta = float((np.abs(zbar) ** 2).mean())
    gamma = n * alpha / N * _min_with_inverse_gap(n, beta)
    for arr in (zbar, a, alpha_k):
        arr.flags.writeable = False
    return ExpansionParams(
        N=N,
        n=n,
        column_means=zbar,
        deviations=a,
        column_second_moments=alpha_k,
        alpha=alpha,
        beta=beta,
        gamma=float(gamma),
        unit_bounded=is_unit_bounded(Z),
    )


def gamma_d(params, d):
    """(n alpha / N) * min{d n, 1/(1 - beta)}; ``gamma_d(p, 1) == p.gamma``."""
    if not d > 0:
        raise DomainError(f"d must be positive, got {d}")
    return params.n * params.alpha / params.N * _min_with_inverse_gap(d * params.n, params.beta)


def _power_sums(params, upto):
    """V_i = sum_j (-U_j)^i for i = 0..upto, as coefficient arrays."""
    n = params.n
    check_bitmask_size(n)
    # (-U_j)^i keeps only degree-i monomials, each with i! prod_{k in S}(-a[j,k]).
    summed = subset_products(-params.deviations).sum(axis=0)
    pc = popcounts(n)
    V = [np.where(pc == 0, params.N, 0).astype(np.complex128)]
    for i in range(1, upto + 1):
        V.append(np.where(pc == i, math.factorial(i) * summed, 0))
    return [MultilinearPoly(v, n) for v in V]


def _w_polys(params, upto):
    n = params.n
    upto = min(upto, params.N)
    V = _power_sums(params, min(upto, n))
    W = [MultilinearPoly.constant(n)]
    for m in range(1, upto + 1):
        if m > n:
            W.append(MultilinearPoly.zeros(n))
            continue
        acc = MultilinearPoly.zeros(n)
        for k in range(m - 1):
            acc = acc + W[k] * V[m - k]
        W.append(acc * (-1.0 / m))
    return W


def w_poly(Z, m):
    """W_m(x) = [y^m] prod_j (1 + U_j(x) y), reduced modulo squares.

    Evaluated through the power-sum recursion
    W_m = -(1/m) sum_{k=0}^{m-2} W_k V_{m-k}, where V_i = sum_j (-U_j)^i.
    """
    params = analyze(Z)
    if not 0 <= m <= params.N:
        raise DomainError(f"m must lie in [0, N={params.N}], got {m}")
    return _w_polys(params, m)[m]


def _mean_divided_powers(params, upto):
    """(sum_k zbar_k x_k)^r / r! for r = 0..upto."""
    zbar = params.column_means
    out = [MultilinearPoly.constant(params.n)]
    for r in range(1, upto + 1):
        out.append(out[-1].mul_affine(0.0, zbar) / r)
    return out


def _w_polys_from_product(params, upto):
    # Degree-m parts of prod_j (1 + U_j(x)) are exactly the W_m(x).
    n = params.n
    check_bitmask_size(n)
    full = ml_affine_product((1.0, row) for row in params.deviations)
    return [full.homogeneous_part(m) for m in range(upto + 1)]


def g_terms(Z, order=None, params=None, route="recursion"):
    """Array ``[G_0(Z), ..., G_order(Z)]`` (order defaults to n).

    ``route="recursion"`` builds W_m through power sums; ``route="product"``
    reads them off the expanded product of the deviation forms instead.
    """
    if params is None:
        params = analyze(Z)
    N, n = params.N, params.n
    if order is None:
        order = n
    if not 0 <= order <= n:
        raise DomainError(f"order must lie in [0, n={n}], got {order}")
    if route == "recursion":
        W = _w_polys(params, order)
    elif route == "product":
        W = _w_polys_from_product(params, order)
    else:
        raise DomainError(f"unknown route {route!r}")
    L = _mean_divided_powers(params, n)
    out = np.empty(order + 1, dtype=np.complex128)
    for m in range(order + 1):
        # (N-m)!/((n-m)! N!) [x_1..x_n] W_m L^{n-m}; the (n-m)! sits in L.
        out[m] = falling_ratio(N, m) * W[m].top_of_product(L[n - m])
    return out


def g_term(Z, m):
    """G_m(Z) for 0 <= m <= n."""
    Z = check_matrix(Z)
    n = Z.shape[1]
    if not 0 <= m <= n:
        raise DomainError(f"m must lie in [0, n={n}], got {m}")
    return complex(g_terms(Z, m)[m])


def h_approx(Z, order):
    """H_order(Z) = G_0(Z) + ... + G_order(Z), for 1 <= order <= n."""
    Z = check_matrix(Z)
    n = Z.shape[1]
    if not 1 <= order <= n:
        raise DomainError(f"order must lie in [1, n={n}], got {order}")
    return complex(g_terms(Z, order).sum())


def _pair_sum(params, size):
    """sum_{|K|=size} (sum_j prod_{k in K} a[j,k]) prod_{k not in K} zbar_k."""
    a, zbar = params.deviations, params.column_means
    total = 0j
    for K in itertools.combinations(range(params.n), size):
        rest = [k for k in range(params.n) if k not in K]
        total += a[:, list(K)].prod(axis=1).sum() * zbar[rest].prod()
    return total


def g2_closed(Z):
    """G_2 by direct summation over column pairs."""
    params = analyze(Z)
    if params.n < 2:
        raise DomainError("G_2 closed form needs n >= 2")
    return complex(-falling_ratio(params.N, 2) * _pair_sum(params, 2))


def g3_closed(Z):
    """G_3 by direct summation over column triples."""
    params = analyze(Z)
    if params.n < 3:
        raise DomainError("G_3 closed form needs n >= 3")
    return complex(2.0 * falling_ratio(params.N, 3) * _pair_sum(params, 3))


def h2_closed(Z):
    """H_2 from the explicit pair-sum display, independent of the recursion."""
    params = analyze(Z)
    if params.n < 2:
        raise DomainError("H_2 needs n >= 2")
    N = params.N
    return complex(params.column_means.prod() - _pair_sum(params, 2) / (N * (N - 1)))
