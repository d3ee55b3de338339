"""Exact rectangular permanents, their mean-field expansion with certified
error bounds, and finite-alphabet approximate de Finetti representations."""

from .bounds import (
    bobkov_bound,
    bound_g2,
    bound_g3,
    c_const,
    constants_table,
    err_bound_h1,
    err_bound_h2,
    err_bound_kappa,
    err_bound_main,
    hadamard_embed,
    hadamard_square,
    hadamard_zero_colsum,
    kappa_upper,
    lemma_coeff_pair,
    lemma_geom_pair,
    lemma_mixed_pair,
    maclaurin_means,
    x_root,
)
from .definetti import (
    DenseSignedMeasure,
    ExchangeableModel,
    ProductFunction,
    bridge_expectation,
    df_bounds,
    exact_law,
    integral,
    permanent_bridge,
    pv,
    q1,
    q2,
    sup_fn_lower,
    tv,
)
from .errors import DomainError, PermafinettiError, ResourceLimitError
from .expansion import (
    ExpansionParams,
    analyze,
    g2_closed,
    g3_closed,
    g_term,
    g_terms,
    gamma_d,
    h2_closed,
    h_approx,
    w_poly,
)
from .multilinear import MultilinearPoly, ml_affine_product
from .permanent import (
    per_genfunc,
    per_identical_columns,
    per_naive,
    per_normalized,
    permanent,
)

__version__ = "0.1.0"
