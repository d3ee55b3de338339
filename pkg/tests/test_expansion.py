import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_disk
from permafinetti import (
    analyze,
    g2_closed,
    g3_closed,
    g_term,
    g_terms,
    gamma_d,
    h2_closed,
    h_approx,
    per_normalized,
    w_poly,
)
from permafinetti.errors import DomainError
from permafinetti.families import UNIT_BOUNDED_FAMILIES, random_matrix

EX42 = np.array([[1, 1j], [-1, -1j], [1, 1j], [-1, -1j]])
OMEGA = np.exp(2j * np.pi / 3)
CUBE = np.array([[1, 1, 1], [OMEGA] * 3, [OMEGA**2] * 3])


def test_params_example():
    p = analyze(EX42)
    assert np.allclose(p.column_means, 0)
    assert np.isclose(p.alpha, 1)
    assert np.isclose(p.beta, 0)
    assert np.isclose(p.gamma, 0.5)
    assert p.unit_bounded


def test_params_constant_matrix():
    p = analyze(np.full((4, 2), 0.5j))
    assert np.allclose(p.deviations, 0)
    assert p.alpha == 0 and p.gamma == 0


def test_unimodular_alpha_is_one_minus_beta(rng):
    Z = np.exp(2j * np.pi * rng.random((6, 4)))
    p = analyze(Z)
    assert abs(p.alpha - (1 - p.beta)) < 1e-12


def test_gamma_d():
    p = analyze(EX42)
    assert np.isclose(gamma_d(p, 0.5), 0.5)
    assert gamma_d(p, 1) == p.gamma
    q = analyze(np.ones((3, 2)))
    assert gamma_d(q, 0.5) == 0 and gamma_d(q, 3) == 0


def test_w_poly_examples():
    assert w_poly(EX42, 0).allclose(type(w_poly(EX42, 0)).constant(2))
    assert np.allclose(w_poly(EX42, 1).coeffs, 0)
    assert np.isclose(w_poly(EX42, 2).top, -4j)


def test_g_term_examples(rng):
    Z = random_disk(rng, 5, 3)
    assert abs(g_term(Z, 1)) < 1e-12
    assert np.isclose(g_term(Z, 0), Z.mean(axis=0).prod())
    assert np.isclose(g_term(EX42, 2), -1j / 3)
    with pytest.raises(DomainError):
        g_term(EX42, 3)


def test_closed_forms():
    assert np.isclose(g2_closed(EX42), -1j / 3)
    assert g2_closed(np.full((3, 2), 0.2)) == 0
    assert np.isclose(g3_closed(CUBE), 1)
    assert np.isclose(g_term(CUBE, 3), 1)
    assert g3_closed(np.full((4, 3), 0.2)) == 0
    with pytest.raises(DomainError):
        g2_closed(np.ones((3, 1)))
    with pytest.raises(DomainError):
        g3_closed(np.ones((3, 2)))


@pytest.mark.parametrize("seed", range(5))
def test_closed_forms_match_terms(seed):
    rng = np.random.default_rng(seed)
    Z = random_disk(rng, 6, 3)
    assert np.isclose(g2_closed(Z), g_term(Z, 2), atol=1e-10)
    assert np.isclose(h2_closed(Z), h_approx(Z, 2), atol=1e-10)
    W = random_disk(rng, 7, 4)
    assert np.isclose(g3_closed(W), g_term(W, 3), atol=1e-10)


def test_h_approx_examples(rng):
    assert np.isclose(h_approx(EX42, 1), 0)
    assert np.isclose(h_approx(EX42, 2), -1j / 3)
    Z = random_disk(rng, 6, 4)
    assert np.isclose(h_approx(Z, 4), per_normalized(Z), rtol=1e-9)
    with pytest.raises(DomainError):
        h_approx(Z, 0)
    with pytest.raises(DomainError):
        h_approx(Z, 5)


@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.integers(0, 6), st.sampled_from(UNIT_BOUNDED_FAMILIES))
@settings(max_examples=60, deadline=None)
def test_expansion_properties(seed, N, dn, family):
    rng = np.random.default_rng(seed)
    n = max(1, N - dn)
    Z = random_matrix(rng, N, n, family)
    p = analyze(Z)
    G = g_terms(Z, params=p)
    Gp = g_terms(Z, params=p, route="product")
    target = per_normalized(Z)
    assert abs(G.sum() - target) <= 1e-9 * (1 + abs(target))
    assert np.allclose(G, Gp, atol=1e-10)
    assert abs(Gp[1]) <= 1e-12
    assert p.gamma <= n / N + 1e-15
    assert np.allclose(g_terms(Z[rng.permutation(N)]), G, atol=1e-10)


def test_g_terms_order_truncation(rng):
    Z = random_disk(rng, 6, 5)
    full = g_terms(Z)
    assert len(full) == 6
    assert np.allclose(g_terms(Z, 3), full[:4])


def test_residual_after_h2_is_g3():
    # n = 3, so the residual after H_2 is exactly G_3 = 1
    assert math.isclose(abs(per_normalized(CUBE) - h_approx(CUBE, 2)), 1.0, rel_tol=1e-12)
