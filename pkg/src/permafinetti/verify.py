"""Seeded randomized verification campaigns.

Each campaign draws ``trials`` random instances, trial t from
``numpy.random.default_rng([seed, t])``, and checks inequalities and
identities of the form ``value <= limit + tol * (1 + |limit|)``. Results
depend only on (suite, trials, seed, nmax).
"""

import dataclasses
import time

import numpy as np

from . import bounds as B
from . import definetti as D
from .expansion import analyze, g2_closed, g3_closed, g_terms, h2_closed
from .families import UNIT_BOUNDED_FAMILIES, random_matrix, random_model, random_shape
from .io import matrix_to_dict
from .permanent import per_genfunc, per_identical_columns, per_naive, per_normalized

BOUND_TOL = 1e-12
IDENTITY_TOL = 1e-10
TELESCOPE_TOL = 1e-9


@dataclasses.dataclass
class VerificationReport:
    campaign: str
    trials: int
    violations: int
    max_relative_slack: float
    worst_case: dict
    seed: int
    elapsed_ms: int = None
    checks: dict = dataclasses.field(default_factory=dict)

    def to_dict(self):
        return dataclasses.asdict(self)


class _Tally:
    def __init__(self):
        self.checks = {}
        self.violations = 0
        self.worst = -np.inf
        self.worst_case = None

    def check(self, name, value, limit, instance, tol=BOUND_TOL):
        """Record ``value <= limit`` with slack ``tol * (1 + |limit|)``."""
        scale = 1.0 + abs(limit)
        slack = (value - limit) / scale
        entry = self.checks.setdefault(name, {"count": 0, "violations": 0, "max_relative_slack": -np.inf})
        entry["count"] += 1
        entry["max_relative_slack"] = max(entry["max_relative_slack"], slack)
        if not slack <= tol:
            self.violations += 1
            entry["violations"] += 1
        if slack > self.worst:
            self.worst = slack
            self.worst_case = {"check": name, "value": value, "limit": limit, "input": instance()}

    def close(self, name, a, b, instance, tol=IDENTITY_TOL):
        self.check(name, abs(a - b) / (1.0 + abs(b)), 0.0, instance, tol)

    def report(self, campaign, trials, seed):
        return VerificationReport(
            campaign=campaign,
            trials=trials,
            violations=self.violations,
            max_relative_slack=float(self.worst),
            worst_case=self.worst_case,
            seed=seed,
            checks=self.checks,
        )


def _matrix_instance(Z, **extra):
    return lambda: {"matrix": matrix_to_dict(Z), **extra}


def campaign_permanents(trials, seed, nmax=7):
    t = _Tally()
    families = ("disk", "phase", "sign", "zero_colsum", "identical")
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        N, n = random_shape(rng, nmax)
        fam = families[trial % len(families)]
        Z = random_matrix(rng, N, n, fam)
        inst = _matrix_instance(Z, family=fam)
        ref = per_naive(Z)
        g = per_genfunc(Z)
        t.close("genfunc_vs_naive", g, ref, inst)
        t.close("normalized_routes", per_normalized(Z), per_normalized(Z, method="naive"), inst)
        if fam == "identical":
            t.close("identical_columns", g, per_identical_columns(Z[:, 0], n), inst)
        t.close("row_permutation", per_genfunc(Z[rng.permutation(N)]), g, inst)
        t.close("column_permutation", per_genfunc(Z[:, rng.permutation(n)]), g, inst)
        k = int(rng.integers(n))
        U = Z.copy()
        V = Z.copy()
        U[:, k] = rng.normal(size=N) + 1j * rng.normal(size=N)
        V[:, k] = Z[:, k] - U[:, k]
        t.close("column_additivity", per_naive(U) + per_naive(V), ref, inst)
        c = complex(rng.normal(), rng.normal())
        W = Z.copy()
        W[:, k] *= c
        t.close("column_homogeneity", per_naive(W), c * ref, inst)
    return t.report("permanents", trials, seed)


def campaign_expansion(trials, seed, nmax=8):
    t = _Tally()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        N, n = random_shape(rng, nmax)
        fam = UNIT_BOUNDED_FAMILIES[trial % len(UNIT_BOUNDED_FAMILIES)]
        Z = random_matrix(rng, N, n, fam)
        inst = _matrix_instance(Z, family=fam)
        p = analyze(Z)
        G = g_terms(Z, params=p)
        Gp = g_terms(Z, params=p, route="product")
        target = per_normalized(Z)
        t.close("telescoping", G.sum(), target, inst, TELESCOPE_TOL)
        scale = 1.0 + np.abs(Z).max()
        t.check("g1_vanishes", abs(G[1]) / scale if n >= 1 else 0.0, 0.0, inst)
        t.check("g1_vanishes_product_route", abs(Gp[1]) / scale, 0.0, inst)
        t.check("recursion_vs_product", float(np.abs(G - Gp).max()), 0.0, inst, IDENTITY_TOL)
        t.close("g0_is_mean_product", G[0], complex(p.column_means.prod()), inst)
        if n >= 2:
            t.close("g2_closed", g2_closed(Z), G[2], inst)
            t.close("h2_closed", h2_closed(Z), G[:3].sum(), inst)
        if n >= 3:
            t.close("g3_closed", g3_closed(Z), G[3], inst)
        t.check("gamma_at_most_n_over_N", p.gamma, n / N, inst)
        perm = rng.permutation(N)
        t.check("row_permutation", float(np.abs(g_terms(Z[perm]) - G).max()), 0.0, inst, IDENTITY_TOL)
    return t.report("expansion", trials, seed)


def campaign_bounds(trials, seed, nmax=8):
    t = _Tally()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        N, n = random_shape(rng, nmax)
        fam = UNIT_BOUNDED_FAMILIES[trial % len(UNIT_BOUNDED_FAMILIES)]
        Z = random_matrix(rng, N, n, fam)
        inst = _matrix_instance(Z, family=fam)
        p = analyze(Z)
        target = per_normalized(Z)
        G = g_terms(Z, min(3, n), params=p)
        H = np.cumsum(G)
        for l in range(1, min(3, n) + 1):
            err = abs(target - H[l])
            t.check(f"kappa_l{l}", err, B.err_bound_kappa(p, l), inst)
            if p.gamma < 1:
                t.check(f"main_l{l}", err, B.err_bound_main(p, l), inst)
        if p.gamma < 1:
            t.check("h1", abs(target - H[1]), B.err_bound_h1(p), inst)
            if n >= 2:
                t.check("h2", abs(target - H[2]), B.err_bound_h2(Z), inst)
        if n >= 2:
            refined, coarse = B.bound_g2(p)
            t.check("g2_refined", abs(G[2]), refined, inst)
            t.check("g2_refined_le_coarse", refined, coarse, inst)
        if n >= 3:
            t.check("g3", abs(G[3]), B.bound_g3(Z), inst)
        A = Z - Z.mean(axis=0)
        per_a = abs(per_genfunc(A))
        zero_bound = B.hadamard_zero_colsum(A)
        t.check("hadamard_zero_colsum", per_a, zero_bound, inst)
        t.check("hadamard_zero_le_embed", zero_bound, B.hadamard_embed(A), inst)
        S = random_matrix(rng, n, n, fam)
        t.check("hadamard_square", abs(per_genfunc(S)), B.hadamard_square(S), _matrix_instance(S, family=fam))
    return t.report("bounds", trials, seed)


def campaign_lemmas(trials, seed, nmax=8):
    t = _Tally()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        n = int(rng.integers(1, nmax + 1))
        m = int(rng.integers(0, n + 1))
        scale = 10.0 ** rng.uniform(-1, 1)
        w1 = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
        w2 = rng.normal(size=n) + 1j * rng.normal(size=n)
        if rng.random() < 0.2:
            w2 = w2 * 0 + w2[0]
        lhs, rhs = B.lemma_coeff_pair(w1, w2, m)
        t.check("coeff", lhs, rhs, lambda: {"w1": w1, "w2": w2, "m": m})

        N = int(rng.integers(1, nmax))
        k = int(rng.integers(1, nmax))
        A = rng.normal(size=(N, k)) + 1j * rng.normal(size=(N, k))
        A -= A.mean(axis=0)
        b = rng.normal(size=k) + 1j * rng.normal(size=k)
        mm = int(rng.integers(0, min(N, k) + 1))
        lhs, rhs = B.lemma_mixed_pair(A, b, mm)
        t.check("mixed", lhs, rhs, lambda: {"A": A, "b": b, "m": mm})

        r = int(rng.integers(0, 30))
        tt = float(rng.choice([0.0, 1.0, rng.random()], p=[0.1, 0.1, 0.8]))
        x = float(rng.choice([0.0, 1.0, rng.random()], p=[0.05, 0.1, 0.85]))
        lhs, rhs = B.lemma_geom_pair(r, tt, x)
        t.check("geom", lhs, rhs, lambda: {"r": r, "t": tt, "x": x})

        g = rng.exponential(size=n) * (rng.random(n) < 0.8)
        means = B.maclaurin_means(g)
        if n > 1:
            t.check("maclaurin", float(np.max(np.diff(means))), 0.0, lambda: {"g": g})
    return t.report("lemmas", trials, seed)


def campaign_definetti(trials, seed, nmax=6, inner_trials=200):
    t = _Tally()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        d = int(rng.integers(2, 4))
        N = int(rng.integers(2, nmax + 1))
        n = int(rng.integers(1, N))
        model = random_model(rng, d, N)
        inst = lambda: {"model": model.to_dict(), "n": n}  # noqa: E731
        P, Q1 = D.exact_law(model, n), D.q1(model, n)
        b = D.df_bounds(n, N, d)
        dist = D.tv(P, Q1)
        t.check("tv_q1_dm", dist, min(b.dm_exact, b.dm_quad), inst)
        t.check("tv_q1_finite_s", dist, b.finite_s, inst)
        rect = D.pv(P, Q1)
        t.check("pv_le_tv", rect, dist, inst)
        t.check("pv_q1_first_order", rect, b.first_order, inst)
        t.check("pv_q1_bobkov", rect, b.bobkov, inst)
        low = D.sup_fn_lower(P, Q1, inner_trials, seed * 1_000_003 + trial)
        t.check("sup_q1_first_order", low, b.first_order, inst)
        t.check("q1_mass", abs(Q1.total_mass - 1.0), 0.0, inst, IDENTITY_TOL)
        if n >= 2:
            Q2 = D.q2(model, n)
            t.check("q2_mass", abs(Q2.total_mass - 1.0), 0.0, inst, IDENTITY_TOL)
            t.check("pv_q2_second_order", D.pv(P, Q2), b.second_order, inst)
            low2 = D.sup_fn_lower(P, Q2, inner_trials, seed * 1_000_003 + trial)
            t.check("sup_q2_second_order", low2, b.second_order, inst)
        if d**N <= 4096:
            f = D.ProductFunction(np.exp(2j * np.pi * rng.random((n, d))))
            t.close("bridge_q1", D.bridge_expectation(model, f), D.integral(P - Q1, f), inst)
    return t.report("definetti", trials, seed)


SUITES = {
    "permanents": campaign_permanents,
    "expansion": campaign_expansion,
    "bounds": campaign_bounds,
    "lemmas": campaign_lemmas,
    "definetti": campaign_definetti,
}


def run_suite(name, trials, seed, nmax=None, timing=False):
    """Run the named campaign; ``elapsed_ms`` is filled only when ``timing``."""
    fn = SUITES[name]
    kwargs = {} if nmax is None else {"nmax": nmax}
    start = time.perf_counter()
    report = fn(trials, seed, **kwargs)
    if timing:
        report.elapsed_ms = int(round(1000 * (time.perf_counter() - start)))
    return report
