"""Exact approximate de Finetti representations on a finite alphabet.

An exchangeable law of (X_1, ..., X_N) on {0, ..., d-1}^N is given as a
mixture of urn components (uniformly random arrangements of a fixed
composition) and i.i.d. components. For the first n coordinates we compute
the exact marginal law P, the first-order approximation Q1 (the expected
n-th tensor power of the empirical measure) and the signed second-order
correction Q2, together with the distances between them.

Everything is computed composition-wise: given the empirical composition
c of the full sequence, the sequence is a uniform arrangement of c. This
needs at most C(N+d-1, d-1) compositions instead of d^N sequences.
"""

import dataclasses
import itertools
import math

import numpy as np

from .config import get_caps
from .errors import DomainError, ResourceLimitError
from .expansion import h_approx
from .permanent import per_normalized

WEIGHT_TOL = 1e-12
LOAD_WEIGHT_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class Urn:
    counts: tuple


@dataclasses.dataclass(frozen=True)
class IID:
    probs: tuple


@dataclasses.dataclass(frozen=True)
class Component:
    weight: float
    kind: object  # Urn or IID


@dataclasses.dataclass(frozen=True)
class ExchangeableModel:
    """Mixture of urn and i.i.d. laws of length N over an alphabet of size d."""

    d: int
    N: int
    components: tuple

    def __post_init__(self):
        if self.d < 1 or self.N < 1:
            raise DomainError("alphabet size d and length N must be positive")
        if not self.components:
            raise DomainError("a model needs at least one component")
        total = 0.0
        for comp in self.components:
            if not 0.0 <= comp.weight <= 1.0:
                raise DomainError(f"component weight {comp.weight} outside [0, 1]")
            total += comp.weight
            kind = comp.kind
            if isinstance(kind, Urn):
                if len(kind.counts) != self.d or any(c < 0 or int(c) != c for c in kind.counts):
                    raise DomainError(f"urn counts must be {self.d} nonnegative integers")
                if sum(kind.counts) != self.N:
                    raise DomainError(f"urn counts must sum to N={self.N}, got {sum(kind.counts)}")
            elif isinstance(kind, IID):
                if len(kind.probs) != self.d or any(p < 0 for p in kind.probs):
                    raise DomainError(f"i.i.d. probabilities must be {self.d} nonnegative reals")
                if abs(sum(kind.probs) - 1.0) > WEIGHT_TOL:
                    raise DomainError("i.i.d. probabilities must sum to 1")
            else:
                raise DomainError(f"unknown component kind {kind!r}")
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"component weights must sum to 1, got {total!r}")

    @classmethod
    def urn(cls, counts):
        counts = tuple(int(c) for c in counts)
        return cls(len(counts), sum(counts), (Component(1.0, Urn(counts)),))

    @classmethod
    def iid(cls, probs, N):
        probs = tuple(float(p) for p in probs)
        return cls(len(probs), N, (Component(1.0, IID(probs)),))

    @classmethod
    def from_dict(cls, data):
        """Build from ``{"d", "N", "components": [{"weight", "urn"|"iid"}]}``.

        Weights within 1e-9 of summing to one are renormalized; i.i.d.
        probability vectors likewise.
        """
        try:
            d, N, raw = int(data["d"]), int(data["N"]), data["components"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed model: {exc}") from exc
        weights = [float(c["weight"]) for c in raw]
        total = sum(weights)
        if abs(total - 1.0) > LOAD_WEIGHT_TOL:
            raise DomainError(f"component weights sum to {total}, not 1")
        comps = []
        for c, w in zip(raw, weights):
            if ("urn" in c) == ("iid" in c):
                raise DomainError("each component needs exactly one of 'urn' or 'iid'")
            if "urn" in c:
                kind = Urn(tuple(int(v) for v in c["urn"]))
            else:
                probs = [float(v) for v in c["iid"]]
                s = sum(probs)
                if abs(s - 1.0) > LOAD_WEIGHT_TOL:
                    raise DomainError(f"i.i.d. probabilities sum to {s}, not 1")
                kind = IID(tuple(p / s for p in probs))
            comps.append(Component(w / total, kind))
        return cls(d, N, tuple(comps))

    def to_dict(self):
        comps = []
        for c in self.components:
            if isinstance(c.kind, Urn):
                comps.append({"weight": c.weight, "urn": list(c.kind.counts)})
            else:
                comps.append({"weight": c.weight, "iid": list(c.kind.probs)})
        return {"d": self.d, "N": self.N, "components": comps}

    def relabel(self, perm):
        """Model with symbol s renamed to perm[s]."""
        perm = list(perm)
        inv = np.argsort(perm)
        comps = []
        for c in self.components:
            if isinstance(c.kind, Urn):
                comps.append(Component(c.weight, Urn(tuple(c.kind.counts[i] for i in inv))))
            else:
                comps.append(Component(c.weight, IID(tuple(c.kind.probs[i] for i in inv))))
        return ExchangeableModel(self.d, self.N, tuple(comps))


@dataclasses.dataclass(frozen=True, eq=False)
class DenseSignedMeasure:
    """Real signed measure on {0..d-1}^n stored as an array of shape (d,)*n.

    Flattening in C order gives the base-d index with x_1 most significant.
    """

    d: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.d,) * self.n:
            raise DomainError(f"values must have shape {(self.d,) * self.n}, got {self.values.shape}")

    @property
    def total_mass(self):
        return float(self.values.sum())

    def __sub__(self, other):
        _check_same_shape(self, other)
        return DenseSignedMeasure(self.d, self.n, self.values - other.values)

    def to_dict(self):
        return {
            "d": self.d,
            "n": self.n,
            "index_legend": "flat index i = sum_k x_k * d^(n-k), k = 1..n (x_1 most significant)",
            "values": self.values.reshape(-1).tolist(),
        }


@dataclasses.dataclass(frozen=True, eq=False)
class ProductFunction:
    """f(x) = prod_k factors[k, x_k] with every |factors[k, s]| <= 1."""

    factors: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.factors, dtype=np.complex128)
        if f.ndim != 2:
            raise DomainError("factors must have shape (n, d)")
        if np.max(np.abs(f)) > 1.0 + 1e-12:
            raise DomainError("product-function factors must have modulus at most 1")
        object.__setattr__(self, "factors", f)

    @property
    def n(self):
        return self.factors.shape[0]

    @property
    def d(self):
        return self.factors.shape[1]


def _check_same_shape(R, R2):
    if (R.d, R.n) != (R2.d, R2.n):
        raise DomainError(f"measure shapes differ: (d={R.d}, n={R.n}) vs (d={R2.d}, n={R2.n})")


def _check_n(model, n, caps=None, allow_beyond_N=False):
    if n < 1 or (n > model.N and not allow_beyond_N):
        raise DomainError(f"need 1 <= n <= N={model.N}, got n={n}")
    cap = (caps or get_caps()).measure_cells
    if model.d**n > cap:
        raise ResourceLimitError(f"d^n = {model.d}^{n} cells exceed the measure cap {cap:.0e}")


def compositions(N, d):
    """All d-tuples of nonnegative integers summing to N."""
    for bars in itertools.combinations(range(N + d - 1), d - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(N + d - 1 - prev - 1)
        yield tuple(out)


def multinomial_pmf(counts, probs):
    coef = math.factorial(sum(counts))
    for c in counts:
        coef //= math.factorial(c)
    return float(coef) * math.prod(p**c for p, c in zip(probs, counts))


def composition_law(model):
    """Mixture weights of the empirical composition of (X_1, ..., X_N)."""
    law = {}
    for comp in model.components:
        if isinstance(comp.kind, Urn):
            law[comp.kind.counts] = law.get(comp.kind.counts, 0.0) + comp.weight
        else:
            for c in compositions(model.N, model.d):
                w = comp.weight * multinomial_pmf(c, comp.kind.probs)
                if w > 0:
                    law[c] = law.get(c, 0.0) + w
    return law


def _tensor_power(vec, n):
    out = np.ones(())
    for _ in range(n):
        out = np.multiply.outer(out, vec)
    return out


def _urn_marginal(counts, N, n):
    d = len(counts)
    grid = np.indices((d,) * n).reshape(n, -1)
    vals = np.full(grid.shape[1], 1.0 / math.perm(N, n))
    for s, c in enumerate(counts):
        m = (grid == s).sum(axis=0)
        falling = np.array([math.perm(c, k) if k <= c else 0 for k in range(n + 1)], dtype=float)
        vals *= falling[m]
    return vals.reshape((d,) * n)


def exact_law(model, n):
    """Exact law of (X_1, ..., X_n)."""
    _check_n(model, n)
    out = np.zeros((model.d,) * n)
    for comp in model.components:
        if isinstance(comp.kind, Urn):
            out += comp.weight * _urn_marginal(comp.kind.counts, model.N, n)
        else:
            out += comp.weight * _tensor_power(np.array(comp.kind.probs), n)
    return DenseSignedMeasure(model.d, n, out)


def q1(model, n):
    """Expected n-th tensor power of the empirical measure.

    Unlike the exact law this is defined for every n >= 1, including n > N.
    """
    _check_n(model, n, allow_beyond_N=True)
    out = np.zeros((model.d,) * n)
    for counts, w in composition_law(model).items():
        out += w * _tensor_power(np.array(counts) / model.N, n)
    return DenseSignedMeasure(model.d, n, out)


def _pair_correction(counts, N, n):
    """sum over pairs K and positions j of the tensor product of the R_{j,k,K}.

    For composition c with e = c/N, summing (delta_s - e)^{(x)2} over the
    positions j gives D = diag(c) - N e e^T, placed on the two slots of K.
    """
    e = np.array(counts, dtype=float) / N
    D = np.diag(np.array(counts, dtype=float)) - N * np.outer(e, e)
    rest = _tensor_power(e, n - 2)
    block = np.multiply.outer(D, rest)
    out = np.zeros((len(counts),) * n)
    for k1, k2 in itertools.combinations(range(n), 2):
        out += np.moveaxis(block, [0, 1], [k1, k2])
    return out


def q2(model, n):
    """Second-order signed approximation; needs n >= 2 (hence N >= 2)."""
    if n < 2:
        raise DomainError("Q2 is defined for n >= 2 only")
    _check_n(model, n)
    N = model.N
    out = np.zeros((model.d,) * n)
    for counts, w in composition_law(model).items():
        e = np.array(counts) / N
        out += w * (_tensor_power(e, n) - _pair_correction(counts, N, n) / (N * (N - 1)))
    return DenseSignedMeasure(model.d, n, out)


def tv(R, R2):
    """sup over events A of |R(A) - R2(A)|."""
    _check_same_shape(R, R2)
    diff = (R.values - R2.values).reshape(-1)
    return float(max(diff[diff > 0].sum(), -diff[diff < 0].sum(), 0.0))


def _indicator_matrix(d):
    sets = np.arange(2**d)[:, None]
    return ((sets >> np.arange(d)[None, :]) & 1).astype(float)


def rectangle_masses(delta, d, n):
    """Array over (A_1, ..., A_n), each A_k a bitmask subset of the alphabet."""
    ind = _indicator_matrix(d)
    X = delta
    for _ in range(n):
        X = np.tensordot(X, ind, axes=([0], [1]))
    return X


def pv(R, R2, *, caps=None):
    """sup over rectangles A_1 x ... x A_n of |R - R2|, by full enumeration."""
    _check_same_shape(R, R2)
    cap = (caps or get_caps()).rectangles
    if (2**R.d) ** R.n > cap:
        raise ResourceLimitError(
            f"(2^d)^n = {(2 ** R.d) ** R.n:.3e} rectangles exceed the cap {cap:.0e}; "
            "use sup_fn_lower for a lower bound instead"
        )
    masses = rectangle_masses(R.values - R2.values, R.d, R.n)
    return float(np.abs(masses).max())


def integral(R, f):
    """sum_x R(x) prod_k f_k(x_k)."""
    if (f.n, f.d) != (R.n, R.d):
        raise DomainError(f"function shape (n={f.n}, d={f.d}) does not match measure (n={R.n}, d={R.d})")
    X = R.values.astype(np.complex128)
    for k in range(R.n):
        X = np.tensordot(f.factors[k], X, axes=([0], [0]))
    return complex(X)


def random_product_factors(rng, n, d, family):
    if family == "phase":
        return np.exp(2j * np.pi * rng.random((n, d)))
    if family == "sign":
        return rng.choice([-1.0, 1.0], size=(n, d)).astype(np.complex128)
    raise DomainError(f"unknown family {family!r}")


def sup_fn_lower(R, R2, trials, seed, *, rectangles=True, caps=None):
    """Randomized lower bound on sup over product functions of |int f d(R - R2)|.

    Trial t draws its function from ``default_rng([seed, t])``, alternating
    unimodular phases and real signs, so results are reproducible and grow
    monotonically with ``trials``. When the rectangle cap permits, every
    indicator rectangle is included as well.
    """
    _check_same_shape(R, R2)
    if trials < 0:
        raise DomainError("trials must be nonnegative")
    delta = (R.values - R2.values).astype(np.complex128)
    best = 0.0
    if trials:
        F = np.empty((trials, R.n, R.d), dtype=np.complex128)
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            F[t] = random_product_factors(rng, R.n, R.d, "phase" if t % 2 == 0 else "sign")
        Y = np.tensordot(F[:, 0, :], delta, axes=([1], [0]))
        for k in range(1, R.n):
            Y = np.einsum("ts,ts...->t...", F[:, k, :], Y)
        best = float(np.abs(Y).max())
    if rectangles:
        cap = (caps or get_caps()).rectangles
        if (2**R.d) ** R.n <= cap:
            best = max(best, pv(R, R2, caps=caps))
    return best


@dataclasses.dataclass(frozen=True)
class DeFinettiBounds:
    dm_exact: float
    dm_quad: float
    finite_s: float
    bobkov: float
    first_order: float = None
    second_order: float = None

    def to_dict(self):
        return dataclasses.asdict(self)


def df_bounds(n, N, d):
    """Closed-form distance bounds for sample size n out of N over d symbols.

    ``first_order`` and ``second_order`` need n/N < 1; ``second_order`` also
    needs n >= 2. They are ``None`` when undefined.
    """
    if not 1 <= n <= N or d < 1:
        raise DomainError(f"need 1 <= n <= N and d >= 1, got n={n}, N={N}, d={d}")
    ratio = 1.0
    for i in range(n):
        ratio *= (N - i) / N
    r = n / N
    first = second = None
    if r < 1:
        first = r + 2.12 * r**1.5 / (1 - r) ** 0.75
        if n >= 2:
            second = math.sqrt(3) * r**1.5 + 2.27 * r**2 / (1 - r) ** 0.75
    return DeFinettiBounds(
        dm_exact=1.0 - ratio,
        dm_quad=n * (n - 1) / (2 * N),
        finite_s=d * n / N,
        bobkov=16.0 * r,
        first_order=first,
        second_order=second,
    )


def _sequence_matrix(sequence, f):
    seq = np.asarray(sequence, dtype=np.intp)
    if seq.ndim != 1 or seq.size < f.n:
        raise DomainError(f"sequence must have length N >= n={f.n}")
    if seq.min() < 0 or seq.max() >= f.d:
        raise DomainError(f"sequence symbols must lie in [0, {f.d})")
    return f.factors[:, seq].T


def permanent_bridge(sequence, f, order=1):
    """Pointwise integrand linking product-function integrals to permanents.

    With F[j, k] = f_k(x_j), order 1 returns normalized Per F minus the
    product of column means of F; the expectation over sequences drawn from
    the model equals ``integral(P - Q1, f)``. Order 2 subtracts H_2(F)
    instead and reproduces ``integral(P - Q2, f)``.
    """
    F = _sequence_matrix(sequence, f)
    if order == 1:
        return per_normalized(F) - complex(F.mean(axis=0).prod())
    if order == 2:
        return per_normalized(F) - h_approx(F, 2)
    raise DomainError(f"order must be 1 or 2, got {order}")


def bridge_expectation(model, f, order=1):
    """Average of :func:`permanent_bridge` over all d^N sequences, weighted by the model."""
    law = exact_law(model, model.N)
    total = 0j
    for index in zip(*np.nonzero(law.values)):
        total += law.values[index] * permanent_bridge(index, f, order)
    return total
