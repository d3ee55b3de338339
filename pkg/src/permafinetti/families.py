"""Random test instances: matrix families and exchangeable model fixtures."""

import numpy as np

from .definetti import IID, Component, ExchangeableModel, Urn

UNIT_BOUNDED_FAMILIES = ("disk", "phase", "sign", "centered", "identical", "near_constant")


def unit_disk(rng, size):
    """Uniform samples on the closed complex unit disk."""
    r = np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


def random_matrix(rng, N, n, family):
    """An N x n matrix from one of the named families.

    ``centered`` has zero column sums and entries of modulus at most 1
    (a disk sample re-centred and halved); ``zero_colsum`` is re-centred
    without the halving and need not be unit bounded.
    """
    if family == "disk":
        return unit_disk(rng, (N, n))
    if family == "phase":
        return np.exp(2j * np.pi * rng.random((N, n)))
    if family == "sign":
        return rng.choice([-1.0, 1.0], size=(N, n)).astype(np.complex128)
    if family in ("centered", "zero_colsum"):
        Z = unit_disk(rng, (N, n))
        Z -= Z.mean(axis=0)
        return Z / 2 if family == "centered" else Z
    if family == "identical":
        return np.repeat(unit_disk(rng, (N, 1)), n, axis=1)
    if family == "near_constant":
        eps = 10.0 ** rng.uniform(-3, -0.3)
        base = unit_disk(rng, (1, n)) * (1 - eps)
        return base + eps * unit_disk(rng, (N, n))
    raise ValueError(f"unknown matrix family {family!r}")


def random_shape(rng, nmax, nmin=1):
    N = int(rng.integers(max(nmin, 1), nmax + 1))
    n = int(rng.integers(1, N + 1))
    return N, n


def random_model(rng, d, N, max_components=3):
    """Random mixture of urn and i.i.d. components."""
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    weights /= weights.sum()
    comps = []
    for w in weights:
        if rng.random() < 0.5:
            counts = rng.multinomial(N, rng.dirichlet(np.ones(d)))
            comps.append(Component(float(w), Urn(tuple(int(c) for c in counts))))
        else:
            probs = rng.dirichlet(np.ones(d))
            probs = probs / probs.sum()
            comps.append(Component(float(w), IID(tuple(float(p) for p in probs))))
    # Re-normalize against float drift in the Dirichlet draw.
    total = sum(c.weight for c in comps)
    comps = [Component(c.weight / total, c.kind) for c in comps]
    return ExchangeableModel(d, N, tuple(comps))


def fixture_models():
    """Fixed urn and i.i.d. mixture models with d in {2, 3} and N <= 8."""
    models = [
        ExchangeableModel.urn([1, 1]),
        ExchangeableModel.urn([2, 1]),
        ExchangeableModel.urn([2, 2]),
        ExchangeableModel.urn([4, 4]),
        ExchangeableModel.urn([7, 1]),
        ExchangeableModel.urn([1, 1, 1]),
        ExchangeableModel.urn([3, 2, 1]),
        ExchangeableModel.urn([3, 3, 2]),
        ExchangeableModel.iid([0.5, 0.5], 4),
        ExchangeableModel.iid([0.2, 0.3, 0.5], 6),
        ExchangeableModel(
            2, 8, (Component(0.5, Urn((8, 0))), Component(0.5, Urn((0, 8))))
        ),
        ExchangeableModel(
            2, 6, (Component(0.5, Urn((3, 3))), Component(0.5, IID((0.9, 0.1))))
        ),
        ExchangeableModel(
            3,
            5,
            (
                Component(0.25, Urn((2, 2, 1))),
                Component(0.25, Urn((5, 0, 0))),
                Component(0.5, IID((1 / 3, 1 / 3, 1 / 3))),
            ),
        ),
        ExchangeableModel(
            3, 7, (Component(0.6, IID((0.7, 0.2, 0.1))), Component(0.4, IID((0.1, 0.1, 0.8))))
        ),
    ]
    return models
