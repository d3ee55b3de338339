"""Brute-force reference implementations used only by the tests.

None of these share code paths with the library routines they check.
"""

import itertools
import math

import numpy as np


def symbolic_expand(Z):
    """prod_j (1 + sum_k Z[j,k] x_k) as a dict {exponent tuple: coefficient}, untruncated."""
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[1]
    poly = {(0,) * n: 1 + 0j}
    for row in Z:
        nxt = {}
        for e, c in poly.items():
            nxt[e] = nxt.get(e, 0) + c
            for k, z in enumerate(row):
                e2 = list(e)
                e2[k] += 1
                e2 = tuple(e2)
                nxt[e2] = nxt.get(e2, 0) + c * z
        poly = nxt
    return poly


def naive_subset_convolution(f, g, n):
    h = np.zeros(2**n, dtype=complex)
    for S in range(2**n):
        T = S
        while True:
            h[S] += f[T] * g[S ^ T]
            if T == 0:
                break
            T = (T - 1) & S
    return h


def permanent_laplace(Z):
    """Permanent by recursive expansion along the last column."""
    Z = np.asarray(Z, dtype=complex)
    N, n = Z.shape
    if n == 0:
        return 1 + 0j
    total = 0j
    for j in range(N):
        if Z[j, -1] != 0:
            total += Z[j, -1] * permanent_laplace(np.delete(Z[:, :-1], j, axis=0))
    return total


def sequence_law(model):
    """dict {sequence tuple: probability} over all d^N sequences."""
    out = {}
    for seq in itertools.product(range(model.d), repeat=model.N):
        counts = tuple(seq.count(s) for s in range(model.d))
        p = 0.0
        for comp in model.components:
            kind = comp.kind
            if hasattr(kind, "counts"):
                if counts == tuple(kind.counts):
                    p += comp.weight * math.prod(math.factorial(c) for c in counts) / math.factorial(model.N)
            else:
                p += comp.weight * math.prod(kind.probs[s] for s in seq)
        if p:
            out[seq] = p
    return out


def _outer(vectors):
    out = np.ones(())
    for v in vectors:
        out = np.multiply.outer(out, v)
    return out


def brute_laws(model, n):
    """(P, Q1, Q2) arrays of shape (d,)*n by enumerating full sequences.

    Q2 follows its definition literally: positions j and pairs K are summed
    one tensor at a time, with R = delta_{X_j} - emp on K and emp off K.
    """
    d, N = model.d, model.N
    P = np.zeros((d,) * n)
    Q1 = np.zeros((d,) * n)
    corr = np.zeros((d,) * n)
    eye = np.eye(d)
    for seq, p in sequence_law(model).items():
        P[seq[:n]] += p
        emp = np.bincount(seq, minlength=d) / N
        Q1 += p * _outer([emp] * n)
        if n >= 2:
            for K in itertools.combinations(range(n), 2):
                for j in range(N):
                    factors = [eye[seq[j]] - emp if k in K else emp for k in range(n)]
                    corr += p * _outer(factors)
    Q2 = Q1 - corr / (N * (N - 1)) if n >= 2 else None
    return P, Q1, Q2


def brute_tv(delta):
    """max over all events A of |delta(A)|, enumerating every subset of cells."""
    flat = np.asarray(delta).reshape(-1)
    best = 0.0
    for r in range(flat.size + 1):
        for A in itertools.combinations(range(flat.size), r):
            best = max(best, abs(flat[list(A)].sum()))
    return best


def brute_pv(delta):
    delta = np.asarray(delta)
    d, n = delta.shape[0], delta.ndim
    subsets = [s for r in range(d + 1) for s in itertools.combinations(range(d), r)]
    best = 0.0
    for rect in itertools.product(subsets, repeat=n):
        best = max(best, abs(delta[np.ix_(*[list(s) for s in rect])].sum()))
    return best
