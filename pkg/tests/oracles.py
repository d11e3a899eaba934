"""Independent reference computations used to check the package's answers.

Nothing here imports solver internals: the fixed point iteration, the
grid-search maximizer, and the instance generators are written from the
defining equations alone, so agreement with the package is meaningful.
"""

from __future__ import annotations

import numpy as np


def fixed_point_equilibrium(alpha_hat, q, iters=500_000, tol=5e-16):
    """Equilibrium of a common-elasticity economy by plain fixed-point iteration.

    Rearranges market clearing (aggregate demand of good j equals 1) into
    pi_j = (sum_i alpha_hat[i][j]^q * pi_i / D_i)^(1/q) where D_i is trader
    i's price index, and iterates from uniform. Deliberately not tatonnement:
    a different update rule converging to the same point is the evidence.
    """
    alpha_hat = np.asarray(alpha_hat, dtype=float)
    n = alpha_hat.shape[0]
    pi = np.full(n, 1.0 / n)
    aq = alpha_hat**q
    for _ in range(iters):
        price_index = (aq * pi[None, :] ** (1.0 - q)).sum(axis=1)
        new = (aq.T @ (pi / price_index)) ** (1.0 / q)
        new /= new.sum()
        if np.abs(new - pi).max() < tol:
            return new
        pi = new
    raise AssertionError("oracle fixed point did not settle")


def grid_search_demand(alpha_row, rho, prices, income, points=200_001):
    """Best affordable 2-good bundle by brute force along the budget line.

    Evaluates sum_j alpha_j * x_j^rho (a monotone transform of the utility,
    monotone decreasing when rho < 0) on an evenly spaced grid of budget
    exhausting bundles and returns the best one.
    """
    a = np.asarray(alpha_row, dtype=float)
    p = np.asarray(prices, dtype=float)
    assert a.shape == (2,) and p.shape == (2,)
    x1 = np.linspace(0.0, income / p[0], points)
    x2 = np.maximum((income - p[0] * x1) / p[1], 0.0)
    with np.errstate(divide="ignore"):
        if rho == 0:
            # Cobb-Douglas limit: maximize the log utility instead
            score = a[0] * np.log(x1) + a[1] * np.log(x2)
            k = int(np.argmax(score))
        elif rho < 0:
            # x^rho is decreasing and the outer (.)^(1/rho) flips the order
            score = a[0] * x1**rho + a[1] * x2**rho
            k = int(np.argmin(score))
        else:
            score = a[0] * x1**rho + a[1] * x2**rho
            k = int(np.argmax(score))
    return np.array([x1[k], x2[k]])


def random_strongly_connected_graph(rng, n, extra_edge_prob=0.15):
    """Random digraph on n vertices, strongly connected by construction.

    A random Hamiltonian cycle guarantees strong connectivity; extra edges
    are sprinkled on top. No self-loops.
    """
    order = rng.permutation(n)
    edges = {(int(order[k]), int(order[(k + 1) % n])) for k in range(n)}
    mask = rng.random((n, n)) < extra_edge_prob
    np.fill_diagonal(mask, False)
    edges.update((int(i), int(j)) for i, j in np.argwhere(mask))
    return n, frozenset(edges)


def with_dangling_vertices(rng, n, n_dangling):
    """Random digraph where n_dangling chosen vertices have no out-edges."""
    _, edges = random_strongly_connected_graph(rng, n)
    dangling = rng.choice(n, size=n_dangling, replace=False)
    kept = frozenset(e for e in edges if e[0] not in set(int(d) for d in dangling))
    return n, kept, sorted(int(d) for d in dangling)


def random_problem_arrays(rng, n, rho_low=-0.5, rho_high=0.5, zero_prob=0.3, common_rho=False):
    """Random preference matrix (with zero entries, possibly zero rows) and rho."""
    alpha = rng.random((n, n)) * (rng.random((n, n)) > zero_prob)
    if common_rho:
        rho = np.full(n, _round_away_from_band(rng.uniform(rho_low, rho_high)))
    else:
        rho = np.array([_round_away_from_band(rng.uniform(rho_low, rho_high)) for _ in range(n)])
    return alpha, rho


def _round_away_from_band(r, band=1e-9):
    """Keep random rho out of the reserved near-zero band (0 itself is fine)."""
    return 0.0 if abs(r) < band else r


def dominance_instance(rng, n, rho, i, j):
    """Strictly positive alpha where column i is entrywise below column j.

    Row normalization divides each row by its own sum, and damping mixes with
    a constant, so per-row inequalities between columns i and j survive the
    whole preprocessing pipeline.
    """
    alpha = 0.05 + rng.random((n, n))
    alpha[:, j] = alpha[:, i] + 0.05 + rng.random(n)
    return alpha
