"""Finite Markov chains, the damped web-surfer chain, and graph checks.

Conventions: a transition matrix ``P`` is row-stochastic (``P[i, j]`` is the
probability of moving from state ``i`` to state ``j``) and a stationary
distribution is a column vector fixed point of ``P.T``, i.e. ``pi = P.T @ pi``
with ``sum(pi) == 1``. This is the usual left-eigenvector convention written
for column vectors.
"""

from __future__ import annotations

import logging
import math
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .diagnostics import ConvergenceError, SolverReport

logger = logging.getLogger(__name__)

#: Default L1 step threshold for power iteration.
POWER_TOL = 1e-12
POWER_MAX_ITERS = 100_000

#: Largest state count for which the auto method picks the direct linear solve.
LINEAR_SOLVE_MAX_N = 2_000


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """A directed graph on vertices ``0..n-1`` with a set of ordered edges.

    Self-loops are representable; the web-chain construction rejects them.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) has a vertex outside [0, {n})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)

    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
        return adj

    def predecessors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[j].append(i)
        return adj


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic matrix of a finite Markov chain."""

    matrix: np.ndarray

    def __post_init__(self):
        p = np.array(self.matrix, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {p.shape}")
        if np.any(~np.isfinite(p)) or np.any(p < 0.0):
            bad = np.nonzero(~np.isfinite(p) | (p < 0.0))
            i, j = int(bad[0][0]), int(bad[1][0])
            raise ValueError(f"entry [{i}][{j}] = {p[i, j]!r} is negative or not finite")
        row_sums = p.sum(axis=1)
        off = np.abs(row_sums - 1.0)
        if np.any(off > 1e-12):
            i = int(np.argmax(off))
            raise ValueError(f"row {i} sums to {row_sums[i]!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "matrix", p)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def support_graph(self) -> DirectedGraph:
        """Graph with an edge i -> j wherever the transition probability is positive."""
        rows, cols = np.nonzero(self.matrix > 0.0)
        return DirectedGraph(self.n, frozenset(zip(rows.tolist(), cols.tolist())))


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over states."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        if pi.ndim != 1:
            raise ValueError(f"distribution must be a vector, got shape {pi.shape}")
        if np.any(~np.isfinite(pi)) or np.any(pi < 0.0):
            i = int(np.flatnonzero(~np.isfinite(pi) | (pi < 0.0))[0])
            raise ValueError(f"entry {i} = {pi[i]!r} is negative or not finite")
        if abs(pi.sum() - 1.0) > 1e-10:
            raise ValueError(f"entries sum to {pi.sum()!r}, not 1")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)

    @property
    def n(self) -> int:
        return self.pi.shape[0]


def _reachable(n: int, adj: list[list[int]], start: int) -> np.ndarray:
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def is_strongly_connected(graph: DirectedGraph) -> bool:
    """True iff every vertex reaches every other vertex along directed edges."""
    if graph.n == 1:
        return True
    fwd = _reachable(graph.n, graph.successors(), 0)
    if not fwd.all():
        return False
    bwd = _reachable(graph.n, graph.predecessors(), 0)
    return bool(bwd.all())


def strongly_connected_component(graph: DirectedGraph, vertex: int = 0) -> list[int]:
    """Vertices of the strongly connected component containing ``vertex``.

    Useful as a witness when strong connectivity fails: the returned component
    is a proper subset of the vertices in that case.
    """
    fwd = _reachable(graph.n, graph.successors(), vertex)
    bwd = _reachable(graph.n, graph.predecessors(), vertex)
    return np.flatnonzero(fwd & bwd).tolist()


def is_aperiodic(graph: DirectedGraph) -> bool:
    """True iff the gcd of directed cycle lengths is 1.

    Computed from breadth-first levels: for a strongly connected graph the
    period equals gcd of ``level[u] + 1 - level[v]`` over all edges (u, v).
    Raises if the graph is not strongly connected, where the period is not a
    single well-defined number.
    """
    if not is_strongly_connected(graph):
        raise ValueError("aperiodicity is only defined here for strongly connected graphs")
    if not graph.edges:
        return True  # single isolated vertex; no cycle structure to constrain
    adj = graph.successors()
    level = np.full(graph.n, -1, dtype=int)
    level[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for i, j in graph.edges:
        g = math.gcd(g, level[i] + 1 - level[j])
        if g == 1:
            return True
    return g == 1


def build_web_transition(graph: DirectedGraph, c: float = 0.85) -> TransitionMatrix:
    """Damped random-surfer chain of a directed graph.

    Each vertex spreads probability uniformly over its out-neighbors; vertices
    with no outgoing edge (dangling) spread uniformly over all vertices. The
    result is then mixed with the uniform matrix at weight ``1 - c``, which
    makes every entry at least ``(1 - c) / n`` and the chain ergodic.

    Self-loops are rejected: the construction is defined for link graphs
    without them.
    """
    c = float(c)
    if not (0.0 < c < 1.0):
        raise ValueError(f"damping c must be in (0, 1), got {c!r}")
    for i, j in graph.edges:
        if i == j:
            raise ValueError(f"self-loop at vertex {i} is not allowed here")
    n = graph.n
    t = np.zeros((n, n))
    for i, j in graph.edges:
        t[i, j] = 1.0
    out = t.sum(axis=1)
    dangling = out == 0.0
    t[dangling] = 1.0
    t /= t.sum(axis=1)[:, None]
    p = c * t + (1.0 - c) / n
    return TransitionMatrix(p)


def _stationary_power(
    p: np.ndarray, tolerance: float, max_iters: int
) -> tuple[np.ndarray, int]:
    # The L1 step between successive iterates bounds the max-norm fixed-point
    # defect of the current iterate, so returning `pi` (not `nxt`) guarantees
    # the advertised residual.
    n = p.shape[0]
    pt = p.T
    pi = np.full(n, 1.0 / n)
    for it in range(max_iters):
        nxt = pt @ pi
        if np.abs(nxt - pi).sum() <= tolerance:
            return pi, it
        pi = nxt / nxt.sum()
    residual = float(np.abs(pt @ pi - pi).max())
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations, "
        f"residual {residual:.3e}",
        last_iterate=pi,
        residual=residual,
        hint="the chain may be periodic; try method='solve'",
    )


def _stationary_solve(p: np.ndarray) -> np.ndarray:
    # (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "singular stationary system; the chain has no unique stationary "
            "distribution (is it irreducible?)"
        ) from exc
    return pi


def stationary_distribution(
    p: TransitionMatrix,
    method: str = "auto",
    tolerance: float = POWER_TOL,
    max_iters: int = POWER_MAX_ITERS,
) -> tuple[Distribution, SolverReport]:
    """Stationary distribution ``pi = P.T @ pi`` of a row-stochastic matrix.

    Methods: ``"power"`` iterates from the uniform vector and requires an
    ergodic chain to converge; ``"solve"`` solves the singular linear system
    directly (one normalization equation replaces a redundant one) and also
    handles irreducible periodic chains. ``"auto"`` picks the linear solve up
    to ``LINEAR_SOLVE_MAX_N`` states and power iteration beyond.

    Returns the distribution together with a report whose residual is
    ``max |P.T @ pi - pi|``.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance!r}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters!r}")
    if method == "auto":
        method = "solve" if p.n <= LINEAR_SOLVE_MAX_N else "power"
    start = time.perf_counter()
    if method == "power":
        pi, iterations = _stationary_power(p.matrix, tolerance, max_iters)
    elif method == "solve":
        pi, iterations = _stationary_solve(p.matrix), 1
    else:
        raise ValueError(f"unknown method {method!r}; expected 'power', 'solve' or 'auto'")
    residual = float(np.abs(p.matrix.T @ pi - pi).max())
    if residual > tolerance:
        raise ConvergenceError(
            f"stationary residual {residual:.3e} exceeds tolerance {tolerance:.3e}",
            last_iterate=pi,
            residual=residual,
        )
    # Clip away solver noise before validating; exact zeros are legitimate
    # for reducible inputs handled by the caller, negatives are not.
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    pi = pi / pi.sum()
    report = SolverReport(
        method=method,
        iterations=iterations,
        residual=residual,
        converged=True,
        tolerance=tolerance,
        wall_time=time.perf_counter() - start,
    )
    logger.debug("stationary_distribution: %s", report)
    return Distribution(pi), report
