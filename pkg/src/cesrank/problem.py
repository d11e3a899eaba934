"""Ranking problems and their preprocessing.

A ranking problem is a set of agents, a nonnegative preference-intensity
matrix ``alpha`` (``alpha[i, j]`` is how strongly agent ``i`` endorses agent
``j``), a per-agent substitution parameter ``rho``, and a damping weight
``beta``. Preprocessing turns ``alpha`` into a strictly positive row-stochastic
matrix in three steps: fill all-zero rows with the uniform row, divide each row
by its sum, then mix each row with the uniform row at weight ``1 - beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Smallest nonzero |rho| accepted. rho == 0 is the unit-elasticity
#: (Cobb-Douglas) sentinel handled in closed form; values closer to zero than
#: this band would make the exponent 1/(1-rho) indistinguishable from the
#: limit while still being routed to the general formula.
RHO_ZERO_BAND = 1e-9

#: Absolute tolerance on row/column sum differences in `is_regular`.
REGULARITY_TOL = 1e-9


def _validate_rho(rho: np.ndarray, upper: float, inclusive: bool = False) -> None:
    if np.any(~np.isfinite(rho)):
        i = int(np.flatnonzero(~np.isfinite(rho))[0])
        raise ValueError(f"rho[{i}] is not finite")
    bad = (rho < -1.0) | (rho > upper if inclusive else rho >= upper)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        bracket = "]" if inclusive else ")"
        raise ValueError(f"rho[{i}] = {rho[i]!r} outside [-1, {upper}{bracket}")
    in_band = (rho != 0.0) & (np.abs(rho) < RHO_ZERO_BAND)
    if np.any(in_band):
        i = int(np.flatnonzero(in_band)[0])
        raise ValueError(
            f"rho[{i}] = {rho[i]!r} is inside the open band (0, {RHO_ZERO_BAND:g}) "
            "around zero; use exactly 0 for unit elasticity"
        )


def _validate_alpha(alpha: np.ndarray) -> None:
    if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
        raise ValueError(f"alpha must be square, got shape {alpha.shape}")
    bad = ~np.isfinite(alpha) | (alpha < 0.0)
    if np.any(bad):
        i, j = (int(k[0]) for k in np.nonzero(bad))
        raise ValueError(f"alpha[{i}][{j}] = {alpha[i, j]!r} is negative or not finite")


@dataclass(frozen=True, eq=False)
class RankingProblem:
    """A ranking problem over ``n`` agents.

    Attributes:
        agent_ids: ordered distinct string identifiers, one per agent.
        alpha: n x n nonnegative finite preference intensities.
        rho: per-agent substitution parameter in [-1, 1); exactly 0 selects
            the unit-elasticity (Cobb-Douglas) case.
        beta: damping weight in (0, 1]; rows are mixed with the uniform row
            at weight ``1 - beta`` during normalization.

    Instances are immutable and safe to share across threads.
    """

    agent_ids: tuple[str, ...]
    alpha: np.ndarray
    rho: np.ndarray
    beta: float = 0.85

    def __post_init__(self):
        ids = tuple(str(a) for a in self.agent_ids)
        if len(ids) < 1:
            raise ValueError("a ranking problem needs at least one agent")
        if len(set(ids)) != len(ids):
            raise ValueError("agent_ids must be distinct")
        alpha = np.array(self.alpha, dtype=float)
        _validate_alpha(alpha)
        if alpha.shape[0] != len(ids):
            raise ValueError(
                f"alpha is {alpha.shape[0]}x{alpha.shape[1]} but there are {len(ids)} agents"
            )
        rho = np.array(self.rho, dtype=float)
        if rho.ndim == 0:
            rho = np.full(len(ids), float(rho))
        if rho.shape != (len(ids),):
            raise ValueError(f"rho must have length {len(ids)}, got shape {rho.shape}")
        _validate_rho(rho, upper=1.0)
        beta = float(self.beta)
        if not (0.0 < beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {beta!r}")
        alpha.flags.writeable = False
        rho.flags.writeable = False
        object.__setattr__(self, "agent_ids", ids)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return len(self.agent_ids)


@dataclass(frozen=True, eq=False)
class NormalizedProblem:
    """A preprocessed ranking problem: every row of ``alpha_hat`` sums to 1.

    Produced by `normalize_preferences`; rows are strictly positive whenever
    the source problem had ``beta < 1``.
    """

    agent_ids: tuple[str, ...]
    alpha_hat: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        ids = tuple(str(a) for a in self.agent_ids)
        alpha_hat = np.array(self.alpha_hat, dtype=float)
        _validate_alpha(alpha_hat)
        row_sums = alpha_hat.sum(axis=1)
        off = np.abs(row_sums - 1.0)
        if np.any(off > 1e-12):
            i = int(np.argmax(off))
            raise ValueError(f"row {i} of alpha_hat sums to {row_sums[i]!r}, not 1")
        rho = np.array(self.rho, dtype=float)
        if rho.shape != (len(ids),):
            raise ValueError(f"rho must have length {len(ids)}, got shape {rho.shape}")
        _validate_rho(rho, upper=1.0)
        alpha_hat.flags.writeable = False
        rho.flags.writeable = False
        object.__setattr__(self, "agent_ids", ids)
        object.__setattr__(self, "alpha_hat", alpha_hat)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return len(self.agent_ids)


def normalize_preferences(problem: RankingProblem) -> NormalizedProblem:
    """Row-normalize and damp a problem's preference matrix.

    All-zero rows are replaced by the uniform row 1/n, every row is divided by
    its sum, and each entry is then mixed as
    ``alpha_hat[i][j] = alpha_norm[i][j] * beta + (1 - beta) / n``.

    The result has rows summing to 1, with every entry at least
    ``(1 - beta) / n`` (strictly positive when ``beta < 1``). Scaling a whole
    row of the input by any positive constant does not change the output.
    """
    n = problem.n
    alpha = np.array(problem.alpha)
    row_sums = alpha.sum(axis=1)
    zero_rows = row_sums == 0.0
    if np.any(zero_rows):
        alpha[zero_rows] = 1.0 / n
        row_sums = alpha.sum(axis=1)
    alpha /= row_sums[:, None]
    if problem.beta < 1.0:
        alpha = alpha * problem.beta + (1.0 - problem.beta) / n
    return NormalizedProblem(problem.agent_ids, alpha, problem.rho)


def is_regular(problem: NormalizedProblem, tol: float = REGULARITY_TOL) -> bool:
    """True iff all row sums are equal and all column sums are equal.

    Sums are compared with absolute tolerance ``tol``. Normalized problems
    always have equal row sums, so in practice this tests the columns.
    """
    row_sums = problem.alpha_hat.sum(axis=1)
    col_sums = problem.alpha_hat.sum(axis=0)
    return bool(
        np.all(np.abs(row_sums - row_sums[0]) <= tol)
        and np.all(np.abs(col_sums - col_sums[0]) <= tol)
    )
