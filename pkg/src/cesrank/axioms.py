"""Executable ranking axioms.

Each check returns an :class:`AxiomVerdict` instead of a bare bool so that
callers (tests, the CLI) can inspect what was actually computed. A verdict is
``"pass"``, ``"fail"``, or ``"not_applicable"`` when the check's preconditions
do not hold; failing verdicts always carry a concrete witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .economy import CesEconomy, as_price_array, build_economy, excess_demand
from .problem import RankingProblem, is_regular, normalize_preferences
from .solver import rank_problem, solve_equilibrium

#: Separation required of "strict" inequalities, so rounding noise never
#: produces a vacuous pass.
STRICT_MARGIN = 1e-12

UNIFORMITY_TOL = 1e-6
FAIRNESS_TOL = 1e-9
INVARIANCE_TOL = 1e-8

_STATUSES = ("pass", "fail", "not_applicable")


@dataclass(frozen=True)
class AxiomVerdict:
    """Outcome of one axiom check, with enough data to audit it."""

    axiom: str
    status: str
    witness: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"status must be one of {_STATUSES}, got {self.status!r}")
        if self.status == "fail" and not self.witness:
            raise ValueError("a fail verdict must carry a witness")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def applicable(self) -> bool:
        return self.status != "not_applicable"


def _not_applicable(axiom: str, reason: str, **extra) -> AxiomVerdict:
    witness = {"reason": reason}
    witness.update(extra)
    return AxiomVerdict(axiom=axiom, status="not_applicable", witness=witness)


def check_minimal_fairness(n: int, rho_common: float, beta: float = 1.0) -> AxiomVerdict:
    """Agents that express no preferences at all must rank uniformly.

    Builds the n-agent problem whose preference matrix is identically zero
    (normalization turns every row uniform, and damping keeps it uniform),
    runs the full pipeline, and passes iff the ranking is 1/n everywhere
    within 1e-9.
    """
    if n < 2:
        raise ValueError(f"need at least 2 agents, got {n}")
    ids = tuple(f"agent{k}" for k in range(n))
    problem = RankingProblem(ids, np.zeros((n, n)), rho_common, beta=beta)
    prices, report = rank_problem(problem)
    deviation = float(np.abs(prices.pi - 1.0 / n).max())
    witness = {
        "prices": prices.pi.tolist(),
        "deviation_from_uniform": deviation,
        "solver_residual": report.residual,
    }
    status = "pass" if deviation <= FAIRNESS_TOL else "fail"
    return AxiomVerdict(
        axiom="minimal_fairness",
        status=status,
        witness=witness,
        tolerances={"uniform": FAIRNESS_TOL},
    )


def _column_dominance(alpha_hat: np.ndarray, i: int, j: int) -> tuple[bool, dict]:
    """Does normalized column i sit entrywise below column j, strictly somewhere?"""
    col_i = alpha_hat[:, i]
    col_j = alpha_hat[:, j]
    bad = np.flatnonzero(col_i > col_j)
    if bad.size:
        k = int(bad[0])
        return False, {
            "reason": f"alpha_hat[{k}][{i}] > alpha_hat[{k}][{j}]",
            "row": k,
            "values": [float(col_i[k]), float(col_j[k])],
        }
    if not np.any(col_i < col_j):
        return False, {"reason": f"columns {i} and {j} are identical after normalization"}
    return True, {}


def check_strict_monotonicity(problem: RankingProblem, i: int, j: int) -> AxiomVerdict:
    """A uniformly less-preferred agent must rank strictly lower.

    Applicable only when every agent shares one elasticity parameter and, on
    the normalized matrix, column ``i`` is dominated by column ``j`` (entrywise
    ``<=`` with at least one strict ``<``). Dominance is read off the
    normalized matrix rather than the raw one because that is the matrix the
    market actually consumes. Passes iff ``pi[i] < pi[j]`` with a 1e-12 margin.
    """
    n = problem.n
    for name, idx in (("i", i), ("j", j)):
        if not (0 <= idx < n):
            raise ValueError(f"agent index {name}={idx} out of range for n={n}")
    if i == j:
        return _not_applicable("strict_monotonicity", "i == j leaves no room for a strict inequality")
    if np.unique(problem.rho).size > 1:
        return _not_applicable(
            "strict_monotonicity",
            "agents have heterogeneous rho; the claim is scoped to a common elasticity",
            rho=problem.rho.tolist(),
        )
    normalized = normalize_preferences(problem)
    dominated, why = _column_dominance(normalized.alpha_hat, i, j)
    if not dominated:
        return _not_applicable("strict_monotonicity", why.pop("reason"), **why)
    prices, report = rank_problem(problem)
    gap = float(prices.pi[j] - prices.pi[i])
    witness = {
        "i": i,
        "j": j,
        "pi_i": float(prices.pi[i]),
        "pi_j": float(prices.pi[j]),
        "gap": gap,
        "solver_residual": report.residual,
    }
    status = "pass" if gap > STRICT_MARGIN else "fail"
    return AxiomVerdict(
        axiom="strict_monotonicity",
        status=status,
        witness=witness,
        tolerances={"strict_margin": STRICT_MARGIN},
    )


def check_invariance(problem: RankingProblem, i: int, lam: float) -> AxiomVerdict:
    """Rescaling one agent's preference row must not move the ranking.

    Row normalization makes the scaled problem literally identical to the
    original, so we assert the strong form: the two rankings agree entrywise
    within 1e-8 (order invariance follows a fortiori).
    """
    if not (0 <= i < problem.n):
        raise ValueError(f"agent index {i} out of range for n={problem.n}")
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"scale factor must be positive and finite, got {lam!r}")
    scaled_alpha = np.array(problem.alpha)
    scaled_alpha[i] *= lam
    scaled = RankingProblem(problem.agent_ids, scaled_alpha, problem.rho, beta=problem.beta)
    base_prices, base_report = rank_problem(problem)
    scaled_prices, scaled_report = rank_problem(scaled)
    difference = float(np.abs(base_prices.pi - scaled_prices.pi).max())
    witness = {
        "i": i,
        "lambda": float(lam),
        "difference": difference,
        "prices": base_prices.pi.tolist(),
        "scaled_prices": scaled_prices.pi.tolist(),
        "solver_residuals": [base_report.residual, scaled_report.residual],
    }
    status = "pass" if difference <= INVARIANCE_TOL else "fail"
    return AxiomVerdict(
        axiom="invariance",
        status=status,
        witness=witness,
        tolerances={"max_norm": INVARIANCE_TOL},
    )


def check_uniformity(problem: RankingProblem, tol: float = UNIFORMITY_TOL) -> AxiomVerdict:
    """Report whether a regular problem's ranking is uniform.

    Regular problems (equal row and column sums) are exactly where uniform
    rankings are a live hypothesis, so non-regular input yields a
    not-applicable verdict. The check runs undamped: damping rewrites the
    matrix and would change which problem is being asked about. A "fail" here
    is not a defect, it is the interesting outcome: a regular problem whose
    equilibrium is demonstrably non-uniform.
    """
    undamped = replace(problem, beta=1.0)
    normalized = normalize_preferences(undamped)
    if not is_regular(normalized):
        row_sums = normalized.alpha_hat.sum(axis=1)
        col_sums = normalized.alpha_hat.sum(axis=0)
        return _not_applicable(
            "uniformity",
            "problem is not regular (row and column sums must all agree)",
            row_sums=row_sums.tolist(),
            column_sums=col_sums.tolist(),
        )
    economy = build_economy(normalized)
    prices, report = solve_equilibrium(economy)
    deviation = float(np.abs(prices.pi - 1.0 / problem.n).max())
    witness = {
        "prices": prices.pi.tolist(),
        "deviation_from_uniform": deviation,
        "solver_residual": report.residual,
    }
    status = "pass" if deviation <= tol else "fail"
    return AxiomVerdict(
        axiom="uniformity",
        status=status,
        witness=witness,
        tolerances={"uniform": float(tol)},
    )


def gs_spot_check(
    economy: CesEconomy,
    l: int,
    delta: float,
    probe_prices: Sequence,
) -> AxiomVerdict:
    """Probe the gross-substitutes property at given price vectors.

    For each probe price vector, raises the price of good ``l`` by ``delta``
    while holding every other price fixed, and requires the excess demand of
    every other good to strictly increase. Applicable only where the property
    is claimed: every rho nonnegative and a strictly positive preference
    matrix. Pure evaluation, no solving involved.
    """
    if not (0 <= l < economy.n):
        raise ValueError(f"good index {l} out of range for n={economy.n}")
    if np.any(economy.rho < 0.0):
        return _not_applicable(
            "gross_substitutes",
            "some trader has rho < 0; gross substitutes is only claimed for rho >= 0",
            rho=economy.rho.tolist(),
        )
    if np.any(economy.alpha <= 0.0):
        where = np.argwhere(economy.alpha <= 0.0)[0]
        return _not_applicable(
            "gross_substitutes",
            f"alpha[{where[0]}][{where[1]}] is not strictly positive",
        )
    if not (np.isfinite(delta) and delta > 0):
        return _not_applicable("gross_substitutes", f"price bump must be positive, got {delta!r}")
    checked = 0
    for probe_index, probe in enumerate(probe_prices):
        p = as_price_array(probe, economy.n)
        z_before = excess_demand(economy, p)
        bumped = np.array(p)
        bumped[l] += delta
        z_after = excess_demand(economy, bumped)
        increase = z_after - z_before
        for j in range(economy.n):
            if j == l:
                continue
            checked += 1
            if not increase[j] > STRICT_MARGIN:
                return AxiomVerdict(
                    axiom="gross_substitutes",
                    status="fail",
                    witness={
                        "probe": probe_index,
                        "good": j,
                        "bumped_good": l,
                        "delta": float(delta),
                        "z_before": float(z_before[j]),
                        "z_after": float(z_after[j]),
                    },
                    tolerances={"strict_margin": STRICT_MARGIN},
                )
    if checked == 0:
        return _not_applicable("gross_substitutes", "no probe prices supplied")
    return AxiomVerdict(
        axiom="gross_substitutes",
        status="pass",
        witness={"probes": len(probe_prices), "comparisons": checked, "bumped_good": l},
        tolerances={"strict_margin": STRICT_MARGIN},
    )
