"""Equilibrium computation: closed form, tatonnement, verification, probing.

All-Cobb-Douglas economies reduce to one linear system (market clearing at
positive prices reads ``sum_i alpha_hat[i][j] * pi[i] = pi[j]``, the invariant
condition of a stochastic matrix), so they are solved exactly. Everything else
runs damped multiplicative price adjustment: raise the price of over-demanded
goods, lower the price of over-supplied ones, renormalize. The result is never
trusted on faith; `verify_equilibrium` certifies the excess-demand residual
independently of how the prices were found.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import ClearingReport, ConvergenceError, MultistartReport, SolverReport
from .economy import CesEconomy, PriceVector, as_price_array, build_economy, demand_matrix, excess_demand
from .markov import is_strongly_connected, strongly_connected_component
from .problem import RankingProblem, normalize_preferences

logger = logging.getLogger(__name__)

#: Oscillation detection window (iterations) for automatic step halving.
OSCILLATION_WINDOW = 50
MAX_STEP_HALVINGS = 4


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for equilibrium computation.

    ``method`` is one of ``"auto"`` (closed form when every trader has unit
    elasticity and endowments are the identity, tatonnement otherwise),
    ``"closed_form"``, or ``"tatonnement"``. ``tolerance`` bounds the max-norm
    of excess demand at the returned prices. ``gamma`` is the tatonnement step
    exponent; it is halved up to four times when the residual stops improving.
    """

    method: str = "auto"
    tolerance: float = 1e-10
    gamma: float = 0.5
    max_iters: int = 200_000
    initial_prices: PriceVector | None = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("auto", "closed_form", "tatonnement"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance!r}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma!r}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters!r}")


def _require_connected_economy(economy: CesEconomy) -> None:
    graph = economy.support_graph()
    if not is_strongly_connected(graph):
        component = strongly_connected_component(graph)
        raise ValueError(
            "economy graph is not strongly connected "
            f"(one component: {component}); no strictly positive equilibrium is guaranteed"
        )


def solve_cobb_douglas(economy: CesEconomy, tolerance: float = 1e-10) -> tuple[PriceVector, SolverReport]:
    """Exact equilibrium of an all-unit-elasticity economy with identity endowments.

    Solves the linear invariant system of the row-normalized alpha matrix.
    The report's residual is the max-norm excess demand at the returned
    prices, computed through the demand functions as an independent check on
    the linear algebra.
    """
    start = time.perf_counter()
    if np.any(economy.rho != 0.0):
        i = int(np.flatnonzero(economy.rho != 0.0)[0])
        raise ValueError(f"trader {i} has rho = {economy.rho[i]!r}; closed form needs all zeros")
    if not economy.has_identity_endowments():
        raise ValueError("closed form is implemented for identity endowments only")
    _require_connected_economy(economy)
    shares = economy.alpha / economy.alpha.sum(axis=1, keepdims=True)
    n = economy.n
    a = shares.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    prices = PriceVector.from_unnormalized(pi)
    residual = float(np.abs(excess_demand(economy, prices)).max())
    report = SolverReport(
        method="closed_form",
        iterations=1,
        residual=residual,
        converged=residual <= tolerance,
        tolerance=tolerance,
        wall_time=time.perf_counter() - start,
    )
    if not report.converged:
        raise ConvergenceError(
            f"closed-form solution has residual {residual:.3e} above tolerance "
            f"{tolerance:.3e}; the linear system is badly conditioned",
            last_iterate=prices.pi,
            residual=residual,
        )
    return prices, report


def solve_tatonnement(economy: CesEconomy, config: SolverConfig | None = None) -> tuple[PriceVector, SolverReport]:
    """Damped multiplicative price adjustment until the market clears.

    Each round updates ``p[j] <- p[j] * (demand_j / supply_j) ** gamma`` and
    renormalizes onto the simplex, which keeps every price strictly positive.
    Convergence is declared when the max-norm excess demand falls below the
    configured tolerance. When traders have nonnegative rho the economy
    satisfies gross substitutes and the iteration is reliable in practice;
    negative rho may fail to converge, which is reported as an error rather
    than a wrong answer.
    """
    cfg = config or SolverConfig()
    _require_connected_economy(economy)
    start = time.perf_counter()
    n = economy.n
    supply = economy.supply
    if cfg.initial_prices is not None:
        p = as_price_array(cfg.initial_prices, n)
        p = p / p.sum()
    else:
        p = np.full(n, 1.0 / n)
    gamma = cfg.gamma
    halvings = 0
    last_halving = 0
    trace: list[float] = []
    residual = np.inf
    for it in range(cfg.max_iters + 1):
        demand = demand_matrix(economy, p).sum(axis=0)
        z = demand - supply
        if not np.all(np.isfinite(z)):
            j = int(np.flatnonzero(~np.isfinite(z))[0])
            raise ConvergenceError(
                f"excess demand of good {j} is not finite at iteration {it}",
                last_iterate=p,
                residual=float("nan"),
                residual_tail=trace[-10:],
                hint="reduce gamma or loosen the price scale",
            )
        residual = float(np.abs(z).max())
        trace.append(residual)
        if residual <= cfg.tolerance:
            report = SolverReport(
                method="tatonnement",
                iterations=it,
                residual=residual,
                converged=True,
                tolerance=cfg.tolerance,
                wall_time=time.perf_counter() - start,
            )
            logger.debug("tatonnement converged: %s", report)
            return PriceVector.from_unnormalized(p), report
        if it == cfg.max_iters:
            break
        if (
            len(trace) > OSCILLATION_WINDOW
            and halvings < MAX_STEP_HALVINGS
            and it - last_halving > OSCILLATION_WINDOW
            and trace[-1] > trace[-1 - OSCILLATION_WINDOW]
        ):
            gamma *= 0.5
            halvings += 1
            last_halving = it
            logger.info("residual rising over %d iterations; gamma halved to %g", OSCILLATION_WINDOW, gamma)
        p = p * (demand / supply) ** gamma
        p /= p.sum()
    raise ConvergenceError(
        f"tatonnement did not clear the market in {cfg.max_iters} iterations, "
        f"residual {residual:.3e}",
        last_iterate=p,
        residual=residual,
        residual_tail=trace[-10:],
        hint="reduce gamma",
    )


def solve_equilibrium(economy: CesEconomy, config: SolverConfig | None = None) -> tuple[PriceVector, SolverReport]:
    """Dispatch to the closed form when available, tatonnement otherwise."""
    cfg = config or SolverConfig()
    method = cfg.method
    if method == "auto":
        closed = bool(np.all(economy.rho == 0.0)) and economy.has_identity_endowments()
        method = "closed_form" if closed else "tatonnement"
    if method == "closed_form":
        return solve_cobb_douglas(economy, tolerance=cfg.tolerance)
    return solve_tatonnement(economy, cfg)


def rank_problem(problem: RankingProblem, config: SolverConfig | None = None) -> tuple[PriceVector, SolverReport]:
    """Full ranking pipeline: normalize, build the economy, solve for prices."""
    normalized = normalize_preferences(problem)
    economy = build_economy(normalized)
    return solve_equilibrium(economy, config)


def verify_equilibrium(economy: CesEconomy, prices, tolerance: float = 1e-10) -> ClearingReport:
    """Certify a candidate price vector by its excess-demand residual.

    Pure report: passes iff every good's excess demand is within ``tolerance``
    of zero. Since prices are strictly positive, clearing must hold with
    equality, so both surpluses and shortages count against the candidate.
    """
    z = excess_demand(economy, prices)
    residual = float(np.abs(z).max())
    return ClearingReport(
        residual=residual,
        per_good=z,
        tolerance=float(tolerance),
        passed=residual <= tolerance,
    )


def multistart_probe(economy: CesEconomy, config: SolverConfig | None = None, k_starts: int = 5) -> MultistartReport:
    """Solve from ``k_starts`` random interior starts and report the spread.

    Always runs the iterative solver (the closed form ignores its start, so
    probing it would be vacuous). For economies where every trader has
    ``rho >= 0`` the equilibrium is unique, and the max pairwise distance
    between the computed equilibria must land within ten times the solver
    tolerance; for some negative rho the spread is reported without judgement.
    Any non-converging start propagates its error.
    """
    cfg = config or SolverConfig()
    if k_starts < 2:
        raise ValueError(f"need at least 2 starts to measure a spread, got {k_starts}")
    rng = np.random.default_rng(cfg.seed)
    n = economy.n
    prices: list[PriceVector] = []
    reports: list[SolverReport] = []
    for _ in range(k_starts):
        raw = rng.dirichlet(np.ones(n))
        raw = np.clip(raw, 1e-3 / n, None)  # keep starts in the interior
        start = PriceVector.from_unnormalized(raw)
        p, rep = solve_tatonnement(economy, replace(cfg, initial_prices=start))
        prices.append(p)
        reports.append(rep)
    spread = 0.0
    for i in range(k_starts):
        for j in range(i + 1, k_starts):
            spread = max(spread, float(np.abs(prices[i].pi - prices[j].pi).max()))
    bound = 10.0 * cfg.tolerance
    unique_regime = bool(np.all(economy.rho >= 0.0))
    return MultistartReport(
        spread=spread,
        bound=bound,
        within_bound=(spread <= bound) if unique_regime else None,
        prices=prices,
        reports=reports,
    )
