"""Agent ranking through exchange-market equilibria.

A ranking problem assigns each agent a preference row over the other agents
and an elasticity parameter. Scoring works by reading the problem as an
exchange economy (each agent endowed with one unit of the good named after
them) and ranking by equilibrium prices. With unit elasticity everywhere the
prices coincide with the stationary distribution of the damped preference
chain, so the classical link-analysis scores come out as the special case
rho = 0; other elasticities genuinely change the ranking.
"""

from .axioms import (
    AxiomVerdict,
    check_invariance,
    check_minimal_fairness,
    check_strict_monotonicity,
    check_uniformity,
    gs_spot_check,
)
from .diagnostics import ClearingReport, ConvergenceError, MultistartReport, SolverReport
from .economy import (
    CesEconomy,
    PriceVector,
    build_economy,
    ces_demand,
    cobb_douglas_demand,
    demand_matrix,
    excess_demand,
    markov_to_economy,
)
from .fixtures import FIXTURE_NAMES, load_fixture
from .formats import (
    DocumentError,
    dump_problem,
    load_edge_list,
    load_problem,
    problem_from_edge_list,
    sniff_and_load,
)
from .markov import (
    DirectedGraph,
    Distribution,
    TransitionMatrix,
    build_web_transition,
    is_aperiodic,
    is_strongly_connected,
    stationary_distribution,
)
from .problem import NormalizedProblem, RankingProblem, is_regular, normalize_preferences
from .solver import (
    SolverConfig,
    multistart_probe,
    rank_problem,
    solve_cobb_douglas,
    solve_equilibrium,
    solve_tatonnement,
    verify_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomVerdict",
    "CesEconomy",
    "ClearingReport",
    "ConvergenceError",
    "DirectedGraph",
    "Distribution",
    "DocumentError",
    "FIXTURE_NAMES",
    "MultistartReport",
    "NormalizedProblem",
    "PriceVector",
    "RankingProblem",
    "SolverConfig",
    "SolverReport",
    "TransitionMatrix",
    "build_economy",
    "build_web_transition",
    "ces_demand",
    "check_invariance",
    "check_minimal_fairness",
    "check_strict_monotonicity",
    "check_uniformity",
    "cobb_douglas_demand",
    "demand_matrix",
    "dump_problem",
    "excess_demand",
    "gs_spot_check",
    "is_aperiodic",
    "is_regular",
    "is_strongly_connected",
    "load_edge_list",
    "sniff_and_load",
    "load_fixture",
    "load_problem",
    "markov_to_economy",
    "multistart_probe",
    "normalize_preferences",
    "problem_from_edge_list",
    "rank_problem",
    "solve_cobb_douglas",
    "solve_equilibrium",
    "solve_tatonnement",
    "stationary_distribution",
    "verify_equilibrium",
]
