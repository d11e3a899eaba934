"""Command-line surface.

Four subcommands:

``rank``     score the agents of a problem or graph (ces, pagerank, invariant)
``verify``   run executable axiom checks and emit machine-readable verdicts
``compare``  cross-check the two equivalent pipelines on one graph
``convert``  dump a graph's damped chain as an equivalent problem document

Results go to stdout; every diagnostic goes to stderr. Exit codes: 0 success,
1 a check or comparison failed, 2 unusable input, 3 solver non-convergence.
Set RANK_LOG=debug|info|warning|error to adjust stderr verbosity. Output is
deterministic: the same input, flags, and seed produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .axioms import (
    AxiomVerdict,
    check_invariance,
    check_minimal_fairness,
    check_strict_monotonicity,
    check_uniformity,
    gs_spot_check,
)
from .diagnostics import ConvergenceError
from .economy import build_economy, markov_to_economy
from .fixtures import load_fixture
from .formats import DocumentError, dump_problem, problem_from_edge_list, sniff_and_load
from .markov import DirectedGraph, TransitionMatrix, build_web_transition, is_strongly_connected, stationary_distribution, strongly_connected_component
from .problem import RankingProblem, normalize_preferences
from .solver import SolverConfig, rank_problem, solve_cobb_douglas

logger = logging.getLogger(__name__)

#: Scores closer than this are reported as tied.
TIE_TOL = 1e-9

_EXIT_OK = 0
_EXIT_CHECK_FAILED = 1
_EXIT_BAD_INPUT = 2
_EXIT_NO_CONVERGENCE = 3


def _configure_logging() -> None:
    name = os.environ.get("RANK_LOG", "").strip().upper()
    level = {"DEBUG": logging.DEBUG, "INFO": logging.INFO, "WARNING": logging.WARNING, "ERROR": logging.ERROR}.get(name)
    if name and level is None:
        print(f"warning: unknown RANK_LOG level {name!r}, using WARNING", file=sys.stderr)
    logging.basicConfig(stream=sys.stderr, level=level if level is not None else logging.WARNING)


def _support_graph(weights: np.ndarray) -> DirectedGraph:
    n = weights.shape[0]
    edges = frozenset((int(i), int(j)) for i, j in np.argwhere(weights > 0))
    return DirectedGraph(n, edges)


def _tie_groups(ids, scores, order) -> list[list[str]]:
    groups: list[list[int]] = []
    anchor = None
    for k in order:
        if anchor is not None and abs(scores[k] - scores[anchor]) <= TIE_TOL:
            groups[-1].append(k)
        else:
            groups.append([k])
            anchor = k
    return [[ids[k] for k in sorted(g)] for g in groups if len(g) > 1]


def _emit_ranking(ids, scores, report, method: str, fmt: str) -> None:
    n = len(ids)
    order = sorted(range(n), key=lambda k: (-scores[k], k))
    if fmt == "tsv":
        for rank, k in enumerate(order, start=1):
            sys.stdout.write(f"{rank}\t{ids[k]}\t{scores[k]:.12g}\n")
        return
    doc = {
        "format": 1,
        "method": method,
        "ranking": [
            {"rank": rank, "agent": ids[k], "score": float(scores[k])}
            for rank, k in enumerate(order, start=1)
        ],
        "ties": _tie_groups(ids, scores, order),
        "report": report.to_dict(include_wall_time=False),
    }
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _cmd_rank(args) -> int:
    problem, loaded_graph = sniff_and_load(args.input)

    if args.method == "ces":
        if problem is None:
            _, weights = loaded_graph
            problem = problem_from_edge_list(
                weights,
                rho=args.rho if args.rho is not None else 0.0,
                beta=args.beta if args.beta is not None else 0.85,
            )
        else:
            if args.rho is not None:
                problem = RankingProblem(problem.agent_ids, problem.alpha, args.rho, beta=problem.beta)
            if args.beta is not None:
                problem = RankingProblem(problem.agent_ids, problem.alpha, problem.rho, beta=args.beta)
        tol = args.tol if args.tol is not None else 1e-10
        config = SolverConfig(tolerance=tol, seed=args.seed)
        prices, report = rank_problem(problem, config)
        _emit_ranking(problem.agent_ids, prices.pi, report, "ces", args.format)
        return _EXIT_OK

    if args.rho is not None:
        print("warning: --rho only applies to --method ces; ignored", file=sys.stderr)
    if args.beta is not None:
        print("warning: --beta only applies to --method ces; ignored", file=sys.stderr)

    if problem is not None:
        ids = problem.agent_ids
        weights = problem.alpha
    else:
        _, weights = loaded_graph
        ids = tuple(f"v{k}" for k in range(weights.shape[0]))
    tol = args.tol if args.tol is not None else 1e-12

    if args.method == "pagerank":
        graph = loaded_graph[0] if problem is None else _support_graph(weights)
        chain = build_web_transition(graph, c=args.damping)
    else:  # invariant
        graph = _support_graph(weights)
        if not is_strongly_connected(graph):
            component = strongly_connected_component(graph)
            raise ValueError(
                "the invariant method needs a strongly connected graph "
                f"(one strongly connected component: {component})"
            )
        chain = TransitionMatrix(weights / weights.sum(axis=1, keepdims=True))
    dist, report = stationary_distribution(chain, tolerance=tol)
    _emit_ranking(ids, dist.pi, report, args.method, args.format)
    return _EXIT_OK


def _verdict_record(verdict: AxiomVerdict, ok: bool, note: str | None = None) -> dict:
    record = {
        "axiom": verdict.axiom,
        "status": verdict.status,
        "ok": ok,
        "witness": verdict.witness,
        "tolerances": verdict.tolerances,
    }
    if note:
        record["note"] = note
    return record


def _cmd_verify(args) -> int:
    custom = None
    if args.input is not None:
        custom, loaded_graph = sniff_and_load(args.input)
        if custom is None:
            _, weights = loaded_graph
            custom = problem_from_edge_list(weights, rho=0.0, beta=1.0)
    bundled = custom is None

    axioms = ("fairness", "monotone", "invariance", "uniformity", "gs") if args.axiom == "all" else (args.axiom,)
    records = []
    for axiom in axioms:
        if axiom == "fairness":
            verdict = check_minimal_fairness(args.n, args.rho, beta=args.beta)
            ok, note = verdict.passed, None
        elif axiom == "monotone":
            problem = custom if custom is not None else load_fixture("monotone3")
            verdict = check_strict_monotonicity(problem, args.i, args.j)
            ok, note = verdict.status != "fail", None
        elif axiom == "invariance":
            problem = custom if custom is not None else load_fixture("nonuniform3")
            verdict = check_invariance(problem, args.row, args.lam)
            ok, note = verdict.passed, None
        elif axiom == "uniformity":
            problem = custom if custom is not None else load_fixture("nonuniform3")
            verdict = check_uniformity(problem)
            if not verdict.applicable:
                ok, note = True, None
            elif bundled:
                # the bundled fixture exists to witness non-uniformity
                ok = not verdict.passed
                note = "non-uniform, as claimed" if ok else "fixture unexpectedly uniform"
            else:
                ok = True
                note = "uniform" if verdict.passed else "non-uniform"
        else:  # gs
            problem = custom if custom is not None else load_fixture("nonuniform3")
            economy = build_economy(normalize_preferences(problem))
            probe = np.full(economy.n, 1.0 / economy.n)
            verdict = gs_spot_check(economy, args.good, args.delta, [probe])
            ok, note = verdict.status != "fail", None
        if verdict.status == "not_applicable":
            print(f"warning: {axiom}: not applicable ({verdict.witness.get('reason')})", file=sys.stderr)
        records.append(_verdict_record(verdict, ok, note))

    sys.stdout.write(json.dumps(records, indent=2) + "\n")
    return _EXIT_OK if all(r["ok"] for r in records) else _EXIT_CHECK_FAILED


def _cmd_compare(args) -> int:
    problem, loaded_graph = sniff_and_load(args.input)
    graph = loaded_graph[0] if problem is None else _support_graph(problem.alpha)
    ids = problem.agent_ids if problem is not None else tuple(f"v{k}" for k in range(graph.n))

    chain = build_web_transition(graph, c=args.damping)
    dist, chain_report = stationary_distribution(chain)
    economy = markov_to_economy(chain)
    prices, market_report = solve_cobb_douglas(economy)

    difference = float(np.abs(dist.pi - prices.pi).max())
    passed = difference <= 1e-8
    doc = {
        "format": 1,
        "damping": args.damping,
        "agents": list(ids),
        "stationary": dist.pi.tolist(),
        "equilibrium": prices.pi.tolist(),
        "max_difference": difference,
        "bound": 1e-8,
        "passed": passed,
        "reports": {
            "stationary": chain_report.to_dict(include_wall_time=False),
            "equilibrium": market_report.to_dict(include_wall_time=False),
        },
    }
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return _EXIT_OK if passed else _EXIT_CHECK_FAILED


def _cmd_convert(args) -> int:
    problem, loaded_graph = sniff_and_load(args.input)
    graph = loaded_graph[0] if problem is None else _support_graph(problem.alpha)
    chain = build_web_transition(graph, c=args.damping)
    economy = markov_to_economy(chain)
    # beta=1: the damping is already baked into the transition matrix
    document = problem_from_edge_list(economy.alpha, rho=0.0, beta=1.0)
    text = dump_problem(document)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cesrank", description="Elasticity-aware agent ranking.")
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="score the agents of a problem document or edge list")
    rank.add_argument("--method", choices=("ces", "pagerank", "invariant"), default="ces")
    rank.add_argument("--input", required=True, help="problem document (.json) or edge list")
    rank.add_argument("--rho", type=float, default=None, help="override rho for every agent (ces)")
    rank.add_argument("--beta", type=float, default=None, help="override damping weight (ces)")
    rank.add_argument("--damping", type=float, default=0.85, help="link-following probability (pagerank)")
    rank.add_argument("--tol", type=float, default=None, help="solver tolerance")
    rank.add_argument("--format", choices=("tsv", "json"), default="tsv")
    rank.add_argument("--seed", type=int, default=0)
    rank.set_defaults(func=_cmd_rank)

    verify = sub.add_parser("verify", help="run axiom checks against a fixture or your own problem")
    verify.add_argument("--axiom", choices=("fairness", "monotone", "invariance", "uniformity", "gs", "all"), default="all")
    verify.add_argument("--input", default=None, help="problem document; bundled fixtures when omitted")
    verify.add_argument("--n", type=int, default=3, help="agent count for the fairness check")
    verify.add_argument("--rho", type=float, default=0.0, help="common rho for the fairness check")
    verify.add_argument("--beta", type=float, default=1.0, help="damping weight for the fairness check")
    verify.add_argument("--i", type=int, default=0, help="dominated agent index (monotone)")
    verify.add_argument("--j", type=int, default=1, help="dominating agent index (monotone)")
    verify.add_argument("--row", type=int, default=0, help="agent row to rescale (invariance)")
    verify.add_argument("--lambda", dest="lam", type=float, default=10.0, help="rescale factor (invariance)")
    verify.add_argument("--good", type=int, default=0, help="good whose price is bumped (gs)")
    verify.add_argument("--delta", type=float, default=0.05, help="price bump size (gs)")
    verify.set_defaults(func=_cmd_verify)

    compare = sub.add_parser("compare", help="stationary distribution vs market equilibrium on one graph")
    compare.add_argument("--input", required=True, help="edge list or problem document (support graph used)")
    compare.add_argument("--damping", type=float, default=0.85)
    compare.set_defaults(func=_cmd_compare)

    convert = sub.add_parser("convert", help="dump a graph's damped chain as a problem document")
    convert.add_argument("--input", required=True)
    convert.add_argument("--damping", type=float, default=0.85)
    convert.add_argument("--output", default=None, help="write here instead of stdout")
    convert.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_BAD_INPUT
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_NO_CONVERGENCE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return _EXIT_BAD_INPUT


def entry_point() -> None:
    sys.exit(main())
