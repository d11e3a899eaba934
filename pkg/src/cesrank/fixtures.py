"""Bundled example problems.

Two small fixtures ship inside the package so the verify command works with
zero setup:

``nonuniform3``
    A regular 3-agent problem (all row and column sums equal) whose
    equilibrium is nonetheless not uniform. This is the witness that
    elasticity-sensitive ranking genuinely departs from stationary-distribution
    methods, which always rank regular problems uniformly.

``monotone3``
    A 3-agent problem where agent m1's column is dominated entrywise by
    agent m2's, so strict monotonicity has something to bite on.
"""

from __future__ import annotations

from importlib import resources

from .formats import load_problem
from .problem import RankingProblem

FIXTURE_NAMES = ("nonuniform3", "monotone3")


def load_fixture(name: str) -> RankingProblem:
    if name not in FIXTURE_NAMES:
        raise ValueError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    ref = resources.files("cesrank").joinpath("data", f"{name}.json")
    with ref.open("r", encoding="utf-8") as f:
        return load_problem(f)
