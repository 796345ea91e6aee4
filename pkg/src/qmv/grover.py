"""Grover search with an unknown number of solutions, simulated in closed form.

After ``j`` Grover iterations from the uniform state the probability of
measuring a solution is ``sin^2((2j+1) theta)`` with ``sin theta = sqrt(t/N)``.
Amplitudes are symmetric within the solutions and within the non-solutions,
so a measurement is sampled as "solution or not" and then a uniform index
from the corresponding class.  No N-dimensional vector is built.

The search schedule is the exponentially growing one of Boyer, Brassard,
Hoyer and Tapp: growth 6/5, phase capped at ``ceil(sqrt(N))``.  One *sweep*
runs phases from 1 up to the cap; ``ceil(log2 N)`` sweeps without a hit
certify "no solution".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._random import as_generator


def grover_success_prob(N: int, t: int, j: int) -> float:
    if not 0 <= t <= N or j < 0:
        raise ValueError(f"need 0 <= t <= N and j >= 0, got N={N}, t={t}, j={j}")
    if t == 0:
        return 0.0
    theta = math.asin(math.sqrt(t / N))
    return math.sin((2 * j + 1) * theta) ** 2


def grover_rotation_prob(N: int, t: int, j: int) -> float:
    """Same quantity from the literal 2-d rotation ``(D O)^j`` on (good, bad)."""
    if t == 0:
        return 0.0
    good, bad = math.sqrt(t / N), math.sqrt((N - t) / N)
    state = np.array([good, bad])
    oracle = np.diag([-1.0, 1.0])
    s = np.array([good, bad])
    diffusion = 2.0 * np.outer(s, s) - np.eye(2)
    for _ in range(j):
        state = diffusion @ (oracle @ state)
    return float(state[0] ** 2)


@dataclass(frozen=True)
class BBHTParams:
    growth: float = 6 / 5
    max_phase_cap: int | None = None
    confirmation_rounds: int | None = None

    def __post_init__(self):
        if not 1 < self.growth < 4 / 3:
            raise ValueError("growth must lie in (1, 4/3)")

    def cap(self, N: int) -> int:
        return self.max_phase_cap or max(1, math.ceil(math.sqrt(N)))

    def rounds(self, N: int) -> int:
        if self.confirmation_rounds:
            return self.confirmation_rounds
        return max(1, math.ceil(math.log2(N)))


class SearchProblem:
    """Search over ``{1..N}`` for indices satisfying ``predicate``.

    The solution set is computed up front for the simulator; the searcher
    only learns it through oracle calls.
    """

    def __init__(self, size: int, predicate: Callable[[int], bool], cost_per_call: int = 1):
        if size < 1:
            raise ValueError("search size must be >= 1")
        self.size = size
        self.predicate = predicate
        self.cost_per_call = cost_per_call
        self.solutions = np.array([i for i in range(1, size + 1) if predicate(i)], dtype=np.int64)

    @classmethod
    def from_mask(cls, mask, cost_per_call: int = 1) -> "SearchProblem":
        mask = np.asarray(mask, dtype=bool)
        return cls(len(mask), lambda i: bool(mask[i - 1]), cost_per_call)

    @property
    def t(self) -> int:
        return len(self.solutions)


@dataclass
class SearchResult:
    found: int | None
    oracle_calls: int
    time_units: int
    measurements: int = 0


def bbht_search(problem: SearchProblem, seed=None, params: BBHTParams = BBHTParams(),
                exclude: set | None = None) -> SearchResult:
    """One BBHT search.

    Each measurement costs ``j`` oracle calls for the Grover iterations plus
    one call to check the measured index.  ``exclude`` removes indices from
    the solution set (already-found entries, masked out of the predicate).
    """
    rng = as_generator(seed)
    N = problem.size
    sols = problem.solutions
    if exclude:
        sols = sols[~np.isin(sols, list(exclude))]
    t = len(sols)
    is_sol = np.zeros(N + 1, dtype=bool)
    is_sol[sols] = True
    non_sols = None
    cap = params.cap(N)
    calls = measurements = 0
    for _ in range(params.rounds(N)):
        phase = 1.0
        while True:
            j = int(rng.integers(0, math.ceil(phase)))
            calls += j + 1
            measurements += 1
            if rng.random() < grover_success_prob(N, t, j):
                idx = int(sols[rng.integers(t)])
            else:
                if non_sols is None:
                    non_sols = np.flatnonzero(~is_sol[1:]) + 1
                idx = int(non_sols[rng.integers(len(non_sols))]) if len(non_sols) else int(sols[0])
            if is_sol[idx] and problem.predicate(idx):
                return SearchResult(idx, calls, calls * problem.cost_per_call, measurements)
            if phase >= cap:
                break
            phase = min(phase * params.growth, cap)
    return SearchResult(None, calls, calls * problem.cost_per_call, measurements)


@dataclass
class LineSearchResult:
    solutions: set = field(default_factory=set)
    oracle_calls: int = 0
    time_units: int = 0
    searches: int = 0


def find_all_in_line(problem: SearchProblem, seed=None, params: BBHTParams = BBHTParams()) -> LineSearchResult:
    """Repeat BBHT, masking out each found index, until a search comes back empty."""
    rng = as_generator(seed)
    out = LineSearchResult()
    while True:
        res = bbht_search(problem, rng, params, exclude=out.solutions)
        out.oracle_calls += res.oracle_calls
        out.time_units += res.time_units
        out.searches += 1
        if res.found is None:
            return out
        out.solutions.add(res.found)
