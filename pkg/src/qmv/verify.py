"""Quantum product verification: Verify Once / Verify Full, the growing-k
schedule, the classical Freivalds baseline, and query accounting.

The simulator computes the marked set of each walk from ``D = AB - C``
directly; the ``QueryLedger`` separately charges what the quantum algorithm
would pay on-line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from ._random import as_generator, derive_seed
from .algebra import DomainError, DomainMatrix, WrongSet, difference_matrix
from .marked_fraction import marked_mask, revealing_mask
from .szegedy import WalkSpace, walk_probabilities

EQUAL = "equal"
NOT_EQUAL = "not_equal"
MODES = ("exact", "sample")


@dataclass
class QueryLedger:
    """Queries to ``A``, ``B``, ``C`` and abstract time units.

    ``time_units`` is the sum of the four breakdown streams.
    """

    queries_A: int = 0
    queries_B: int = 0
    queries_C: int = 0
    init_time: int = 0
    walk_time: int = 0
    flip_time: int = 0
    classical_time: int = 0

    @property
    def time_units(self) -> int:
        return self.init_time + self.walk_time + self.flip_time + self.classical_time

    def charge_init(self, k: int, m: int, k_cols: int | None = None):
        """Computing ``a_R``, ``b_S`` and ``c_{R,S}``: time ``2km + k^2`` (square)."""
        kc = k if k_cols is None else k_cols
        self.init_time += (k + kc) * m + k * kc

    def charge_iteration(self, k: int, m: int, flip_cost: int | None = None):
        """One phase flip plus one walk step exchanging a row and a column."""
        self.queries_A += 2 * m
        self.queries_B += 2 * m
        self.queries_C += 4 * k
        self.walk_time += 4 * m + 4 * k
        self.flip_time += m if flip_cost is None else flip_cost

    def charge_freivalds(self, n_rows: int, m: int, n_cols: int):
        """One classical round ``p (A (B q))`` against ``p C q``."""
        self.queries_A += n_rows * m
        self.queries_B += m * n_cols
        self.queries_C += n_rows * n_cols
        self.classical_time += (n_rows + n_cols) * m + n_rows * n_cols

    def charge_classical(self, queries_A=0, queries_B=0, queries_C=0, time=0):
        self.queries_A += queries_A
        self.queries_B += queries_B
        self.queries_C += queries_C
        self.classical_time += time

    def __iadd__(self, other: "QueryLedger"):
        self.queries_A += other.queries_A
        self.queries_B += other.queries_B
        self.queries_C += other.queries_C
        self.init_time += other.init_time
        self.walk_time += other.walk_time
        self.flip_time += other.flip_time
        self.classical_time += other.classical_time
        return self

    def copy(self) -> "QueryLedger":
        out = QueryLedger()
        out += self
        return out

    def as_dict(self) -> dict:
        return {"queries_A": self.queries_A, "queries_B": self.queries_B,
                "queries_C": self.queries_C, "time_units": self.time_units,
                "init_time": self.init_time, "walk_time": self.walk_time,
                "flip_time": self.flip_time, "classical_time": self.classical_time}


@dataclass(frozen=True)
class VerifySchedule:
    """Growth ``lam``, ``reps`` repetitions per level, ``k_i = ceil(2 lam^i)``."""

    lam: Fraction = Fraction(15, 14)
    reps: int = 16
    k_multiplier: int = 2
    extra_levels: int = 9
    fallback_rounds: int = 16

    def __post_init__(self):
        if not 1 < self.lam < Fraction(8, 7):
            raise ValueError("lambda must lie in (1, 8/7)")

    def i_max(self, n: int) -> int:
        if n < 2:
            return self.extra_levels
        return math.ceil(math.log(n ** (2 / 3)) / math.log(self.lam)) + self.extra_levels

    def k(self, i: int, n: int) -> int:
        """``min(ceil(2 lam^i), n - 1)``, computed in exact rationals."""
        raw = self.k_multiplier * self.lam**i
        return min(math.ceil(raw), n - 1)

    def ks(self, n: int) -> list[int]:
        return [self.k(i, n) for i in range(self.i_max(n) + 1)]

    def walk_calls(self, n: int) -> int:
        return (self.i_max(n) + 1) * self.reps


DEFAULT_SCHEDULE = VerifySchedule()


@lru_cache(maxsize=8)
def _space(n_rows: int, n_cols: int, k: int) -> WalkSpace:
    return WalkSpace.johnson(n_rows, k, n_cols)


class VerificationProblem:
    """``A`` (n x m), ``B`` (m x n'), ``C`` (n x n') with ``D = AB - C`` cached."""

    def __init__(self, A: DomainMatrix, B: DomainMatrix, C: DomainMatrix):
        self.A, self.B, self.C = A, B, C
        self.D = difference_matrix(A, B, C)
        self.domain = A.domain
        self.n_rows, self.n_cols = C.shape
        self.m = A.cols
        self.is_correct = self.D.is_zero()

    @property
    def walk_n(self) -> int:
        """Universe bound for ``k``: the walk needs ``k < min(n, n')``."""
        return min(self.n_rows, self.n_cols)

    @property
    def wrong_set(self) -> WrongSet:
        rows, cols = np.nonzero(self.D.entries != 0)
        return WrongSet(self.n_rows, frozenset(zip((rows + 1).tolist(), (cols + 1).tolist())), self.n_cols)

    def check_k(self, k: int):
        if not 1 <= k <= self.walk_n - 1:
            raise DomainError(f"k = {k} outside [1, {self.walk_n - 1}]")


@dataclass
class VerifyCall:
    """One Verify Once / Verify Full run.

    ``prob`` is the success probability given the drawn vectors: for
    ``l`` fixed in sample mode, averaged over ``l`` in exact mode.
    """

    k: int
    ell: int
    prob: float
    result: int
    ledger: QueryLedger
    per_l: np.ndarray | None = None
    i: int | None = None
    rep: int | None = None
    kind: str = "once"


def _walk_call(problem: VerificationProblem, k: int, marked: np.ndarray, rng,
               mode: str, flip_cost: int, simulate_unmarked: bool, kind: str) -> VerifyCall:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    ell = int(rng.integers(1, k + 1))
    ledger = QueryLedger()
    ledger.charge_init(k, problem.m)
    for _ in range(ell):
        ledger.charge_iteration(k, problem.m, flip_cost)
    if marked.any() or simulate_unmarked:
        space = _space(problem.n_rows, problem.n_cols, k)
        per_l = walk_probabilities(space, marked, k)[1:]
    else:
        # no marked vertex: F = I and U fixes phi, so every prob_one is 0
        per_l = np.zeros(k)
    prob = float(per_l.mean()) if mode == "exact" else float(per_l[ell - 1])
    result = int(rng.random() < prob)
    return VerifyCall(k, ell, prob, result, ledger, per_l, kind=kind)


def verify_once(problem_or_A, B=None, C=None, k: int = 1, seed=None, mode: str = "sample",
                simulate_unmarked: bool = True) -> VerifyCall:
    """One Verify Once call with fresh random ``p``, ``q`` and ``l``."""
    problem = _as_problem(problem_or_A, B, C)
    problem.check_k(k)
    rng = as_generator(seed)
    p = problem.domain.random_vector(rng, problem.n_rows)
    q = problem.domain.random_vector(rng, problem.n_cols)
    if problem.is_correct:
        marked = np.zeros(math.comb(problem.n_rows, k) * math.comb(problem.n_cols, k), dtype=bool)
    else:
        marked = revealing_mask(problem.D.entries, p, q, problem.domain, k)
    return _walk_call(problem, k, marked, rng, mode, problem.m, simulate_unmarked, "once")


def verify_once_fixed(problem: VerificationProblem, k: int, p, q) -> np.ndarray:
    """Per-``l`` success curve of Verify Once for fixed vectors ``p``, ``q``."""
    problem.check_k(k)
    marked = revealing_mask(problem.D.entries, p, q, problem.domain, k)
    return walk_probabilities(_space(problem.n_rows, problem.n_cols, k), marked, k)[1:]


def verify_full(problem_or_A, B=None, C=None, k: int = 1, seed=None, mode: str = "sample",
                simulate_unmarked: bool = True) -> VerifyCall:
    """Verify Once with the exact sub-product check ``A|_R B|^S = C|_R^S``.

    Same queries as Verify Once; the classical phase-flip check costs ``k m``.
    """
    problem = _as_problem(problem_or_A, B, C)
    problem.check_k(k)
    rng = as_generator(seed)
    marked = marked_mask(problem.wrong_set, k)
    return _walk_call(problem, k, marked, rng, mode, k * problem.m, simulate_unmarked, "full")


def _as_problem(problem_or_A, B, C) -> VerificationProblem:
    if isinstance(problem_or_A, VerificationProblem):
        return problem_or_A
    return VerificationProblem(problem_or_A, B, C)


def _freivalds_call(problem: VerificationProblem, rng) -> VerifyCall:
    p = problem.domain.random_vector(rng, problem.n_rows)
    q = problem.domain.random_vector(rng, problem.n_cols)
    ledger = QueryLedger()
    ledger.charge_freivalds(problem.n_rows, problem.m, problem.n_cols)
    value = problem.domain.reduce(np.asarray(p, dtype=object) @ np.asarray(problem.D.entries, dtype=object)
                                  @ np.asarray(q, dtype=object))
    hit = int(int(value) != 0)
    return VerifyCall(problem.walk_n, 0, float(hit), hit, ledger, kind="freivalds")


@dataclass
class FreivaldsResult:
    verdict: str
    detections: list[int]


def freivalds(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix, rounds: int, seed=None) -> FreivaldsResult:
    """Classical randomized check ``p (A (B q)) == p (C q)``, ``rounds`` times."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    problem = VerificationProblem(A, B, C)
    rng = as_generator(seed)
    hits = [_freivalds_call(problem, rng).result for _ in range(rounds)]
    return FreivaldsResult(NOT_EQUAL if any(hits) else EQUAL, hits)


def verification_calls(problem: VerificationProblem, seed: int, mode: str = "sample",
                       schedule: VerifySchedule = DEFAULT_SCHEDULE,
                       simulate_unmarked: bool = False, full: bool = False) -> Iterator[VerifyCall]:
    """Every call Product Verification would make, in order, without early exit.

    Level ``i`` runs ``schedule.reps`` walks with ``k_i``; afterwards come the
    classical fallback rounds.  Each call draws from its own generator seeded
    by ``derive_seed(seed, i, rep)``, so results do not depend on how calls
    of different verifications are interleaved.
    """
    n = problem.walk_n
    if n >= 2:
        for i in range(schedule.i_max(max(problem.n_rows, problem.n_cols)) + 1):
            k = schedule.k(i, n)
            for rep in range(schedule.reps):
                rng = as_generator(derive_seed(seed, i, rep))
                fn = verify_full if full else verify_once
                call = fn(problem, k=k, seed=rng, mode=mode, simulate_unmarked=simulate_unmarked)
                call.i, call.rep = i, rep
                yield call
    for rep in range(schedule.fallback_rounds):
        call = _freivalds_call(problem, as_generator(derive_seed(seed, 2**32 - 1, rep)))
        call.i, call.rep = None, rep
        yield call


@dataclass
class VerifyOutcome:
    verdict: str
    ledger: QueryLedger
    transcript: list[tuple]
    mode: str
    terminating_k: int | None = None
    calls: int = 0
    probs: list[float] = field(default_factory=list)

    @property
    def detected(self) -> bool:
        return self.verdict == NOT_EQUAL


def product_verification(A, B=None, C=None, seed: int = 0, mode: str = "sample",
                         schedule: VerifySchedule = DEFAULT_SCHEDULE,
                         simulate_unmarked: bool = False) -> VerifyOutcome:
    """Run the schedule with early exit on the first detection.

    Works for rectangular ``A`` (n x m), ``B`` (m x n'): the walk is on
    ``J(n, k) x J(n', k)`` and scalar products have length ``m``.

    Transcript rows are ``(i, k, rep, result, prob)``; ``i`` is ``None`` for
    classical fallback rounds.
    """
    problem = _as_problem(A, B, C)
    ledger = QueryLedger()
    transcript = []
    probs = []
    for call in verification_calls(problem, seed, mode, schedule, simulate_unmarked):
        ledger += call.ledger
        transcript.append((call.i, call.k, call.rep, call.result, call.prob))
        probs.append(call.prob)
        if call.result:
            return VerifyOutcome(NOT_EQUAL, ledger, transcript, mode, call.k, len(transcript), probs)
    return VerifyOutcome(EQUAL, ledger, transcript, mode, None, len(transcript), probs)


product_verification_rect = product_verification
