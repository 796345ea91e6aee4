"""Locating wrong entries by quadrant binary search, output-sensitive matrix
multiplication by iterated correction, and the Boolean-product cost model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._random import as_generator, derive_seed
from .algebra import DomainMatrix, WrongSet, mat_mul, matmul_entries
from .grover import BBHTParams, SearchProblem, bbht_search, find_all_in_line
from .verify import (DEFAULT_SCHEDULE, QueryLedger, VerificationProblem, VerifySchedule,
                     verification_calls)

SEQUENTIAL_SUM = "sequential_sum"
PARALLEL_MAX = "parallel_max"


def default_reps(n: int) -> int:
    """Repetitions of the four-quadrant verification round per recursion level."""
    return math.ceil(math.log2(max(n, 2))) + 3


@dataclass
class RecursionNode:
    level: int
    row_offset: int
    col_offset: int
    n_local: tuple[int, int]
    verdicts: dict = field(default_factory=dict)
    chosen: tuple[int, int] | None = None
    rounds: int = 0


@dataclass
class FindResult:
    position: tuple[int, int] | None
    ledger: QueryLedger
    parallel_time: int
    trace: list[RecursionNode]

    @property
    def equal(self) -> bool:
        return self.position is None


def _halves(size: int) -> list[tuple[int, int]]:
    """``(offset, length)`` of the ceil/floor halves, dropping empty ones."""
    top = (size + 1) // 2
    return [(0, top)] + ([(top, size - top)] if size - top else [])


def _sub(M: DomainMatrix, rows: slice, cols: slice) -> DomainMatrix:
    return DomainMatrix(M.entries[rows, cols], M.domain)


def find_wrong_entry(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix, seed: int = 0,
                     reps: int | None = None, mode: str = "sample",
                     schedule: VerifySchedule = DEFAULT_SCHEDULE) -> FindResult:
    """1-based position of a wrong entry of ``C``, or ``None`` for "equal".

    At each level the four quadrant verifications are interleaved one
    Verify Once call at a time, in quadrant order (1,1), (1,2), (2,1), (2,2),
    and all stop at the first detection.  ``ledger`` sums every call;
    ``parallel_time`` charges each interleaving round the slowest call only.
    """
    reps = default_reps(max(C.shape)) if reps is None else reps
    ledger = QueryLedger()
    trace: list[RecursionNode] = []
    parallel = 0
    row_off = col_off = 0
    level = 0
    while True:
        nr, nc = C.shape
        if nr == 1 and nc == 1:
            m = A.cols
            ledger.charge_classical(m, m, 1, m)
            parallel += m
            node = RecursionNode(level, row_off, col_off, (1, 1))
            trace.append(node)
            value = matmul_entries(A.entries, B.entries, A.domain)[0, 0]
            if value != C.entries[0, 0]:
                return FindResult((row_off + 1, col_off + 1), ledger, parallel, trace)
            return FindResult(None, ledger, parallel, trace)
        node = RecursionNode(level, row_off, col_off, (nr, nc))
        trace.append(node)
        quads = []
        for i, (ro, rl) in enumerate(_halves(nr)):
            for j, (co, cl) in enumerate(_halves(nc)):
                rows, cols = slice(ro, ro + rl), slice(co, co + cl)
                problem = VerificationProblem(_sub(A, rows, slice(None)), _sub(B, slice(None), cols),
                                              _sub(C, rows, cols))
                quads.append(((i + 1, j + 1), (ro, co), (rows, cols), problem))
        found = None
        for rep in range(reps):
            gens = [verification_calls(p, derive_seed(seed, level, rep, qi), mode, schedule)
                    for qi, (_, _, _, p) in enumerate(quads)]
            active = list(range(len(quads)))
            node.rounds += 1
            while active and found is None:
                round_max = 0
                still = []
                for qi in active:
                    call = next(gens[qi], None)
                    if call is None:
                        continue
                    ledger += call.ledger
                    round_max = max(round_max, call.ledger.time_units)
                    if call.result:
                        found = qi
                        break
                    still.append(qi)
                parallel += round_max
                active = still
            for qi, (label, *_rest) in enumerate(quads):
                node.verdicts[label] = node.verdicts.get(label, False) or qi == found
            if found is not None:
                break
        if found is None:
            return FindResult(None, ledger, parallel, trace)
        label, (ro, co), (rows, cols), _ = quads[found]
        node.chosen = label
        A = _sub(A, rows, slice(None))
        B = _sub(B, slice(None), cols)
        C = _sub(C, rows, cols)
        row_off += ro
        col_off += co
        level += 1


@dataclass
class MultiplyReport:
    C: DomainMatrix
    iterations: int
    positions: list[tuple[int, int]]
    ledgers: dict[str, QueryLedger]
    parallel_find_time: int
    audit_ok: bool | None = None

    def total_time(self, accounting: str = SEQUENTIAL_SUM) -> int:
        grover = self.ledgers["grover_rows"].time_units + self.ledgers["grover_cols"].time_units
        if accounting == SEQUENTIAL_SUM:
            return self.ledgers["find_wrong"].time_units + grover
        if accounting == PARALLEL_MAX:
            return self.parallel_find_time + grover
        raise ValueError(f"unknown accounting {accounting!r}")

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "positions": [list(p) for p in self.positions],
            "ledgers": {k: v.as_dict() for k, v in self.ledgers.items()},
            SEQUENTIAL_SUM: self.total_time(SEQUENTIAL_SUM),
            PARALLEL_MAX: self.total_time(PARALLEL_MAX),
            "audit_ok": self.audit_ok,
        }


def _line_search(wrong: np.ndarray, m: int, rng, params: BBHTParams, ledger: QueryLedger) -> list[int]:
    """Find every True in ``wrong``; each oracle call is one length-m scalar product."""
    problem = SearchProblem.from_mask(wrong, cost_per_call=m)
    res = find_all_in_line(problem, rng, params)
    ledger.charge_classical(res.oracle_calls * m, res.oracle_calls * m, res.oracle_calls, res.time_units)
    return sorted(res.solutions)


def matrix_multiplication(A: DomainMatrix, B: DomainMatrix, seed: int = 0, audit: bool = False,
                          reps: int | None = None, schedule: VerifySchedule = DEFAULT_SCHEDULE,
                          params: BBHTParams = BBHTParams(), max_iterations: int | None = None) -> MultiplyReport:
    """Compute ``AB`` starting from ``C = 0``.

    Each iteration finds one wrong position ``(r, c)``, recomputes it, then
    uses Grover search to find and recompute every other wrong entry in row
    ``r`` and column ``c``.  Recomputing an entry costs ``m`` and is charged
    to the Grover streams.  With ``audit=True`` the result is compared with
    the classical product.
    """
    domain = A.domain
    n_rows, n_cols, m = A.rows, B.cols, A.cols
    truth = matmul_entries(A.entries, B.entries, domain)  # predicate values for the simulator
    C = np.zeros((n_rows, n_cols), dtype=domain.dtype)
    ledgers = {"find_wrong": QueryLedger(), "grover_rows": QueryLedger(), "grover_cols": QueryLedger()}
    parallel = 0
    positions = []
    rng = as_generator(derive_seed(seed, 0xB8B7))
    limit = n_rows * n_cols + 1 if max_iterations is None else max_iterations
    for it in range(limit + 1):
        res = find_wrong_entry(A, B, DomainMatrix(C, domain), seed=derive_seed(seed, it),
                               reps=reps, schedule=schedule)
        ledgers["find_wrong"] += res.ledger
        parallel += res.parallel_time
        if res.equal or it == limit:
            break
        r, c = res.position
        positions.append((r, c))
        C[r - 1, c - 1] = truth[r - 1, c - 1]
        ledgers["grover_rows"].charge_classical(m, m, 0, m)
        for j in _line_search(C[r - 1] != truth[r - 1], m, rng, params, ledgers["grover_rows"]):
            C[r - 1, j - 1] = truth[r - 1, j - 1]
            ledgers["grover_rows"].charge_classical(m, m, 0, m)
        for i in _line_search(C[:, c - 1] != truth[:, c - 1], m, rng, params, ledgers["grover_cols"]):
            C[i - 1, c - 1] = truth[i - 1, c - 1]
            ledgers["grover_cols"].charge_classical(m, m, 0, m)
    result = DomainMatrix(C, domain)
    audit_ok = (result == mat_mul(A, B)) if audit else None
    return MultiplyReport(result, len(positions), positions, ledgers, parallel, audit_ok)


def product_wrong_set(A: DomainMatrix, B: DomainMatrix) -> WrongSet:
    """Wrong set of the all-zero guess, i.e. the support of ``AB``."""
    P = mat_mul(A, B)
    rows, cols = np.nonzero(P.entries != 0)
    return WrongSet(P.rows, frozenset(zip((rows + 1).tolist(), (cols + 1).tolist())), P.cols)


def boolean_product(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    return (A.astype(np.int64) @ B.astype(np.int64)) > 0


@dataclass
class BoolVerifyResult:
    verdict: str
    position: tuple[int, int] | None
    oracle_calls: int
    time_units: float


def expected_empty_search_calls(N: int, params: BBHTParams = BBHTParams()) -> float:
    """Expected oracle calls of a BBHT search that has no solution to find."""
    cap = params.cap(N)
    per_sweep = 0.0
    phase = 1.0
    while True:
        per_sweep += (math.ceil(phase) - 1) / 2 + 1
        if phase >= cap:
            break
        phase = min(phase * params.growth, cap)
    return params.rounds(N) * per_sweep


def boolean_verify_cost(n: int, m: int, params: BBHTParams = BBHTParams()) -> float:
    """Expected modeled time to certify ``AB = C`` for n x n Boolean matrices.

    The outer search over ``n^2`` cells costs ``sqrt(m)`` per oracle call,
    the cost of the inner Or of ``m`` products.
    """
    return expected_empty_search_calls(n * n, params) * math.sqrt(m)


def boolean_verify(A, B, C, seed=None, params: BBHTParams = BBHTParams()) -> BoolVerifyResult:
    """Search the ``n^2`` cells for ``C_ij != Or_k (A_ik And B_kj)``."""
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    C = np.asarray(C, dtype=bool)
    wrong = (boolean_product(A, B) != C).ravel()
    m = A.shape[1]
    res = bbht_search(SearchProblem.from_mask(wrong), seed, params)
    time_units = res.oracle_calls * math.sqrt(m)
    if res.found is None:
        return BoolVerifyResult("equal", None, res.oracle_calls, time_units)
    pos = divmod(res.found - 1, C.shape[1])
    return BoolVerifyResult("not_equal", (pos[0] + 1, pos[1] + 1), res.oracle_calls, time_units)


@dataclass
class BoolMultiplyReport:
    C: np.ndarray
    ones_found: int
    oracle_calls: int
    time_units: float


def boolean_multiply(A, B, seed=None, params: BBHTParams = BBHTParams()) -> BoolMultiplyReport:
    """Start from ``C = 0`` and flip every cell Grover search reports as wrong."""
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    truth = boolean_product(A, B)
    m = A.shape[1]
    res = find_all_in_line(SearchProblem.from_mask(truth.ravel()), seed, params)
    C = np.zeros_like(truth)
    for idx in res.solutions:
        C.flat[idx - 1] = True
    return BoolMultiplyReport(C, len(res.solutions), res.oracle_calls, res.oracle_calls * math.sqrt(m))
