"""Reproduction batteries.

Each ``criterion_*`` function runs one check end to end and returns a
``CriterionResult`` plus the table of what it measured.  Suites group them
for the ``suite`` CLI command; the test suite calls the same functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from ._random import derive_seed
from .algebra import (DomainMatrix, DomainSpec, IndexSubset, Pattern, WrongSet, generate_instance, mat_mul,
                      sparse_product_instance)
from .graphs import (JohnsonGraph, ProductGraph, johnson_gap_formula, product_spectrum,
                     spectral_gap_eig)
from .grover import SearchProblem, bbht_search
from .marked_fraction import (check_bound_indep_set, check_bound_small_set, epsilon_exact,
                              good_vector_fraction, marked_mask, revealing_prob_exact)
from .multiply import (boolean_multiply, boolean_product, matrix_multiplication,
                       product_wrong_set)
from .szegedy import (WalkSpace, dense_walk_probabilities, hadamard_test_literal,
                      hadamard_test_prob, restricted_matrix_check, uniform_edge_state,
                      walk_probabilities, walk_step)
from .verify import VerificationProblem, product_verification, verify_once


@dataclass
class ResultTable:
    name: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    footer: dict = field(default_factory=dict)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    gating: bool = True

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.gating:
            status = "INFO"
        return f"[{status}] criterion {self.number:2d}: {self.title} -- {self.detail}"


def _binomial_floor(p: float, trials: int, sigmas: float = 3.0) -> float:
    return p - sigmas * math.sqrt(p * (1 - p) / trials)


# --- criterion 1: one-sided error ------------------------------------------

def criterion_one_sided(instances: int = 50, seed: int = 1):
    table = ResultTable("one_sided", ["domain", "n", "instance", "verdict", "calls", "max_prob"])
    ok = True
    worst = 0.0
    for domain in (DomainSpec.gf(2), DomainSpec.gf(7), DomainSpec.integers()):
        for n in (4, 6):
            for t in range(instances):
                s = derive_seed(seed, n, t, domain.sample_size)
                A, B, C, _ = generate_instance(n, n, "none", domain, s)
                out = product_verification(A, B, C, seed=s, mode="exact", simulate_unmarked=True)
                top = max(abs(p) for p in out.probs)
                worst = max(worst, top)
                ok &= out.verdict == "equal" and top <= 1e-12
                table.rows.append([str(domain), n, t, out.verdict, out.calls, f"{top:.3e}"])
    return CriterionResult(1, "one-sided error", ok,
                           f"{len(table.rows)} correct products, max internal prob {worst:.2e}"), table


# --- criterion 2: detection probability ------------------------------------

DETECT_PATTERNS = ("single", "row", "independent:2", "rectangle:2x2")


def criterion_detection(runs: int = 300, n: int = 6, seed: int = 2):
    domain = DomainSpec.gf(7)
    floor = _binomial_floor(2 / 3, runs)
    table = ResultTable("detection", ["pattern", "runs", "detected", "rate", "floor", "mean_terminating_k"])
    ok = True
    for pi, pattern in enumerate(DETECT_PATTERNS):
        hits = 0
        ks = []
        for r in range(runs):
            s = derive_seed(seed, pi, r)
            A, B, C, _ = generate_instance(n, n, pattern, domain, s)
            out = product_verification(A, B, C, seed=derive_seed(s, 1), mode="sample")
            hits += out.detected
            if out.terminating_k:
                ks.append(out.terminating_k)
        rate = hits / runs
        ok &= rate >= floor
        table.rows.append([pattern, runs, hits, f"{rate:.4f}", f"{floor:.4f}",
                           f"{np.mean(ks):.3f}" if ks else ""])
    rates = ", ".join(f"{row[0]}={row[3]}" for row in table.rows)
    return CriterionResult(2, "detection probability >= 2/3", ok, f"{rates} (floor {floor:.3f})"), table


# --- criteria 3, 4: spectra -------------------------------------------------

def criterion_johnson_gap(n_max: int = 12, tol: float = 1e-9):
    table = ResultTable("johnson_gap", ["n", "k", "formula_gap", "eig_gap", "abs_err"])
    worst = 0.0
    for n in range(2, n_max + 1):
        for k in range(1, n // 2 + 1):
            f = johnson_gap_formula(n, k)
            e = spectral_gap_eig(JohnsonGraph(n, k)).gap
            worst = max(worst, abs(f - e))
            table.rows.append([n, k, f"{f:.15f}", f"{e:.15f}", f"{abs(f - e):.3e}"])
    return CriterionResult(3, "Johnson gap formula", worst <= tol,
                           f"{len(table.rows)} graphs, max |err| {worst:.2e} (tol {tol:g})"), table


def product_gap_exception(n: int, k: int) -> float | None:
    """Product gap where it differs from ``min`` of the factor gaps.

    ``J(4,2)`` has normalized-adjacency eigenvalue -1/2, squaring to 1/4 above
    its second eigenvalue 0.  ``J(n,1) = K_n`` has second eigenvalue
    ``-1/(n-1)`` below ``1/(n-1)^2``.
    """
    if (n, k) == (4, 2):
        return 0.75
    if k == 1:
        return 1.0 - 1.0 / (n - 1) ** 2
    return None


def criterion_product_spectrum(max_vertices: int = 1000, tol: float = 1e-8):
    table = ResultTable("product_spectrum",
                        ["n", "k", "direct_gap", "pairwise_gap", "max_spectrum_err", "min_factor_gap", "relation"])
    ok = True
    notes = []
    for n in range(3, 32):
        for k in range(1, n // 2 + 1):
            if math.comb(n, k) ** 2 > max_vertices:
                continue
            G = JohnsonGraph(n, k)
            pair = product_spectrum(G, G)
            direct = spectral_gap_eig(ProductGraph(G, G), cap=max_vertices)
            err = float(np.max(np.abs(pair.eigenvalues - direct.eigenvalues)))
            ok &= err <= tol
            delta = johnson_gap_formula(n, k)
            exception = product_gap_exception(n, k)
            if exception is not None:
                relation = "exception"
                good = abs(pair.gap - exception) <= tol
                notes.append(f"J({n},{k})^2={pair.gap:.4f}")
            else:
                relation = "min"
                good = abs(pair.gap - delta) <= tol
            ok &= good
            table.rows.append([n, k, f"{direct.gap:.12f}", f"{pair.gap:.12f}", f"{err:.2e}",
                               f"{delta:.12f}", relation])
    return CriterionResult(4, "product spectrum identity", ok,
                           f"{len(table.rows)} products, {len(notes)} where gap != min factor gap "
                           f"(all k=1 plus J(4,2))"), table


# --- criterion 5: single-entry epsilon -------------------------------------

def criterion_single_entry(n_max: int = 8):
    checked = 0
    ok = True
    for n in range(1, n_max + 1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                W = WrongSet(n, frozenset({(i, j)}))
                for r in range(1, n + 1):
                    for s in range(1, n + 1):
                        ok &= epsilon_exact(W, r, s).exact == Fraction(r * s, n * n)
                        checked += 1
    table = ResultTable("single_entry", ["n_max", "cases"], [[n_max, checked]])
    return CriterionResult(5, "single-entry epsilon = rs/n^2", ok, f"{checked} exact rational cases"), table


# --- criteria 6, 7: marked-fraction lemmas ---------------------------------

def small_set_fixtures(seed: int = 6, per_n: int = 30):
    """Wrong sets for n <= 8: singletons, rows, rectangles, independent and random sets."""
    rng = np.random.default_rng(seed)
    out = []
    for n in range(2, 9):
        out.append(WrongSet(n, frozenset({(1, 1)})))
        out.append(WrongSet(n, frozenset((1, j) for j in range(1, n + 1))))
        out.append(WrongSet(n, frozenset((i, j) for i in (1, 2) for j in (1, 2))))
        for _ in range(per_n):
            t = int(rng.integers(1, n + 1))
            flat = rng.choice(n * n, t, replace=False)
            out.append(WrongSet(n, frozenset((int(f // n) + 1, int(f % n) + 1) for f in flat)))
    return out


def criterion_small_set(seed: int = 6):
    table = ResultTable("small_set", ["n", "size", "w_rows", "row_max", "r", "s", "epsilon", "rhs", "pass"])
    fails = 0
    for W in small_set_fixtures(seed):
        for r in range(1, W.n + 1):
            for s in range(1, W.n + 1):
                c = check_bound_small_set(W, r, s)
                if not c.applicable:
                    continue
                fails += not c.passed
                table.rows.append([W.n, len(W), W.w_rows, W.row_max, r, s, f"{c.lhs:.6f}",
                                   f"{c.rhs:.6f}", int(c.passed)])
    n_fix = len(table.rows)
    return CriterionResult(6, "small-set bound (alpha^2 |W| rs/n^2)", fails == 0 and n_fix >= 200,
                           f"{n_fix} applicable fixtures, {fails} failures"), table


def criterion_indep_set(seed: int = 7, draws: int = 4):
    rng = np.random.default_rng(seed)
    table = ResultTable("indep_set", ["n", "size", "r", "s", "regime", "epsilon", "rhs", "pass"])
    fails = 0
    for n in (4, 9):
        for t in range(1, n + 1):
            for _ in range(draws):
                rows = rng.choice(n, t, replace=False) + 1
                cols = rng.choice(n, t, replace=False) + 1
                W = WrongSet(n, frozenset(zip(rows.tolist(), cols.tolist())))
                for r in range(1, n + 1):
                    for s in range(1, n + 1):
                        c = check_bound_indep_set(W, r, s)
                        if not c.applicable:
                            continue
                        fails += not c.passed
                        table.rows.append([n, t, r, s, c.regime, f"{c.lhs:.6f}", f"{c.rhs:.6f}", int(c.passed)])
    return CriterionResult(7, "independent-set bound", fails == 0 and len(table.rows) > 0,
                           f"{len(table.rows)} applicable fixtures, {fails} failures"), table


# --- criteria 8, 9: revealing pairs ----------------------------------------

def _instance_with_difference(D: np.ndarray, domain: DomainSpec, seed: int):
    """Random ``A``, ``B`` and ``C = AB - D``."""
    n = D.shape[0]
    rng = np.random.default_rng(seed)
    A = DomainMatrix(domain.random_elements(rng, (n, n)), domain)
    B = DomainMatrix(domain.random_elements(rng, (n, n)), domain)
    C = DomainMatrix(domain.reduce(mat_mul(A, B).entries - D), domain)
    return A, B, C


def revealing_fixtures(g: int, n: int, seed: int, random_count: int = 3):
    """Difference matrices over GF(g): each single entry, plus random nonzero ones."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        for j in range(n):
            D = np.zeros((n, n), dtype=np.int64)
            D[i, j] = 1 + (i + j) % (g - 1)
            out.append(("single", D))
    for _ in range(random_count):
        D = rng.integers(0, g, size=(n, n))
        if not D.any():
            D[0, 0] = 1
        out.append(("random", D))
    return out


def criterion_int_dom(seed: int = 8):
    table = ResultTable("int_dom", ["g", "n", "kind", "R", "S", "probability", "bound", "pass"])
    fails = 0
    equality_seen = equality_missed = 0
    for g in (2, 3):
        domain = DomainSpec.gf(g)
        bound = Fraction(g - 1, g) ** 2
        for n in (1, 2, 3):
            for fi, (kind, D) in enumerate(revealing_fixtures(g, n, seed + n)):
                A, B, C = _instance_with_difference(D, domain, seed + fi)
                for k in range(1, min(2, n) + 1):
                    for R in combinations(range(1, n + 1), k):
                        for S in combinations(range(1, n + 1), k):
                            sub = D[np.ix_([i - 1 for i in R], [j - 1 for j in S])]
                            if not sub.any():
                                continue
                            res = revealing_prob_exact(A, B, C, IndexSubset(n, R), IndexSubset(n, S))
                            good = res.marked and res.value >= bound
                            fails += not good
                            if g == 2 and kind == "single":
                                if res.value == bound:
                                    equality_seen += 1
                                else:
                                    equality_missed += 1
                            table.rows.append([g, n, kind, " ".join(map(str, R)), " ".join(map(str, S)),
                                               str(res.value), str(bound), int(good)])
    ok = fails == 0 and equality_missed == 0 and equality_seen > 0
    return CriterionResult(8, "revealing probability >= (1-1/g)^2", ok,
                           f"{len(table.rows)} marked pairs, {fails} failures, "
                           f"g=2 single-entry equality {equality_seen}/{equality_seen + equality_missed}"), table


def criterion_good_vectors(seed: int = 9):
    domain = DomainSpec.gf(2)
    table = ResultTable("good_vectors", ["n", "k", "pattern", "fraction", "mean_revealing_share", "pass"])
    fails = 0
    for n in (3, 4):
        patterns = ["single", "row", "independent:2", "rectangle:2x2", f"random:{n}", "random:2"]
        for k in (1, 2):
            for pi, pattern in enumerate(patterns):
                A, B, C, W = generate_instance(n, n, pattern, domain, derive_seed(seed, n, k, pi))
                res = good_vector_fraction(A, B, C, k)
                good = res.fraction > Fraction(1, 8) and res.mean_revealing_share >= Fraction(1, 4)
                fails += not good
                table.rows.append([n, k, pattern, str(res.fraction), str(res.mean_revealing_share), int(good)])
    return CriterionResult(9, "good vectors: Pr[zeta >= eps/8] > 1/8", fails == 0,
                           f"{len(table.rows)} fixtures, {fails} failures"), table


# --- criteria 10-14: walk ---------------------------------------------------

def criterion_hadamard(pairs: int = 100, seed: int = 10, tol: float = 1e-12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    table = ResultTable("hadamard", ["pair", "dim", "formula", "literal", "abs_err"])
    for t in range(pairs):
        d = int(rng.integers(2, 64))
        phi = rng.normal(size=d)
        psi = rng.normal(size=d)
        phi /= np.linalg.norm(phi)
        psi /= np.linalg.norm(psi)
        a, b = hadamard_test_prob(phi, psi), hadamard_test_literal(phi, psi)
        worst = max(worst, abs(a - b))
        table.rows.append([t, d, f"{a:.15f}", f"{b:.15f}", f"{abs(a - b):.2e}"])
    return CriterionResult(10, "Hadamard test formula", worst <= tol,
                           f"{pairs} pairs, max |err| {worst:.2e} (tol {tol:g})"), table


def criterion_fixed_point(tol: float = 1e-12):
    table = ResultTable("fixed_point", ["n", "k", "vertices", "norm_diff"])
    worst = 0.0
    for n, k in ((4, 2), (5, 2), (6, 2), (6, 3)):
        space = WalkSpace.johnson(n, k)
        phi = uniform_edge_state(space)
        diff = float(np.linalg.norm(walk_step(phi).amplitudes - phi.amplitudes))
        worst = max(worst, diff)
        table.rows.append([n, k, space.size, f"{diff:.3e}"])
    return CriterionResult(11, "diffusion fixes the uniform state", worst <= tol,
                           f"max ||U phi - phi|| = {worst:.2e} (tol {tol:g})"), table


def restricted_fixtures(seed: int = 12):
    """Marked sets on product spaces with at most 900 vertices."""
    rng = np.random.default_rng(seed)
    out = []
    for n, k in ((4, 1), (4, 2), (5, 1), (5, 2), (6, 2), (6, 3), (7, 2)):
        space = WalkSpace.johnson(n, k)
        for count in (1, 2, 5, space.size // 10, space.size // 3):
            marked = np.zeros(space.size, dtype=bool)
            marked[rng.choice(space.size, max(count, 1), replace=False)] = True
            out.append((f"J({n},{k})^2 random:{max(count, 1)}", space, marked))
        for pattern in ("single", "row", "rectangle:2x2"):
            cells = Pattern.parse(pattern).cells(n, n, rng)
            out.append((f"J({n},{k})^2 {pattern}", space, marked_mask(WrongSet(n, cells), k)))
    return out


def criterion_restricted(seed: int = 12, tol: float = 1e-9):
    table = ResultTable("restricted", ["fixture", "vertices", "epsilon", "gap", "lambda_PM", "bound", "pass"])
    fails = 0
    for name, space, marked in restricted_fixtures(seed):
        res = restricted_matrix_check(space, marked)
        good = res.lambda_pm <= res.bound + tol
        fails += not good
        table.rows.append([name, space.size, f"{res.epsilon:.6f}", f"{res.gap:.6f}",
                           f"{res.lambda_pm:.12f}", f"{res.bound:.12f}", int(good)])
    ok = fails == 0 and len(table.rows) >= 50
    return CriterionResult(12, "lambda(P_M) <= 1 - gap*eps/2", ok,
                           f"{len(table.rows)} marked sets, {fails} failures"), table


def ledger_closed_form(n_rows: int, m: int, k: int, ell: int) -> dict:
    """Charges of one Verify Once call with ``ell`` walk iterations."""
    return {"queries_A": 2 * m * ell, "queries_B": 2 * m * ell, "queries_C": 4 * k * ell,
            "time_units": 2 * k * m + k * k + ell * (4 * m + 4 * k) + ell * m}


def criterion_ledger(seed: int = 13):
    table = ResultTable("ledger", ["n", "m", "k", "ell", "queries_A", "queries_B", "queries_C", "time_units", "pass"])
    ok = True
    domain = DomainSpec.gf(5)
    for n in (3, 4, 5, 6):
        for m in sorted({n, 2 * n}):
            A, B, C, _ = generate_instance(n, m, "single", domain, derive_seed(seed, n, m))
            problem = VerificationProblem(A, B, C)
            for k in range(1, n):
                for rep in range(4):
                    call = verify_once(problem, k=k, seed=derive_seed(seed, n, m, k, rep))
                    want = ledger_closed_form(n, m, k, call.ell)
                    got = call.ledger.as_dict()
                    good = all(got[key] == val for key, val in want.items())
                    ok &= good
                    table.rows.append([n, m, k, call.ell, got["queries_A"], got["queries_B"],
                                       got["queries_C"], got["time_units"], int(good)])
    return CriterionResult(13, "query ledger closed forms", ok, f"{len(table.rows)} calls exact"), table


def criterion_oracle_equivalence(seed: int = 14, sets: int = 20, lmax: int = 12, tol: float = 1e-10):
    rng = np.random.default_rng(seed)
    spaces = [WalkSpace.johnson(n, k) for n, k in ((3, 1), (4, 1), (5, 1), (6, 1), (4, 2))]
    table = ResultTable("oracle", ["space", "marked", "max_abs_err"])
    worst = 0.0
    for t in range(sets):
        space = spaces[t % len(spaces)]
        marked = rng.random(space.size) < rng.uniform(0.02, 0.5)
        err = float(np.max(np.abs(walk_probabilities(space, marked, lmax)
                                  - dense_walk_probabilities(space, marked, lmax))))
        worst = max(worst, err)
        table.rows.append([repr(space), int(marked.sum()), f"{err:.2e}"])
    return CriterionResult(14, "edge simulator == dense oracle", worst <= tol,
                           f"{sets} marked sets, max |err| {worst:.2e} (tol {tol:g})"), table


# --- criterion 15: BBHT -------------------------------------------------------

def criterion_bbht(runs: int = 10_000, seed: int = 15):
    table = ResultTable("bbht", ["N", "t", "runs", "success_rate", "mean_calls", "sqrt_N_over_t", "limit"])
    ok = True
    xs, ys = [], []
    for N in (16, 64, 256):
        for t in (1, 2, 4):
            rng = np.random.default_rng(derive_seed(seed, N, t))
            mask = np.zeros(N, dtype=bool)
            mask[rng.choice(N, t, replace=False)] = True
            problem = SearchProblem.from_mask(mask)
            results = [bbht_search(problem, rng) for _ in range(runs)]
            success = sum(r.found is not None and mask[r.found - 1] for r in results) / runs
            mean_calls = float(np.mean([r.oracle_calls for r in results]))
            x = math.sqrt(N / t)
            ok &= success == 1.0 and mean_calls <= 9 * x
            xs.append(x)
            ys.append(mean_calls)
            table.rows.append([N, t, runs, f"{success:.4f}", f"{mean_calls:.3f}", f"{x:.3f}", f"{9 * x:.3f}"])
    corr = float(np.corrcoef(xs, ys)[0, 1])
    slope = float(np.polyfit(xs, ys, 1)[0])
    ok &= corr >= 0.99 and 1 <= slope <= 9
    table.footer = {"correlation": round(corr, 6), "slope": round(slope, 4)}
    return CriterionResult(15, "BBHT success and O(sqrt(N/t)) calls", ok,
                           f"corr {corr:.4f}, slope {slope:.3f}"), table


# --- criterion 16: matrix multiplication ------------------------------------

def multiply_fixture(n: int, m: int, w: int, domain: DomainSpec, seed: int):
    rng = np.random.default_rng(seed)
    while True:
        flat = rng.choice(n * n, w, replace=False)
        cells = [(int(f // n) + 1, int(f % n) + 1) for f in flat]
        if len({i for i, _ in cells}) <= m:
            return sparse_product_instance(n, m, cells, domain, rng)


def criterion_multiply(runs: int = 500, seed: int = 16):
    domain = DomainSpec.gf(5)
    grid = [(n, m) for n in (4, 8, 16) for m in (4, 8)]
    table = ResultTable("multiply", ["run", "n", "m", "w", "w_prime", "iterations", "audit_ok",
                                     "sequential_sum", "parallel_max"])
    failures = bound_violations = 0
    for r in range(runs):
        n, m = grid[r % len(grid)]
        w = 1 + r % 5
        s = derive_seed(seed, r)
        A, B = multiply_fixture(n, m, w, domain, s)
        W = product_wrong_set(A, B)
        rep = matrix_multiplication(A, B, seed=s, audit=True)
        failures += not rep.audit_ok
        if rep.audit_ok and rep.iterations > W.w_prime:
            bound_violations += 1
        table.rows.append([r, n, m, len(W), W.w_prime, rep.iterations, int(rep.audit_ok),
                           rep.total_time("sequential_sum"), rep.total_time("parallel_max")])
    rate = 1 - failures / runs
    ok = rate >= 0.98 and bound_violations == 0
    return CriterionResult(16, "matrix multiplication exact w.h.p.", ok,
                           f"{runs} runs, success {rate:.4f}, iteration-bound violations {bound_violations}"), table


# --- criterion 17: Boolean product ------------------------------------------

def boolean_fixture(n: int, m: int, t: int, rng):
    """Boolean ``A``, ``B`` whose product has exactly ``t`` ones."""
    while True:
        flat = rng.choice(n * n, t, replace=False)
        cells = [(int(f // n), int(f % n)) for f in flat]
        rows = sorted({i for i, _ in cells})
        if len(rows) <= m:
            break
    A = np.zeros((n, m), dtype=bool)
    B = np.zeros((m, n), dtype=bool)
    for slot, r in enumerate(rows):
        A[r, slot] = True
        for i, j in cells:
            if i == r:
                B[slot, j] = True
    perm = rng.permutation(m)
    return A[:, perm], B[perm, :]


def criterion_boolean(runs: int = 200, seed: int = 17, cost_runs: int = 200):
    rng = np.random.default_rng(seed)
    table = ResultTable("boolean", ["t", "runs", "mean_time_units"])
    wrong = 0
    for r in range(runs):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, 9))
        A = rng.random((n, m)) < 0.2
        B = rng.random((m, n)) < 0.2
        rep = boolean_multiply(A, B, derive_seed(seed, r))
        wrong += not np.array_equal(rep.C, boolean_product(A, B))
    xs, ys = [], []
    for t in (1, 4, 16):
        costs = []
        for r in range(cost_runs):
            A, B = boolean_fixture(8, 8, t, rng)
            costs.append(boolean_multiply(A, B, derive_seed(seed, t, r)).time_units)
        xs.append(math.sqrt(t))
        ys.append(float(np.mean(costs)))
        table.rows.append([t, cost_runs, f"{ys[-1]:.3f}"])
    slope = float(np.polyfit(xs, ys, 1)[0])
    corr = float(np.corrcoef(xs, ys)[0, 1])
    table.footer = {"incorrect": wrong, "slope": round(slope, 4), "correlation": round(corr, 6)}
    ok = wrong == 0 and slope > 0 and corr >= 0.95
    return CriterionResult(17, "Boolean product exact, cost ~ sqrt(t)", ok,
                           f"{runs} runs, {wrong} incorrect; slope {slope:.2f}, corr {corr:.4f}"), table


# --- criterion 18: scaling report (non-gating) -------------------------------

def criterion_scaling(runs: int = 60, seed: int = 18):
    """Terminating ``k`` of Product Verification for small and large ``q(W)``."""
    domain = DomainSpec.gf(7)
    table = ResultTable("scaling", ["n", "pattern", "q_W", "runs", "detect_rate", "mean_terminating_k",
                                    "n^(2/3)/q^(1/3)"])
    for n in (6, 7, 8, 9):
        t = math.isqrt(n)
        for pattern in ("single", f"independent:{t}"):
            ks = []
            hits = 0
            q = 0.0
            for r in range(runs):
                s = derive_seed(seed, n, r, len(pattern))
                A, B, C, W = generate_instance(n, n, pattern, domain, s)
                q = W.q
                out = product_verification(A, B, C, seed=derive_seed(s, 1))
                hits += out.detected
                if out.terminating_k:
                    ks.append(out.terminating_k)
            table.rows.append([n, pattern, f"{q:.3f}", runs, f"{hits / runs:.3f}",
                               f"{np.mean(ks):.3f}" if ks else "", f"{n ** (2 / 3) / q ** (1 / 3):.3f}"])
    return CriterionResult(18, "scaling report (terminating k vs q(W))", True,
                           f"{len(table.rows)} rows emitted", gating=False), table


SUITES = {
    "gaps": (criterion_johnson_gap, criterion_product_spectrum),
    "fractions": (criterion_single_entry,),
    "lemma-checks": (criterion_small_set, criterion_indep_set, criterion_int_dom, criterion_good_vectors,
                     criterion_hadamard, criterion_fixed_point, criterion_restricted,
                     criterion_oracle_equivalence),
    "verify-detect": (criterion_one_sided, criterion_detection, criterion_ledger, criterion_scaling),
    "multiply-scaling": (criterion_multiply,),
    "bool": (criterion_bbht, criterion_boolean),
}


def run_suite(name: str, quick: bool = False):
    """Run a named battery; returns ``(criteria, tables)``."""
    if name not in SUITES:
        raise KeyError(name)
    quick_args = {criterion_detection: {"runs": 60}, criterion_multiply: {"runs": 36},
                  criterion_bbht: {"runs": 1000}, criterion_boolean: {"runs": 40, "cost_runs": 60},
                  criterion_one_sided: {"instances": 5}, criterion_scaling: {"runs": 10}}
    criteria, tables = [], []
    for fn in SUITES[name]:
        c, t = fn(**(quick_args.get(fn, {}) if quick else {}))
        criteria.append(c)
        tables.append(t)
    return criteria, tables
