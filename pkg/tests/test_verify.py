import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qmv.algebra import DomainMatrix, DomainSpec, generate_instance
from qmv.marked_fraction import marked_mask
from qmv.suites import ledger_closed_form
from qmv.szegedy import WalkSpace, walk_probabilities
from qmv.verify import (DEFAULT_SCHEDULE, EQUAL, NOT_EQUAL, QueryLedger, VerificationProblem,
                        VerifySchedule, freivalds, product_verification, verification_calls,
                        verify_full, verify_once, verify_once_fixed)


def test_schedule_for_n6():
    s = DEFAULT_SCHEDULE
    assert s.lam == Fraction(15, 14) and s.reps == 16
    assert s.i_max(6) == 27
    assert s.walk_calls(6) == 448
    ks = s.ks(6)
    assert ks[0] == 2 and max(ks) == 5 and ks == sorted(ks)
    # ceil(2 * (15/14)^i) computed exactly
    assert s.k(10, 100) == math.ceil(2 * Fraction(15, 14) ** 10)


def test_schedule_rejects_bad_lambda():
    with pytest.raises(ValueError):
        VerifySchedule(lam=Fraction(8, 7))


def test_ledger_init_and_iteration_charges():
    led = QueryLedger()
    led.charge_init(3, 10)
    assert led.time_units == 2 * 3 * 10 + 9
    led.charge_iteration(3, 10)
    assert (led.queries_A, led.queries_B, led.queries_C) == (20, 20, 12)
    assert led.time_units == 69 + 4 * 10 + 4 * 3 + 10
    total = led.copy()
    total += led
    assert total.queries_C == 24 and led.queries_C == 12


@pytest.mark.parametrize("n,m", [(3, 3), (4, 8), (6, 6)])
def test_verify_once_ledger_closed_form(n, m):
    A, B, C, _ = generate_instance(n, m, "single", DomainSpec.gf(5), seed=n * m)
    problem = VerificationProblem(A, B, C)
    for k in range(1, n):
        for seed in range(5):
            call = verify_once(problem, k=k, seed=seed)
            assert 1 <= call.ell <= k
            want = ledger_closed_form(n, m, k, call.ell)
            assert {key: call.ledger.as_dict()[key] for key in want} == want


def test_verify_full_charges_k_m_per_flip():
    A, B, C, _ = generate_instance(4, 4, "single", DomainSpec.gf(5), seed=0)
    call = verify_full(A, B, C, k=2, seed=3)
    assert call.ledger.flip_time == call.ell * 2 * 4


def test_freivalds_ledger():
    led = QueryLedger()
    led.charge_freivalds(3, 4, 5)
    assert (led.queries_A, led.queries_B, led.queries_C, led.time_units) == (12, 20, 15, 32 + 15)


def test_k_out_of_range():
    A, B, C, _ = generate_instance(4, 4, "none", DomainSpec.gf(3), seed=0)
    with pytest.raises(ValueError):
        verify_once(A, B, C, k=4, seed=0)


@pytest.mark.parametrize("domain", [DomainSpec.gf(2), DomainSpec.gf(7), DomainSpec.integers()])
def test_never_rejects_correct_product(domain):
    for seed in range(3):
        A, B, C, _ = generate_instance(4, 5, "none", domain, seed)
        out = product_verification(A, B, C, seed=seed, mode="exact", simulate_unmarked=True)
        assert out.verdict == EQUAL
        assert max(abs(p) for p in out.probs) <= 1e-12
        assert out.calls == DEFAULT_SCHEDULE.walk_calls(4) + DEFAULT_SCHEDULE.fallback_rounds


@pytest.mark.parametrize("pattern", ["single", "row", "independent:2", "rectangle:2x2"])
def test_detects_wrong_products(pattern):
    hits = 0
    for seed in range(40):
        A, B, C, _ = generate_instance(6, 6, pattern, DomainSpec.gf(7), seed)
        hits += product_verification(A, B, C, seed=seed).detected
    assert hits >= 30


def test_rectangular_and_integer_instances():
    A, B, C, _ = generate_instance(4, 7, "single", DomainSpec.integers(), seed=2)
    assert product_verification(A, B, C, seed=1).verdict == NOT_EQUAL
    d = DomainSpec.gf(5)
    A = DomainMatrix(np.arange(12).reshape(3, 4) % 5, d)
    B = DomainMatrix(np.arange(20).reshape(4, 5) % 5, d)
    C = DomainMatrix((A.entries @ B.entries) % 5, d)
    assert product_verification(A, B, C, seed=0).verdict == EQUAL
    assert product_verification(A, B, C.with_entry(3, 5, C[3, 5] + 1), seed=0).verdict == NOT_EQUAL


def test_determinism_and_transcript():
    A, B, C, _ = generate_instance(5, 5, "row", DomainSpec.gf(3), seed=9)
    a = product_verification(A, B, C, seed=42)
    b = product_verification(A, B, C, seed=42)
    assert a.transcript == b.transcript and a.ledger.as_dict() == b.ledger.as_dict()
    i, k, rep, result, prob = a.transcript[-1]
    assert result == 1 and k == a.terminating_k


def test_calls_are_independent_of_interleaving():
    A, B, C, _ = generate_instance(5, 5, "single", DomainSpec.gf(7), seed=1)
    problem = VerificationProblem(A, B, C)
    first = [(c.ell, c.result) for c in itertools.islice(verification_calls(problem, 7), 40)]
    other = verification_calls(VerificationProblem(A, B, C), 8)
    again = []
    for call in itertools.islice(verification_calls(problem, 7), 40):
        next(other)
        again.append((call.ell, call.result))
    assert first == again


def test_freivalds_baseline():
    A, B, C, _ = generate_instance(5, 5, "none", DomainSpec.gf(2), seed=0)
    assert freivalds(A, B, C, rounds=20, seed=0).verdict == EQUAL
    A, B, C, _ = generate_instance(5, 5, "single", DomainSpec.gf(2), seed=0)
    res = freivalds(A, B, C, rounds=200, seed=0)
    # a single wrong entry over GF(2) survives compression with probability 1/4
    assert res.verdict == NOT_EQUAL and 0.15 < np.mean(res.detections) < 0.35


def _all_vectors(n):
    return [np.array(v) for v in itertools.product(range(2), repeat=n)]


@pytest.mark.parametrize("pattern", ["single", "row", "random:2", "random:3"])
def test_verify_full_dominates_fixed_vectors(pattern):
    """Pointwise for k <= n/2; on average over (p, q) for every k."""
    n = 4
    A, B, C, W = generate_instance(n, n, pattern, DomainSpec.gf(2), seed=3)
    problem = VerificationProblem(A, B, C)
    for k in range(1, n):
        full = walk_probabilities(WalkSpace.johnson(n, k), marked_mask(W, k), k)[1:].mean()
        once = [verify_once_fixed(problem, k, p, q).mean() for p in _all_vectors(n) for q in _all_vectors(n)]
        if 2 * k <= n:
            assert max(once) <= full + 1e-12
        assert np.mean(once) <= full + 1e-12


def test_sixteen_repetitions_compensate():
    """16 Verify Once runs at 2k beat one Verify Full run at k."""
    n = 4
    for pattern in ("single", "row", "independent:2"):
        A, B, C, W = generate_instance(n, n, pattern, DomainSpec.gf(2), seed=1)
        problem = VerificationProblem(A, B, C)
        full = walk_probabilities(WalkSpace.johnson(n, 1), marked_mask(W, 1), 1)[1:].mean()
        once = np.mean([verify_once_fixed(problem, 2, p, q).mean()
                        for p in _all_vectors(n) for q in _all_vectors(n)])
        assert 1 - (1 - once) ** 16 > full
