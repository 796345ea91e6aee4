import numpy as np
import pytest

from qmv.algebra import DomainMatrix, DomainSpec, generate_instance, mat_mul, sparse_product_instance
from qmv.multiply import (PARALLEL_MAX, SEQUENTIAL_SUM, boolean_multiply, boolean_product,
                          boolean_verify, boolean_verify_cost, default_reps, expected_empty_search_calls,
                          find_wrong_entry, matrix_multiplication, product_wrong_set)


def test_find_wrong_entry_example():
    d = DomainSpec.gf(7)
    A, B, C, _ = generate_instance(4, 4, "none", d, seed=0)
    C = C.with_entry(3, 2, C[3, 2] + 1)
    res = find_wrong_entry(A, B, C, seed=1)
    assert res.position == (3, 2)
    assert res.trace[0].chosen == (2, 1)
    assert res.parallel_time <= res.ledger.time_units


def test_find_wrong_entry_on_correct_product():
    A, B, C, _ = generate_instance(5, 5, "none", DomainSpec.gf(3), seed=2)
    res = find_wrong_entry(A, B, C, seed=0)
    assert res.equal and res.position is None


@pytest.mark.parametrize("shape", [(1, 1), (1, 5), (5, 1), (3, 7)])
def test_find_wrong_entry_odd_shapes(shape):
    d = DomainSpec.gf(5)
    n, c = shape
    rng = np.random.default_rng(n * c)
    A = DomainMatrix(rng.integers(0, 5, (n, 3)), d)
    B = DomainMatrix(rng.integers(0, 5, (3, c)), d)
    C = mat_mul(A, B).with_entry(n, c, mat_mul(A, B)[n, c] + 2)
    assert find_wrong_entry(A, B, C, seed=3).position == (n, c)


def test_find_wrong_entry_returns_a_wrong_cell():
    d = DomainSpec.gf(7)
    for seed in range(10):
        A, B, C, W = generate_instance(8, 4, "random:3", d, seed)
        res = find_wrong_entry(A, B, C, seed=seed)
        assert res.position in W.cells


def test_default_reps():
    assert default_reps(8) == 6 and default_reps(1) == 4


@pytest.mark.parametrize("domain", [DomainSpec.gf(5), DomainSpec.integers()])
def test_matrix_multiplication_exact(domain):
    for seed in range(4):
        A, B = sparse_product_instance(8, 4, [(1, 1), (1, 6), (5, 3), (8, 8)], domain, seed)
        rep = matrix_multiplication(A, B, seed=seed, audit=True)
        assert rep.audit_ok and rep.C == mat_mul(A, B)
        assert rep.iterations <= product_wrong_set(A, B).w_prime
        assert rep.total_time(PARALLEL_MAX) <= rep.total_time(SEQUENTIAL_SUM)


def test_zero_product_needs_no_iterations():
    d = DomainSpec.gf(3)
    rep = matrix_multiplication(DomainMatrix.zeros(4, 2, d), DomainMatrix.zeros(2, 4, d), audit=True)
    assert rep.iterations == 0 and rep.audit_ok
    assert rep.ledgers["grover_rows"].time_units == 0
    with pytest.raises(ValueError):
        rep.total_time("fastest")


def test_summary_is_json_friendly():
    A, B = sparse_product_instance(4, 4, [(2, 2)], DomainSpec.gf(5), 0)
    s = matrix_multiplication(A, B, seed=0).summary()
    assert s["iterations"] == 1 and s["positions"] == [[2, 2]]
    assert set(s["ledgers"]) == {"find_wrong", "grover_rows", "grover_cols"}


def test_boolean_product_and_multiply():
    rng = np.random.default_rng(0)
    for seed in range(20):
        A = rng.random((6, 4)) < 0.3
        B = rng.random((4, 6)) < 0.3
        want = (A.astype(int) @ B.astype(int)) > 0
        np.testing.assert_array_equal(boolean_product(A, B), want)
        rep = boolean_multiply(A, B, seed)
        np.testing.assert_array_equal(rep.C, want)
        assert rep.ones_found == want.sum()


def test_boolean_verify():
    A = np.eye(3, dtype=bool)
    B = np.eye(3, dtype=bool)
    assert boolean_verify(A, B, np.eye(3, dtype=bool), 0).verdict == "equal"
    C = np.eye(3, dtype=bool)
    C[0, 2] = True
    res = boolean_verify(A, B, C, 0)
    assert res.verdict == "not_equal" and res.position == (1, 3)


def test_boolean_verify_cost_model():
    assert boolean_verify_cost(4, 9) == pytest.approx(3 * expected_empty_search_calls(16))
    assert boolean_verify_cost(8, 8) > boolean_verify_cost(4, 8)
