import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmv.algebra import DomainSpec, IndexSubset, WrongSet, generate_instance
from qmv.marked_fraction import (ALPHA, EnumerationCapError, check_bound_exp_prob,
                                 check_bound_indep_set, check_bound_small_set, epsilon_bruteforce,
                                 epsilon_exact, epsilon_mc, good_vector_fraction, marked_mask,
                                 revealing_mask, revealing_prob_exact, zeta_exact)
from qmv.graphs import subset_unrank


def wrong_sets(max_n=6):
    return st.integers(2, max_n).flatmap(
        lambda n: st.builds(lambda cells: WrongSet(n, frozenset(cells)),
                            st.sets(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=n + 2)))


@settings(max_examples=60, deadline=None)
@given(wrong_sets(), st.data())
def test_epsilon_exact_matches_bruteforce(W, data):
    r = data.draw(st.integers(1, W.n))
    s = data.draw(st.integers(1, W.n))
    assert epsilon_exact(W, r, s).exact == epsilon_bruteforce(W, r, s)


def test_single_entry_examples():
    W = WrongSet(4, frozenset({(2, 3)}))
    assert epsilon_exact(W, 2, 2).exact == Fraction(1, 4)
    assert epsilon_exact(W, 4, 4).exact == 1
    est = epsilon_exact(WrongSet(6, frozenset({(1, 1)})), 2, 3)
    assert (est.numerator, est.denominator) == (1, 6)


def test_empty_wrong_set_has_zero_fraction():
    assert epsilon_exact(WrongSet(5, frozenset()), 2, 2).exact == 0
    assert epsilon_mc(WrongSet(5, frozenset()), 2, 2, 100, seed=0).value == 0


def test_full_row_fraction():
    # a full row is hit iff R contains it: r/n
    W = WrongSet(6, frozenset((3, j) for j in range(1, 7)))
    assert epsilon_exact(W, 2, 1).exact == Fraction(2, 6)


def test_mc_agrees_with_exact_within_interval():
    rng = np.random.default_rng(5)
    for trial in range(6):
        cells = {(int(i), int(j)) for i, j in rng.integers(1, 8, size=(4, 2))}
        W = WrongSet(7, frozenset(cells))
        exact = epsilon_exact(W, 3, 2).value
        est = epsilon_mc(W, 3, 2, 40_000, seed=trial)
        assert abs(est.value - exact) <= est.half_width + 1e-3


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        epsilon_exact(WrongSet(30, frozenset({(1, 1)})), 15, 15)


def test_marked_mask_layout():
    W = WrongSet(4, frozenset({(1, 2)}))
    mask = marked_mask(W, 2)
    for idx in range(mask.size):
        R = subset_unrank(4, 2, idx // 6)
        S = subset_unrank(4, 2, idx % 6)
        assert mask[idx] == (1 in R and 2 in S)
    assert mask.mean() == pytest.approx(epsilon_exact(W, 2, 2).value)


def test_revealing_is_subset_of_marked():
    domain = DomainSpec.gf(3)
    A, B, C, W = generate_instance(4, 4, "random:3", domain, seed=2)
    D = (A.entries @ B.entries - C.entries) % 3
    rng = np.random.default_rng(0)
    for _ in range(20):
        p, q = rng.integers(0, 3, 4), rng.integers(0, 3, 4)
        rev = revealing_mask(D, p, q, domain, 2)
        assert not np.any(rev & ~marked_mask(W, 2))
        assert zeta_exact(A, B, C, p, q, 2).value == pytest.approx(rev.mean())


def test_revealing_over_integers():
    domain = DomainSpec.integers()
    D = np.array([[0, 5], [0, 0]], dtype=object)
    assert revealing_mask(D, [2, 1], [7, 3], domain, 1).tolist() == [False, True, False, False]


def test_revealing_probability_single_entry_gf2_is_quarter():
    domain = DomainSpec.gf(2)
    A, B, C, _ = generate_instance(3, 3, "none", domain, seed=1)
    C = C.with_entry(2, 2, C[2, 2] + 1)
    res = revealing_prob_exact(A, B, C, IndexSubset.of(3, [1, 2]), IndexSubset.of(3, [2]))
    assert res.marked and res.value == Fraction(1, 4)
    unmarked = revealing_prob_exact(A, B, C, IndexSubset.of(3, [1]), IndexSubset.of(3, [1]))
    assert not unmarked.marked and unmarked.value == 0


def test_good_vector_fraction_flags_correct_product():
    A, B, C, _ = generate_instance(3, 3, "none", DomainSpec.gf(2), seed=0)
    assert good_vector_fraction(A, B, C, 1).flag == "no wrong entries"


def test_small_set_applicability():
    W = WrongSet(8, frozenset({(1, 1), (1, 2), (3, 5)}))
    assert check_bound_small_set(W, 4, 4).applicable
    assert not check_bound_small_set(W, 5, 1).applicable
    assert not check_bound_small_set(W, 1, 5).applicable
    c = check_bound_small_set(W, 2, 3)
    assert c.rhs == pytest.approx(ALPHA**2 * 3 * 6 / 64) and c.passed


def test_indep_set_applicability():
    W = WrongSet(9, frozenset({(1, 1), (2, 2), (3, 3), (4, 4)}))
    assert check_bound_indep_set(W, 2, 2).applicable
    # (rs)^3 |W|^2 <= n^4: 6^3 * 16 = 3456 <= 6561, 8^3 * 16 = 8192 > 6561
    assert check_bound_indep_set(W, 2, 3).applicable
    assert not check_bound_indep_set(W, 2, 4).applicable
    assert not check_bound_indep_set(W.with_cell((1, 2)), 1, 1).applicable
    assert check_bound_indep_set(W, 1, 1).regime == "indep-set"


def test_exp_prob_bound():
    res = check_bound_exp_prob(6, 4, 2, 2, samples=300, seed=3)
    assert res.passed and res.mean_epsilon >= res.rhs
    with pytest.raises(ValueError):
        check_bound_exp_prob(4, 5, 2, 2, samples=1)


def test_bounds_hold_exhaustively_for_n4():
    cells = [(i, j) for i in range(1, 5) for j in range(1, 5)]
    for size in (1, 2):
        for sub in itertools.combinations(cells, size):
            W = WrongSet(4, frozenset(sub))
            for r, s in itertools.product(range(1, 5), repeat=2):
                for check in (check_bound_small_set(W, r, s), check_bound_indep_set(W, r, s)):
                    assert check.passed in (None, True)


def assert_markov_reverse(samples, alpha, beta):
    """For X in [0, 1] with E[X] >= alpha: Pr[X >= beta] > alpha - beta."""
    samples = np.asarray(samples, dtype=float)
    assert samples.min() >= 0 and samples.max() <= 1 and samples.mean() >= alpha
    assert np.mean(samples >= beta) > alpha - beta


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=50), st.floats(0.01, 1))
def test_reverse_markov_helper(values, beta_frac):
    alpha = float(np.mean(values))
    assert_markov_reverse(values, alpha, beta_frac * alpha)


def test_revealing_share_reverse_markov_gf2():
    """zeta / eps over all (p, q) has mean >= 1/4, so Pr[zeta >= eps/8] > 1/8."""
    domain = DomainSpec.gf(2)
    vectors = [np.array(v) for v in itertools.product(range(2), repeat=3)]
    for pattern in ("single", "row", "random:2"):
        A, B, C, W = generate_instance(3, 3, pattern, domain, seed=4)
        eps = marked_mask(W, 1).mean()
        ratios = [zeta_exact(A, B, C, p, q, 1).value / eps for p in vectors for q in vectors]
        assert_markov_reverse(np.minimum(ratios, 1.0), 0.25, 0.125)
