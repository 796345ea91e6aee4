import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmv.algebra import WrongSet
from qmv.graphs import GraphError
from qmv.marked_fraction import marked_mask
from qmv.szegedy import (WalkCapError, WalkSpace, dense_operators, dense_walk_probabilities,
                         hadamard_test_literal, hadamard_test_prob, iteration_bound, phase_flip,
                         reflect_first, reflect_second, restricted_matrix_check,
                         uniform_edge_state, verify_once_success, walk_probabilities, walk_step)

SMALL = [(3, 1), (4, 1), (4, 2), (5, 1)]


def test_uniform_state_example():
    space = WalkSpace.johnson(3, 1)
    phi = uniform_edge_state(space)
    # 9 vertices of degree 4: 36 edges, amplitude 1/6 each
    assert phi.amplitudes.shape == (9, 4)
    np.testing.assert_allclose(phi.amplitudes, 1 / 6)
    assert phi.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 2), (6, 3)])
def test_walk_fixes_uniform_state(n, k):
    phi = uniform_edge_state(WalkSpace.johnson(n, k))
    assert np.linalg.norm(walk_step(phi).amplitudes - phi.amplitudes) <= 1e-12


@pytest.mark.parametrize("n,k", SMALL)
def test_simulator_matches_dense_operators(n, k):
    space = WalkSpace.johnson(n, k)
    rng = np.random.default_rng(n * 10 + k)
    R1, R2, F, phi = dense_operators(space, rng.random(space.size) < 0.3)
    state = uniform_edge_state(space)
    np.testing.assert_allclose(state.to_dense(), phi, atol=1e-14)
    # R1 and R2 are reflections
    np.testing.assert_allclose(R1 @ R1, np.eye(len(phi)), atol=1e-12)
    np.testing.assert_allclose(R2 @ R2, np.eye(len(phi)), atol=1e-12)
    # single operators agree on a random edge-supported state
    psi = state.__class__(space, rng.normal(size=state.amplitudes.shape))
    np.testing.assert_allclose(reflect_first(psi).to_dense(), R1 @ psi.to_dense(), atol=1e-12)
    np.testing.assert_allclose(reflect_second(psi).to_dense(), R2 @ psi.to_dense(), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_walk_probabilities_match_dense_oracle(nk, seed, density):
    space = WalkSpace.johnson(*nk)
    marked = np.random.default_rng(seed).random(space.size) < density
    np.testing.assert_allclose(walk_probabilities(space, marked, 10),
                               dense_walk_probabilities(space, marked, 10), atol=1e-10)


def test_operators_preserve_norm():
    space = WalkSpace.johnson(5, 2)
    rng = np.random.default_rng(0)
    amps = rng.normal(size=(space.size, space.degree))
    psi = uniform_edge_state(space).__class__(space, amps / np.linalg.norm(amps))
    marked = rng.random(space.size) < 0.2
    for op in (reflect_first, reflect_second, walk_step, lambda s: phase_flip(s, marked)):
        assert op(psi).norm() == pytest.approx(1.0, abs=1e-12)


def test_no_marked_vertex_gives_zero_probability():
    space = WalkSpace.johnson(5, 2)
    probs = walk_probabilities(space, np.zeros(space.size, dtype=bool), 30)
    assert np.max(np.abs(probs)) <= 1e-12


def test_all_marked_alternates():
    # F = -I, so (UF)^l phi = (-1)^l phi
    space = WalkSpace.johnson(4, 1)
    probs = walk_probabilities(space, np.ones(space.size, dtype=bool), 4)
    np.testing.assert_allclose(probs, [0, 1, 0, 1, 0], atol=1e-12)


def test_hadamard_test():
    assert hadamard_test_prob([1.0, 0.0], [1.0, 0.0]) == 0.0
    assert hadamard_test_prob([1.0, 0.0], [-1.0, 0.0]) == 1.0
    assert hadamard_test_prob([1.0, 0.0], [0.0, 1.0]) == 0.5
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = rng.normal(size=(2, 17))
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        assert abs(hadamard_test_prob(a, b) - hadamard_test_literal(a, b)) <= 1e-12
    with pytest.raises(ValueError):
        hadamard_test_prob([1.0], [1.0, 0.0])


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 2), (6, 3)])
def test_enough_iterations_give_constant_success(n, k):
    """With l uniform up to ceil(4 / sqrt(gap * eps)) the mean success is >= 1/8."""
    space = WalkSpace.johnson(n, k)
    rng = np.random.default_rng(n + k)
    for t in (1, 2, 3):
        cells = {(int(i), int(j)) for i, j in rng.integers(1, n + 1, size=(t, 2))}
        marked = marked_mask(WrongSet(n, frozenset(cells)), k)
        eps = marked.mean()
        k_max = iteration_bound(space.gap, eps)
        assert verify_once_success(space, marked, k_max).avg_prob >= 1 / 8


def test_restricted_matrix_bound():
    rng = np.random.default_rng(4)
    for n, k in [(4, 1), (4, 2), (5, 2), (6, 2)]:
        space = WalkSpace.johnson(n, k)
        for frac in (0.05, 0.2, 0.5):
            res = restricted_matrix_check(space, rng.random(space.size) < frac)
            assert res.passed


def test_caps_and_degenerate_graphs():
    with pytest.raises(WalkCapError):
        WalkSpace.johnson(8, 4, cap=1000)
    with pytest.raises(GraphError):
        WalkSpace.johnson(3, 3)
    with pytest.raises(WalkCapError):
        dense_operators(WalkSpace.johnson(6, 2), np.zeros(225, dtype=bool))
    with pytest.raises(ValueError):
        walk_probabilities(WalkSpace.johnson(3, 1), np.zeros(4, dtype=bool), 2)


def test_cap_env_override(monkeypatch):
    monkeypatch.setenv("QMV_MAX_WALK_DIM", "50")
    with pytest.raises(WalkCapError):
        WalkSpace.johnson(4, 2)


def test_rectangular_space():
    space = WalkSpace.johnson(4, 2, n_cols=5)
    assert space.size == 6 * 10 and space.degree == 4 * 6
    phi = uniform_edge_state(space)
    assert np.linalg.norm(walk_step(phi).amplitudes - phi.amplitudes) <= 1e-12
    assert space.gap == pytest.approx(min(1.0, 5 / 6))
