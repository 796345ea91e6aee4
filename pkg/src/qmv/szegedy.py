"""Real state-vector simulation of the Szegedy walk on ``J(n1,k) x J(n2,k)``.

The walk lives on ``span{|x>|y>}``, ``x, y`` in the vertex set ``X`` of the
product graph.  Starting from ``|phi> = |X|^-1/2 sum_x |x>|p_x>`` every
operator used here (the two reflections and the phase flip on the first
register) keeps the state supported on directed edges ``(x, y)``, so the
state is stored as an ``(|X|, deg)`` array: row ``x``, slot ``j`` is the
amplitude of ``|x>|neighbors[x, j]>``.  ``WalkState.to_dense`` expands it
to the full ``|X|^2`` vector.

The graph is regular, so ``|p_x>`` is uniform over the neighbours of ``x``
and reflecting about it replaces each row by twice its mean minus itself.
The second reflection is the first one conjugated by the swap
``|x>|y> -> |y>|x>``, which on edges is a fixed permutation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graphs import GraphError, JohnsonGraph, ProductGraph, normalized_adjacency, product_gap

DEFAULT_MAX_WALK_DIM = 2**28


def max_walk_dim() -> int:
    """Cap on ``|X|^2``; ``QMV_MAX_WALK_DIM`` overrides the default."""
    env = os.environ.get("QMV_MAX_WALK_DIM")
    return int(env) if env else DEFAULT_MAX_WALK_DIM


class WalkCapError(ValueError):
    pass


class WalkSpace:
    """Edge space of the uniform walk on a product of two Johnson graphs."""

    def __init__(self, graph: ProductGraph, cap: int | None = None):
        cap = max_walk_dim() if cap is None else cap
        if graph.degree == 0:
            raise GraphError("walk undefined: product graph has isolated vertices (k = n)")
        if graph.vertex_count**2 > cap:
            raise WalkCapError(f"|X|^2 = {graph.vertex_count ** 2} exceeds walk cap {cap}")
        self.graph = graph
        self.size = graph.vertex_count
        self.degree = graph.degree

    @classmethod
    def johnson(cls, n: int, k: int, n_cols: int | None = None, cap: int | None = None) -> "WalkSpace":
        left = JohnsonGraph(n, k)
        right = left if n_cols is None or n_cols == n else JohnsonGraph(n_cols, k)
        return cls(ProductGraph(left, right), cap)

    @property
    def dim(self) -> int:
        return self.size**2

    def __repr__(self):
        L, R = self.graph.left, self.graph.right
        return f"WalkSpace(J({L.n},{L.k}) x J({R.n},{R.k}), |X|={self.size})"

    @cached_property
    def neighbors(self) -> np.ndarray:
        L, R = self.graph.left, self.graph.right
        nl, nr = L.neighbors, R.neighbors
        # x = a * |R| + b, slot j = ja * deg_R + jb
        a_nb = nl[:, None, :, None] * R.vertex_count
        b_nb = nr[None, :, None, :]
        return (a_nb + b_nb).reshape(self.size, self.degree)

    @cached_property
    def swap(self) -> np.ndarray:
        """Permutation of flat edge indices realising ``|x>|y> -> |y>|x>``."""
        L, R = self.graph.left, self.graph.right
        rev = (L.reverse_slots[:, None, :, None] * R.degree
               + R.reverse_slots[None, :, None, :]).reshape(self.size, self.degree)
        return (self.neighbors * self.degree + rev).ravel()

    @cached_property
    def gap(self) -> float:
        return product_gap(self.graph)


@dataclass(frozen=True, eq=False)
class WalkState:
    space: WalkSpace
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "WalkState") -> float:
        return float(np.vdot(self.amplitudes, other.amplitudes))

    def to_dense(self) -> np.ndarray:
        """Full ``|X|^2`` vector indexed ``x * |X| + y``."""
        out = np.zeros(self.space.dim)
        x = np.repeat(np.arange(self.space.size), self.space.degree)
        out[x * self.space.size + self.space.neighbors.ravel()] = self.amplitudes.ravel()
        return out


def uniform_edge_state(space: WalkSpace) -> WalkState:
    amp = 1.0 / math.sqrt(space.size * space.degree)
    return WalkState(space, np.full((space.size, space.degree), amp))


def _flip(amps: np.ndarray, marked: np.ndarray) -> np.ndarray:
    return np.where(marked[:, None], -amps, amps)


def _reflect_first(amps: np.ndarray) -> np.ndarray:
    return amps.sum(axis=1, keepdims=True) * (2.0 / amps.shape[1]) - amps


def _reflect_second(amps: np.ndarray, swap: np.ndarray) -> np.ndarray:
    swapped = amps.ravel()[swap].reshape(amps.shape)
    return _reflect_first(swapped).ravel()[swap].reshape(amps.shape)


def _as_mask(space: WalkSpace, marked) -> np.ndarray:
    marked = np.asarray(marked, dtype=bool)
    if marked.shape != (space.size,):
        raise ValueError(f"marked mask must have shape ({space.size},)")
    return marked


def phase_flip(state: WalkState, marked) -> WalkState:
    """Negate every amplitude whose first register is a marked vertex."""
    return WalkState(state.space, _flip(state.amplitudes, _as_mask(state.space, marked)))


def reflect_first(state: WalkState) -> WalkState:
    return WalkState(state.space, _reflect_first(state.amplitudes))


def reflect_second(state: WalkState) -> WalkState:
    return WalkState(state.space, _reflect_second(state.amplitudes, state.space.swap))


def walk_step(state: WalkState) -> WalkState:
    """One diffusion step ``U = R2 R1``."""
    swap = state.space.swap
    return WalkState(state.space, _reflect_second(_reflect_first(state.amplitudes), swap))


def hadamard_test_prob(phi, psi) -> float:
    """Probability of reading 1 on the control qubit: ``(1 - <phi|psi>) / 2``."""
    a = phi.amplitudes if isinstance(phi, WalkState) else np.asarray(phi)
    b = psi.amplitudes if isinstance(psi, WalkState) else np.asarray(psi)
    if a.shape != b.shape:
        raise ValueError("states must have the same dimension")
    return 0.5 * (1.0 - float(np.vdot(a.ravel(), b.ravel())))


def hadamard_test_literal(phi: np.ndarray, psi: np.ndarray) -> float:
    """Build ``(|0,phi> + |1,psi>)/sqrt 2``, apply ``H`` to the qubit and measure."""
    phi = np.asarray(phi, dtype=float).ravel()
    psi = np.asarray(psi, dtype=float).ravel()
    register = np.stack([phi, psi]) / math.sqrt(2.0)
    H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    after = H @ register
    return float(np.sum(after[1] ** 2))


def walk_probabilities(space: WalkSpace, marked, lmax: int) -> np.ndarray:
    """``prob_one`` for ``l = 0..lmax``, with ``psi_l = (U F)^l phi``."""
    if lmax < 0:
        raise ValueError("number of iterations must be >= 0")
    marked = _as_mask(space, marked)
    phi = uniform_edge_state(space).amplitudes
    out = np.zeros(lmax + 1)
    amps = phi
    swap = space.swap
    for ell in range(1, lmax + 1):
        amps = _reflect_second(_reflect_first(_flip(amps, marked)), swap)
        out[ell] = 0.5 * (1.0 - float(np.vdot(phi, amps)))
    return out


def run_verification_walk(space: WalkSpace, marked, ell: int) -> float:
    """Success probability of the controlled walk with ``ell`` iterations."""
    return float(walk_probabilities(space, marked, ell)[ell])


@dataclass(frozen=True)
class SuccessCurve:
    avg_prob: float
    per_l: np.ndarray


def verify_once_success(space: WalkSpace, marked, k_max: int) -> SuccessCurve:
    """Average of ``prob_one(l)`` over ``l`` uniform in ``{1..k_max}``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    per_l = walk_probabilities(space, marked, k_max)[1:]
    return SuccessCurve(float(per_l.mean()), per_l)


def iteration_bound(gap: float, eps: float, c: float = 4.0) -> int:
    """``ceil(c / sqrt(gap * eps))`` walk iterations."""
    return math.ceil(c / math.sqrt(gap * eps))


@dataclass(frozen=True)
class RestrictedCheck:
    lambda_pm: float
    bound: float
    passed: bool
    epsilon: float
    gap: float


def restricted_matrix_check(space: WalkSpace, marked, cap: int = 4096) -> RestrictedCheck:
    """Largest eigenvalue of the walk matrix with marked rows/columns removed,
    against ``1 - gap * eps / 2``."""
    marked = _as_mask(space, marked)
    if space.size > cap:
        raise WalkCapError(f"|X| = {space.size} exceeds eigensolver cap {cap}")
    eps = float(marked.mean())
    gap = space.gap
    bound = 1.0 - gap * eps / 2.0
    keep = ~marked
    if not keep.any():
        return RestrictedCheck(0.0, bound, True, eps, gap)
    P = normalized_adjacency(space.graph)[np.ix_(keep, keep)]
    lam = float(np.linalg.eigvalsh(P)[-1])
    return RestrictedCheck(lam, bound, lam <= bound + 1e-9, eps, gap)


def dense_operators(space: WalkSpace, marked):
    """Explicit ``|X|^2``-square ``R1``, ``R2``, ``F`` and ``|phi>``.

    Built from the product adjacency matrix alone, independent of the edge
    tables used by the simulator.  Only for cross-checking small spaces.
    """
    marked = _as_mask(space, marked)
    size = space.size
    if size**2 > 4096:
        raise WalkCapError("dense oracle limited to |X|^2 <= 4096")
    A = space.graph.adjacency()
    P = A / A.sum(axis=1, keepdims=True)
    root = np.sqrt(P)
    dim = size * size
    eye = np.eye(size)
    # columns: |x>|p_x> and |p_y>|y>
    first = np.stack([np.kron(eye[x], root[x]) for x in range(size)], axis=1)
    second = np.stack([np.kron(root[y], eye[y]) for y in range(size)], axis=1)
    R1 = 2.0 * first @ first.T - np.eye(dim)
    R2 = 2.0 * second @ second.T - np.eye(dim)
    F = np.diag(np.repeat(np.where(marked, -1.0, 1.0), size))
    phi = first.sum(axis=1) / math.sqrt(size)
    return R1, R2, F, phi


def dense_walk_probabilities(space: WalkSpace, marked, lmax: int) -> np.ndarray:
    R1, R2, F, phi = dense_operators(space, marked)
    step = R2 @ R1 @ F
    out = np.zeros(lmax + 1)
    psi = phi
    for ell in range(1, lmax + 1):
        psi = step @ psi
        out[ell] = 0.5 * (1.0 - float(phi @ psi))
    return out
