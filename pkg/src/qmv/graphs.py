"""Johnson graphs, their categorical products and normalized-Laplacian spectra.

Vertices of ``J(n, k)`` are the k-subsets of ``{1..n}`` ranked in colex
order; a vertex of ``J(n1, k) x J(n2, k)`` with factor ranks ``(a, b)`` has
index ``a * C(n2, k) + b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_EIG_CAP = 4096


class GraphError(ValueError):
    pass


def subset_rank(subset, k: int | None = None) -> int:
    """Colex rank of a set of 1-based indices; ``{1..k}`` has rank 0."""
    members = sorted(int(i) for i in subset)
    if k is not None and len(members) != k:
        raise GraphError(f"expected a {k}-subset, got {members}")
    if len(set(members)) != len(members) or (members and members[0] < 1):
        raise GraphError(f"invalid subset {members}")
    return sum(math.comb(c - 1, i + 1) for i, c in enumerate(members))


def subset_unrank(n: int, k: int, index: int) -> tuple[int, ...]:
    """Inverse of :func:`subset_rank` within ``{1..n}``."""
    total = math.comb(n, k)
    if not 0 <= index < total:
        raise GraphError(f"rank {index} outside [0, C({n},{k}) = {total})")
    out = []
    c = n
    for i in range(k, 0, -1):
        while math.comb(c - 1, i) > index:
            c -= 1
        index -= math.comb(c - 1, i)
        out.append(c)
        c -= 1
    return tuple(reversed(out))


def all_subsets(n: int, k: int) -> list[tuple[int, ...]]:
    """Every k-subset of ``{1..n}`` in colex order."""
    return [subset_unrank(n, k, r) for r in range(math.comb(n, k))]


def incidence_matrix(n: int, k: int) -> np.ndarray:
    """0/1 matrix with row ``r`` the indicator of ``subset_unrank(n, k, r)``."""
    subsets = all_subsets(n, k)
    out = np.zeros((len(subsets), n), dtype=np.int64)
    for r, s in enumerate(subsets):
        out[r, [i - 1 for i in s]] = 1
    return out


def johnson_gap_formula(n: int, k: int) -> float:
    """Normalized-Laplacian spectral gap of ``J(n, k)``: ``n / ((n - k) k)``."""
    if not 1 <= k < n:
        raise GraphError(f"need 1 <= k < n, got n={n}, k={k}")
    return n / ((n - k) * k)


@dataclass(frozen=True)
class JohnsonGraph:
    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise GraphError(f"J(n,k) needs 1 <= k <= n, got n={self.n}, k={self.k}")

    @property
    def vertex_count(self) -> int:
        return math.comb(self.n, self.k)

    @property
    def degree(self) -> int:
        return self.k * (self.n - self.k)

    @cached_property
    def neighbors(self) -> np.ndarray:
        """``(vertex_count, degree)`` table of neighbour ranks.

        Slot order for vertex ``R``: for each removed element of ``R`` (ascending)
        and each added element outside ``R`` (ascending).
        """
        n, k = self.n, self.k
        table = np.empty((self.vertex_count, self.degree), dtype=np.int64)
        for r in range(self.vertex_count):
            s = set(subset_unrank(n, k, r))
            outside = [j for j in range(1, n + 1) if j not in s]
            slot = 0
            for i in sorted(s):
                for j in outside:
                    table[r, slot] = subset_rank((s - {i}) | {j})
                    slot += 1
        return table

    @cached_property
    def reverse_slots(self) -> np.ndarray:
        """``rev[v, j]`` is the slot of ``v`` in the neighbour list of ``neighbors[v, j]``."""
        nb = self.neighbors
        rev = np.empty_like(nb)
        for v in range(nb.shape[0]):
            for j, u in enumerate(nb[v]):
                rev[v, j] = int(np.flatnonzero(nb[u] == v)[0])
        return rev

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.vertex_count, self.vertex_count))
        for v, row in enumerate(self.neighbors):
            A[v, row] = 1.0
        return A


@dataclass(frozen=True)
class ProductGraph:
    """Categorical product: ``(a, b) ~ (a', b')`` iff ``a ~ a'`` and ``b ~ b'``."""

    left: JohnsonGraph
    right: JohnsonGraph

    @property
    def vertex_count(self) -> int:
        return self.left.vertex_count * self.right.vertex_count

    @property
    def degree(self) -> int:
        return self.left.degree * self.right.degree

    def index(self, a: int, b: int) -> int:
        return a * self.right.vertex_count + b

    def split(self, x: int) -> tuple[int, int]:
        return divmod(x, self.right.vertex_count)

    def adjacency(self) -> np.ndarray:
        return np.kron(self.left.adjacency(), self.right.adjacency())


def square_product(n: int, k: int) -> ProductGraph:
    g = JohnsonGraph(n, k)
    return ProductGraph(g, g)


@dataclass(frozen=True)
class Spectrum:
    """Sorted normalized-Laplacian eigenvalues and the spectral gap."""

    eigenvalues: np.ndarray
    gap: float


def _adjacency_of(G) -> np.ndarray:
    if isinstance(G, (JohnsonGraph, ProductGraph)):
        return G.adjacency()
    A = np.asarray(G, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.allclose(A, A.T):
        raise GraphError("adjacency matrix must be square and symmetric")
    return A


def normalized_laplacian(G) -> np.ndarray:
    """``L = I - D^{-1/2} A D^{-1/2}``.

    ``G`` is a graph object or a symmetric 0/1 adjacency matrix.  Raises on an
    isolated vertex, where the definition divides by zero.
    """
    A = _adjacency_of(G)
    deg = A.sum(axis=1)
    if np.any(deg == 0):
        raise GraphError("normalized Laplacian undefined: graph has an isolated vertex")
    s = 1.0 / np.sqrt(deg)
    return np.eye(A.shape[0]) - s[:, None] * A * s[None, :]


def normalized_adjacency(G) -> np.ndarray:
    """Walk matrix ``D^{-1/2} A D^{-1/2}`` (equals ``D^{-1} A`` for regular graphs)."""
    return np.eye(len(_adjacency_of(G))) - normalized_laplacian(G)


def _spectrum_from(eigs: np.ndarray) -> Spectrum:
    eigs = np.sort(eigs)
    gap = float(eigs[1]) if len(eigs) > 1 else 0.0
    return Spectrum(eigs, gap)


def spectral_gap_eig(G, cap: int = DEFAULT_EIG_CAP) -> Spectrum:
    """Full normalized-Laplacian spectrum by a dense symmetric eigensolver."""
    n_vertices = G.vertex_count if hasattr(G, "vertex_count") else len(G)
    if n_vertices > cap:
        raise GraphError(f"{n_vertices} vertices exceed the eigensolver cap {cap}")
    return _spectrum_from(np.linalg.eigvalsh(normalized_laplacian(G)))


def adjacency_spectrum(G, cap: int = DEFAULT_EIG_CAP) -> np.ndarray:
    """Normalized-adjacency eigenvalues, descending."""
    return np.sort(1.0 - spectral_gap_eig(G, cap).eigenvalues)[::-1]


def product_spectrum(G1, G2, cap: int = DEFAULT_EIG_CAP) -> Spectrum:
    """Spectrum of ``G1 x G2`` from the factor spectra.

    The normalized adjacency of a categorical product is the Kronecker
    product of the factors', so its Laplacian eigenvalues are ``1 - nu*mu``
    over all pairs of factor eigenvalues.
    """
    nu = adjacency_spectrum(G1, cap)
    mu = adjacency_spectrum(G2, cap)
    return _spectrum_from((1.0 - np.multiply.outer(nu, mu)).ravel())


def product_gap(G: ProductGraph, cap: int = DEFAULT_EIG_CAP) -> float:
    return product_spectrum(G.left, G.right, cap).gap
