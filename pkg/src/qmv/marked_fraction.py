"""Marked and revealing fractions of row/column subset pairs, and checkers for
the lower bounds on them.

A pair ``(R, S)`` with ``|R| = r``, ``|S| = s`` is *marked* when the wrong set
meets ``R x S``, and *revealing* for vectors ``p, q`` when
``sum_{i in R, j in S} p_i q_j D_ij != 0`` with ``D = AB - C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._random import as_generator
from .algebra import DomainMatrix, DomainSpec, IndexSubset, WrongSet, difference_matrix
from .graphs import incidence_matrix, subset_unrank

ALPHA = 1.0 - math.exp(-1.0)
DEFAULT_ENUM_CAP = 10**7
DEFAULT_VECTOR_CAP = 2**22
Z99 = 2.5758293035489004


class EnumerationCapError(ValueError):
    """Exact enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class FractionEstimate:
    value: float
    method: str
    exact: Fraction | None = None
    trials: int | None = None
    seed: int | None = None
    half_width: float = 0.0

    @property
    def numerator(self):
        return None if self.exact is None else self.exact.numerator

    @property
    def denominator(self):
        return None if self.exact is None else self.exact.denominator


def _exact(count: int, total: int, method: str = "exact") -> FractionEstimate:
    frac = Fraction(count, total)
    return FractionEstimate(float(frac), method, exact=frac)


def epsilon_exact(W: WrongSet, r: int, s: int, cap: int = DEFAULT_ENUM_CAP) -> FractionEstimate:
    """Exact fraction of marked ``(R, S)`` pairs.

    Enumerates every ``R`` in colex order, ORs the column bitmasks of its
    rows, and counts the ``S`` avoiding that column set in closed form.
    """
    n, m = W.n, W.n_cols
    if not (1 <= r <= n and 1 <= s <= m):
        raise ValueError(f"need 1 <= r <= {n} and 1 <= s <= {m}")
    n_r, n_s = math.comb(n, r), math.comb(m, s)
    if n_r * n_s > cap:
        raise EnumerationCapError(f"C({n},{r})*C({m},{s}) = {n_r * n_s} exceeds cap {cap}")
    masks = W.row_masks()
    unmarked = 0
    for rank in range(n_r):
        cols = 0
        for i in subset_unrank(n, r, rank):
            cols |= masks[i - 1]
        unmarked += math.comb(m - bin(cols).count("1"), s)
    return _exact(n_r * n_s - unmarked, n_r * n_s)


def epsilon_bruteforce(W: WrongSet, r: int, s: int) -> Fraction:
    """Reference enumeration over every pair, for cross-checks."""
    wb = W.bool_matrix()
    n_r, n_s = math.comb(W.n, r), math.comb(W.n_cols, s)
    marked = 0
    for a in range(n_r):
        R = [i - 1 for i in subset_unrank(W.n, r, a)]
        for b in range(n_s):
            S = [j - 1 for j in subset_unrank(W.n_cols, s, b)]
            marked += bool(wb[np.ix_(R, S)].any())
    return Fraction(marked, n_r * n_s)


def _random_subsets(rng, trials: int, n: int, size: int) -> np.ndarray:
    return np.argsort(rng.random((trials, n)), axis=1)[:, :size]


def epsilon_mc(W: WrongSet, r: int, s: int, trials: int, seed=None) -> FractionEstimate:
    """Monte-Carlo estimate with a 99% normal-approximation half-width."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not W.cells:
        return FractionEstimate(0.0, "monte_carlo", trials=trials, seed=seed)
    rng = as_generator(seed)
    wb = W.bool_matrix()
    hits = 0
    for start in range(0, trials, 20000):
        t = min(20000, trials - start)
        R = _random_subsets(rng, t, W.n, r)
        S = _random_subsets(rng, t, W.n_cols, s)
        cols = wb[R].any(axis=1)
        hits += int(np.take_along_axis(cols, S, axis=1).any(axis=1).sum())
    v = hits / trials
    return FractionEstimate(v, "monte_carlo", trials=trials, seed=seed,
                            half_width=Z99 * math.sqrt(v * (1 - v) / trials))


def marked_mask(W: WrongSet, r: int, s: int | None = None) -> np.ndarray:
    """Boolean mask over pair index ``rank(R) * C(n_cols, s) + rank(S)``."""
    s = r if s is None else s
    MR = incidence_matrix(W.n, r)
    MS = incidence_matrix(W.n_cols, s)
    return ((MR @ W.bool_matrix().astype(np.int64) @ MS.T) > 0).ravel()


def revealing_values(D: np.ndarray, p, q, domain: DomainSpec, r: int, s: int | None = None) -> np.ndarray:
    """``p|_R . D|_R^S . q|_S`` for every pair, reduced in the domain, flattened."""
    s = r if s is None else s
    n, m = D.shape
    if domain.kind == "gf":
        E = np.mod(np.asarray(p, dtype=np.int64)[:, None] * D * np.asarray(q, dtype=np.int64)[None, :], domain.p)
    else:
        E = np.asarray(p, dtype=object)[:, None] * np.asarray(D, dtype=object) * np.asarray(q, dtype=object)[None, :]
    MR = incidence_matrix(n, r)
    MS = incidence_matrix(m, s)
    if domain.kind == "int":
        MR, MS = MR.astype(object), MS.astype(object)
    return domain.reduce(MR @ E @ MS.T).ravel()


def revealing_mask(D: np.ndarray, p, q, domain: DomainSpec, r: int, s: int | None = None) -> np.ndarray:
    return revealing_values(D, p, q, domain, r, s) != 0


def zeta_exact(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix, p, q, k: int,
               cap: int = DEFAULT_ENUM_CAP) -> FractionEstimate:
    """Exact fraction of revealing ``(R, S)`` with ``|R| = |S| = k`` for fixed ``p, q``."""
    D = difference_matrix(A, B, C)
    total = math.comb(D.rows, k) * math.comb(D.cols, k)
    if total > cap:
        raise EnumerationCapError(f"{total} pairs exceed cap {cap}")
    mask = revealing_mask(D.entries, p, q, D.domain, k)
    return _exact(int(mask.sum()), total)


@dataclass(frozen=True)
class RevealingProbability:
    value: Fraction
    marked: bool


def _vector_grid(domain: DomainSpec, n: int, cap: int) -> np.ndarray:
    if domain.kind != "gf":
        raise ValueError("exact enumeration over (p, q) needs a finite field")
    if domain.p ** (2 * n) > cap:
        raise EnumerationCapError(f"{domain.p}^(2*{n}) vector pairs exceed cap {cap}")
    return domain.all_vectors(n)


def revealing_prob_exact(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix,
                         R: IndexSubset, S: IndexSubset,
                         cap: int = DEFAULT_VECTOR_CAP) -> RevealingProbability:
    """Probability over all ``(p, q)`` in ``GF(g)^n x GF(g)^n`` that ``(R, S)`` reveals.

    An unmarked pair can never reveal; it is returned with ``marked=False``
    and probability 0.
    """
    D = difference_matrix(A, B, C)
    g = D.domain.p if D.domain.kind == "gf" else None
    P = _vector_grid(D.domain, D.rows, cap)
    Q = P if D.cols == D.rows else _vector_grid(D.domain, D.cols, cap)
    rows, cols = R.zero_based(), S.zero_based()
    DRS = D.entries[np.ix_(rows, cols)]
    marked = bool(np.any(DRS != 0))
    vals = np.mod(np.mod(P[:, rows] @ DRS, g) @ Q[:, cols].T, g)
    return RevealingProbability(Fraction(int(np.count_nonzero(vals)), vals.size), marked)


@dataclass(frozen=True)
class GoodVectorResult:
    """Outcome of enumerating every ``(p, q)``.

    Attributes:
        fraction: share of ``(p, q)`` with ``zeta >= eps / 8``.
        mean_revealing_share: mean over ``(p, q)`` of revealing/marked.
        flag: ``"no wrong entries"`` when ``AB = C``, else ``None``.
    """

    fraction: Fraction
    mean_revealing_share: Fraction
    epsilon: Fraction
    flag: str | None = None


def good_vector_fraction(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix, k: int,
                         cap: int = DEFAULT_VECTOR_CAP) -> GoodVectorResult:
    D = difference_matrix(A, B, C)
    P = _vector_grid(D.domain, D.rows, cap)
    Q = P if D.cols == D.rows else _vector_grid(D.domain, D.cols, cap)
    g = D.domain.p
    W = WrongSet(D.rows, frozenset(zip(*(x + 1 for x in np.nonzero(D.entries))) ), D.cols)
    if not W.cells:
        return GoodVectorResult(Fraction(1), Fraction(1), Fraction(0), "no wrong entries")
    marked = marked_mask(W, k)
    n_marked = int(marked.sum())
    MR = incidence_matrix(D.rows, k)
    MS = incidence_matrix(D.cols, k)
    # sum_{i in R, j in S} p_i q_j D_ij for all (R, S) at once: (MR*p) D (MS*q)^T
    left = np.mod((MR[None, :, :] * P[:, None, :]) @ D.entries, g)      # (|P|, C_r, n_cols)
    right = (MS[None, :, :] * Q[:, None, :])                             # (|Q|, C_s, n_cols)
    good = 0
    share = Fraction(0)
    for a in range(len(P)):
        vals = np.mod(np.einsum("rj,bsj->brs", left[a], right), g)
        counts = np.count_nonzero(vals.reshape(len(Q), -1), axis=1)
        good += int(np.sum(8 * counts >= n_marked))
        share += Fraction(int(counts.sum()), n_marked)
    total = len(P) * len(Q)
    eps = Fraction(n_marked, marked.size)
    return GoodVectorResult(Fraction(good, total), share / total, eps)


@dataclass(frozen=True)
class BoundCheck:
    """Result of checking ``epsilon >= rhs`` where a lemma applies.

    ``passed`` is ``None`` when the lemma's preconditions do not hold.
    """

    applicable: bool
    lhs: float
    rhs: float
    passed: bool | None
    regime: str = ""
    lhs_exact: Fraction | None = None


def _bound_rhs(size: int, r: int, s: int, n: int, const: float) -> float:
    return const * size * r * s / n**2


def check_bound_small_set(W: WrongSet, r: int, s: int, cap: int = DEFAULT_ENUM_CAP) -> BoundCheck:
    """``eps(W, r, s) >= alpha^2 |W| rs / n^2`` for ``r <= n/w``, ``s <= n/w'``.

    ``w`` is the number of nonzero rows and ``w'`` the most cells in one row.
    """
    n = W.n
    applicable = bool(W.cells) and r * W.w_rows <= n and s * W.row_max <= n
    eps = epsilon_exact(W, r, s, cap)
    rhs = _bound_rhs(len(W), r, s, n, ALPHA**2)
    return BoundCheck(applicable, eps.value, rhs, (eps.value >= rhs) if applicable else None,
                      "small-set", eps.exact)


def check_bound_indep_set(W: WrongSet, r: int, s: int, cap: int = DEFAULT_ENUM_CAP) -> BoundCheck:
    """Same bound for independent ``W`` and ``rs <= n^(4/3) / |W|^(2/3)``.

    The range test is done in integers as ``(rs)^3 |W|^2 <= n^4``.  When
    ``|W| <= sqrt(n)`` the lemma is proved through the small-set regime and the
    result is tagged accordingly.
    """
    n, t = W.n, len(W)
    applicable = t > 0 and W.is_independent and (r * s) ** 3 * t * t <= n**4
    regime = "small-set" if t * t <= n else "indep-set"
    eps = epsilon_exact(W, r, s, cap)
    rhs = _bound_rhs(t, r, s, n, ALPHA**2)
    return BoundCheck(applicable, eps.value, rhs, (eps.value >= rhs) if applicable else None,
                      regime, eps.exact)


@dataclass(frozen=True)
class ExpProbCheck:
    mean_epsilon: float
    half_width: float
    rhs: float
    passed: bool
    samples: int


def check_bound_exp_prob(n: int, t: int, r: int, s: int, samples: int, seed=None,
                         cap: int = DEFAULT_ENUM_CAP) -> ExpProbCheck:
    """Mean of exact ``eps(W, r, s)`` over uniform random ``W`` with ``|W| = t``.

    Passes iff the mean is at least ``alpha * t * rs / n^2``.
    """
    if r * s * t > n * n:
        raise ValueError(f"precondition rs <= n^2/t violated: {r}*{s} > {n}^2/{t}")
    rng = as_generator(seed)
    values = np.empty(samples)
    for i in range(samples):
        flat = rng.choice(n * n, t, replace=False)
        W = WrongSet(n, frozenset((int(f // n) + 1, int(f % n) + 1) for f in flat))
        values[i] = epsilon_exact(W, r, s, cap).value
    mean = float(values.mean())
    hw = Z99 * float(values.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
    rhs = ALPHA * t * r * s / n**2
    return ExpProbCheck(mean, hw, rhs, mean >= rhs, samples)
