"""Integral-domain matrix arithmetic, instance generation and wrong-set analysis.

Two domains are supported: prime fields GF(p), stored as ``int64`` arrays
reduced into ``[0, p)``, and the integers, stored as ``object`` arrays of
Python ints so that no product can overflow.

Row and column indices are 1-based wherever they cross the public API
(``IndexSubset`` members, ``WrongSet`` cells, pattern positions).
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._random import as_generator

INT_ENTRY_CAP = 2**31
DEFAULT_INT_SAMPLE_SIZE = 2**16


class DomainError(ValueError):
    """Invalid domain, matrix shape or instance request."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class DomainSpec:
    """Either ``GF(p)`` (``kind="gf"``) or the integers (``kind="int"``).

    ``sample_size`` is the number of values random vectors are drawn from:
    the whole field for GF(p), ``{0, ..., sample_size - 1}`` for the
    integers.
    """

    kind: str
    p: int | None = None
    sample_size: int = DEFAULT_INT_SAMPLE_SIZE

    def __post_init__(self):
        if self.kind == "gf":
            if self.p is None or not is_prime(int(self.p)):
                raise DomainError(f"GF(p) needs a prime modulus, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))
            object.__setattr__(self, "sample_size", int(self.p))
        elif self.kind == "int":
            if self.p is not None:
                raise DomainError("the integers domain takes no modulus")
            if self.sample_size < 2:
                raise DomainError("sample_size must be at least 2")
        else:
            raise DomainError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def gf(cls, p: int) -> "DomainSpec":
        return cls("gf", p)

    @classmethod
    def integers(cls, sample_size: int = DEFAULT_INT_SAMPLE_SIZE) -> "DomainSpec":
        return cls("int", None, sample_size)

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        """Parse ``"gf:7"`` or ``"int"``."""
        text = text.strip().lower()
        if text == "int":
            return cls.integers()
        m = re.fullmatch(r"gf:(\d+)", text)
        if not m:
            raise DomainError(f"cannot parse domain {text!r} (expected gf:P or int)")
        return cls.gf(int(m.group(1)))

    def __str__(self):
        return f"gf:{self.p}" if self.kind == "gf" else "int"

    @property
    def is_field(self) -> bool:
        return self.kind == "gf"

    @property
    def dtype(self):
        return np.int64 if self.kind == "gf" else object

    def reduce(self, values):
        """Map raw integers (scalar or array) into canonical domain form."""
        if self.kind == "gf":
            return np.mod(np.asarray(values, dtype=np.int64), self.p)
        arr = np.asarray(values, dtype=object)
        return arr if arr.ndim else int(arr)

    def contains(self, value) -> bool:
        if self.kind == "gf":
            return 0 <= int(value) < self.p
        return isinstance(value, (int, np.integer))

    def random_elements(self, rng, shape, nonzero: bool = False):
        """Uniform random entries for matrices (instance generation)."""
        rng = as_generator(rng)
        if self.kind == "gf":
            low = 1 if nonzero else 0
            return rng.integers(low, self.p, size=shape, dtype=np.int64)
        hi = INT_ENTRY_CAP - 1
        vals = rng.integers(-hi, hi + 1, size=shape, dtype=np.int64)
        if nonzero:
            while np.any(vals == 0):
                zeros = vals == 0
                vals[zeros] = rng.integers(-hi, hi + 1, size=int(zeros.sum()), dtype=np.int64)
        return np.asarray(vals.astype(object))

    def random_vector(self, rng, length: int):
        """Random row/column vector for the revealing test."""
        rng = as_generator(rng)
        vals = rng.integers(0, self.sample_size, size=length, dtype=np.int64)
        return vals if self.kind == "gf" else vals.astype(object)

    def all_vectors(self, length: int) -> np.ndarray:
        """Every vector of ``sample_size**length``, one per row."""
        g = self.sample_size
        grid = np.array(list(itertools.product(range(g), repeat=length)), dtype=np.int64)
        return grid.reshape(g**length, length)


def domain_mul(a, b, d: DomainSpec):
    if d.kind == "gf":
        if not (d.contains(a) and d.contains(b)):
            raise DomainError(f"{a}, {b} not in {d}")
        return (int(a) * int(b)) % d.p
    return int(a) * int(b)


def domain_add(a, b, d: DomainSpec):
    if d.kind == "gf":
        return (int(a) + int(b)) % d.p
    return int(a) + int(b)


@dataclass(frozen=True, eq=False)
class DomainMatrix:
    """Dense matrix over a ``DomainSpec``; the entry array is read-only."""

    entries: np.ndarray
    domain: DomainSpec

    def __post_init__(self):
        arr = np.array(self.entries, dtype=self.domain.dtype)
        if arr.ndim != 2:
            raise DomainError("DomainMatrix entries must be 2-dimensional")
        if self.domain.kind == "gf" and arr.size and (arr.min() < 0 or arr.max() >= self.domain.p):
            raise DomainError(f"entries must lie in [0, {self.domain.p})")
        if self.domain.kind == "int":
            arr = np.vectorize(int, otypes=[object])(arr) if arr.size else arr
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], domain: DomainSpec) -> "DomainMatrix":
        return cls(domain.reduce(np.array(rows, dtype=object).astype(np.int64)
                                 if domain.kind == "gf" else np.array(rows, dtype=object)), domain)

    @classmethod
    def zeros(cls, rows: int, cols: int, domain: DomainSpec) -> "DomainMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), domain)

    @classmethod
    def identity(cls, n: int, domain: DomainSpec) -> "DomainMatrix":
        return cls(np.eye(n, dtype=np.int64), domain)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, pos):
        """1-based ``(row, col)`` access."""
        i, j = pos
        return self.entries[i - 1, j - 1]

    def __eq__(self, other):
        if not isinstance(other, DomainMatrix):
            return NotImplemented
        return (self.domain == other.domain and self.shape == other.shape
                and bool(np.all(self.entries == other.entries)))

    def __hash__(self):
        return hash((self.domain, self.shape, tuple(self.entries.ravel().tolist())))

    def __repr__(self):
        return f"DomainMatrix({self.entries.tolist()}, {self.domain})"

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.entries]

    def with_entry(self, row: int, col: int, value) -> "DomainMatrix":
        arr = self.entries.copy()
        arr[row - 1, col - 1] = self.domain.reduce(value)
        return DomainMatrix(arr, self.domain)

    def sub(self, other: "DomainMatrix") -> "DomainMatrix":
        _check_same_domain(self, other)
        if self.shape != other.shape:
            raise DomainError(f"shape mismatch {self.shape} vs {other.shape}")
        return DomainMatrix(self.domain.reduce(self.entries - other.entries), self.domain)

    def is_zero(self) -> bool:
        return not np.any(self.entries != 0)


def _check_same_domain(a: DomainMatrix, b: DomainMatrix):
    if a.domain != b.domain:
        raise DomainError(f"domain mismatch {a.domain} vs {b.domain}")


def matmul_entries(a: np.ndarray, b: np.ndarray, domain: DomainSpec) -> np.ndarray:
    """Exact product of two raw entry arrays."""
    if domain.kind == "gf":
        inner = a.shape[1] if a.ndim == 2 else a.shape[0]
        if inner * (domain.p - 1) ** 2 < 2**62:
            return np.mod(a @ b, domain.p)
        prod = np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
        return np.mod(prod, domain.p).astype(np.int64)
    return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)


def mat_mul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    _check_same_domain(A, B)
    if A.cols != B.rows:
        raise DomainError(f"cannot multiply {A.shape} by {B.shape}")
    return DomainMatrix(matmul_entries(A.entries, B.entries, A.domain), A.domain)


@dataclass(frozen=True)
class IndexSubset:
    """Sorted subset of ``{1, ..., universe}``."""

    universe: int
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(i) for i in self.members)
        if any(b <= a for a, b in zip(members, members[1:])):
            raise DomainError("IndexSubset members must be strictly increasing")
        if members and (members[0] < 1 or members[-1] > self.universe):
            raise DomainError(f"IndexSubset members must lie in [1, {self.universe}]")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, universe: int, members: Iterable[int]) -> "IndexSubset":
        return cls(universe, tuple(sorted(set(members))))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def zero_based(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64) - 1


def restrict(A: DomainMatrix, R: IndexSubset | None = None,
             S: IndexSubset | None = None) -> DomainMatrix:
    """Sub-matrix with rows ``R`` and columns ``S`` (``None`` keeps all)."""
    rows = np.arange(A.rows) if R is None else R.zero_based()
    cols = np.arange(A.cols) if S is None else S.zero_based()
    if R is not None and R.universe != A.rows:
        raise DomainError(f"row subset universe {R.universe} != {A.rows} rows")
    if S is not None and S.universe != A.cols:
        raise DomainError(f"column subset universe {S.universe} != {A.cols} columns")
    return DomainMatrix(A.entries[np.ix_(rows, cols)], A.domain)


def max_independent_subset(cells: Iterable[tuple[int, int]], n: int | None = None):
    """Largest subset of ``cells`` with at most one cell per row and column.

    This is a maximum bipartite matching between rows and columns, found
    with augmenting paths (Kuhn's algorithm).

    Returns:
        ``(size, witness)`` where ``witness`` is a sorted list of cells.
    """
    adj: dict[int, list[int]] = {}
    for i, j in sorted(set(cells)):
        if n is not None and not (1 <= i <= n and 1 <= j <= n):
            raise DomainError(f"cell {(i, j)} outside [1, {n}]^2")
        adj.setdefault(i, []).append(j)
    match_col: dict[int, int] = {}

    def augment(row, seen):
        for col in adj[row]:
            if col in seen:
                continue
            seen.add(col)
            if col not in match_col or augment(match_col[col], seen):
                match_col[col] = row
                return True
        return False

    for row in adj:
        augment(row, set())
    witness = sorted((r, c) for c, r in match_col.items())
    assert len({r for r, _ in witness}) == len(witness) == len({c for _, c in witness})
    return len(witness), witness


def q_value(size: int, w_prime: int, n: int) -> float:
    """``max(|W'|, min(|W|, sqrt(n)))``, zero for an empty set."""
    if size == 0:
        return 0.0
    return float(max(w_prime, min(size, math.sqrt(n))))


@dataclass(frozen=True)
class WrongSet:
    """Positions where ``AB - C`` is nonzero, with derived statistics.

    Attributes:
        n: number of rows of ``C`` (``n_cols`` columns, equal for square).
        cells: 1-based ``(row, col)`` pairs.
        w_rows: number of nonzero rows.
        row_max: largest number of cells in one row.
        w_prime: size of the largest independent subset.
        q: ``max(w_prime, min(|cells|, sqrt(n)))``.
    """

    n: int
    cells: frozenset
    n_cols: int | None = None
    w_rows: int = field(init=False)
    row_max: int = field(init=False)
    w_prime: int = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        cols = self.n if self.n_cols is None else self.n_cols
        object.__setattr__(self, "n_cols", cols)
        cells = frozenset((int(i), int(j)) for i, j in self.cells)
        for i, j in cells:
            if not (1 <= i <= self.n and 1 <= j <= cols):
                raise DomainError(f"cell {(i, j)} outside [1,{self.n}]x[1,{cols}]")
        object.__setattr__(self, "cells", cells)
        counts: dict[int, int] = {}
        for i, _ in cells:
            counts[i] = counts.get(i, 0) + 1
        object.__setattr__(self, "w_rows", len(counts))
        object.__setattr__(self, "row_max", max(counts.values(), default=0))
        object.__setattr__(self, "w_prime", max_independent_subset(cells)[0])
        object.__setattr__(self, "q", q_value(len(cells), self.w_prime, self.n))

    def __len__(self):
        return len(self.cells)

    @property
    def is_independent(self) -> bool:
        return self.w_prime == len(self.cells)

    def bool_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n_cols), dtype=bool)
        for i, j in self.cells:
            out[i - 1, j - 1] = True
        return out

    def row_masks(self) -> list[int]:
        """Column bitmask per row (bit ``j-1`` set iff ``(i, j)`` is wrong)."""
        masks = [0] * self.n
        for i, j in self.cells:
            masks[i - 1] |= 1 << (j - 1)
        return masks

    def with_cell(self, cell: tuple[int, int]) -> "WrongSet":
        return WrongSet(self.n, self.cells | {cell}, self.n_cols)


def difference_matrix(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix) -> DomainMatrix:
    """``D = AB - C``."""
    AB = mat_mul(A, B)
    if AB.shape != C.shape:
        raise DomainError(f"product shape {AB.shape} does not match C {C.shape}")
    return AB.sub(C)


def wrong_set(A: DomainMatrix, B: DomainMatrix, C: DomainMatrix) -> WrongSet:
    D = difference_matrix(A, B, C)
    rows, cols = np.nonzero(D.entries != 0)
    return WrongSet(D.rows, frozenset(zip((rows + 1).tolist(), (cols + 1).tolist())), D.cols)


_PATTERN_RE = re.compile(r"^(none|single|row|independent|random|rectangle)(?::(\d+)(?:x(\d+))?)?$")


@dataclass(frozen=True)
class Pattern:
    """Wrong-entry pattern: ``none``, ``single``, ``row``, ``independent:t``,
    ``random:t`` or ``rectangle:axb``."""

    kind: str
    a: int = 0
    b: int = 0

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        m = _PATTERN_RE.match(text.strip().lower())
        if not m:
            raise DomainError(f"cannot parse pattern {text!r}")
        kind, a, b = m.group(1), m.group(2), m.group(3)
        if kind in ("independent", "random") and (a is None or b is not None):
            raise DomainError(f"pattern {kind} needs one size, e.g. {kind}:3")
        if kind == "rectangle" and (a is None or b is None):
            raise DomainError("pattern rectangle needs dimensions, e.g. rectangle:2x2")
        if kind in ("none", "single", "row") and a is not None:
            raise DomainError(f"pattern {kind} takes no size")
        return cls(kind, int(a or 0), int(b or 0))

    def __str__(self):
        if self.kind in ("independent", "random"):
            return f"{self.kind}:{self.a}"
        if self.kind == "rectangle":
            return f"rectangle:{self.a}x{self.b}"
        return self.kind

    def cells(self, n_rows: int, n_cols: int, rng) -> frozenset:
        """Draw concrete 1-based cell positions for this pattern."""
        rng = as_generator(rng)
        k = self.kind
        if k == "none":
            return frozenset()
        if k == "single":
            return frozenset({(int(rng.integers(1, n_rows + 1)), int(rng.integers(1, n_cols + 1)))})
        if k == "row":
            r = int(rng.integers(1, n_rows + 1))
            return frozenset((r, j) for j in range(1, n_cols + 1))
        if k == "independent":
            if self.a > min(n_rows, n_cols):
                raise DomainError(f"independent:{self.a} infeasible for {n_rows}x{n_cols}")
            rows = rng.choice(n_rows, self.a, replace=False) + 1
            cols = rng.choice(n_cols, self.a, replace=False) + 1
            return frozenset(zip(rows.tolist(), cols.tolist()))
        if k == "random":
            if self.a > n_rows * n_cols:
                raise DomainError(f"random:{self.a} infeasible for {n_rows}x{n_cols}")
            flat = rng.choice(n_rows * n_cols, self.a, replace=False)
            return frozenset((int(f // n_cols) + 1, int(f % n_cols) + 1) for f in flat)
        if self.a > n_rows or self.b > n_cols or self.a < 1 or self.b < 1:
            raise DomainError(f"rectangle:{self.a}x{self.b} infeasible for {n_rows}x{n_cols}")
        rows = rng.choice(n_rows, self.a, replace=False) + 1
        cols = rng.choice(n_cols, self.b, replace=False) + 1
        return frozenset((int(i), int(j)) for i in rows for j in cols)


def generate_instance(n: int, m: int, pattern, domain: DomainSpec, seed=None):
    """Random ``A`` (n x m), ``B`` (m x n) and ``C = AB`` perturbed on a pattern.

    Each wrong cell gets a uniform nonzero additive perturbation, so the
    wrong set of the result is exactly the drawn pattern.

    Returns:
        ``(A, B, C, W)``.
    """
    if isinstance(pattern, str):
        pattern = Pattern.parse(pattern)
    rng = as_generator(seed)
    A = DomainMatrix(domain.random_elements(rng, (n, m)), domain)
    B = DomainMatrix(domain.random_elements(rng, (m, n)), domain)
    cells = pattern.cells(n, n, rng)
    C_entries = np.array(mat_mul(A, B).entries, copy=True)
    if cells:
        deltas = domain.random_elements(rng, len(cells), nonzero=True)
        for (i, j), delta in zip(sorted(cells), deltas):
            C_entries[i - 1, j - 1] = C_entries[i - 1, j - 1] + delta
    C = DomainMatrix(domain.reduce(C_entries), domain)
    W = wrong_set(A, B, C)
    assert W.cells == cells
    return A, B, C, W


def sparse_product_instance(n: int, m: int, cells, domain: DomainSpec, seed=None):
    """``A`` (n x m) and ``B`` (m x n) whose product is nonzero exactly on ``cells``.

    Each nonzero row of the target gets its own inner index, then the pair is
    mixed by a random unit upper-triangular ``Q``: ``A Q`` and ``Q^-1 B``.
    ``Q^-1`` is found by back substitution, which needs no division.
    """
    rng = as_generator(seed)
    cells = sorted(set(cells))
    rows = sorted({i for i, _ in cells})
    if len(rows) > m:
        raise DomainError(f"{len(rows)} nonzero rows cannot be produced with inner size {m}")
    A = np.zeros((n, m), dtype=object)
    B = np.zeros((m, n), dtype=object)
    if domain.kind == "gf":
        nonzero = lambda: int(rng.integers(1, domain.p))
    else:
        nonzero = lambda: int(rng.choice([-1, 1]) * rng.integers(1, 8))
    for t, r in enumerate(rows):
        A[r - 1, t] = 1
        for i, j in cells:
            if i == r:
                B[t, j - 1] = nonzero()
    Q = np.eye(m, dtype=object)
    for i in range(m):
        for j in range(i + 1, m):
            Q[i, j] = int(rng.integers(0, domain.p if domain.kind == "gf" else 3))
    Qinv = np.eye(m, dtype=object)
    for i in range(m - 1, -1, -1):
        for j in range(i + 1, m):
            Qinv[i, j] = -sum(Q[i, t] * Qinv[t, j] for t in range(i + 1, j + 1))
    A2 = DomainMatrix(domain.reduce(A @ Q), domain)
    B2 = DomainMatrix(domain.reduce(Qinv @ B), domain)
    product = mat_mul(A2, B2)
    got = frozenset(zip(*(x + 1 for x in np.nonzero(product.entries != 0))))
    assert got == frozenset(cells), (got, cells)
    return A2, B2


def format_matrix(M: DomainMatrix) -> str:
    """Matrix text format: header ``rows cols domain`` then one line per row."""
    lines = [f"{M.rows} {M.cols} {M.domain}"]
    lines += [" ".join(str(int(v)) for v in row) for row in M.entries]
    return "\n".join(lines) + "\n"


def parse_matrices(text: str) -> list[DomainMatrix]:
    """Read one or more back-to-back matrices in the text format."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    out = []
    pos = 0
    while pos < len(lines):
        head = lines[pos].split()
        if len(head) != 3:
            raise DomainError(f"bad matrix header {lines[pos]!r}")
        rows, cols, domain = int(head[0]), int(head[1]), DomainSpec.parse(head[2])
        body = lines[pos + 1: pos + 1 + rows]
        if len(body) != rows:
            raise DomainError("matrix text ended early")
        values = [[int(v) for v in ln.split()] for ln in body]
        if any(len(r) != cols for r in values):
            raise DomainError(f"expected {cols} entries per row")
        if domain.kind == "gf" and any(not 0 <= v < domain.p for r in values for v in r):
            raise DomainError(f"entries must lie in [0, {domain.p})")
        out.append(DomainMatrix.from_rows(values, domain) if rows else
                   DomainMatrix(np.zeros((0, cols), dtype=np.int64), domain))
        pos += 1 + rows
    return out
