"""Exact-rational linear machinery: the columns condition for integer matrices,
the single-equation zero-subset test, and the constant-solution test for one
inhomogeneous equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arith import DegenerateInput, ParregError

COLUMN_LIMIT = 16


class DimensionLimitExceeded(ParregError):
    pass


@dataclass(frozen=True)
class QMatrix:
    """Rectangular grid of exact rationals, stored row-major."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise DegenerateInput("matrix must have at least one row and column")
        width = len(self.entries[0])
        if any(len(r) != width for r in self.entries):
            raise DegenerateInput("rows must have equal length")

    @classmethod
    def from_rows(cls, rows) -> "QMatrix":
        return cls(tuple(tuple(Fraction(v) for v in row) for row in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def column(self, j: int) -> tuple[Fraction, ...]:
        """1-indexed column."""
        return tuple(row[j - 1] for row in self.entries)

    def column_sum(self, indices) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.rows
        for j in indices:
            for i, v in enumerate(self.column(j)):
                out[i] += v
        return tuple(out)


@dataclass(frozen=True)
class ColumnsCertificate:
    """Ordered partition of the column indices (1-indexed) with, for each block
    after the first, the coefficients expressing that block's column sum over
    the earlier columns (sorted ascending; free variables pinned to zero).
    """

    ordered_partition: tuple[frozenset[int], ...]
    span_witnesses: tuple[tuple[Fraction, ...], ...]


def _solve_exact(columns, target) -> tuple[Fraction, ...] | None:
    """Coefficients x with sum_k x_k * columns[k] == target, or None.

    Gaussian elimination over Fraction; free variables are set to zero so the
    answer is deterministic.
    """
    nrows = len(target)
    ncols = len(columns)
    aug = [[columns[k][i] for k in range(ncols)] + [target[i]] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = aug[r][c]
        aug[r] = [v / inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for row, c in enumerate(pivots):
        x[c] = aug[row][ncols]
    return tuple(x)


def _search(M: QMatrix, earlier: tuple[int, ...], remaining: tuple[int, ...]):
    if not remaining:
        return []
    ecols = [M.column(j) for j in earlier]
    for size in range(1, len(remaining) + 1):
        for block in combinations(remaining, size):
            s = M.column_sum(block)
            coeffs = _solve_exact(ecols, s)
            if coeffs is None:
                continue
            rest = _search(
                M,
                tuple(sorted(earlier + block)),
                tuple(j for j in remaining if j not in block),
            )
            if rest is not None:
                return [(frozenset(block), coeffs)] + rest
    return None


def columns_condition(M: QMatrix) -> ColumnsCertificate | None:
    """Search ordered partitions of the columns: the first block must sum to
    zero, each later block's sum must lie in the rational span of all earlier
    columns.  Blocks are tried size-ascending then lexicographically, so the
    certificate is deterministic.
    """
    if M.cols > COLUMN_LIMIT:
        raise DimensionLimitExceeded(
            f"{M.cols} columns exceeds the search cap of {COLUMN_LIMIT}"
        )
    found = _search(M, (), tuple(range(1, M.cols + 1)))
    if found is None:
        return None
    partition = tuple(block for block, _ in found)
    witnesses = tuple(coeffs for _, coeffs in found[1:])
    return ColumnsCertificate(ordered_partition=partition, span_witnesses=witnesses)


def verify_columns_certificate(M: QMatrix, cert: ColumnsCertificate) -> bool:
    """Recheck a certificate by direct arithmetic: partition shape, zero first
    sum, and each recorded combination reproducing its block sum exactly.
    """
    blocks = cert.ordered_partition
    if not blocks or any(not b for b in blocks):
        return False
    seen: set[int] = set()
    for b in blocks:
        if b & seen:
            return False
        seen |= b
    if seen != set(range(1, M.cols + 1)):
        return False
    if len(cert.span_witnesses) != len(blocks) - 1:
        return False
    if any(v != 0 for v in M.column_sum(blocks[0])):
        return False
    earlier = sorted(blocks[0])
    for block, coeffs in zip(blocks[1:], cert.span_witnesses):
        if len(coeffs) != len(earlier):
            return False
        s = M.column_sum(block)
        combo = [Fraction(0)] * M.rows
        for x, j in zip(coeffs, earlier):
            for i, v in enumerate(M.column(j)):
                combo[i] += x * v
        if tuple(combo) != s:
            return False
        earlier = sorted(set(earlier) | block)
    return True


def single_equation_pr(coeffs) -> frozenset[int] | None:
    """Lexicographically smallest nonempty index subset (1-indexed) whose
    coefficients sum to zero, or None.  Depth-first preorder over index tuples
    visits subsets in exactly lexicographic order.
    """
    cs = [Fraction(c) for c in coeffs]
    if not cs:
        raise DegenerateInput("need at least one coefficient")
    if any(c == 0 for c in cs):
        # with a zero coefficient the subset criterion and the columns
        # condition diverge; callers must drop absent variables first
        raise DegenerateInput("coefficients must be nonzero")
    n = len(cs)

    def dfs(prefix: tuple[int, ...], total: Fraction, start: int):
        for i in range(start, n):
            cur = prefix + (i + 1,)
            t = total + cs[i]
            if t == 0:
                return cur
            hit = dfs(cur, t, i + 1)
            if hit is not None:
                return hit
        return None

    hit = dfs((), Fraction(0), 0)
    return frozenset(hit) if hit is not None else None


def inhomogeneous_constant_solution(coeffs, rhs) -> int | None:
    """Integer t with (sum of coeffs) * t == rhs, or None.  A zero coefficient
    sum admits t exactly when rhs is zero (return 0).
    """
    cs = [Fraction(c) for c in coeffs]
    if not cs:
        raise DegenerateInput("need at least one coefficient")
    s = sum(cs, Fraction(0))
    r = Fraction(rhs)
    if s == 0:
        return 0 if r == 0 else None
    t = r / s
    return int(t) if t.denominator == 1 else None
