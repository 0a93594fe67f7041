"""Structural checks on coefficient matrices.

The analytic machinery needs the coefficient matrix to contain, after a
column permutation, R*(n0+1) columns that split into n0+1 disjoint
invertible R x R blocks.  By Aigner's partition criterion such a split of
an R x (R*n) matrix exists iff no l-dimensional subspace contains more than
n*l of its columns for every 0 <= l < R.  This module implements the
subspace statistic, the block-partition search, the coefficient bound that
controls uniformity of every error estimate downstream, and the combined
hypothesis check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import BudgetError, StructureError
from .exactlinalg import adjugate, det_bareiss, rank_int
from .instance import ProblemInstance


def max_columns_in_subspace(matrix, dim: int) -> int:
    """Largest number of columns of `matrix` lying in one subspace of
    dimension <= dim.

    matrix is a list of rows.  dim=0 counts zero columns.  Exact integer
    arithmetic throughout; cost is C(t, dim) rank computations for t columns.
    """
    if dim < 0:
        raise ValueError("dimension must be >= 0")
    rows = [list(r) for r in matrix]
    if not rows:
        return 0
    t = len(rows[0])
    cols = [[row[j] for row in rows] for j in range(t)]
    if dim == 0:
        return sum(1 for c in cols if all(x == 0 for x in c))
    m = min(dim, t)
    # Any optimal subspace can be taken as the span of m of the columns:
    # growing a spanning set never shrinks the set of columns it contains.
    best = 0
    for subset in combinations(range(t), m):
        base = [cols[j] for j in subset]
        r0 = rank_int(base)
        count = 0
        for j in range(t):
            if j in subset:
                count += 1
            elif rank_int(base + [cols[j]]) == r0:
                count += 1
        best = max(best, count)
    return best


@dataclass
class PartitionResult:
    """Outcome of the invertible-block-partition search."""

    found: bool
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    witness_dim: int | None = None   # l with mu(l) > n*l when no partition exists


def _submatrix(cols, subset):
    """Columns `subset` from the column list `cols`, as a row-major matrix."""
    r = len(cols[0])
    return [[cols[j][i] for j in subset] for i in range(r)]


def invertible_block_partition(matrix, node_budget: int = 2_000_000) -> PartitionResult:
    """Partition the columns of an r x (n*r) matrix into n invertible
    r x r blocks, or produce the dimension witnessing impossibility.

    Search is backtracking over blocks ordered by their smallest column
    index, with rank pruning on partial blocks.  On failure the witness
    l (0 <= l < r) with mu(l) > n*l is located by direct computation; its
    existence is Aigner's criterion, asserted here as a self-check.
    """
    rows = [list(r) for r in matrix]
    r = len(rows)
    if r == 0 or len(rows[0]) % r != 0:
        raise ValueError("need an r x (n*r) matrix")
    t = len(rows[0])
    n = t // r
    cols = [[row[j] for row in rows] for j in range(t)]
    nodes = 0

    def extend(used, blocks):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetError(
                f"block-partition search exceeded {node_budget} nodes; "
                "raise node_budget to continue")
        if len(blocks) == n:
            return list(blocks)
        anchor = min(j for j in range(t) if j not in used)
        partial = [anchor]

        def grow():
            nonlocal nodes
            nodes += 1
            if nodes > node_budget:
                raise BudgetError(
                    f"block-partition search exceeded {node_budget} nodes; "
                    "raise node_budget to continue")
            if len(partial) == r:
                if det_bareiss(_submatrix(cols, partial)) != 0:
                    blocks.append(tuple(partial))
                    res = extend(used | set(partial), blocks)
                    if res is not None:
                        return res
                    blocks.pop()
                return None
            start = partial[-1] + 1
            for j in range(start, t):
                if j in used or j in partial:
                    continue
                partial.append(j)
                if rank_int(_submatrix(cols, partial)) == len(partial):
                    res = grow()
                    if res is not None:
                        return res
                partial.pop()
            return None

        return grow()

    found = extend(frozenset(), [])
    if found is not None:
        return PartitionResult(found=True, blocks=found)
    for l in range(r):
        if max_columns_in_subspace(rows, l) > n * l:
            return PartitionResult(found=False, witness_dim=l)
    raise AssertionError(
        "no partition found yet every subspace count is within bound; "
        "this contradicts the partition criterion")


def coefficient_bound_parts(matrix) -> tuple[int, int, int]:
    """The three ingredients of the uniformity bound: the largest
    invertible-minor determinant Delta, the largest |entry| m1, and the
    largest |adjugate entry| m2 over invertible R x R column submatrices.

    Raises StructureError when no R columns are linearly independent.
    """
    rows = [list(r) for r in matrix]
    R = len(rows)
    t = len(rows[0]) if R else 0
    if R == 0 or t < R:
        raise StructureError("matrix has fewer columns than rows")
    cols = [[row[j] for row in rows] for j in range(t)]
    m1 = max((abs(x) for row in rows for x in row), default=0)
    delta = 0
    m2 = 0
    for subset in combinations(range(t), R):
        sub = _submatrix(cols, subset)
        det = det_bareiss(sub)
        if det == 0:
            continue
        delta = max(delta, abs(det))
        adj = adjugate(sub)
        m2 = max(m2, max(abs(x) for arow in adj for x in arow))
    if delta == 0:
        raise StructureError(
            "no invertible R x R column submatrix; the system is degenerate")
    return delta, m1, m2


def coefficient_bound(matrix) -> int:
    """The uniformity bound of a coefficient matrix: the maximum of the
    largest invertible-minor determinant Delta, R * max|entry|, and
    R * max|adjugate entry| over invertible R x R column submatrices.

    Raises StructureError when no R columns are linearly independent.
    """
    delta, m1, m2 = coefficient_bound_parts(matrix)
    R = len(matrix)
    return max(delta, R * m1, R * m2)


@dataclass
class HypothesisReport:
    """Result of checking the analytic hypotheses on an instance."""

    s_large_enough: bool
    submatrix_found: bool
    coefficient_bound: int | None
    column_permutation: tuple[int, ...] | None = None
    block_partition: tuple[tuple[int, ...], ...] | None = None
    undetermined: bool = False      # search budget exhausted, no verdict
    nodes_used: int = 0


def check_hypotheses(inst: ProblemInstance,
                     node_budget: int = 2_000_000) -> HypothesisReport:
    """Check the two standing hypotheses: s >= R*(n0+1), and existence of
    R*(n0+1) columns splitting into n0+1 disjoint invertible blocks.

    The block search runs over all s columns (subset selection is implicit
    in choosing the blocks).  Blocks are ordered by smallest member and
    rank-pruned.  Budget exhaustion reports undetermined=True rather than
    a verdict.  Failures are reported in fields, never raised.
    """
    R = inst.equations
    n = inst.moment_threshold + 1
    s = inst.terms
    s_large_enough = s >= R * n
    try:
        kbound = coefficient_bound(inst.coeffs)
    except StructureError:
        kbound = None

    if not s_large_enough or kbound is None:
        return HypothesisReport(s_large_enough=s_large_enough,
                                submatrix_found=False,
                                coefficient_bound=kbound)

    cols = inst.columns()
    colmat = [[c[i] for c in cols] for i in range(R)]  # rows view
    nodes = 0
    budget_hit = False

    def search(used, blocks, min_anchor):
        nonlocal nodes, budget_hit
        nodes += 1
        if nodes > node_budget:
            budget_hit = True
            return None
        if len(blocks) == n:
            return list(blocks)
        for anchor in range(min_anchor, s):
            if anchor in used:
                continue
            res = grow(used, blocks, [anchor], anchor)
            if res is not None:
                return res
            if budget_hit:
                return None
        return None

    def grow(used, blocks, partial, anchor):
        nonlocal nodes, budget_hit
        nodes += 1
        if nodes > node_budget:
            budget_hit = True
            return None
        if len(partial) == R:
            sub = [[colmat[i][j] for j in partial] for i in range(R)]
            if det_bareiss(sub) != 0:
                blocks.append(tuple(partial))
                res = search(used | set(partial), blocks, anchor + 1)
                if res is not None:
                    return res
                blocks.pop()
            return None
        for j in range(partial[-1] + 1, s):
            if j in used or j in partial:
                continue
            partial.append(j)
            sub = [[colmat[i][x] for x in partial] for i in range(R)]
            if rank_int(sub) == len(partial):
                res = grow(used, blocks, partial, anchor)
                if res is not None:
                    return res
                if budget_hit:
                    partial.pop()
                    return None
            partial.pop()
        return None

    blocks = search(frozenset(), [], 0)
    if blocks is None:
        return HypothesisReport(
            s_large_enough=True, submatrix_found=False,
            coefficient_bound=kbound, undetermined=budget_hit,
            nodes_used=nodes)
    flat = [j for blk in blocks for j in blk]
    rest = [j for j in range(s) if j not in set(flat)]
    return HypothesisReport(
        s_large_enough=True, submatrix_found=True,
        coefficient_bound=kbound,
        column_permutation=tuple(flat + rest),
        block_partition=tuple(blocks),
        nodes_used=nodes)
