"""Exact linear algebra over the integers and rationals.

Everything here is fraction-free or Fraction-based; no floating point.
Python integers are arbitrary precision, so no overflow handling is needed
beyond what the language provides.
"""

from __future__ import annotations

from fractions import Fraction


def det_bareiss(mat) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in mat]
    sign = 1
    prev = 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
            a[r][i] = 0
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def adjugate(mat) -> list[list[int]]:
    """Adjugate (transposed cofactor matrix) of a square integer matrix."""
    n = len(mat)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[mat[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            adj[j][i] = (-1) ** (i + j) * det_bareiss(minor)
    return adj


def rank_int(mat) -> int:
    """Rank of an integer matrix via fraction-free elimination."""
    if not mat or not mat[0]:
        return 0
    a = [list(row) for row in mat]
    rows, cols = len(a), len(a[0])
    rank = 0
    row = 0
    for col in range(cols):
        pivot = None
        for r in range(row, rows):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        for r in range(row + 1, rows):
            if a[r][col] != 0:
                p, q = a[row][col], a[r][col]
                a[r] = [p * x - q * y for x, y in zip(a[r], a[row])]
        row += 1
        rank += 1
        if row == rows:
            break
    return rank


def rref_fraction(mat):
    """Reduced row echelon form over Fraction.  Returns (rref, pivot_cols)."""
    a = [[Fraction(x) for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def nullspace(mat) -> list[list[Fraction]]:
    """Basis of the rational null space {v : mat @ v = 0}.

    One basis vector per free column, in free-column order.
    """
    if not mat:
        return []
    cols = len(mat[0])
    rref, pivots = rref_fraction(mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        basis.append(v)
    return basis


def solve_exact(mat, rhs):
    """Solve a square nonsingular system exactly over Fraction."""
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(rhs[i])]
           for i in range(n)]
    rref, pivots = rref_fraction(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [rref[i][n] for i in range(n)]


def feasible_all_ones_lower_bound(mat):
    """Exact feasibility of {mat @ u = 0, u >= 1} over the rationals.

    Returns a witness u (list of Fraction, every entry >= 1) or None when the
    system is infeasible.  Substituting u = 1 + w reduces to phase-1 simplex
    on {mat @ w = -mat @ 1, w >= 0} with artificial variables and Bland's
    rule, all in exact arithmetic.
    """
    if not mat:
        return None
    m = len(mat)
    n = len(mat[0])
    b = [-sum(row) for row in mat]
    # normalize rows so b >= 0
    rows = []
    for i in range(m):
        if b[i] < 0:
            rows.append([Fraction(-x) for x in mat[i]] + [Fraction(-b[i])])
        else:
            rows.append([Fraction(x) for x in mat[i]] + [Fraction(b[i])])
    # tableau columns: n real vars, m artificials, rhs
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i][:n] + art + [rows[i][n]])
    basis = [n + i for i in range(m)]
    # objective: minimize sum of artificials; reduced costs via row sums
    ncols = n + m

    def reduced_cost(col):
        # cost of artificials is 1, real vars 0; c_j - sum over basic rows
        cj = Fraction(1) if col >= n else Fraction(0)
        z = Fraction(0)
        for i in range(m):
            if basis[i] >= n:
                z += tab[i][col]
        return cj - z

    guard = 0
    limit = 10000 * (m + n + 1)
    while True:
        guard += 1
        if guard > limit:
            raise RuntimeError("simplex failed to terminate")
        enter = None
        for j in range(ncols):  # Bland: first improving column
            if j in basis:
                continue
            if reduced_cost(j) < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][ncols] / tab[i][enter]
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            # unbounded in phase 1 cannot happen (objective >= 0); defensive
            raise RuntimeError("phase-1 simplex unbounded")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        basis[leave] = enter

    objective = sum(tab[i][ncols] for i in range(m) if basis[i] >= n)
    if objective != 0:
        return None
    w = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            w[basis[i]] = tab[i][ncols]
    u = [Fraction(1) + x for x in w]
    assert all(x >= 1 for x in u)
    assert all(sum(row[j] * u[j] for j in range(n)) == 0 for row in mat)
    return u
