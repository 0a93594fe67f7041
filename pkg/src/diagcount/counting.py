"""Exact counting of box-bounded solutions of diagonal product systems.

All counting is exact integer arithmetic.  The fast paths run on int64
kernel arrays only after proving that no value or multiplicity can exceed
int64 range; otherwise the same algorithms run on Python dictionaries with
arbitrary-precision integers.  The meet-in-the-middle counter and the naive
enumerator are independent routes kept separate on purpose: their agreement
is part of the verification contract.

Box conventions: row i of the unknowns is bounded by bounds[i]; by default
every coordinate is a nonzero integer in [-X_i, X_i] ("all"), or in
[1, X_i] ("positive").  "primitive" additionally demands that each of the
k rows of every solution have coordinate gcd 1 (signed nonzeroboxes).
The zero-allowing variant widens the ranges to include 0 for the first two
modes; it is rejected for primitive counting, where the scaling
decomposition underlying Moebius inversion requires nonzero rows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

import numpy as np

from . import kernels
from .errors import BudgetError
from .instance import ProblemInstance
from .numtheory import integer_root_floor, mobius_sieve

MODES = ("all", "positive", "primitive")

DENSE_BUDGET = 1 << 26        # int64 cells per fold array (512 MiB)
SPARSE_BUDGET = 1 << 24       # distinct keys per half map
NAIVE_BUDGET = 1 << 27        # leaves the naive enumerator may visit
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class BoxSpec:
    """A counting request: box edges per row, mode, zero convention."""

    bounds: tuple[int, ...]
    mode: str = "all"
    nonzero: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        bs = tuple(int(b) for b in self.bounds)
        if any(b < 0 for b in bs):
            raise ValueError("box edges must be >= 0")
        object.__setattr__(self, "bounds", bs)
        if self.mode == "primitive" and not self.nonzero:
            raise ValueError(
                "primitive counting with zero coordinates allowed is not "
                "defined: an all-zero row breaks the scaling decomposition")


@dataclass
class CountReport:
    count: int
    method: str
    elapsed: float
    box: BoxSpec


# ---------------------------------------------------------------------------
# per-column value maps


def term_value_map(bounds, degree: int, signed: bool = True,
                   allow_zero: bool = False) -> dict[int, int]:
    """Multiplicity map of the monomial value (x_1*...*x_k)^degree over one
    column's box.

    signed=True ranges x_i over nonzero [-X_i, X_i]; signed=False over
    [1, X_i].  allow_zero widens either range to include 0.  The signed map
    is derived from the positive one: for even degree every positive value
    acquires multiplicity 2^k, for odd degree the values split evenly
    between v and -v with 2^(k-1) each.  Tests check this against direct
    enumeration.
    """
    bounds = tuple(int(b) for b in bounds)
    if any(b < 0 for b in bounds):
        raise ValueError("box edges must be >= 0")
    k = len(bounds)
    if k == 0:
        raise ValueError("need at least one factor")
    pos = _positive_power_map(bounds, degree)
    if not signed:
        out = dict(pos)
        if allow_zero:
            zero = prod(b + 1 for b in bounds) - prod(bounds)
            if zero:
                out[0] = out.get(0, 0) + zero
        return out
    out = {}
    if degree % 2 == 0:
        mult = 1 << k
        for v, c in pos.items():
            out[v] = c * mult
    else:
        half = 1 << (k - 1)
        for v, c in pos.items():
            out[v] = c * half
            out[-v] = c * half
    if allow_zero:
        zero = prod(2 * b + 1 for b in bounds) - prod(2 * b for b in bounds)
        if zero:
            out[0] = out.get(0, 0) + zero
    return out


def _positive_power_map(bounds, degree: int) -> dict[int, int]:
    """{(x_1*...*x_k)^degree: multiplicity} for x_i in 1..bounds[i]."""
    if any(b == 0 for b in bounds):
        return {}
    total = prod(bounds)
    vmax = total ** degree
    if vmax < _INT64_SAFE and total <= DENSE_BUDGET:
        raw = kernels.enum_product_powers(bounds, degree)
        vals, cnts = kernels.value_counts(raw)
        return {int(v): int(c) for v, c in zip(vals.tolist(), cnts.tolist())}
    # arbitrary-precision fallback
    acc = {1: 1}
    for b in bounds:
        nxt: dict[int, int] = {}
        for v, c in acc.items():
            for x in range(1, b + 1):
                key = v * x
                nxt[key] = nxt.get(key, 0) + c
        acc = nxt
    return {v ** degree: c for v, c in acc.items()}


# ---------------------------------------------------------------------------
# meet-in-the-middle counting


def _split_columns(inst: ProblemInstance) -> tuple[list[int], list[int]]:
    """Split column indices into two halves of near-equal size, balancing
    the coefficient weight (a proxy for folded range width)."""
    s = inst.terms
    weights = sorted(range(s),
                     key=lambda j: (-sum(abs(c) for c in inst.column(j)), j))
    cap = (s + 1) // 2
    h1: list[int] = []
    h2: list[int] = []
    w1 = w2 = 0
    for j in weights:
        w = sum(abs(c) for c in inst.column(j))
        if (w1 <= w2 and len(h1) < cap) or len(h2) >= cap:
            h1.append(j)
            w1 += w
        else:
            h2.append(j)
            w2 += w
    if not h2:  # single-column system
        h2.append(h1.pop())
    return sorted(h1), sorted(h2)


def _mitm_count(inst: ProblemInstance, tmap: dict[int, int],
                dense_budget: int, sparse_budget: int) -> tuple[int, str]:
    """Count solutions given the per-column monomial multiplicity map."""
    if not tmap:
        return 0, "mitm-empty"
    R = inst.equations
    vmax = max(abs(v) for v in tmap)
    col_sum = sum(tmap.values())
    total_tuples = col_sum ** inst.terms
    sum_bounds = [sum(abs(row[j]) for j in range(inst.terms)) * vmax
                  for row in inst.coeffs]
    int64_ok = total_tuples < _INT64_SAFE and all(
        b < _INT64_SAFE for b in sum_bounds)

    h1, h2 = _split_columns(inst)

    if int64_ok and R == 1:
        width = 2 * sum_bounds[0] + 1
        if width <= dense_budget:
            return _mitm_dense_r1(inst, tmap, h1, h2), "mitm-dense"
    if int64_ok:
        strides = [0] * R
        st = 1
        for i in range(R - 1, -1, -1):
            strides[i] = st
            st *= 4 * sum_bounds[i] + 1
        if st < _INT64_SAFE:
            return (_mitm_sparse_packed(inst, tmap, h1, h2, strides,
                                        sparse_budget), "mitm-sparse")
    return _mitm_bigint(inst, tmap, h1, h2, sparse_budget), "mitm-bigint"


def _mitm_dense_r1(inst, tmap, h1, h2) -> int:
    vals = np.array(sorted(tmap), dtype=np.int64)
    cnts = np.array([tmap[int(v)] for v in vals], dtype=np.int64)
    lam = inst.coeffs[0]

    def fold_half(cols):
        lo = hi = 0
        acc = np.array([1], dtype=np.int64)
        for j in cols:
            scaled = lam[j] * vals
            smin = int(scaled.min())
            smax = int(scaled.max())
            new_lo = lo + smin
            new_len = (hi + smax) - new_lo + 1
            acc = kernels.fold_dense(acc, lo, scaled, cnts, new_lo, new_len)
            lo, hi = new_lo, hi + smax
        return acc, lo

    a1, lo1 = fold_half(h1)
    a2, lo2 = fold_half(h2)
    return int(kernels.dot_opposite(a1, lo1, a2, lo2))


def _mitm_sparse_packed(inst, tmap, h1, h2, strides, budget) -> int:
    vals = np.array(sorted(tmap), dtype=np.int64)
    cnts = np.array([tmap[int(v)] for v in vals], dtype=np.int64)

    def fold_half(cols):
        keys = np.zeros(1, dtype=np.int64)
        kc = np.ones(1, dtype=np.int64)
        for j in cols:
            packed = sum(inst.coeffs[i][j] * strides[i]
                         for i in range(inst.equations))
            deltas = packed * vals
            keys, kc = kernels.fold_sparse(keys, kc, deltas, cnts)
            if len(keys) > budget:
                raise BudgetError(
                    f"half map grew to {len(keys)} keys (> {budget}); "
                    "shrink the box or raise the sparse budget")
        return keys, kc

    k1, c1 = fold_half(h1)
    k2, c2 = fold_half(h2)
    return int(kernels.join_sparse(k1, c1, k2, c2))


def _mitm_bigint(inst, tmap, h1, h2, budget) -> int:
    """Dictionary fold on Python integers; exact for any magnitude."""
    R = inst.equations

    def fold_half(cols):
        acc = {(0,) * R: 1}
        for j in cols:
            col = inst.column(j)
            nxt: dict[tuple, int] = {}
            for key, c in acc.items():
                for v, vc in tmap.items():
                    nk = tuple(key[i] + col[i] * v for i in range(R))
                    nxt[nk] = nxt.get(nk, 0) + c * vc
            if len(nxt) > budget:
                raise BudgetError(
                    f"half map grew to {len(nxt)} keys (> {budget}); "
                    "shrink the box or raise the sparse budget")
            acc = nxt
        return acc

    m1 = fold_half(h1)
    m2 = fold_half(h2)
    if len(m2) < len(m1):
        m1, m2 = m2, m1
    total = 0
    for key, c in m1.items():
        opp = tuple(-x for x in key)
        c2 = m2.get(opp)
        if c2:
            total += c * c2
    return total


# ---------------------------------------------------------------------------
# naive counting (independent oracle)


def _naive_count(inst: ProblemInstance, tmap: dict[int, int],
                 budget: int) -> int:
    """Plain depth-first product over per-column value maps.

    Shares nothing with the MITM path beyond the term map itself.
    """
    items = sorted(tmap.items())
    R = inst.equations
    cols = [inst.column(j) for j in range(inst.terms)]
    leaves = len(items) ** inst.terms
    if leaves > budget:
        raise BudgetError(
            f"naive enumeration would visit {leaves} leaves (> {budget}); "
            "use method='mitm' or shrink the box")
    zero = (0,) * R

    def rec(j, sums):
        if j == len(cols):
            return 1 if sums == zero else 0
        col = cols[j]
        total = 0
        for v, c in items:
            nxt = tuple(sums[i] + col[i] * v for i in range(R))
            total += c * rec(j + 1, nxt)
        return total

    return rec(0, zero)


def _naive_primitive(inst: ProblemInstance, bounds, budget: int) -> int:
    """Enumerate actual coordinates, filtering by per-row gcd == 1.

    This is the direct route for primitive counts; the Moebius route must
    match it exactly.
    """
    k = inst.factors
    R = inst.equations
    d = inst.degree
    per_col = prod(2 * b for b in bounds)
    leaves = per_col ** inst.terms
    if leaves > budget:
        raise BudgetError(
            f"primitive enumeration would visit {leaves} leaves (> {budget})")
    ranges = [[x for x in range(-b, b + 1) if x != 0] for b in bounds]
    cols = [inst.column(j) for j in range(inst.terms)]
    zero = (0,) * R

    col_choices = [()]
    for r in ranges:
        col_choices = [c + (x,) for c in col_choices for x in r]
    # each choice: k coordinates of one column
    choices = [(c, prod(c) ** d) for c in col_choices]

    total = 0

    def rec(j, sums, gcds):
        nonlocal total
        if j == len(cols):
            if sums == zero and all(g == 1 for g in gcds):
                total += 1
            return
        col = cols[j]
        for coords, t in choices:
            nxt = tuple(sums[i] + col[i] * t for i in range(R))
            ng = tuple(gcd(gcds[i], abs(coords[i])) for i in range(k))
            rec(j + 1, nxt, ng)

    rec(0, zero, (0,) * k)
    return total


# ---------------------------------------------------------------------------
# assembled counts with caching


_plain_cache: dict[tuple, int] = {}
_primitive_cache: dict[tuple, int] = {}


def clear_caches() -> None:
    _plain_cache.clear()
    _primitive_cache.clear()


def _count_plain(inst: ProblemInstance, bounds, positive: bool,
                 allow_zero: bool, method: str,
                 dense_budget: int = DENSE_BUDGET,
                 sparse_budget: int = SPARSE_BUDGET,
                 naive_budget: int = NAIVE_BUDGET) -> tuple[int, str]:
    if any(b == 0 for b in bounds) and not allow_zero:
        return 0, "empty-box"
    key = (inst, tuple(bounds), positive, allow_zero, method)
    if key in _plain_cache:
        return _plain_cache[key], "cached"
    tmap = term_value_map(bounds, inst.degree, signed=not positive,
                          allow_zero=allow_zero)
    if method == "naive":
        count = _naive_count(inst, tmap, naive_budget)
        how = "naive"
    else:
        count, how = _mitm_count(inst, tmap, dense_budget, sparse_budget)
    _plain_cache[key] = count
    return count, how


def _count_primitive(inst: ProblemInstance, bounds, method: str,
                     dense_budget: int = DENSE_BUDGET,
                     sparse_budget: int = SPARSE_BUDGET,
                     naive_budget: int = NAIVE_BUDGET) -> tuple[int, str]:
    if any(b == 0 for b in bounds):
        return 0, "empty-box"
    if method == "naive":
        return _naive_primitive(inst, bounds, naive_budget), "naive-gcd"
    key = (inst, tuple(bounds))
    if key in _primitive_cache:
        return _primitive_cache[key], "cached"
    # Moebius inversion over row scalings: scaling row i by e_i multiplies
    # every monomial by e_i^d, so solutions at box X/e correspond exactly to
    # imprimitive solutions at box X.
    weights = []
    for X in bounds:
        mu = mobius_sieve(X)
        w: dict[int, int] = {}
        for e in range(1, X + 1):
            if mu[e]:
                q = X // e
                w[q] = w.get(q, 0) + mu[e]
        weights.append(sorted((q, c) for q, c in w.items() if c != 0))
    total = 0

    def rec(i, qs, wprod):
        nonlocal total
        if i == len(weights):
            sub, _ = _count_plain(inst, qs, positive=False, allow_zero=False,
                                  method="mitm", dense_budget=dense_budget,
                                  sparse_budget=sparse_budget)
            total += wprod * sub
            return
        for q, c in weights[i]:
            rec(i + 1, qs + (q,), wprod * c)

    rec(0, (), 1)
    _primitive_cache[key] = total
    return total, "mitm-moebius"


def box_count(inst: ProblemInstance, box: BoxSpec, method: str = "mitm",
              dense_budget: int = DENSE_BUDGET,
              sparse_budget: int = SPARSE_BUDGET,
              naive_budget: int = NAIVE_BUDGET) -> CountReport:
    """Exact number of solutions in the requested box.

    method='mitm' is the production engine (meet-in-the-middle on value
    maps, Moebius inversion for primitive counts); method='naive' is the
    independent enumeration oracle for cross-checking at small boxes.
    """
    if method not in ("mitm", "naive"):
        raise ValueError("method must be 'mitm' or 'naive'")
    if len(box.bounds) != inst.factors:
        raise ValueError(
            f"box has {len(box.bounds)} edges but instance has "
            f"{inst.factors} factors")
    start = time.perf_counter()
    budgets = dict(dense_budget=dense_budget, sparse_budget=sparse_budget,
                   naive_budget=naive_budget)
    if box.mode == "primitive":
        count, how = _count_primitive(inst, box.bounds, method, **budgets)
    else:
        count, how = _count_plain(inst, box.bounds,
                                  positive=(box.mode == "positive"),
                                  allow_zero=not box.nonzero,
                                  method=method, **budgets)
    return CountReport(count=count, method=how,
                       elapsed=time.perf_counter() - start, box=box)


# ---------------------------------------------------------------------------
# parity assembly and height counting


def _positive_count_signed_classes(inst: ProblemInstance, bounds) -> int:
    """sum over all 2^s sign twists eta of the positive-orthant count of the
    twisted system, memoized on a canonical key (column multiset, global
    flip)."""
    cache: dict[tuple, int] = {}
    total = 0
    s = inst.terms
    for mask in range(1 << s):
        signs = [1 - 2 * ((mask >> j) & 1) for j in range(s)]
        twisted = inst.sign_twist(signs)
        cols = sorted(twisted.columns())
        neg = sorted(tuple(-c for c in col) for col in twisted.columns())
        key = min(tuple(cols), tuple(neg))
        if key not in cache:
            cache[key], _ = _count_plain(twisted, bounds, positive=True,
                                         allow_zero=False, method="mitm")
        total += cache[key]
    return total


def parity_assembly_check(inst: ProblemInstance, bounds) -> bool:
    """Exact identity linking the full signed count to positive-orthant
    counts: M = 2^{ks} M+ for even degree, M = 2^{(k-1)s} sum_eta M+(eta)
    for odd degree."""
    k, s = inst.factors, inst.terms
    m_all, _ = _count_plain(inst, bounds, positive=False, allow_zero=False,
                            method="mitm")
    if inst.degree % 2 == 0:
        m_pos, _ = _count_plain(inst, bounds, positive=True,
                                allow_zero=False, method="mitm")
        return m_all == (1 << (k * s)) * m_pos
    total = _positive_count_signed_classes(inst, bounds)
    return m_all == (1 << ((k - 1) * s)) * total


def exact_norm_count(inst: ProblemInstance, norms) -> int:
    """Solution tuples with all coordinates nonzero, every row primitive,
    and the sup-norm of row i exactly norms[i].

    Computed by inclusion-exclusion over the 2^k box corners of primitive
    counts.  Note this counts tuples: it is 2^k times the number of
    underlying unordered points when sign symmetry acts freely.
    """
    norms = tuple(int(m) for m in norms)
    if len(norms) != inst.factors:
        raise ValueError("need one norm per factor row")
    if any(m < 1 for m in norms):
        raise ValueError("norms must be >= 1")
    k = inst.factors
    total = 0
    for mask in range(1 << k):
        shrunk = tuple(norms[i] - ((mask >> i) & 1) for i in range(k))
        if any(b < 0 for b in shrunk):
            continue
        sign = -1 if bin(mask).count("1") % 2 else 1
        sub, _ = _count_primitive(inst, shrunk, method="mitm")
        total += sign * sub
    return total


def hyperbolic_sum(fn, k: int, limit: int):
    """sum of fn(m) over integer tuples m in N^k with m_1*...*m_k <= limit."""
    if limit < 1:
        return 0
    total = 0

    def rec(prefix, rem):
        nonlocal total
        if len(prefix) == k - 1:
            for m in range(1, rem + 1):
                total += fn(prefix + (m,))
            return
        for m in range(1, rem + 1):
            rec(prefix + (m,), rem // m)

    rec((), limit)
    return total


def bounded_height_count(inst: ProblemInstance, height) -> CountReport:
    """Number of height-bounded solution classes: solutions with nonzero
    coordinates, primitive rows, counted up to the 2^k sign action, with
    the product of row sup-norms raised to s - R*d at most `height`.

    The sign action is free on nonzero solutions, so the tuple total is
    exactly divisible by 2^k; this is asserted.
    """
    start = time.perf_counter()
    e = inst.power_sum_exponent()
    if e <= 0:
        raise ValueError(
            "height counting needs s - R*d > 0; this system has "
            f"s - R*d = {e}")
    if Fraction(height) < 1:
        return CountReport(0, "hyperbolic", time.perf_counter() - start,
                           BoxSpec((0,) * inst.factors, "primitive"))
    limit = integer_root_floor(height, e)
    total = hyperbolic_sum(lambda m: exact_norm_count(inst, m),
                           inst.factors, limit)
    twok = 1 << inst.factors
    assert total % twok == 0, (
        "tuple count not divisible by 2^k; sign action accounting is broken")
    return CountReport(total // twok, "hyperbolic",
                       time.perf_counter() - start,
                       BoxSpec((limit,) * inst.factors, "primitive"))
