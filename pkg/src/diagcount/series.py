"""Singular series: complete exponential sums, local densities, zeta.

The q-th term of the series is a normalized complete exponential sum over
the residues prime to q; its partial sums over prime powers equal exact
congruence solution densities, which gives every value here an independent
integer-arithmetic cross-check.  That identity is enforced (not merely
tested) in euler_factor: the two routes must agree to 1e-9 or the call
fails with ConsistencyError.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod

import numpy as np

from . import kernels
from .errors import BudgetError, ConsistencyError, StructureError
from .instance import ProblemInstance
from .numtheory import sieve_primes, valuation
from .structure import coefficient_bound

log = logging.getLogger(__name__)

RESIDUE_CONVENTION = (
    "series terms sum the phase parameters over {0..q-1}^R restricted by "
    "gcd(a_1,..,a_R,q)=1; q=1 contributes exactly 1")

_STATE_BUDGET = 1 << 22      # congruence DP cells
_DEPTH_COST_CAP = 1 << 24    # bound on q^(R+1) when auto-extending depth
_IM_TOL = 1e-9


@lru_cache(maxsize=512)
def _monomial_residue_counts(q: int, degree: int, k: int) -> tuple[int, ...]:
    """Distribution of (x_1*...*x_k)^degree over Z/q, x_i full residues."""
    if q ** k < (1 << 62):
        return tuple(int(x) for x in
                     kernels.residue_power_counts(q, degree, k).tolist())
    dist = [1] * q
    for _ in range(k - 1):
        nxt = [0] * q
        for r, c in enumerate(dist):
            if c:
                for b in range(q):
                    nxt[(r * b) % q] += c
        dist = nxt
    out = [0] * q
    for r, c in enumerate(dist):
        if c:
            out[pow(r, degree, q)] += c
    return tuple(out)


@lru_cache(maxsize=256)
def exp_sum_table(q: int, k: int, degree: int) -> np.ndarray:
    """S(q, a) for all a in 0..q-1: the complete sum of e(a*(x_1...x_k)^d/q)
    over x in (Z/q)^k, computed as the discrete Fourier transform of the
    monomial residue distribution (positive-sign convention, hence the
    conjugate of the numpy forward transform)."""
    if q == 1:
        return np.ones(1, dtype=np.complex128)
    dist = np.array(_monomial_residue_counts(q, degree, k), dtype=np.float64)
    return np.conj(np.fft.fft(dist))


def exp_sum(q: int, a: int, k: int, degree: int) -> complex:
    """S(q, a) with a reduced mod q."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    return complex(exp_sum_table(q, k, degree)[a % q])


def series_term(inst: ProblemInstance, q: int) -> float:
    """The q-th series term: q^{-ks} * sum over phase vectors prime to q of
    the product of exponential sums at the column linear forms.

    The imaginary part must vanish up to rounding; it is asserted below
    1e-9 and the real part returned.
    """
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q == 1:
        return 1.0
    R = inst.equations
    k, s, d = inst.factors, inst.terms, inst.degree
    table = exp_sum_table(q, k, d)
    if R == 1:
        a = np.arange(q, dtype=np.int64)
        units = a[np.gcd(a, q) == 1]
        total = np.ones(len(units), dtype=np.complex128)
        for j in range(s):
            lam = inst.coeffs[0][j]
            total *= table[(lam * units) % q]
        val = complex(total.sum())
    else:
        grids = np.meshgrid(*([np.arange(q, dtype=np.int64)] * R),
                            indexing="ij")
        flat = [g.ravel() for g in grids]
        g = flat[0].copy()
        for extra in flat[1:]:
            g = np.gcd(g, extra)
        mask = np.gcd(g, q) == 1
        sel = [f[mask] for f in flat]
        total = np.ones(mask.sum(), dtype=np.complex128)
        for j in range(s):
            form = np.zeros_like(sel[0])
            for i in range(R):
                form += inst.coeffs[i][j] * sel[i]
            total *= table[form % q]
        val = complex(total.sum())
    val /= q ** (k * s)
    assert abs(val.imag) <= _IM_TOL, (
        f"series term at q={q} has imaginary part {val.imag:.3e}")
    return float(val.real)


def congruence_count(inst: ProblemInstance, q: int) -> int:
    """Exact number of solutions of the system of congruences mod q over
    full residue vectors (all coordinates 0..q-1)."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q == 1:
        return 1
    R, k, s = inst.equations, inst.factors, inst.terms
    dist = _monomial_residue_counts(q, inst.degree, k)
    columns = [inst.column(j) for j in range(s)]
    states = q ** R
    if states > _STATE_BUDGET:
        raise BudgetError(
            f"congruence counting mod {q} needs {states} DP cells "
            f"(> {_STATE_BUDGET}); reduce the modulus or depth")
    count_bound = q ** (k * s)
    if count_bound < (1 << 62):
        arr = np.array(dist, dtype=np.int64)
        return int(kernels.congruence_count(q, arr, columns))
    stepwise = _stepwise_convolution_count(inst, q, dist, columns)
    if stepwise is not None:
        return stepwise
    # arbitrary-precision DP (per-cell counts genuinely exceed 64 bits)
    state: dict[tuple, int] = {(0,) * R: 1}
    support = [(r, c) for r, c in enumerate(dist) if c]
    for col in columns:
        nxt: dict[tuple, int] = {}
        for key, c in state.items():
            for r, rc in support:
                nk = tuple((key[i] + col[i] * r) % q for i in range(R))
                nxt[nk] = nxt.get(nk, 0) + c * rc
        state = nxt
    return state.get((0,) * R, 0)


def _stepwise_convolution_count(inst: ProblemInstance, q: int,
                                dist, columns) -> int | None:
    """Vectorized residue DP in int64 with an exact a-priori bound checked
    before every convolution step.  The a-priori product bound q^{ks} can be
    wildly pessimistic about individual DP cells, so this path recovers the
    fast route for moduli the compiled kernel refuses.  Returns None the
    moment a step could exceed the int64 range; the caller then falls back
    to arbitrary precision."""
    R, k = inst.equations, inst.factors
    term_sum = q ** k
    if term_sum >= (1 << 63):
        return None
    dist_arr = np.array(dist, dtype=np.int64)
    if R == 1:
        idx = np.arange(q, dtype=np.int64)
        cur = np.zeros(q, dtype=np.int64)
        cur[0] = 1
        cur_sum = 1
        for col in columns:
            c = col[0] % q
            term = np.zeros(q, dtype=np.int64)
            np.add.at(term, (c * idx) % q, dist_arr)
            bound = min(int(cur.max()) * term_sum,
                        int(term.max()) * cur_sum)
            if bound >= (1 << 63):
                return None
            lin = np.convolve(cur, term)
            nxt = lin[:q].copy()
            nxt[:q - 1] += lin[q:]
            cur = nxt
            cur_sum *= term_sum
        return int(cur[0])
    support = [(r, int(rc)) for r, rc in enumerate(dist) if rc]
    axes = tuple(range(R))
    cur = np.zeros((q,) * R, dtype=np.int64)
    cur[(0,) * R] = 1
    cur_sum = 1
    for col in columns:
        cells: dict[tuple, int] = {}
        for r, rc in support:
            key = tuple((ci * r) % q for ci in col)
            cells[key] = cells.get(key, 0) + rc
        bound = min(int(cur.max()) * term_sum,
                    max(cells.values()) * cur_sum)
        if bound >= (1 << 63):
            return None
        nxt = np.zeros_like(cur)
        for key, rc in cells.items():
            nxt += rc * np.roll(cur, shift=key, axis=axes)
        cur = nxt
        cur_sum *= term_sum
    return int(cur[(0,) * R])


def euler_factor(inst: ProblemInstance, p: int, depth: int) -> float:
    """Local density at p to the given depth, computed two independent ways:

      exact:    #solutions mod p^depth / p^{depth*(ks-R)}
      analytic: sum of series terms at 1, p, ..., p^depth

    Disagreement beyond 1e-9 raises ConsistencyError.  The exact value is
    returned.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    q = p ** depth
    phi = congruence_count(inst, q)
    exact = Fraction(phi,
                     p ** (depth * (inst.factors * inst.terms
                                    - inst.equations)))
    analytic = sum(series_term(inst, p ** l) for l in range(depth + 1))
    if abs(float(exact) - analytic) > 1e-9:
        raise ConsistencyError(
            f"local density mismatch at p={p}, depth={depth}: "
            f"exact {float(exact)!r} vs analytic {analytic!r}")
    return float(exact)


@dataclass
class SeriesEstimate:
    """Truncated singular series with its diagnostics."""

    value: float
    truncation: int
    tail_heuristic: float
    euler_factors: list[tuple[int, int, float]]   # (p, depth, value)
    euler_product: float
    convention_note: str = RESIDUE_CONVENTION
    obstructed_prime: int | None = None
    notes: list[str] = field(default_factory=list)


def _euler_depth_default(p: int, degree: int) -> int:
    return max(1, 2 * valuation(degree, p) + 1) if degree % p == 0 else 1


def singular_series(inst: ProblemInstance, truncation: int = 300,
                    euler_prime_bound: int | None = None,
                    euler_depth: int | None = None,
                    stabilization_tol: float = 1e-9) -> SeriesEstimate:
    """Direct truncated sum of series terms plus an Euler-product
    cross-estimate.

    The direct sum runs q = 1..truncation in ascending order (deterministic
    float accumulation).  The tail heuristic follows the proven bound shape
    in the truncation parameter and the coefficient bound; it is a
    diagnostic, not a certificate.  Euler factors extend their depth until
    two successive depths differ by less than stabilization_tol or the
    state budget stops them.  An exactly zero factor marks the obstructed
    prime: the series collapses to zero.
    """
    notes: list[str] = []
    R, s, d = inst.equations, inst.terms, inst.degree
    n0 = inst.moment_threshold
    if s < R * (n0 + 1):
        msg = (f"s={s} is below the analytic threshold R*(n0+1)="
               f"{R * (n0 + 1)}; absolute convergence is not guaranteed")
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)

    value = 0.0
    for q in range(1, truncation + 1):
        value += series_term(inst, q)

    try:
        kbound = coefficient_bound(inst.coeffs)
        tail = truncation ** (-1.0 / d) * kbound ** ((n0 + 1) / d + R - 1)
    except StructureError:
        kbound = None
        tail = float("inf")
        notes.append("no invertible coefficient submatrix; tail bound unavailable")

    pbound = euler_prime_bound if euler_prime_bound is not None \
        else min(truncation, 100)
    factors: list[tuple[int, int, float]] = []
    product = 1.0
    obstructed = None
    for p in sieve_primes(pbound):
        depth = euler_depth or _euler_depth_default(p, d)
        val = euler_factor(inst, p, depth)
        while True:
            # extension cost is dominated by the congruence DP, roughly
            # s * q^(R+1); cap the next modulus accordingly
            if p ** ((depth + 1) * (R + 1)) > _DEPTH_COST_CAP or depth >= 12:
                notes.append(f"p={p}: depth capped at {depth} by cost budget")
                break
            nval = euler_factor(inst, p, depth + 1)
            depth += 1
            stable = abs(nval - val) < stabilization_tol
            val = nval
            if stable:
                break
        factors.append((p, depth, val))
        product *= val
        if val == 0.0 and obstructed is None:
            obstructed = p
            notes.append(
                f"local density at p={p} is exactly zero to depth {depth}: "
                "no solutions mod p^depth, the series vanishes")
    return SeriesEstimate(value=value, truncation=truncation,
                          tail_heuristic=tail, euler_factors=factors,
                          euler_product=product,
                          obstructed_prime=obstructed, notes=notes)


# -- zeta ---------------------------------------------------------------


def _bernoulli_numbers(count: int) -> list[Fraction]:
    """B_0..B_count by the defining recurrence, exact."""
    from math import comb
    B = [Fraction(1)]
    for m in range(1, count + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += comb(m + 1, j) * B[j]
        B.append(-acc / (m + 1))
    return B


_BERN = _bernoulli_numbers(32)


def zeta_real(x: float, tol: float = 1e-12) -> float:
    """Riemann zeta on the real axis, x > 1, by Euler-Maclaurin summation
    with a certified truncation bound below tol.

    The remainder after the j-th correction term is bounded by the first
    omitted term for real positive arguments; N doubles until that bound
    clears tol.
    """
    if not x > 1:
        raise ValueError("zeta_real needs x > 1")
    from math import factorial
    J = 10
    N = 16
    while True:
        # remainder bound: |B_{2J+2}/(2J+2)! * (x)_{2J+1} * N^{-x-2J-1}|
        rising = 1.0
        for i in range(2 * J + 1):
            rising *= (x + i)
        bound = abs(float(_BERN[2 * J + 2])) / factorial(2 * J + 2) \
            * rising * N ** (-(x + 2 * J + 1))
        if bound <= tol / 2 or N >= (1 << 20):
            break
        N *= 2
    total = sum(n ** (-x) for n in range(1, N))
    total += 0.5 * N ** (-x)
    total += N ** (1 - x) / (x - 1)
    for j in range(1, J + 1):
        rising = 1.0
        for i in range(2 * j - 1):
            rising *= (x + i)
        total += float(_BERN[2 * j]) / factorial(2 * j) * rising \
            * N ** (-(x + 2 * j - 1))
    return total
