"""Real and p-adic solvability with all coordinates nonzero.

Decides positivity of the leading constant through its two local criteria:
a real solution with nonzero coordinates (decided exactly on the
diagonalized linear system) and, for each small prime, a residue witness
that Hensel-lifts to a p-adic solution with nonzero coordinates.  The
p-adic search is honest about its limits: it reports no_witness_found
rather than claiming insolubility, so the combined verdict is a
trichotomy positive / zero / undetermined in which zero only ever comes
from the real obstruction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import BudgetError, StructureError
from .exactlinalg import det_bareiss, feasible_all_ones_lower_bound, nullspace
from .instance import ProblemInstance
from .numtheory import sieve_primes, valuation
from .structure import coefficient_bound

log = logging.getLogger(__name__)

_SEARCH_SPACE_BUDGET = 1 << 26
_SUMSET_BUDGET = 1 << 24
_DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class PrimeReport:
    p: int
    status: str                       # liftable_witness | no_witness_found
    witness: tuple[int, ...] | None
    gamma_used: int
    hensel_subset: tuple[int, ...] | None = None
    minor_valuation: int | None = None


@dataclass
class SolvabilityReport:
    real_status: str                  # solvable_witness | unsolvable | unknown
    real_witness: tuple[Fraction, ...] | None
    per_prime: list[PrimeReport]
    verdict: str                      # positive | zero | undetermined
    prime_bound: int
    gamma_max: int
    notes: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# real solvability on the diagonalized system


def _verify_real_witness(inst: ProblemInstance, u: tuple[Fraction, ...]):
    assert all(x != 0 for x in u)
    for i in range(inst.equations):
        total = sum(Fraction(inst.coeffs[i][j]) * u[j]
                    for j in range(inst.terms))
        assert total == 0, "witness does not satisfy the linear system"


def real_solvable(inst: ProblemInstance):
    """Existence of a real solution with all coordinates nonzero, decided
    exactly on the diagonalized linear system in u_j = y_j^d.

    Odd degree: u ranges over all of R^s, so the question is whether the
    null space of the coefficient matrix contains a vector avoiding every
    coordinate hyperplane; that holds iff no coordinate vanishes on the
    whole null space, and a witness is a generic integer combination of a
    basis.  Even degree: u must be strictly positive, decided by exact
    rational feasibility of {coeffs u = 0, u >= 1}.

    Returns (status, witness) with status in
    {"solvable_witness", "unsolvable"} and the witness an exact rational
    u-vector satisfying the system, or None.
    """
    if inst.degree % 2 == 1:
        basis = nullspace(inst.coeffs)
        if not basis:
            return "unsolvable", None
        dead = [j for j in range(inst.terms)
                if all(b[j] == 0 for b in basis)]
        if dead:
            return "unsolvable", None
        # a coordinate of sum_i t^i b_i is a nonzero polynomial in t of
        # degree < len(basis), so few integer t are bad
        max_tries = inst.terms * len(basis) + 1
        for t in range(1, max_tries + 1):
            u = tuple(sum(Fraction(t) ** i * b[j]
                          for i, b in enumerate(basis))
                      for j in range(inst.terms))
            if all(x != 0 for x in u):
                _verify_real_witness(inst, u)
                return "solvable_witness", u
        raise AssertionError("generic combination search exhausted; "
                             "polynomial root bound violated")
    u = feasible_all_ones_lower_bound(inst.coeffs)
    if u is None:
        return "unsolvable", None
    u = tuple(u)
    _verify_real_witness(inst, u)
    return "solvable_witness", u


# ---------------------------------------------------------------------------
# p-adic witness search


def _verify_padic_witness(inst: ProblemInstance, y, p: int, gamma: int):
    q = p ** gamma
    assert all(0 < yj < q for yj in y)
    for i in range(inst.equations):
        total = sum(inst.coeffs[i][j] * pow(y[j], inst.degree, q)
                    for j in range(inst.terms)) % q
        assert total == 0, "witness does not satisfy the congruences"


def _hensel_condition(inst: ProblemInstance, y, p: int, gamma: int):
    """Quantitative lifting check at a residue solution y mod p^gamma.

    For an R-subset J of columns, the Jacobian minor of the diagonal
    system at y is d^R det(coeffs_J) prod_{j in J} y_j^{d-1}; with e its
    valuation, the Newton iteration converges when gamma > 2e, moving y
    only mod p^{gamma-e}, so coordinates with v_p(y_j) < gamma - e keep
    their valuation and stay nonzero.  Requiring that of every coordinate
    guarantees the lifted solution has all y_j != 0.

    Returns (J, e) for the first subset that qualifies, else None.
    """
    d, R = inst.degree, inst.equations
    vals = [valuation(yj, p) for yj in y]
    vd = valuation(d, p)
    for J in combinations(range(inst.terms), R):
        det = det_bareiss([[inst.coeffs[i][j] for j in J] for i in range(R)])
        if det == 0:
            continue
        e = R * vd + valuation(det, p) + (d - 1) * sum(vals[j] for j in J)
        if gamma > 2 * e and all(v < gamma - e for v in vals):
            return J, e
    return None


def _suffix_value_sets(inst: ProblemInstance, p: int, gamma: int):
    """For each column position, the set of achievable suffix sums of the
    diagonal forms mod p^gamma (value-distribution pruning).  Entry j may
    be None when the sumset construction would exceed its budget; the
    search then proceeds unpruned at that level."""
    q = p ** gamma
    R, d, s = inst.equations, inst.degree, inst.terms
    powers = sorted({pow(y, d, q) for y in range(1, q)})
    suffix: list = [None] * (s + 1)
    suffix[s] = frozenset({(0,) * R})
    for j in range(s - 1, -1, -1):
        col = inst.column(j)
        terms = {tuple(c * w % q for c in col) for w in powers}
        prev = suffix[j + 1]
        if prev is None or len(terms) * len(prev) > _SUMSET_BUDGET:
            suffix[j] = None
            continue
        suffix[j] = frozenset(
            tuple((a + b) % q for a, b in zip(t, u))
            for t in terms for u in prev)
    return suffix


def padic_solvable(inst: ProblemInstance, p: int, gamma_max: int = 6,
                   node_budget: int = _DEFAULT_NODE_BUDGET) -> PrimeReport:
    """Escalating search for a Hensel-liftable residue witness.

    For gamma = 1, 2, ..., gamma_max, enumerates vectors of nonzero
    residues mod p^gamma solving all congruences, by depth-first search
    pruned with the suffix value sets, and accepts the first one passing
    the quantitative lifting condition.  Exhausting gamma_max yields
    status no_witness_found, which is not a claim of insolubility.
    Raises BudgetError (naming the largest completed gamma) when the raw
    search space p^(gamma s) or the node budget is exceeded.
    """
    if gamma_max < 1:
        raise ValueError("gamma_max must be at least 1")
    s, d, R = inst.terms, inst.degree, inst.equations
    nodes = 0
    for gamma in range(1, gamma_max + 1):
        q = p ** gamma
        if q ** s > _SEARCH_SPACE_BUDGET:
            raise BudgetError(
                f"residue search space p^(gamma*s) = {p}^{gamma * s} exceeds "
                f"the budget; largest completed gamma = {gamma - 1}")
        suffix = _suffix_value_sets(inst, p, gamma)
        # term vectors per column, iterated in residue order for
        # deterministic output and small-valuation-first witnesses
        per_column = []
        for j in range(s):
            col = inst.column(j)
            per_column.append([(y, tuple(c * pow(y, d, q) % q for c in col))
                               for y in range(1, q)])

        stack = [(0, (0,) * R, ())]
        found = None
        while stack and found is None:
            j, sigma, prefix = stack.pop()
            nodes += 1
            if nodes > node_budget:
                raise BudgetError(
                    f"node budget exhausted during gamma = {gamma}; largest "
                    f"completed gamma = {gamma - 1}")
            if j == s:
                if all(x == 0 for x in sigma):
                    cond = _hensel_condition(inst, prefix, p, gamma)
                    if cond is not None:
                        found = (prefix, cond)
                continue
            need = tuple(-x % q for x in sigma)
            if suffix[j] is not None and need not in suffix[j]:
                continue
            # push in reverse so the smallest residue is explored first
            for y, term in reversed(per_column[j]):
                nxt = tuple((a + b) % q for a, b in zip(sigma, term))
                stack.append((j + 1, nxt, prefix + (y,)))
        if found is not None:
            y, (J, e) = found
            _verify_padic_witness(inst, y, p, gamma)
            return PrimeReport(p=p, status="liftable_witness", witness=y,
                               gamma_used=gamma, hensel_subset=J,
                               minor_valuation=e)
    return PrimeReport(p=p, status="no_witness_found", witness=None,
                       gamma_used=gamma_max)


def default_prime_bound(inst: ProblemInstance) -> int:
    try:
        return max(20, inst.degree * coefficient_bound(inst.coeffs))
    except StructureError:
        return 20


def _bad_reduction_primes(inst: ProblemInstance) -> set[int]:
    """Primes dividing d times an invertible-minor determinant."""
    R = inst.equations
    bad: set[int] = set()
    values = {inst.degree}
    for J in combinations(range(inst.terms), R):
        det = det_bareiss([[inst.coeffs[i][j] for j in J] for i in range(R)])
        if det != 0:
            values.add(abs(det) * inst.degree)
    for v in values:
        n = v
        f = 2
        while f * f <= n:
            if n % f == 0:
                bad.add(f)
                while n % f == 0:
                    n //= f
            f += 1
        if n > 1:
            bad.add(n)
    return bad


def positivity_report(inst: ProblemInstance, prime_bound: int | None = None,
                      gamma_max: int = 6,
                      node_budget: int = _DEFAULT_NODE_BUDGET
                      ) -> SolvabilityReport:
    """Combined real and p-adic verdict on the sign of the leading
    constant: positive needs a real witness and a liftable witness at
    every checked prime; zero comes only from the exact real obstruction;
    anything resting on a no_witness_found stays undetermined."""
    bound = prime_bound if prime_bound is not None else \
        default_prime_bound(inst)
    notes: list[str] = []
    real_status, real_witness = real_solvable(inst)
    # bad-reduction primes are checked even when above the bound
    primes = sorted(set(sieve_primes(bound)) | _bad_reduction_primes(inst))
    reports = []
    for p in primes:
        try:
            reports.append(padic_solvable(inst, p, gamma_max, node_budget))
        except BudgetError as exc:
            notes.append(f"p = {p}: {exc}")
            reports.append(PrimeReport(p=p, status="no_witness_found",
                                       witness=None, gamma_used=0))
    if real_status == "unsolvable":
        verdict = "zero"
    elif all(r.status == "liftable_witness" for r in reports):
        verdict = "positive"
    else:
        verdict = "undetermined"
    return SolvabilityReport(real_status=real_status,
                             real_witness=real_witness,
                             per_prime=reports, verdict=verdict,
                             prime_bound=bound, gamma_max=gamma_max,
                             notes=notes)
