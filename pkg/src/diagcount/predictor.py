"""Predicted leading constants and empirical-vs-predicted comparisons.

The box-count constant is the product of the local-density series and the
real-density integral; the primitive and height-bounded counts divide by
powers of zeta.  Comparisons run the exact counters against the predicted
main term and report ratios; the height comparison also fits the
log-polynomial whose top coefficient the theory pins down.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from itertools import product as iterproduct
from math import gcd

import numpy as np

from .counting import BoxSpec, box_count, bounded_height_count
from .errors import BudgetError, ConsistencyError, UnsupportedConfigurationError
from .instance import ProblemInstance
from .integral import IntegralEstimate, singular_integral_full
from .series import SeriesEstimate, singular_series, zeta_real
from .solvability import SolvabilityReport, positivity_report
from .structure import HypothesisReport, check_hypotheses, \
    coefficient_bound, coefficient_bound_parts

log = logging.getLogger(__name__)


@dataclass
class PredictionReport:
    C_lambda: float
    C_primitive_factor: float          # zeta(s - R d)^(-k)
    C_hyperbolic: float
    zeta_value: float
    power_sum_exponent: int
    positivity: str
    combined_error: float
    series: SeriesEstimate
    integral: IntegralEstimate
    solvability: SolvabilityReport
    hypotheses: HypothesisReport
    notes: list[str] = field(default_factory=list)


@dataclass
class ComparisonRow:
    scale: tuple
    empirical: int
    predicted: float
    ratio: float | None


def predict(inst: ProblemInstance,
            series_truncation: int = 300,
            euler_depth: int | None = None,
            integral_truncation: float | None = None,
            integral_method: str | None = None,
            samples: int = 200_000,
            seed: int = 0,
            prime_bound: int | None = None,
            gamma_max: int = 6) -> PredictionReport:
    """Assemble the predicted constants for one instance.

    The box constant is series times integral; the primitive counts carry
    an extra zeta(s-Rd)^(-k), and the height-bounded constant divides
    further by 2^k (k-1)!.  Hypothesis failures warn but do not stop the
    computation.  The integral route defaults to quadrature for one
    equation and to the seeded slice oracle for two or more, where nested
    quadrature is impractically slow.
    """
    k = inst.factors
    e = inst.power_sum_exponent()
    if e <= 1:
        raise UnsupportedConfigurationError(
            f"s - R*d = {e} <= 1: the zeta normalization diverges and no "
            "asymptotic prediction is defined")
    notes: list[str] = []
    hyp = check_hypotheses(inst)
    if not (hyp.s_large_enough and hyp.submatrix_found):
        msg = ("analytic hypotheses not verified (s_large_enough="
               f"{hyp.s_large_enough}, submatrix_found={hyp.submatrix_found})"
               "; constants computed anyway")
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)

    series = singular_series(inst, truncation=series_truncation,
                             euler_depth=euler_depth)
    method = integral_method if integral_method is not None else \
        ("quadrature" if inst.equations == 1 else "slice")
    integral = singular_integral_full(inst, truncation=integral_truncation,
                                      method=method, samples=samples,
                                      seed=seed)
    solv = positivity_report(inst, prime_bound=prime_bound,
                             gamma_max=gamma_max)

    zeta = zeta_real(float(e))
    c_lambda = series.value * integral.value
    c_prim = zeta ** (-k)
    c_hyp = c_lambda * c_prim / (2 ** k * math.factorial(k - 1))

    err_series = series.tail_heuristic
    err_integral = integral.quadrature_error + integral.tail_heuristic
    combined = (abs(series.value) * err_integral
                + abs(integral.value) * err_series
                + err_series * err_integral)

    recomputed = c_lambda * c_prim / (2 ** k * math.factorial(k - 1))
    if abs(recomputed - c_hyp) > 1e-12 * max(1.0, abs(c_hyp)):
        raise ConsistencyError("height-constant identity violated")
    if solv.verdict == "zero" and abs(c_lambda) > combined:
        raise ConsistencyError(
            f"positivity says zero but C = {c_lambda} exceeds the combined "
            f"truncation error {combined}")
    return PredictionReport(C_lambda=c_lambda, C_primitive_factor=c_prim,
                            C_hyperbolic=c_hyp, zeta_value=zeta,
                            power_sum_exponent=e,
                            positivity=solv.verdict,
                            combined_error=combined, series=series,
                            integral=integral, solvability=solv,
                            hypotheses=hyp, notes=notes)


# ---------------------------------------------------------------------------
# empirical comparisons


def _box_product(bounds) -> int:
    out = 1
    for b in bounds:
        out *= int(b)
    return out


def compare_box(inst: ProblemInstance, box_list, mode: str = "all",
                prediction: PredictionReport | None = None,
                method: str = "mitm", **predict_opts) -> list[ComparisonRow]:
    """Exact counts over growing boxes against the predicted main term
    C * (product of box edges)^(s - R d), with C the box constant for
    mode='all' and zeta(s-Rd)^(-k) times it for mode='primitive'.
    Rows are sorted by the box product."""
    if mode not in ("all", "primitive"):
        raise ValueError("compare_box mode must be 'all' or 'primitive'")
    pred = prediction if prediction is not None else \
        predict(inst, **predict_opts)
    c = pred.C_lambda if mode == "all" else \
        pred.C_lambda * pred.C_primitive_factor
    e = pred.power_sum_exponent
    rows = []
    for bounds in sorted(box_list, key=_box_product):
        bounds = tuple(int(b) for b in bounds)
        rep = box_count(inst, BoxSpec(bounds, mode), method=method)
        predicted = c * float(_box_product(bounds)) ** e
        ratio = rep.count / predicted if predicted != 0 else None
        rows.append(ComparisonRow(scale=bounds, empirical=rep.count,
                                  predicted=predicted, ratio=ratio))
    return rows


@dataclass
class HyperbolicFit:
    rows: list[ComparisonRow]
    coefficients: list[float]          # basis 1, log B, ..., (log B)^(k-1)
    fitted_leading: float
    predicted_leading: float
    degree: int
    residuals: list[float]


def compare_hyperbolic(inst: ProblemInstance, height_list,
                       prediction: PredictionReport | None = None,
                       **predict_opts) -> HyperbolicFit:
    """Height-bounded counts against the predicted B Q(log B) growth.

    Fits N(B)/B by least squares on the monomial basis
    {1, log B, ..., (log B)^(k-1)}; the polynomial is monic of degree k-1
    up to the overall constant, so the fitted top coefficient estimates
    the height constant.  Needs at least k sample heights.
    """
    k = inst.factors
    heights = sorted(set(int(b) for b in height_list))
    if len(heights) < k:
        raise ValueError(
            f"need at least k = {k} heights to fit a degree-{k - 1} "
            f"polynomial, got {len(heights)}")
    pred = prediction if prediction is not None else \
        predict(inst, **predict_opts)
    rows = []
    ys = []
    for b in heights:
        rep = bounded_height_count(inst, b)
        predicted = pred.C_hyperbolic * b * math.log(b) ** (k - 1)
        ratio = rep.count / predicted if predicted != 0 else None
        rows.append(ComparisonRow(scale=(b,), empirical=rep.count,
                                  predicted=predicted, ratio=ratio))
        ys.append(rep.count / b)
    design = np.array([[math.log(b) ** j for j in range(k)]
                       for b in heights], dtype=float)
    target = np.array(ys, dtype=float)
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    residuals = (target - design @ coef).tolist()
    return HyperbolicFit(rows=rows, coefficients=coef.tolist(),
                         fitted_leading=float(coef[k - 1]),
                         predicted_leading=pred.C_hyperbolic,
                         degree=k - 1, residuals=residuals)


# ---------------------------------------------------------------------------
# family constants


def _primitive_sup_vectors(length: int, sup: int):
    """All integer vectors of the given length with every entry nonzero,
    sup-norm exactly sup, and coordinate gcd 1, in lexicographic order."""
    values = [v for v in range(-sup, sup + 1) if v != 0]
    for vec in iterproduct(values, repeat=length):
        if max(abs(v) for v in vec) != sup:
            continue
        g = 0
        for v in vec:
            g = gcd(g, v)
        if g == 1:
            yield vec


@dataclass
class FamilyConstantReport:
    value: float
    r: int
    u: tuple[int, ...]
    cardinality: int
    l: int                             # factors left after slicing: k - r
    zeta_factor: float
    distinct_matrices: int
    bound_checks_passed: bool
    member_values: list[float]
    notes: list[str] = field(default_factory=list)


def family_constant(inst: ProblemInstance, r: int, u,
                    enumeration_budget: int = 4096,
                    **predict_opts) -> FamilyConstantReport:
    """The sliced-family constant: zeta(s-Rd)^(-l) times the sum of box
    constants of the derived systems over the permissible vectors of
    sup-norms exactly u (primitive, all coordinates nonzero), where the
    derived system keeps l = k - r factors and scales column j by the
    d-th power of the product of the slice coordinates y_{i,j}.

    Also verifies, for every member, the derived uniformity bound against
    max(<u>^{Rd} Delta, R <u>^d m1, R <u>^{(R-1)d} m2) computed from the
    base matrix, raising ConsistencyError on violation.
    """
    k, d, R, s = inst.factors, inst.degree, inst.equations, inst.terms
    u = tuple(int(x) for x in u)
    if not 1 <= r <= k - 1:
        raise ValueError(f"r must be between 1 and k-1 = {k - 1}")
    if len(u) != r or any(x < 1 for x in u):
        raise ValueError("u must be r positive integers")
    e = inst.power_sum_exponent()
    l = k - r

    counts = []
    for ui in u:
        n = sum(1 for _ in _primitive_sup_vectors(s, ui))
        counts.append(n)
    cardinality = math.prod(counts)
    if cardinality > enumeration_budget:
        raise BudgetError(
            f"permissible set has {cardinality} members, over the "
            f"enumeration budget {enumeration_budget}")

    delta, m1, m2 = coefficient_bound_parts(inst.coeffs)
    u_prod = math.prod(u)
    k_cap = max(u_prod ** (R * d) * delta,
                R * u_prod ** d * m1,
                R * u_prod ** ((R - 1) * d) * m2)

    zeta = zeta_real(float(e))
    cache: dict[tuple, float] = {}
    member_values = []
    bound_ok = True
    notes: list[str] = []
    for ys in iterproduct(*[_primitive_sup_vectors(s, ui) for ui in u]):
        scalars = [math.prod(ys[i][j] for i in range(r)) ** d
                   for j in range(s)]
        derived = ProblemInstance(
            degree=d, factors=l, equations=R, terms=s,
            coeffs=tuple(tuple(c * sc for c, sc in zip(row, scalars))
                         for row in inst.coeffs),
            moment_threshold=inst.moment_threshold)
        kd = coefficient_bound(derived.coeffs)
        if kd > k_cap:
            bound_ok = False
            raise ConsistencyError(
                f"derived uniformity bound {kd} exceeds the cap {k_cap} "
                f"for slice {ys}")
        key = derived.coeffs
        if key not in cache:
            cache[key] = predict(derived, **predict_opts).C_lambda
        member_values.append(cache[key])
    value = zeta ** (-l) * math.fsum(member_values)
    notes.append(f"{len(cache)} distinct derived matrices "
                 f"across {cardinality} members")
    return FamilyConstantReport(value=value, r=r, u=u,
                                cardinality=cardinality, l=l,
                                zeta_factor=zeta ** (-l),
                                distinct_matrices=len(cache),
                                bound_checks_passed=bound_ok,
                                member_values=member_values, notes=notes)


# ---------------------------------------------------------------------------
# uniformity batches


@dataclass
class BatchRow:
    label: str
    coefficient_bound: int | None
    skipped: bool
    reason: str | None
    ratio: float | None
    empirical: int | None
    predicted: float | None


def uniformity_batch(instances, k0: int, bounds,
                     mode: str = "all", **predict_opts) -> list[BatchRow]:
    """compare_box at one common box across a family, skipping members
    whose uniformity bound exceeds k0; the spread of |ratio - 1| across
    the table is the uniformity diagnostic."""
    rows = []
    for label, inst in instances:
        try:
            kval = coefficient_bound(inst.coeffs)
        except Exception as exc:
            rows.append(BatchRow(label=label, coefficient_bound=None,
                                 skipped=True, reason=str(exc), ratio=None,
                                 empirical=None, predicted=None))
            continue
        if kval > k0:
            rows.append(BatchRow(label=label, coefficient_bound=kval,
                                 skipped=True,
                                 reason=f"bound {kval} exceeds cap {k0}",
                                 ratio=None, empirical=None, predicted=None))
            continue
        comparison = compare_box(inst, [bounds], mode=mode, **predict_opts)
        row = comparison[-1]
        rows.append(BatchRow(label=label, coefficient_bound=kval,
                             skipped=False, reason=None, ratio=row.ratio,
                             empirical=row.empirical,
                             predicted=row.predicted))
    return rows
