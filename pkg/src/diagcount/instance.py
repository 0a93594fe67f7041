"""Problem instances: systems of diagonal equations in products of variables.

An instance describes R simultaneous equations

    sum_{j=1}^{s} lambda_{i,j} * (x_{1,j} * ... * x_{k,j})^d = 0,   i = 1..R,

in s*k integer unknowns arranged as k rows by s columns: column j carries
the j-th monomial (x_{1,j} ... x_{k,j})^d, row i of the unknowns is bounded
by the i-th box edge.  The coefficient matrix Lambda is R x s with integer
entries.

The on-disk format is a JSON document with fields d, k, R, s, lambda
(row-major: R arrays of s integers) and optionally n0, the even moment
threshold used by the analytic hypotheses.  Parsing is strict: ragged rows,
non-integer entries and inconsistent dimensions are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd


def _check_int(value, what: str) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable description of one system.

    Fields mirror the file format: degree, factors per monomial, number of
    equations, number of terms, coefficient rows, moment threshold.
    """

    degree: int                                # exponent d >= 1
    factors: int                               # variables per monomial, k >= 1
    equations: int                             # number of equations R >= 1
    terms: int                                 # monomials per equation s >= 1
    coeffs: tuple[tuple[int, ...], ...]        # R rows of s integers
    moment_threshold: int = field(default=0)   # n0; 0 means "use default 2d"

    def __post_init__(self):
        d = _check_int(self.degree, "degree")
        k = _check_int(self.factors, "factors")
        R = _check_int(self.equations, "equations")
        s = _check_int(self.terms, "terms")
        if min(d, k, R, s) < 1:
            raise ValueError("degree, factors, equations, terms must all be >= 1")
        rows = tuple(tuple(_check_int(c, "coefficient") for c in row)
                     for row in self.coeffs)
        object.__setattr__(self, "coeffs", rows)
        if len(rows) != R:
            raise ValueError(f"expected {R} coefficient rows, got {len(rows)}")
        for row in rows:
            if len(row) != s:
                raise ValueError(
                    f"ragged coefficient row: expected {s} entries, got {len(row)}")
        n0 = _check_int(self.moment_threshold, "moment threshold")
        if n0 == 0:
            n0 = 2 * d
            object.__setattr__(self, "moment_threshold", n0)
        if n0 % 2 != 0 or n0 < 2 * d:
            raise ValueError(
                f"moment threshold must be an even integer >= 2*degree, got {n0}")

    # -- column helpers -------------------------------------------------

    def column(self, j: int) -> tuple[int, ...]:
        """The j-th coefficient column as an R-vector."""
        return tuple(row[j] for row in self.coeffs)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.terms)]

    def linear_form(self, j: int, vec) -> int:
        """L_j(vec) = sum_i coeffs[i][j] * vec[i]."""
        return sum(row[j] * vec[i] for i, row in enumerate(self.coeffs))

    # -- derived instances ----------------------------------------------

    def with_coeffs(self, rows) -> "ProblemInstance":
        return ProblemInstance(self.degree, self.factors, self.equations,
                               self.terms, tuple(tuple(r) for r in rows),
                               self.moment_threshold)

    def sign_twist(self, signs) -> "ProblemInstance":
        """Scale column j by signs[j] in every equation (signs in {+1,-1})."""
        if len(signs) != self.terms:
            raise ValueError("need one sign per term")
        rows = tuple(tuple(c * e for c, e in zip(row, signs))
                     for row in self.coeffs)
        return self.with_coeffs(rows)

    def scale_columns(self, scalars) -> "ProblemInstance":
        """Scale column j by scalars[j] (arbitrary nonzero integers)."""
        if len(scalars) != self.terms:
            raise ValueError("need one scalar per term")
        if any(c == 0 for c in scalars):
            raise ValueError("column scalars must be nonzero")
        rows = tuple(tuple(c * e for c, e in zip(row, scalars))
                     for row in self.coeffs)
        return self.with_coeffs(rows)

    def permute_columns(self, perm) -> "ProblemInstance":
        if sorted(perm) != list(range(self.terms)):
            raise ValueError("not a permutation of the columns")
        rows = tuple(tuple(row[j] for j in perm) for row in self.coeffs)
        return self.with_coeffs(rows)

    # -- content checks --------------------------------------------------

    def content_per_row(self) -> tuple[int, ...]:
        return tuple(gcd(*row) if len(row) > 1 else abs(row[0])
                     for row in self.coeffs)

    def power_sum_exponent(self) -> int:
        """Exponent s - R*d governing the main term's growth."""
        return self.terms - self.equations * self.degree

    def as_dict(self) -> dict:
        return {
            "d": self.degree,
            "k": self.factors,
            "R": self.equations,
            "s": self.terms,
            "lambda": [list(row) for row in self.coeffs],
            "n0": self.moment_threshold,
        }


def instance_from_dict(doc: dict) -> ProblemInstance:
    """Build an instance from a parsed document, validating strictly."""
    if not isinstance(doc, dict):
        raise ValueError("instance document must be a JSON object")
    required = ("d", "k", "R", "s", "lambda")
    for key in required:
        if key not in doc:
            raise ValueError(f"instance document missing field {key!r}")
    unknown = set(doc) - set(required) - {"n0"}
    if unknown:
        raise ValueError(f"unknown fields in instance document: {sorted(unknown)}")
    lam = doc["lambda"]
    if not isinstance(lam, list) or not all(isinstance(r, list) for r in lam):
        raise ValueError("lambda must be an array of coefficient rows")
    return ProblemInstance(
        degree=doc["d"], factors=doc["k"], equations=doc["R"], terms=doc["s"],
        coeffs=tuple(tuple(row) for row in lam),
        moment_threshold=doc.get("n0", 0),
    )


def load_instance(path) -> ProblemInstance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def save_instance(inst: ProblemInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
