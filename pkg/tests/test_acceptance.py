"""Acceptance gate: one test per advertised guarantee, one printed
PASS/FAIL line each.  Run with `pytest -v -s tests/test_acceptance.py`
to see the lines as they happen.

Every expected value here is an exact identity, a well-known constant,
or recomputed by an independent route inside the test; nothing is tuned
to match the implementation.
"""

import itertools
import json
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from math import gcd, prod

import numpy as np
import pytest
from click.testing import CliRunner

from diagcount import counting, integral, predictor, series, solvability, structure
from diagcount.cli import main as cli_main
from diagcount.counting import BoxSpec, box_count
from diagcount.instance import ProblemInstance, save_instance


@contextmanager
def criterion(n: int, label: str):
    try:
        yield
    except BaseException:
        print(f"CRITERION {n} ({label}): FAIL", flush=True)
        raise
    print(f"CRITERION {n} ({label}): PASS", flush=True)


# ---------------------------------------------------------------------------
# 1. exact arithmetic identities


def _gcd_peel_primitive(inst, bounds, cache=None):
    """Primitive count without Moebius weights: peel the plain count by
    the gcd vector of the factor rows, M_prim(X) = M(X) minus the sum of
    M_prim(floor(X/g)) over g != (1,...,1)."""
    if cache is None:
        cache = {}
    bounds = tuple(bounds)
    if bounds in cache:
        return cache[bounds]
    if any(b < 1 for b in bounds):
        cache[bounds] = 0
        return 0
    total = box_count(inst, BoxSpec(bounds)).count
    for g in itertools.product(*(range(1, b + 1) for b in bounds)):
        if all(x == 1 for x in g):
            continue
        sub = tuple(b // x for b, x in zip(bounds, g))
        total -= _gcd_peel_primitive(inst, sub, cache)
    cache[bounds] = total
    return total


def test_criterion_1_exact_identities(inst_a, inst_b, inst_c2):
    with criterion(1, "exact arithmetic identities"):
        slowest = 0.0

        # (a) partial sums of the local series against congruence counts
        for inst in (inst_a, inst_b, inst_c2):
            ksr = inst.factors * inst.terms - inst.equations
            for p in (2, 3, 5):
                for L in (1, 2, 3):
                    t0 = time.monotonic()
                    lhs = sum(series.series_term(inst, p ** l)
                              for l in range(L + 1))
                    rhs = series.congruence_count(inst, p ** L) \
                        / p ** (L * ksr)
                    slowest = max(slowest, time.monotonic() - t0)
                    assert abs(lhs - rhs) <= 1e-9, (inst.coeffs, p, L)

        # (b) multiplicativity of the series terms on coprime moduli
        rng = random.Random(11)
        for inst in (inst_a, inst_b, inst_c2):
            done = 0
            while done < 20:
                q1 = rng.randrange(2, 100)
                q2 = rng.randrange(2, 100)
                if q1 * q2 > 200 or gcd(q1, q2) != 1:
                    continue
                t0 = time.monotonic()
                lhs = series.series_term(inst, q1 * q2)
                rhs = series.series_term(inst, q1) * series.series_term(inst, q2)
                slowest = max(slowest, time.monotonic() - t0)
                assert abs(lhs - rhs) <= 1e-9, (inst.coeffs, q1, q2)
                done += 1

        # (c) parity assembly: even degree is a plain power of two, odd
        # degree resums over column sign twists
        t0 = time.monotonic()
        all_b = box_count(inst_b, BoxSpec((6,))).count
        pos_b = box_count(inst_b, BoxSpec((6,), "positive")).count
        assert all_b == 2 ** (inst_b.factors * inst_b.terms) * pos_b
        k, s = inst_a.factors, inst_a.terms
        twist_sum = 0
        for mask in range(1 << s):
            signs = [1 - 2 * ((mask >> j) & 1) for j in range(s)]
            twisted = inst_a.sign_twist(signs)
            twist_sum += box_count(twisted, BoxSpec((6, 6), "positive")).count
        all_a = box_count(inst_a, BoxSpec((6, 6))).count
        assert all_a == 2 ** ((k - 1) * s) * twist_sum
        slowest = max(slowest, time.monotonic() - t0)

        # (d) primitive counts: Moebius inversion against gcd peeling
        for inst, bounds in ((inst_a, (20, 20)), (inst_b, (30,))):
            t0 = time.monotonic()
            mob = box_count(inst, BoxSpec(bounds, "primitive")).count
            peel = _gcd_peel_primitive(inst, bounds)
            slowest = max(slowest, time.monotonic() - t0)
            assert mob == peel, (inst.coeffs, bounds)

        # (e) meet-in-the-middle against naive enumeration
        rng = random.Random(23)
        for _ in range(25):
            k = rng.randrange(1, 3)
            R = 1 if rng.random() < 0.8 else 2
            s = rng.randrange(R + 1, 5)
            d = rng.randrange(1, 3)
            coeffs = tuple(tuple(rng.choice([-2, -1, 1, 2])
                                 for _ in range(s)) for _ in range(R))
            inst = ProblemInstance(degree=d, factors=k, equations=R,
                                   terms=s, coeffs=coeffs,
                                   moment_threshold=2 * d)
            bounds = tuple(rng.randrange(2, 5) for _ in range(k))
            mode = rng.choice(["all", "positive", "primitive"])
            t0 = time.monotonic()
            fast = box_count(inst, BoxSpec(bounds, mode)).count
            slow = box_count(inst, BoxSpec(bounds, mode),
                             method="naive").count
            slowest = max(slowest, time.monotonic() - t0)
            assert fast == slow, (coeffs, bounds, mode)

        assert slowest < 5.0, f"slowest identity took {slowest:.2f}s"


# ---------------------------------------------------------------------------
# 2. integral cross-validation


def test_criterion_2_integral_cross_validation(inst_a, inst_b):
    with criterion(2, "independent singular-integral routes"):
        t0 = time.monotonic()

        # two quadrature routes for the phase integral
        for k in (1, 2, 3):
            for d in (1, 2, 3):
                for beta in (0.0, 0.5, -0.5, 2.5, -2.5, 10.0, -10.0):
                    a = integral.box_phase_integral(beta, k, d)
                    b = integral.box_phase_integral_direct(beta, k, d)
                    assert abs(a - b) <= 1e-6, (k, d, beta)

        # positive-orthant quadrature against the seeded slice oracle
        for inst, Y in ((inst_a, 150.0), (inst_b, 100.0)):
            est = integral.singular_integral_positive(inst, truncation=Y)
            mc, se = integral.slice_density_oracle(inst, samples=100_000,
                                                   seed=5)
            bar = 3.0 * se + est.quadrature_error + est.tail_heuristic
            assert abs(mc - est.value) <= bar, inst.coeffs

        # the one case with an exact hand-derivable value
        tri = ProblemInstance(degree=1, factors=1, equations=1, terms=3,
                              coeffs=((1, 1, -1),), moment_threshold=2)
        est = integral.singular_integral_positive(tri, truncation=200.0)
        assert abs(est.value - 0.5) <= 1e-3

        assert time.monotonic() - t0 < 60.0


# ---------------------------------------------------------------------------
# 3. normalizations


def test_criterion_3_normalizations(inst_a, inst_b, inst_c2):
    with criterion(3, "unit normalizations"):
        for k in (1, 2, 3):
            for d in (1, 2, 3):
                assert abs(integral.box_phase_integral(0.0, k, d) - 1.0) \
                    <= 1e-8
                assert abs(integral.product_density_mass(k, d) - 1.0) <= 1e-8
        for inst in (inst_a, inst_b, inst_c2):
            assert series.series_term(inst, 1) == 1.0
        assert abs(series.zeta_real(2.0) - 1.6449340668482264) <= 1e-10


# ---------------------------------------------------------------------------
# 4. box-count convergence to the predicted main term


def test_criterion_4_box_convergence(inst_a, inst_b):
    with criterion(4, "box counts approach the prediction"):
        t0 = time.monotonic()
        pred_a = predictor.predict(inst_a)
        rows = predictor.compare_box(
            inst_a, [(25, 25), (50, 50), (100, 100), (200, 200)],
            prediction=pred_a)
        assert 0.9 <= rows[-1].ratio <= 1.1
        gaps = [abs(r.ratio - 1.0) for r in rows]
        assert gaps[-3] >= gaps[-2] >= gaps[-1], gaps
        pred_b = predictor.predict(inst_b)
        rows_b = predictor.compare_box(inst_b, [(100,), (200,), (400,)],
                                       prediction=pred_b)
        assert 0.75 <= rows_b[-1].ratio <= 1.25
        assert time.monotonic() - t0 < 300.0


# ---------------------------------------------------------------------------
# 5. height counts against the hyperbolic prediction


def test_criterion_5_height_fit(inst_a):
    with criterion(5, "hyperbolic height asymptotic"):
        t0 = time.monotonic()
        pred = predictor.predict(inst_a)
        heights = sorted(set(int(round(b))
                             for b in np.geomspace(400, 40_000, 10)))
        fit = predictor.compare_hyperbolic(inst_a, heights, prediction=pred)
        assert fit.degree == inst_a.factors - 1 == 1
        assert abs(fit.fitted_leading / fit.predicted_leading - 1.0) <= 0.30
        assert time.monotonic() - t0 < 600.0


# ---------------------------------------------------------------------------
# 6. solvability verdicts


def test_criterion_6_solvability(inst_b, inst_zero, inst_undet):
    with criterion(6, "local solvability verdicts"):
        rep = solvability.positivity_report(inst_b)
        assert rep.verdict == "positive"
        assert all(x > 0 for x in rep.real_witness)
        assert sum(Fraction(c) * u for c, u in
                   zip(inst_b.coeffs[0], rep.real_witness)) == 0
        assert [r.p for r in rep.per_prime] == [2, 3, 5, 7, 11, 13, 17, 19]
        assert all(r.status == "liftable_witness" for r in rep.per_prime)

        repz = solvability.positivity_report(inst_zero)
        assert repz.verdict == "zero"
        assert box_count(inst_zero, BoxSpec((6,))).count == 0
        assert counting.bounded_height_count(inst_zero, 1000).count == 0

        repu = solvability.positivity_report(inst_undet, prime_bound=3)
        assert repu.verdict == "undetermined"
        assert repu.verdict != "zero"
        assert any(r.status == "no_witness_found" for r in repu.per_prime)


# ---------------------------------------------------------------------------
# 7. structural hypotheses


def test_criterion_7_structure(inst_c2):
    with criterion(7, "coefficient-matrix structure"):
        rep = structure.check_hypotheses(inst_c2)
        assert rep.submatrix_found is True
        blocks = rep.block_partition
        assert blocks is not None and len(blocks) == 3
        for block in blocks:
            assert len(block) == 2
            a, b = block
            det = (inst_c2.coeffs[0][a] * inst_c2.coeffs[1][b]
                   - inst_c2.coeffs[0][b] * inst_c2.coeffs[1][a])
            assert det != 0

        bad = structure.invertible_block_partition([[1, 1, 1, 0],
                                                    [0, 0, 0, 1]])
        assert bad.found is False
        assert bad.witness_dim == 1

        assert structure.coefficient_bound([[1, 2], [3, 4]]) == 8


# ---------------------------------------------------------------------------
# 8. deterministic reports


def test_criterion_8_cli_determinism(tmp_path, inst_a, inst_b, inst_c2,
                                     inst_d):
    with criterion(8, "byte-identical reruns for every command"):
        for name, inst in (("a", inst_a), ("b", inst_b), ("c2", inst_c2),
                           ("d", inst_d)):
            save_instance(inst, str(tmp_path / f"{name}.json"))
        members = tmp_path / "members"
        members.mkdir()
        save_instance(inst_a, str(members / "base.json"))
        save_instance(inst_a.scale_columns([3, 1, 1]),
                      str(members / "wide.json"))
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        c2 = str(tmp_path / "c2.json")
        d = str(tmp_path / "d.json")
        invocations = [
            ["count", "--instance", a, "--box", "8,8"],
            ["nofb", "--instance", b, "--height", "200"],
            ["series", "--instance", b, "--truncation", "50", "--per-prime"],
            ["integral", "--instance", a, "--oracle", "both",
             "--samples", "20000", "--seed", "3"],
            ["integral", "--instance", c2, "--method", "slice",
             "--samples", "20000", "--seed", "3"],
            ["solvable", "--instance", b],
            ["predict", "--instance", b],
            ["compare", "--instance", a, "--box", "10,10;16,16"],
            ["compare", "--instance", b, "--height", "100,200,400"],
            ["family", "--instance", d, "--r", "1", "--u", "1"],
            ["batch", "--dir", str(members), "--k0", "2", "--box", "10,10"],
        ]
        runner = CliRunner()
        for args in invocations:
            first = runner.invoke(cli_main, args)
            second = runner.invoke(cli_main, args)
            assert first.exit_code == 0, (args, first.output)
            assert second.exit_code == 0, args
            assert first.stdout == second.stdout, args
            for line in first.stdout.splitlines():
                json.loads(line)
