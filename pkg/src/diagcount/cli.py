"""Command-line front end.

Every subcommand reads one instance file (fields d, k, R, s, lambda,
optional n0), runs one operation, and emits line-delimited JSON records
with a stable, sorted field set.  Reruns with the same inputs and seeds
produce byte-identical output; timing fields are opt-in via --timing.

Exit codes: 0 success, 2 refused (bad arguments, budget exhausted,
unsupported configuration), 3 internal consistency assertion failed.
"""

from __future__ import annotations

import sys
from functools import wraps

import click

from . import counting, integral, predictor, series, solvability, structure
from .counting import BoxSpec
from .errors import (BudgetError, ConsistencyError, StructureError,
                     UnsupportedConfigurationError)
from .instance import load_instance
from .records import record_line, write_records

_REFUSED = (ValueError, StructureError, BudgetError,
            UnsupportedConfigurationError)


def _emits_records(fn):
    """Wrap a subcommand body: translate failures into exit codes and
    write the returned record lines to --out or stdout."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        out = kwargs.pop("out", None)
        try:
            lines = fn(*args, **kwargs)
        except ConsistencyError as exc:
            click.echo(f"consistency failure: {exc}", err=True)
            sys.exit(3)
        except _REFUSED as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        write_records(lines, out)
    return wrapper


def _parse_csv_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers")
    if not vals:
        raise click.BadParameter(f"{what} is empty")
    return vals


def _timing_drop(timing: bool) -> tuple:
    return () if timing else ("elapsed",)


@click.group()
def main():
    """Exact counts and circle-method predictions for multihomogeneous
    diagonal systems."""


# ---------------------------------------------------------------------------
# counting


@main.command()
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--box", "box_text", required=True,
              help="Comma-separated edge lengths X1,...,Xk.")
@click.option("--mode", type=click.Choice(["all", "positive", "primitive"]),
              default="all", show_default=True)
@click.option("--allow-zero", is_flag=True,
              help="Count coordinates equal to zero too (modes all/positive).")
@click.option("--method", type=click.Choice(["mitm", "naive"]),
              default="mitm", show_default=True)
@click.option("--dense-budget", type=int, default=counting.DENSE_BUDGET,
              show_default=True)
@click.option("--sparse-budget", type=int, default=counting.SPARSE_BUDGET,
              show_default=True)
@click.option("--naive-budget", type=int, default=counting.NAIVE_BUDGET,
              show_default=True)
@click.option("--timing", is_flag=True,
              help="Include wall-clock fields (breaks byte-identical reruns).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def count(path, box_text, mode, allow_zero, method,
          dense_budget, sparse_budget, naive_budget, timing):
    """Exact number of solutions in a coordinate box."""
    inst = load_instance(path)
    bounds = _parse_csv_ints(box_text, "--box")
    box = BoxSpec(bounds, mode, nonzero=not allow_zero)
    rep = counting.box_count(inst, box, method=method,
                             dense_budget=dense_budget,
                             sparse_budget=sparse_budget,
                             naive_budget=naive_budget)
    doc = {"instance": inst.as_dict(), **rep.__dict__.copy()}
    return [record_line("count", doc, drop=_timing_drop(timing))]


@main.command()
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--height", required=True, type=float,
              help="Height bound B; counts classes of height at most B.")
@click.option("--timing", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def nofb(path, height, timing):
    """Exact bounded-height count N(B) (nonzero coordinates, primitive
    rows, one representative per sign class)."""
    inst = load_instance(path)
    if height == int(height):
        height = int(height)
    rep = counting.bounded_height_count(inst, height)
    doc = {"instance": inst.as_dict(), "height": height,
           **rep.__dict__.copy()}
    return [record_line("height_count", doc, drop=_timing_drop(timing))]


# ---------------------------------------------------------------------------
# local densities


@main.command(name="series")
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--truncation", type=int, default=300, show_default=True,
              help="Largest modulus included in the direct sum.")
@click.option("--euler-depth", type=int, default=None,
              help="Fixed per-prime depth for the Euler product route.")
@click.option("--per-prime", is_flag=True,
              help="Additionally emit one record per Euler factor.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def series_cmd(path, truncation, euler_depth, per_prime):
    """Truncated singular series, cross-checked against its Euler product."""
    inst = load_instance(path)
    est = series.singular_series(inst, truncation=truncation,
                                 euler_depth=euler_depth)
    doc = {"instance": inst.as_dict(), **est.__dict__.copy()}
    lines = [record_line("series", doc)]
    if per_prime:
        for p, depth, value in est.euler_factors:
            lines.append(record_line("euler_factor",
                                     {"p": p, "depth": depth,
                                      "value": value}))
    return lines


@main.command(name="integral")
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--truncation", type=float, default=None,
              help="Frequency cutoff Y; default max(100, 10K).")
@click.option("--method", type=click.Choice(["quadrature", "slice"]),
              default=None,
              help="Orthant engine; default quadrature for one equation, "
                   "slice Monte Carlo for two.")
@click.option("--oracle", type=click.Choice(["none", "b0", "density",
                                             "both"]),
              default="none", show_default=True)
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--epsilon", type=float, default=1e-3, show_default=True,
              help="Slab half-width for the density oracle.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def integral_cmd(path, truncation, method, oracle, samples, seed, epsilon):
    """Singular integral: positive-orthant piece, full assembly, and the
    requested Monte Carlo cross-oracles."""
    inst = load_instance(path)
    if method is None:
        method = "quadrature" if inst.equations == 1 else "slice"
    if method == "quadrature":
        pos = integral.singular_integral_positive(inst, truncation)
    else:
        val, se = integral.slice_density_oracle(inst, samples=samples,
                                                seed=seed)
        pos = integral.IntegralEstimate(
            value=val, truncation=0.0, quadrature_error=3.0 * se,
            tail_heuristic=0.0, oracle_value=val, oracle_stderr=se,
            rng_seed=seed,
            notes=["positive-orthant value by the slice oracle"])
    full = integral.singular_integral_full(inst, truncation=truncation,
                                           method=method, samples=samples,
                                           seed=seed)
    lines = [
        record_line("integral_positive",
                    {"instance": inst.as_dict(), "method": method,
                     **pos.__dict__.copy()}),
        record_line("integral",
                    {"instance": inst.as_dict(), "method": method,
                     **full.__dict__.copy()}),
    ]
    if oracle in ("b0", "both"):
        value, stderr = integral.slice_density_oracle(inst, samples=samples,
                                                      seed=seed)
        doc = {"instance": inst.as_dict(), "value": value, "stderr": stderr,
               "samples": samples, "seed": seed}
        if method == "quadrature":
            gap = abs(pos.value - value)
            bar = 3 * stderr + pos.quadrature_error + pos.tail_heuristic
            doc["gap"] = gap
            doc["three_sigma_bar"] = bar
            lines.append(record_line("oracle_b0", doc))
            if gap > bar:
                raise ConsistencyError(
                    f"positive-orthant quadrature {pos.value:.8f} and the "
                    f"slice oracle {value:.8f} differ by {gap:.3e} "
                    f"(> {bar:.3e})")
        else:
            doc["note"] = "orthant engine already is the slice oracle"
            lines.append(record_line("oracle_b0", doc))
    if oracle in ("density", "both"):
        value, stderr = integral.real_density_oracle(
            inst, epsilon=epsilon, samples=max(samples, 10 * samples),
            seed=seed)
        sigma = abs(full.value - value) / stderr if stderr > 0 else 0.0
        lines.append(record_line(
            "oracle_density",
            {"instance": inst.as_dict(), "value": value, "stderr": stderr,
             "epsilon": epsilon, "sigma_distance": sigma,
             "note": "slab estimate carries an O(epsilon) bias; "
                     "reported, not asserted"}))
    return lines


# ---------------------------------------------------------------------------
# solvability and prediction


@main.command()
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--prime-bound", type=int, default=None,
              help="Check all primes up to this bound; default max(20, dK).")
@click.option("--gamma-max", type=int, default=6, show_default=True)
@click.option("--node-budget", type=int, default=2_000_000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def solvable(path, prime_bound, gamma_max, node_budget):
    """Real and p-adic solvability with nonzero coordinates; the sign
    verdict for the leading constant."""
    inst = load_instance(path)
    rep = solvability.positivity_report(inst, prime_bound=prime_bound,
                                        gamma_max=gamma_max,
                                        node_budget=node_budget)
    doc = {"instance": inst.as_dict(), **rep.__dict__.copy()}
    return [record_line("solvability", doc)]


def _predict_options(fn):
    opts = [
        click.option("--series-truncation", type=int, default=300,
                     show_default=True),
        click.option("--euler-depth", type=int, default=None),
        click.option("--integral-truncation", type=float, default=None),
        click.option("--integral-method",
                     type=click.Choice(["quadrature", "slice"]),
                     default=None),
        click.option("--samples", type=int, default=200_000,
                     show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--prime-bound", type=int, default=None),
        click.option("--gamma-max", type=int, default=6, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _predict_kwargs(kwargs: dict) -> dict:
    names = ("series_truncation", "euler_depth", "integral_truncation",
             "integral_method", "samples", "seed", "prime_bound",
             "gamma_max")
    return {name: kwargs.pop(name) for name in names}


@main.command(name="predict")
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_predict_options
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def predict_cmd(path, **kwargs):
    """Assemble the predicted leading constants and the positivity verdict."""
    popts = _predict_kwargs(kwargs)
    inst = load_instance(path)
    rep = predictor.predict(inst, **popts)
    doc = {"instance": inst.as_dict(), **rep.__dict__.copy()}
    return [record_line("prediction", doc)]


@main.command(name="compare")
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--box", "box_text", default=None,
              help="Semicolon-separated boxes, e.g. '25,25;50,50;100,100'.")
@click.option("--height", "height_text", default=None,
              help="Comma-separated height bounds for the hyperbolic fit.")
@click.option("--mode", type=click.Choice(["all", "primitive"]),
              default="all", show_default=True,
              help="Which box count the prediction targets (box mode only).")
@_predict_options
@click.option("--timing", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def compare_cmd(path, box_text, height_text, mode, timing, **kwargs):
    """Empirical counts against the predicted asymptotics."""
    popts = _predict_kwargs(kwargs)
    if (box_text is None) == (height_text is None):
        raise click.UsageError("pass exactly one of --box or --height")
    inst = load_instance(path)
    if box_text is not None:
        boxes = [_parse_csv_ints(part, "--box")
                 for part in box_text.split(";") if part]
        rows = predictor.compare_box(inst, boxes, mode=mode, **popts)
        lines = [record_line("comparison_row",
                             {"instance": inst.as_dict(), "mode": mode,
                              **row.__dict__.copy()})
                 for row in rows]
        final = rows[-1].ratio if rows else None
        lines.append(record_line("comparison_summary",
                                 {"instance": inst.as_dict(), "mode": mode,
                                  "rows": len(rows), "final_ratio": final}))
        return lines
    heights = []
    for part in height_text.split(","):
        heights.append(int(part) if float(part) == int(float(part))
                       else float(part))
    fit = predictor.compare_hyperbolic(inst, heights, **popts)
    return [record_line("hyperbolic_fit",
                        {"instance": inst.as_dict(),
                         **fit.__dict__.copy()})]


@main.command(name="family")
@click.option("--instance", "path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--r", "r", required=True, type=int,
              help="Number of coordinate blocks sliced to fixed norms.")
@click.option("--u", "u_text", required=True,
              help="Comma-separated sup-norms u1,...,ur.")
@click.option("--budget", type=int, default=4096, show_default=True,
              help="Cap on the number of permissible slice vectors.")
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def family_cmd(path, r, u_text, budget, samples, seed):
    """Sliced-family constant: zeta-weighted sum of derived-system
    constants over all permissible slice vectors."""
    inst = load_instance(path)
    u = _parse_csv_ints(u_text, "--u")
    rep = predictor.family_constant(inst, r, u, enumeration_budget=budget,
                                    samples=samples, seed=seed)
    doc = {"instance": inst.as_dict(), **rep.__dict__.copy()}
    return [record_line("family_constant", doc)]


@main.command(name="batch")
@click.option("--dir", "dir_path", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--k0", required=True, type=int,
              help="Uniformity bound; members with K above it are skipped.")
@click.option("--box", "box_text", required=True,
              help="Common box X1,...,Xk for every member.")
@click.option("--mode", type=click.Choice(["all", "primitive"]),
              default="all", show_default=True)
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_emits_records
def batch_cmd(dir_path, k0, box_text, mode, samples, seed):
    """compare_box across every instance file in a directory, at one
    common box, skipping members whose uniformity bound exceeds k0."""
    import os
    bounds = _parse_csv_ints(box_text, "--box")
    members = []
    for name in sorted(os.listdir(dir_path)):
        if name.endswith(".json"):
            members.append((name, load_instance(os.path.join(dir_path,
                                                             name))))
    if not members:
        raise ValueError(f"no instance files (*.json) in {dir_path}")
    rows = predictor.uniformity_batch(members, k0, bounds, mode=mode,
                                      samples=samples, seed=seed)
    lines = [record_line("batch_row", row) for row in rows]
    spreads = [abs(row.ratio - 1.0) for row in rows
               if not row.skipped and row.ratio is not None]
    lines.append(record_line("batch_summary",
                             {"k0": k0, "box": list(bounds), "mode": mode,
                              "members": len(rows),
                              "skipped": sum(r.skipped for r in rows),
                              "max_abs_ratio_gap":
                                  max(spreads) if spreads else None}))
    return lines


if __name__ == "__main__":
    main()
