import json
import os

import pytest
from click.testing import CliRunner

from diagcount import series
from diagcount.cli import main
from diagcount.counting import BoxSpec, box_count
from diagcount.instance import ProblemInstance, save_instance


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def paths(tmp_path_factory, inst_a, inst_b, inst_c2, inst_d):
    base = tmp_path_factory.mktemp("instances")
    out = {}
    for name, inst in (("a", inst_a), ("b", inst_b), ("c2", inst_c2),
                       ("d", inst_d)):
        p = base / f"{name}.json"
        save_instance(inst, str(p))
        out[name] = str(p)
    return out


def _records(result):
    assert result.exit_code == 0, result.output
    return [json.loads(line) for line in result.stdout.splitlines() if line]


# -- count and nofb ----------------------------------------------------------


def test_count_record(runner, paths, inst_a):
    res = runner.invoke(main, ["count", "--instance", paths["a"],
                               "--box", "6,6"])
    (doc,) = _records(res)
    assert doc["record"] == "count"
    assert doc["count"] == box_count(inst_a, BoxSpec((6, 6))).count
    assert doc["instance"]["lambda"] == [[1, 1, -1]]
    assert doc["box"] == {"bounds": [6, 6], "mode": "all", "nonzero": True}
    assert "elapsed" not in doc


def test_count_modes_and_method(runner, paths, inst_b):
    res = runner.invoke(main, ["count", "--instance", paths["b"],
                               "--box", "5", "--mode", "primitive"])
    (doc,) = _records(res)
    assert doc["count"] == box_count(inst_b, BoxSpec((5,), "primitive")).count
    res = runner.invoke(main, ["count", "--instance", paths["b"],
                               "--box", "4", "--method", "naive",
                               "--allow-zero"])
    (doc,) = _records(res)
    want = box_count(inst_b, BoxSpec((4,), nonzero=False), method="naive")
    assert doc["count"] == want.count


def test_count_timing_flag_adds_elapsed(runner, paths):
    res = runner.invoke(main, ["count", "--instance", paths["a"],
                               "--box", "4,4", "--timing"])
    (doc,) = _records(res)
    assert "elapsed" in doc


def test_count_refusals(runner, paths):
    res = runner.invoke(main, ["count", "--instance", paths["a"],
                               "--box", "6"])
    assert res.exit_code == 2
    assert "factors" in res.stderr
    res = runner.invoke(main, ["count", "--instance", paths["a"],
                               "--box", "6,6", "--mode", "primitive",
                               "--allow-zero"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["count", "--instance", paths["b"],
                               "--box", "50", "--method", "naive",
                               "--naive-budget", "10"])
    assert res.exit_code == 2
    assert "naive enumeration" in res.stderr


def test_nofb_record(runner, paths):
    res = runner.invoke(main, ["nofb", "--instance", paths["b"],
                               "--height", "100"])
    (doc,) = _records(res)
    assert doc["record"] == "height_count"
    assert doc["count"] == 144
    assert doc["height"] == 100


# -- series and integral -----------------------------------------------------


def test_series_record(runner, paths, inst_b):
    res = runner.invoke(main, ["series", "--instance", paths["b"],
                               "--truncation", "50"])
    (doc,) = _records(res)
    assert doc["record"] == "series"
    assert doc["value"] == series.singular_series(inst_b, truncation=50).value
    assert abs(doc["value"] - 1.3210132) < 1e-6
    assert doc["truncation"] == 50


def test_series_per_prime_records(runner, paths):
    res = runner.invoke(main, ["series", "--instance", paths["b"],
                               "--truncation", "50", "--per-prime"])
    docs = _records(res)
    kinds = [d["record"] for d in docs]
    assert kinds.count("series") == 1
    assert kinds.count("euler_factor") >= 3
    two = next(d for d in docs
               if d["record"] == "euler_factor" and d["p"] == 2)
    assert two["value"] > 1.0


def test_integral_with_oracle(runner, paths):
    res = runner.invoke(main, ["integral", "--instance", paths["a"],
                               "--oracle", "b0", "--samples", "50000"])
    docs = {d["record"]: d for d in _records(res)}
    assert set(docs) == {"integral_positive", "integral", "oracle_b0"}
    oracle = docs["oracle_b0"]
    assert oracle["gap"] <= oracle["three_sigma_bar"]
    # the bilinear system has odd degree, so the full value comes from the
    # sign-twist assembly rather than a plain power of two
    assert docs["integral"]["value"] > docs["integral_positive"]["value"]
    assert docs["integral"]["value"] == pytest.approx(46.26, rel=1e-2)


def test_integral_slice_method(runner, paths):
    res = runner.invoke(main, ["integral", "--instance", paths["c2"],
                               "--method", "slice", "--samples", "50000",
                               "--seed", "7"])
    docs = {d["record"]: d for d in _records(res)}
    est = docs["integral"]
    assert est["rng_seed"] == 7
    assert abs(est["value"] - 17.0 / 3.0) <= est["quadrature_error"] + 0.01


# -- solvable and predict ----------------------------------------------------


def test_solvable_record(runner, paths):
    res = runner.invoke(main, ["solvable", "--instance", paths["b"]])
    (doc,) = _records(res)
    assert doc["record"] == "solvability"
    assert doc["verdict"] == "positive"
    assert doc["real_witness"] == ["1/1", "1/1", "1/1", "2/1", "1/1"]
    assert {r["p"]: r["status"] for r in doc["per_prime"]}[2] \
        == "liftable_witness"


def test_predict_record(runner, paths):
    res = runner.invoke(main, ["predict", "--instance", paths["a"]])
    (doc,) = _records(res)
    assert doc["record"] == "prediction"
    assert doc["C_lambda"] == pytest.approx(63.21097529564924, rel=1e-9)
    assert doc["C_hyperbolic"] == pytest.approx(5.840304756177826, rel=1e-9)
    assert doc["positivity"] == "positive"
    assert doc["series"]["record"] if "record" in doc["series"] else True


# -- compare, family, batch --------------------------------------------------


def test_compare_box_records(runner, paths):
    res = runner.invoke(main, ["compare", "--instance", paths["a"],
                               "--box", "10,10;16,16"])
    docs = _records(res)
    rows = [d for d in docs if d["record"] == "comparison_row"]
    summary = [d for d in docs if d["record"] == "comparison_summary"]
    assert len(rows) == 2 and len(summary) == 1
    assert rows[0]["scale"] == [10, 10]
    assert summary[0]["final_ratio"] == pytest.approx(rows[-1]["ratio"])


def test_compare_height_records(runner, paths):
    res = runner.invoke(main, ["compare", "--instance", paths["b"],
                               "--height", "100,200,400"])
    (doc,) = _records(res)
    assert doc["record"] == "hyperbolic_fit"
    assert doc["degree"] == 0
    assert [r["empirical"] for r in doc["rows"]] == [144, 816, 2160]


def test_compare_needs_exactly_one_axis(runner, paths):
    res = runner.invoke(main, ["compare", "--instance", paths["a"]])
    assert res.exit_code == 2
    res = runner.invoke(main, ["compare", "--instance", paths["a"],
                               "--box", "10,10", "--height", "100"])
    assert res.exit_code == 2


def test_family_record(runner, paths):
    res = runner.invoke(main, ["family", "--instance", paths["d"],
                               "--r", "1", "--u", "1"])
    (doc,) = _records(res)
    assert doc["record"] == "family_constant"
    assert doc["cardinality"] == 32
    assert doc["value"] == pytest.approx(609.1912946689758, rel=1e-9)
    res = runner.invoke(main, ["family", "--instance", paths["d"],
                               "--r", "1", "--u", "1", "--budget", "2"])
    assert res.exit_code == 2


def test_batch_records(runner, paths, tmp_path, inst_a):
    d = tmp_path / "members"
    d.mkdir()
    save_instance(inst_a, str(d / "base.json"))
    save_instance(inst_a.scale_columns([3, 1, 1]), str(d / "wide.json"))
    res = runner.invoke(main, ["batch", "--dir", str(d), "--k0", "2",
                               "--box", "10,10"])
    docs = _records(res)
    rows = [x for x in docs if x["record"] == "batch_row"]
    assert [r["label"] for r in rows] == ["base.json", "wide.json"]
    assert rows[0]["skipped"] is False
    assert rows[1]["skipped"] is True and "exceeds cap" in rows[1]["reason"]
    summary = [x for x in docs if x["record"] == "batch_summary"]
    assert summary and summary[0]["members"] == 2


# -- plumbing ----------------------------------------------------------------


def test_out_writes_file(runner, paths, tmp_path):
    target = tmp_path / "out.jsonl"
    res = runner.invoke(main, ["count", "--instance", paths["a"],
                               "--box", "5,5", "--out", str(target)])
    assert res.exit_code == 0
    assert res.stdout == ""
    doc = json.loads(target.read_text())
    assert doc["record"] == "count"


def test_reruns_are_byte_identical(runner, paths):
    args = ["predict", "--instance", paths["b"]]
    first = runner.invoke(main, args)
    second = runner.invoke(main, args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout


def test_missing_instance_is_usage_error(runner, tmp_path):
    res = runner.invoke(main, ["count", "--instance",
                               str(tmp_path / "nope.json"), "--box", "4"])
    assert res.exit_code == 2


def test_help_runs(runner):
    res = runner.invoke(main, ["--help"])
    assert res.exit_code == 0
    for cmd in ("count", "nofb", "series", "integral", "solvable",
                "predict", "compare", "family", "batch"):
        assert cmd in res.stdout
