import json

import pytest

from diagcount.instance import (ProblemInstance, instance_from_dict,
                                load_instance, save_instance)


def test_roundtrip(tmp_path, inst_c2):
    path = tmp_path / "c2.json"
    save_instance(inst_c2, path)
    assert load_instance(path) == inst_c2


def test_as_dict_keys(inst_b):
    doc = inst_b.as_dict()
    assert set(doc) == {"d", "k", "R", "s", "lambda", "n0"}
    assert doc["lambda"] == [[1, 1, 1, -1, -1]]
    assert doc["n0"] == 4


def test_from_dict_requires_fields():
    with pytest.raises(ValueError, match="missing field"):
        instance_from_dict({"d": 1, "k": 1, "R": 1, "s": 2})


def test_from_dict_rejects_unknown_fields():
    doc = {"d": 1, "k": 1, "R": 1, "s": 2, "lambda": [[1, -1]], "extra": 3}
    with pytest.raises(ValueError, match="unknown fields"):
        instance_from_dict(doc)


def test_ragged_rows_rejected():
    with pytest.raises(ValueError, match="ragged"):
        ProblemInstance(degree=1, factors=1, equations=2, terms=3,
                        coeffs=((1, 1, 1), (1, 1)), moment_threshold=2)


def test_non_integer_coefficients_rejected():
    with pytest.raises(ValueError):
        ProblemInstance(degree=1, factors=1, equations=1, terms=2,
                        coeffs=((1.5, -1),), moment_threshold=2)
    with pytest.raises(ValueError):
        ProblemInstance(degree=1, factors=1, equations=1, terms=2,
                        coeffs=((True, 1),), moment_threshold=2)


def test_moment_threshold_default_and_validation():
    inst = ProblemInstance(degree=3, factors=1, equations=1, terms=4,
                           coeffs=((1, 1, 1, -1),))
    assert inst.moment_threshold == 6
    with pytest.raises(ValueError, match="moment threshold"):
        ProblemInstance(degree=2, factors=1, equations=1, terms=3,
                        coeffs=((1, 1, -1),), moment_threshold=3)
    with pytest.raises(ValueError, match="moment threshold"):
        ProblemInstance(degree=2, factors=1, equations=1, terms=3,
                        coeffs=((1, 1, -1),), moment_threshold=2)


def test_invalid_json_message(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        load_instance(path)


def test_saved_document_is_plain_json(tmp_path, inst_a):
    path = tmp_path / "a.json"
    save_instance(inst_a, path)
    doc = json.loads(path.read_text())
    assert doc["lambda"] == [[1, 1, -1]]


def test_column_helpers(inst_c2):
    assert inst_c2.column(1) == (1, 2)
    assert inst_c2.columns()[5] == (-1, -1)
    assert inst_c2.linear_form(2, (1, 1)) == 1 + 3


def test_derived_instances(inst_a):
    twisted = inst_a.sign_twist((1, -1, 1))
    assert twisted.coeffs == ((1, -1, -1),)
    scaled = inst_a.scale_columns((2, 3, 5))
    assert scaled.coeffs == ((2, 3, -5),)
    with pytest.raises(ValueError):
        inst_a.scale_columns((0, 1, 1))
    perm = inst_a.permute_columns((2, 0, 1))
    assert perm.coeffs == ((-1, 1, 1),)
    with pytest.raises(ValueError):
        inst_a.permute_columns((0, 0, 1))


def test_power_sum_exponent(inst_a, inst_b, inst_c2):
    assert inst_a.power_sum_exponent() == 2
    assert inst_b.power_sum_exponent() == 3
    assert inst_c2.power_sum_exponent() == 4
