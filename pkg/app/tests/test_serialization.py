import json

import numpy as np
import pytest

from app.models.errors import FormatError, GridError, InvalidParams, MaskError
from app.models.functions import Grid, SpectralFunction, StepFunction
from app.services.atlas_service import AtlasService
from app.services.mra_service import mra_report
from app.services.stepfun import random_table
from app.utils import serialization


def test_dumps_is_deterministic():
    text = serialization.dumps({"b": 1, "a": [0.1, 2]})
    assert text == '{\n  "a": [\n    1.0000000000000001e-01,\n    2\n  ],\n  "b": 1\n}\n'
    assert serialization.dumps({"a": [0.1, 2], "b": 1}) == text


@pytest.mark.parametrize(
    "value,text",
    [
        (1 / 3, "3.3333333333333331e-01"),
        (1.0, "1.0000000000000000e+00"),
        (-0.25, "-2.5000000000000000e-01"),
    ],
)
def test_floats_carry_17_significant_digits(value, text):
    assert serialization.format_float(value) == text
    assert serialization.dumps([value]) == f"[\n  {text}\n]\n"
    assert float(text) == value


def test_non_finite_floats_are_refused():
    with pytest.raises(FormatError):
        serialization.dumps({"x": float("nan")})


def test_mask_tolerance_from_payload():
    payload = {"p": 3, "N": 1, "lambda": [[1 + 1e-7, 0]] + [[0, 0]] * 8}
    with pytest.raises(MaskError):
        serialization.mask_from_dict(payload)
    assert serialization.mask_from_dict(payload, eps=1e-6).values[0] == 1.0


def test_table_dict_round_trip(p3, rng):
    table = random_table(Grid(p3, 1, 2), rng, "spectral")
    payload = json.loads(serialization.dumps(serialization.table_to_dict(table)))
    assert payload["side"] == "spectral" and len(payload["values"]) == 27
    back = serialization.table_from_dict(payload)
    assert isinstance(back, SpectralFunction)
    np.testing.assert_array_equal(back.values, table.values)


def test_mask_dict(p3_mask):
    payload = serialization.mask_to_dict(p3_mask)
    assert payload["lambda"][5] == [1.0, 0.0]
    back = serialization.mask_from_dict(json.loads(serialization.dumps(payload)))
    np.testing.assert_array_equal(back.values, p3_mask.values)


@pytest.mark.parametrize(
    "payload",
    [
        {"p": 3, "N": 1, "M": 0, "side": "group", "values": []},
        {"p": 3, "N": 1, "M": 0, "side": "both", "values": [[1, 0]] * 3},
        {"p": 3, "N": "1", "M": 0, "side": "group", "values": [[1, 0]] * 3},
        {"p": 3, "N": 1, "M": 0, "side": "group", "values": [[1, 0, 0]] * 3},
        {"p": 3, "N": 1, "M": 0, "side": "group", "values": [["x", 0]] * 3},
        {"p": 3, "N": 1, "M": 0, "side": "group"},
    ],
)
def test_malformed_tables(payload):
    with pytest.raises(FormatError):
        serialization.table_from_dict(payload)


def test_semantic_table_errors_keep_their_type():
    with pytest.raises(GridError):
        serialization.table_from_dict({"p": 3, "N": 1, "M": 1, "side": "group", "values": [[1, 0]] * 8})
    with pytest.raises(InvalidParams):
        serialization.table_from_dict({"p": 4, "N": 1, "M": 0, "side": "group", "values": [[1, 0]] * 4})


def test_mask_errors():
    with pytest.raises(FormatError):
        serialization.mask_from_dict({"p": 3, "N": 1})
    with pytest.raises(MaskError):
        serialization.mask_from_dict({"p": 3, "N": 1, "lambda": [[0, 0]] * 9})


def test_read_json(tmp_path):
    good = serialization.write_json(tmp_path / "a.json", {"x": 1})
    assert serialization.read_json(good) == {"x": 1}
    (tmp_path / "empty.json").write_text("  \n")
    (tmp_path / "bad.json").write_text("{nope")
    (tmp_path / "list.json").write_text("[1, 2]")
    for name in ("empty.json", "bad.json", "list.json"):
        with pytest.raises(FormatError):
            serialization.read_json(tmp_path / name)
    with pytest.raises(OSError):
        serialization.read_json(tmp_path / "missing.json")


def test_report_dump_has_verdict(p3_mask):
    payload = serialization.model_to_dict(mra_report(p3_mask))
    assert payload["verdict"] is True
    assert payload["mask_conditions"]["holds"] is True
    assert payload["support_min_shell"] == 1


# --- CSV ----------------------------------------------------------------------
def test_table_csv_layout(p3):
    table = StepFunction(Grid(p3, 1, 1), np.arange(9))
    lines = serialization.table_to_csv(table).splitlines()
    assert lines[0] == "a_-1,a_0,re,im"
    assert lines[1] == "0,0,0.0000000000000000e+00,0.0000000000000000e+00"
    assert lines[2] == "1,0,1.0000000000000000e+00,0.0000000000000000e+00"
    assert len(lines) == 10


def test_table_csv_round_trip(p3, rng):
    for side in ("group", "spectral"):
        table = random_table(Grid(p3, 2, 1), rng, side)
        back = serialization.table_from_csv(serialization.table_to_csv(table), 3, side)
        assert back.grid == table.grid
        np.testing.assert_array_equal(back.values, table.values)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "a_-1,a_0,re,im\n",
        "a_-1,a_0,value\n0,0,1\n",
        "a_-1,b_0,re,im\n0,0,1,0\n",
        "a_-1,a_1,re,im\n0,0,1,0\n",
        "a_-1,re,im\n0,1,0\n1,1,0\n",
        "a_-1,re,im\n0,1,0\n1,1,0\n5,1,0\n",
        "a_-1,re,im\n0,1,0\n1,x,0\n2,1,0\n",
    ],
)
def test_malformed_csv(text):
    with pytest.raises(FormatError):
        serialization.table_from_csv(text, 3)


def test_catalog_csv(p3):
    catalog = AtlasService().enumerate_elementary(p3)
    lines = serialization.catalog_to_csv(catalog).splitlines()
    assert lines[0].startswith("index,row_0,row_1,row_2,l,verdict")
    assert len(lines) == 10
    assert lines[1].startswith("0,0,0,0,0,True")
