import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wienerhopf.generate import instance_from_seed
from wienerhopf.jsonio import (
    InputFormatError,
    decode_matrix,
    decode_representation,
    dumps,
    encode_matrix,
    encode_representation,
    load_representation,
    report,
)
from wienerhopf.representation import stable_to_dichotomous

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_matrix_round_trip(rows, cols, data):
    re = data.draw(st.lists(finite, min_size=rows * cols, max_size=rows * cols))
    im = data.draw(st.lists(finite, min_size=rows * cols, max_size=rows * cols))
    M = (np.array(re) + 1j * np.array(im)).reshape(rows, cols)
    text = dumps(encode_matrix(M))
    back = decode_matrix(json.loads(text))
    assert back.shape == M.shape
    assert np.array_equal(back, M)


def test_matrix_layout_is_row_major():
    enc = encode_matrix(np.array([[1, 2j], [3, 4]]))
    assert enc == {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 2.0], [3.0, 0.0], [4.0, 0.0]]}


def test_bare_real_entries_accepted():
    M = decode_matrix({"rows": 1, "cols": 2, "data": [1.5, [0, 2]]})
    np.testing.assert_array_equal(M, [[1.5, 2j]])


@pytest.mark.parametrize("obj", [
    {"rows": 1, "cols": 1},
    {"rows": 2, "cols": 1, "data": [[1, 0]]},
    {"rows": 1, "cols": 1, "data": [[None, 0]]},
    {"rows": 1, "cols": 1, "data": ["x"]},
    {"rows": -1, "cols": 1, "data": []},
    [1, 2],
])
def test_bad_matrices(obj):
    with pytest.raises(InputFormatError):
        decode_matrix(obj)


def test_representation_round_trip_both_kinds():
    rep = instance_from_seed(1, (2, 1, 2))
    assert decode_representation(json.loads(dumps(encode_representation(rep)))).allclose(rep, atol=0)
    real = stable_to_dichotomous(rep)
    enc = json.loads(dumps(encode_representation(real)))
    assert enc["kind"] == "dichotomous" and enc["dim_minus"] == 2 and enc["dim_plus"] == 1
    assert decode_representation(enc).allclose(real, atol=0)


@pytest.mark.parametrize("obj", [
    {"kind": "spline"},
    {"kind": "stable"},
    [],
])
def test_bad_representations(obj):
    with pytest.raises(InputFormatError):
        decode_representation(obj)


def test_dimension_mismatch_is_input_error():
    enc = encode_representation(instance_from_seed(1, (1, 1, 1)))
    enc["kind"] = "dichotomous"
    enc.update(A=encode_matrix(np.eye(2)), B=encode_matrix(np.ones((2, 1))),
               C=encode_matrix(np.ones((1, 2))), D=encode_matrix(np.eye(1)), dim_minus=1, dim_plus=2)
    with pytest.raises(InputFormatError):
        decode_representation(enc)


def test_load_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(InputFormatError):
        load_representation(str(p))


def test_dumps_deterministic_and_17_digits():
    payload = report("demo", {"x": 0.1, "nan": float("nan"), "inf": np.inf, "flag": np.bool_(True),
                              "z": 1 + 2j, "n": np.int64(3), "neg0": -0.0})
    text = dumps(payload)
    assert text == dumps(payload)
    obj = json.loads(text)
    assert obj["schema"] == 1 and obj["report"] == "demo"
    assert "0.10000000000000001" in text
    assert obj["nan"] is None and obj["inf"] is None
    assert obj["flag"] is True and obj["z"] == [1.0, 2.0] and obj["n"] == 3
    assert "-0.0" not in text


def test_dumps_round_trips_floats_exactly():
    rng = np.random.default_rng(0)
    xs = rng.standard_normal(100).tolist()
    assert json.loads(dumps(xs)) == xs
