import json

import numpy as np
import pytest

from normcomp.errors import MatrixFormatError
from normcomp.matio import (
    block_from_dict,
    block_to_dict,
    dumps,
    format_real,
    load_block_matrix,
    load_matrix,
    matrix_from_dict,
    matrix_to_dict,
    save_json,
)
from normcomp.rng import SplitMix64, random_block_psd


def test_format_real_is_17_significant_digits():
    assert format_real(0.1) == "0.10000000000000001"
    assert format_real(3) == "3.0"
    assert float(format_real(np.pi)) == np.pi
    with pytest.raises(ValueError):
        format_real(float("inf"))


def test_dumps_is_valid_json_and_stable():
    obj = {"a": [1.5, 2], "b": {"c": np.float64(1e-300), "d": True, "e": None}, "f": np.arange(3)}
    text = dumps(obj)
    assert json.loads(text) == {"a": [1.5, 2], "b": {"c": 1e-300, "d": True, "e": None}, "f": [0, 1, 2]}
    assert text == dumps(obj)
    assert json.loads(dumps(obj, indent=None)) == json.loads(text)


def test_matrix_round_trip(tmp_path):
    M = SplitMix64(3).complex_normal(3, 3)
    assert np.array_equal(matrix_from_dict(json.loads(dumps(matrix_to_dict(M)))), M)
    A = random_block_psd((1, 2), 5)
    path = tmp_path / "a.json"
    save_json(path, block_to_dict(A))
    B = load_block_matrix(path)
    assert B.partition == A.partition and np.array_equal(B.matrix, A.matrix)
    assert np.array_equal(load_matrix(path), A.matrix)
    C = load_block_matrix(path, "1,1,1")
    assert C.count == 3


def test_real_only_matrix_and_partition_overlay(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"dim": 2, "re": [[2, 1], [1, 2]]}')
    assert load_block_matrix(path, (1, 1)).block(0, 1)[0, 0] == 1.0
    with pytest.raises(MatrixFormatError):
        load_block_matrix(path)


@pytest.mark.parametrize(
    "data, field",
    [
        ({"re": [[1.0]]}, "dim"),
        ({"dim": 2, "re": [[1.0, 2.0]]}, "re"),
        ({"dim": 1, "re": [[1.0]], "im": [["x"]]}, "im"),
        ({"dim": 1}, "re"),
    ],
)
def test_format_errors_name_the_field(data, field):
    with pytest.raises(MatrixFormatError, match=field):
        matrix_from_dict(data)


def test_block_format_errors():
    with pytest.raises(MatrixFormatError, match="partition"):
        block_from_dict({"matrix": matrix_to_dict(np.eye(2))})
    with pytest.raises(MatrixFormatError, match="partition"):
        block_from_dict({"partition": ["1"], "matrix": matrix_to_dict(np.eye(1))})


def test_bad_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 1,\n "re": [[1.0]],,}')
    with pytest.raises(MatrixFormatError, match="line 2"):
        load_matrix(path)
    with pytest.raises(MatrixFormatError, match="cannot read"):
        load_matrix(tmp_path / "missing.json")
