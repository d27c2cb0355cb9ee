import json

import numpy as np
import pandas as pd
import pytest

from config import SSF_SEED
from models.experiment import DEFAULT_INSTANCES, ExperimentConfig
from utils.error_handler import (
    ConfigError,
    NotAContractionError,
    ToleranceFailure,
    emit_error,
    error_payload,
    error_result,
    exit_code_for,
)
from utils.io_utils import (
    complex_columns,
    config_matrix,
    decode_matrix,
    dump_json,
    encode_matrix,
    load_config,
    write_csv,
    write_outputs,
)


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_default_config():
    config = load_config(None, "ssf")
    assert config.mode == "ssf"
    assert (config.n, config.qmax, config.seed, config.dim) == (2, 8, SSF_SEED, 3)
    assert config.instance_count("oracle") == DEFAULT_INSTANCES["oracle"]
    assert config.output_name("ssf", "ssf.json") == "ssf.json"


def test_config_file_with_matrices(tmp_path):
    path = write_config(tmp_path, {
        "mode": "ssf",
        "n": 3,
        "matrices": {"T": [[[0.5, 0.0]]], "V": [[[0.0, 1.0]]]},
        "instances": {"oracle": 2},
    })
    config = load_config(path, "ssf")
    assert config.n == 3
    assert config.instance_count("oracle") == 2
    np.testing.assert_array_equal(config_matrix(config, "V"), [[1j]])
    assert config_matrix(config, "T0") is None


def test_overrides_apply_after_file(tmp_path):
    path = write_config(tmp_path, {"qmax": 3})
    assert load_config(path, "dilate", {"qmax": 5}).qmax == 5


@pytest.mark.parametrize("data", [
    {"n": 1},
    {"qmax": 0},
    {"q": 0},
    {"eps": [1e-1, 1e-2]},
    {"eps": [1e-1, 1e-1, 1e-3]},
    {"instances": {"bogus": 1}},
    {"instances": {"oracle": -1}},
    {"lambda_min": 1.0},
    {"lambda_min": -1.0005, "lambda_step": 1e-3 * 2},
    {"seed": -1},
    {"dim": 0},
    {"pair": "uu"},
    {"base_case": "other"},
    {"unknown_field": 1},
    {"matrices": {"T": [[["a", 0]]]}},
    {"matrices": {"T": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0]]]}},
])
def test_invalid_config_values(tmp_path, data):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, data), "ssf")


def test_config_mode_mismatch(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, {"mode": "verify"}), "ssf")


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(bad), "ssf")
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"), "ssf")
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, [1, 2]), "ssf")


def test_lambda_grid_contains_zero():
    config = ExperimentConfig(mode="cayley", lambda_min=-1.0, lambda_max=1.0, lambda_step=0.25)
    grid = config.lambda_grid()
    assert grid.size == 9
    assert 0.0 in grid
    assert grid[0] == -1.0 and grid[-1] == 1.0


def test_decode_matrix():
    M = decode_matrix([[[1, 0], [0, 1]], [[0, 0], [1, 0]]], "M")
    np.testing.assert_array_equal(M, [[1, 1j], [0, 1]])
    np.testing.assert_array_equal(decode_matrix(encode_matrix(M), "M"), M)


@pytest.mark.parametrize("raw", [
    [[1.0, 0.0]],
    [[[1.0, 0.0, 0.0]]],
    [[[1.0, 0.0], [2.0]]],
    [[[float("nan"), 0.0]]],
    [],
])
def test_decode_matrix_rejects(raw):
    with pytest.raises(ConfigError):
        decode_matrix(raw, "M")


def test_dump_json_form():
    text = dump_json({"b": np.float64(0.5), "a": [1 + 2j, np.int64(3), np.bool_(True)], "c": np.eye(1)})
    assert text.endswith("\n")
    data = json.loads(text)
    assert list(data) == ["a", "b", "c"]
    assert data["a"] == [[1.0, 2.0], 3, True]
    assert data["c"] == [[1.0]]


def test_write_csv_full_precision(tmp_path):
    path = write_csv(str(tmp_path / "out" / "x.csv"), {"t": [0.1, 0.2], **complex_columns("xi", [1 + 2j, 3j])})
    text = open(path, encoding="utf-8").read()
    assert text.splitlines()[0] == "t,xi_re,xi_im"
    assert "0.10000000000000001" in text
    df = pd.read_csv(path)
    assert df["xi_im"].tolist() == [2.0, 3.0]


def test_write_outputs(tmp_path):
    result = {"json": {"b.json": {"x": 1}, "a.json": []}, "csv": {"c.csv": {"v": [1.0]}}}
    paths = write_outputs(result, str(tmp_path))
    assert [p.split("/")[-1] for p in paths] == ["a.json", "b.json", "c.csv"]
    assert json.loads((tmp_path / "b.json").read_text()) == {"x": 1}


def test_error_payloads():
    payload = error_payload(NotAContractionError("operator norm too large", norm=np.float64(2.0)))
    assert payload["code"] == "not_a_contraction"
    assert payload["type"] == "NotAContractionError"
    assert payload["details"] == {"norm": 2.0}

    generic = error_payload(RuntimeError("boom"))
    assert generic["code"] == "internal"
    assert generic["message"] == "boom"

    assert exit_code_for(ToleranceFailure("x")) == 2
    assert exit_code_for(ConfigError("x")) == 1
    assert exit_code_for(KeyError("x")) == 1


def test_emit_error_writes_one_json_line(capsys):
    code = emit_error(error_result(ConfigError("bad value", field="n")))
    assert code == 1
    line = capsys.readouterr().err
    assert line.count("\n") == 1
    assert json.loads(line)["details"] == {"field": "n"}
