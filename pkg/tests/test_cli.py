import csv
import io
import json

import pytest

from primeseries.cli import config_to_text, main, parse_grid, parse_int, parse_n_range
from primeseries.config import ConfigError, parse_config_text


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_variance_json(capsys):
    code, out, _ = run(["variance", "--s", "1e-6", "--cutoff", "1e7"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert {"partial", "tail_estimate", "total", "asymptote", "ratio"} <= set(doc["breakdowns"][0])


def test_variance_band_failure_exits_one(capsys):
    code, _, _ = run(["variance", "--s", "0.3", "--cutoff", "1e4", "--band", "0.99,1.01"], capsys)
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["variance"],
    ["variance", "--s", "0"],
    ["variance", "--s", "abc"],
    ["variance", "--s", "1e-3", "--cutoff", "10"],
    ["fclt", "--seed", "1", "--replicas", "1"],
    ["fclt", "--replicas", "10"],
    ["fclt", "--seed", "1", "--grid", "1,0.5"],
    ["fclt", "--seed", "1", "--mode", "sideways"],
    ["lil", "--seed", "1", "--gamma", "2"],
    ["lil", "--seed", "1", "--n", "0..3"],
    ["euler", "--P", "13"],
    ["euler", "--seed", "1", "--k", "1"],
    ["decompose", "--seed", "1", "--s", "-1"],
    ["lindeberg", "--eps", "0"],
    ["lindeberg", "--noise-kind", "two_point"],
    ["sieve"],
    ["sieve", "--prime-limit", "1"],
    ["nonsense"],
    [],
])
def test_malformed_invocations_exit_two(argv, capsys):
    assert main(argv) == 2


def test_fclt_grid_parsing_and_round_trip(tmp_path, capsys):
    argv = ["fclt", "--seed", "5", "--replicas", "40", "--cutoff", "1e4", "--grid", "0.25,0.5,1",
            "--noise-kind", "two_point", "--two-point-a", "-1", "--two-point-b", "3",
            "--two-point-q", "0.75"]
    code, out, _ = run(argv, capsys)
    doc = json.loads(out)
    assert code in (0, 1)
    assert doc["config"]["grid"] == [0.25, 0.5, 1.0]
    cfg = tmp_path / "run.cfg"
    cfg.write_text(config_to_text(doc["config"]))
    _, out2, _ = run(["fclt", "--config", str(cfg)], capsys)
    again = json.loads(out2)
    assert again["config"] == doc["config"]
    assert again["input_hash"] == doc["input_hash"]
    assert again["empirical_cov"] == doc["empirical_cov"]


def test_flags_override_file(tmp_path, capsys):
    cfg = tmp_path / "v.cfg"
    cfg.write_text("# comment\ns = 1e-3\ncutoff = 1e4\n")
    _, out, _ = run(["variance", "--config", str(cfg), "--s", "1e-2"], capsys)
    assert json.loads(out)["config"]["s"] == [0.01]
    _, out, _ = run(["variance", "--config", str(cfg)], capsys)
    assert json.loads(out)["config"]["s"] == [0.001]


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("s = 1e-3\nreplicas = 4\n")
    code, _, err = run(["variance", "--config", str(cfg)], capsys)
    assert code == 2 and "replicas" in err


def test_lil_csv(capsys):
    code, out, err = run(["lil", "--seed", "20250918", "--gamma", "0.5", "--branch", "minus",
                          "--n", "1..12", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:5] == ["n", "s_n", "raw", "normalized", "running_max"]
    assert [int(r[0]) for r in rows[1:]] == list(range(2, 13))
    assert "n=1" in err


def test_euler_command(capsys):
    code, out, _ = run(["euler", "--seed", "11", "--P", "13", "--k", "3", "--seeds", "100"],
                       capsys)
    doc = json.loads(out)
    assert code == 0 and doc["max_relative_gap"] <= 1e-12


def test_decompose_command(tmp_path, capsys):
    code, _, _ = run(["decompose", "--seed", "3", "--k", "2", "--s", "0.5", "--cutoff", "1e4",
                      "--table-bound", "50", "--out", str(tmp_path)], capsys)
    doc = json.loads((tmp_path / "decompose.json").read_text())
    assert code == 0 and doc["reports"][0]["residual"] <= 1e-10
    rows = list(csv.reader(open(tmp_path / "f_table.csv")))
    assert rows[0] == ["n", "f"] and len(rows) == 51 and rows[1] == ["1", "1"]


def test_lindeberg_and_sieve_commands(tmp_path, capsys):
    code, out, _ = run(["lindeberg", "--noise-kind", "gaussian", "--cutoff", "1e4"], capsys)
    assert code == 0 and len(json.loads(out)["profile"]) == 3
    cache = tmp_path / "p.bin"
    code, out, _ = run(["sieve", "--prime-limit", "1e6", "--prime-cache", str(cache)], capsys)
    assert code == 0 and json.loads(out)["count"] == 78498 and cache.exists()


@pytest.mark.parametrize("text,value", [("1e8", 10**8), ("10**7", 10**7), ("123", 123)])
def test_parse_int(text, value):
    assert parse_int(text) == value


def test_parsers():
    assert parse_grid("0.25,0.5,1") == [0.25, 0.5, 1.0]
    assert parse_n_range("1..4") == [1, 2, 3, 4]
    assert parse_n_range("2,5") == [2, 5]


def test_config_parser():
    assert parse_config_text("a.b = 1 # x\n\n c=two\n") == {"a.b": "1", "c": "two"}
    with pytest.raises(ConfigError):
        parse_config_text("novalue\n")
    with pytest.raises(ConfigError):
        parse_config_text("x = 1\n", allowed={"y"})
