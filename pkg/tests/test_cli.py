import json

import pytest

from yflift import cli


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = cli.main([*argv, "--json", str(out)])
    return code, json.loads(out.read_text())


def write_config(tmp_path, text):
    p = tmp_path / "inst.toml"
    p.write_text(text)
    return str(p)


def test_invalid_discriminant_exit_2(tmp_path):
    cfg = write_config(tmp_path, "N_minus = 6\nN1 = 6\nN2 = 6\n")
    code, rep = run(tmp_path, "algebra", "--config", cfg)
    assert code == 2
    assert rep["status"] == "invalid-config" and "InvalidDiscriminant" in rep["error"]


def test_unknown_key_exit_2(tmp_path):
    cfg = write_config(tmp_path, "N_minus = 11\nlevel = 3\n")
    code, rep = run(tmp_path, "algebra", "--config", cfg)
    assert code == 2 and "level" in rep["error"]


def test_nested_table_rejected(tmp_path):
    cfg = write_config(tmp_path, "[instance]\nN_minus = 11\n")
    assert cli.main(["algebra", "--config", cfg, "--json", str(tmp_path / "x.json")]) == 2


def test_config_validation():
    with pytest.raises(cli.ConfigError):
        cli.load_config(None, {"N1": 12})
    with pytest.raises(cli.ConfigError):
        cli.load_config(None, {"k1": 0, "k2": 1})
    cfg = cli.load_config(None, {"bound": 7})
    assert cfg.bound == 7 and cfg.N_plus == 3


def test_algebra_report(tmp_path):
    code, rep = run(tmp_path, "algebra")
    assert code == 0
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    assert rep["status"] == "ok"


def test_classes_report(tmp_path):
    code, rep = run(tmp_path, "classes")
    assert code == 0 and rep["schema_version"] == cli.SCHEMA_VERSION


def test_local_zeta_row_count(tmp_path):
    code, rep = run(tmp_path, "local-zeta", "--place", "inert-unram", "--draws", "50")
    assert code == 0
    assert rep["result"]["count"] == 50 and rep["result"]["passed_rows"] == 50


def test_arch_sweep(tmp_path):
    code, rep = run(tmp_path, "arch", "--sweep", "4")
    assert code == 0 and len(rep["result"]["rows"]) == 15


def test_lift_cache_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("YF_CACHE_DIR", str(tmp_path / "cache"))
    code1, a = run(tmp_path, "lift", "--bound", "3", name="a.json")
    assert any((tmp_path / "cache").iterdir())
    code2, b = run(tmp_path, "lift", "--bound", "3", name="b.json")
    assert code1 == code2 == 0
    a.pop("generated_at")
    b.pop("generated_at")
    assert a == b


def test_verify_all_subset(tmp_path, capsys):
    code, rep = run(tmp_path, "verify-all", "--only", "1", "9")
    assert code == 0
    assert [r["id"] for r in rep["result"]["criteria"]] == [1, 9]
    err = capsys.readouterr().err
    assert "PASS criterion 1" in err and "PASS criterion 9" in err
