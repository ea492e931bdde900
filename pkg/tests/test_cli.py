import json

import pytest

from cft.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(tmp_path, name, *argv):
    path = tmp_path / name
    code = dispatch(list(argv) + ["--json", str(path)])
    return code, json.loads(path.read_text())


def test_trace_gen_exit_zero(tmp_path):
    code, report = run_json(tmp_path, "t.json", "trace-gen", "--conductor", "5")
    assert code == 0
    assert report["passed"] is True
    assert [f["denominator"] for f in report["report"]["fields"]] == ["11", "111"]


def test_trace_gen_degenerate_conductor_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch(["trace-gen", "--conductor", "2"])
    assert exc.value.code == 2


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch(["frobnicate"])
    assert exc.value.code == 2


def test_cm_degrees(tmp_path):
    code, report = run_json(
        tmp_path, "d.json", "cm", "degrees", "--dk", "-7", "--level", "3"
    )
    assert code == 0
    assert report["report"]["order"] == 8
    assert report["report"]["quotient"] == 4


def test_norm_gen_tower(tmp_path):
    code, report = run_json(
        tmp_path, "n.json", "norm-gen", "--conductor", "5",
        "--tower", "2/4/1", "--n-set", "1,2",
    )
    assert code == 0
    assert report["report"]["degrees"] == [2, 2]


def test_normal_element_custom_alpha(tmp_path):
    code, report = run_json(
        tmp_path, "ne.json", "normal-element", "--conductor", "3",
        "--alpha-coeffs", "0,1",
    )
    assert code == 0
    assert report["report"]["beta"]["coeffs"] == ["6/5", "97/546"]


def test_modfun_j(capsys):
    code, out = run(capsys, "modfun", "--fn", "j", "--tau", "0,1", "--prec", "40")
    assert code == 0
    value = json.loads(out)["report"]["value"]
    assert value["re"].startswith("1728.0")


def test_modfun_ptog_reports_certified_normalization(capsys):
    code, out = run(
        capsys, "modfun", "--fn", "ptog", "--tau", "0,2",
        "--index", "0,1,3", "--index2", "1,0,3", "--prec", "64",
    )
    assert code == 0
    report = json.loads(out)["report"]
    assert report["certified_normalization"] == "paper"


def test_env_precision_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CFT_PRECISION", "48")
    code, report = run_json(tmp_path, "e.json", "modfun", "--fn", "j", "--tau", "0,1")
    assert code == 0
    assert report["config"]["precision"] == 48


def test_config_file_precision(tmp_path):
    cfg = tmp_path / "cft.cfg"
    cfg.write_text("# comment\nprecision = 52\n")
    code, report = run_json(
        tmp_path, "c.json", "modfun", "--fn", "j", "--tau", "0,1",
        "--config", str(cfg),
    )
    assert code == 0
    assert report["config"]["precision"] == 52


def test_cm_precision_floor():
    with pytest.raises(SystemExit) as exc:
        dispatch(["cm", "degrees", "--dk", "-7", "--prec", "16"])
    assert exc.value.code == 2


def test_reports_deterministic_modulo_timings(tmp_path):
    argv = ["trace-gen", "--conductor", "12"]
    _, first = run_json(tmp_path, "a.json", *argv)
    _, second = run_json(tmp_path, "b.json", *argv)
    first.pop("timings")
    second.pop("timings")
    assert json.dumps(first, sort_keys=False) == json.dumps(second, sort_keys=False)


def test_verify_all_subset(tmp_path):
    code, report = run_json(
        tmp_path, "v.json", "verify-all", "--only", "2,8"
    )
    assert code == 0
    numbers = [c["number"] for c in report["report"]["criteria"]]
    assert numbers == [2, 8]
    assert all(c["passed"] for c in report["report"]["criteria"])
