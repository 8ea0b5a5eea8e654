import json
import subprocess
import sys

import pytest

from qdpi.cli import main, parse_complex


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text, value", [
    ("4", 4 + 0j), ("4+0i", 4 + 0j), ("2+3i", 2 + 3j), ("2-3i", 2 - 3j), ("i", 1j), ("-i", -1j),
    ("-0.5e-1+2j", -0.05 + 2j), ("3i", 3j), ("-2.5i", -2.5j), ("1e3", 1000 + 0j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "2+", "i2", "2 3i", "2++3i", "abc", "1+2i+3"])
def test_parse_complex_rejects(text):
    with pytest.raises(Exception):
        parse_complex(text)


def test_eval_pick_sqrt(capsys):
    code, out, _ = run(["eval-pick", "--spec", "sqrt", "--z", "4+0i"], capsys)
    assert code == 0
    d = json.loads(out)
    assert list(d) == ["z", "value"]
    assert d["z"] == [4.0, 0.0]
    assert abs(d["value"][0] - 2.0) <= 1e-4 and abs(d["value"][1]) <= 1e-12


def test_eval_pick_from_file(tmp_path, capsys):
    spec = tmp_path / "f.json"
    spec.write_text(json.dumps({"alpha": 0.0, "beta": 0.0, "atoms": [{"delta": 0.0, "gamma": 1.0}]}))
    code, out, _ = run(["eval-pick", "--spec", str(spec), "--z", "i"], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx([0.0, 1.0])


def test_eval_pick_pole_is_input_error(capsys):
    code, _, err = run(["eval-pick", "--z", "-1"], capsys)
    assert code == 2
    assert err.count("\n") == 1 and "error" in err


def test_counterexample(capsys):
    code, out, _ = run(["demo-counterexample"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["conclusion_B2_le_C2"] is False
    assert d["conclusion_eigenvalues_C2_minus_B2"] == pytest.approx([-6.39, 5.61], abs=1e-9)


def test_monotone_square_fails(capsys):
    code, out, _ = run(["verify-monotone", "--function", "pow:2", "--dim", "2", "--trials", "100"], capsys)
    d = json.loads(out)
    assert code == 1
    assert d["pass"] is False and d["worst_witness"] is not None


def test_monotone_sqrt_passes(capsys):
    code, out, _ = run(["verify-monotone", "--function", "pow:0.5", "--dims", "2,3", "--trials", "50"], capsys)
    assert code == 0
    assert json.loads(out)["trials"] == 100


def test_pick_function_file(tmp_path, capsys):
    spec = tmp_path / "sqrt.json"
    run(["eval-pick", "--z", "1"], capsys)
    from qdpi.jsonio import pick_to_json
    from qdpi.pick import sqrt_pick_spec
    spec.write_text(json.dumps(pick_to_json(sqrt_pick_spec())))
    code, out, _ = run(["verify-monotone", "--function", f"pick:{spec}", "--dim", "2", "--trials", "5"], capsys)
    assert code == 0


@pytest.mark.parametrize("cmd", ["verify-concave", "verify-jensen"])
def test_concave_and_jensen(cmd, capsys):
    code, _, _ = run([cmd, "--dims", "2,3", "--trials", "30"], capsys)
    assert code == 0


def test_dpi_deterministic_and_bits(capsys):
    argv = ["verify-dpi", "--dims", "2,4,2", "--trials", "30", "--seed", "42"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    code3, out3, _ = run(argv + ["--units", "bits"], capsys)
    nats, bits = json.loads(out1), json.loads(out3)
    assert code3 == 0 and bits["pass"] == nats["pass"]
    assert bits["config"]["min_slack"] == pytest.approx(nats["config"]["min_slack"] / 0.6931471805599453)
    assert bits["config"]["tol_dpi"] == nats["config"]["tol_dpi"]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(["verify-holevo", "--trials", "10", "--output", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["check"] == "holevo"


@pytest.mark.parametrize("cmd", ["verify-divergence", "verify-uhlmann"])
def test_other_suites(cmd, capsys):
    code, out, _ = run([cmd, "--trials", "10"], capsys)
    assert code == 0 and json.loads(out)["pass"] is True


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("QDP_SEED", "17")
    _, out, _ = run(["verify-divergence", "--trials", "3"], capsys)
    assert json.loads(out)["seed"] == 17


@pytest.mark.parametrize("argv, flag", [
    (["verify-dpi", "--bogus"], "--bogus"),
    (["verify-dpi", "--dims", "3,x"], "--dims"),
    (["verify-dpi", "--seed", "-1"], "--seed"),
    (["verify-dpi", "--trials", "0"], "--trials"),
    (["verify-monotone", "--function", "exp"], "--function"),
    (["verify-monotone", "--function", "pick:/no/such.json"], "--function"),
    (["verify-holevo", "--povm-count", "1"], "--povm-count"),
    (["verify-dpi", "--units", "furlongs"], "--units"),
    (["eval-pick"], "--z"),
    (["frobnicate"], "frobnicate"),
])
def test_usage_errors(argv, flag, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == ""
    assert flag in err


def test_dpi_needs_three_dims(capsys):
    code, _, err = run(["verify-dpi", "--dims", "3,3"], capsys)
    assert code == 2 and "--dims" in err


def test_missing_spec_file(capsys):
    code, _, err = run(["eval-pick", "--spec", "/no/such.json", "--z", "1"], capsys)
    assert code == 2 and "/no/such.json" in err


def test_bad_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("QDP_SEED", "minus")
    code, _, err = run(["info"], capsys)
    assert code == 2 and "QDP_SEED" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdpi", "info"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["package"] == "qdpi"


def test_documented_dpi_run(capsys):
    code, out, _ = run(["verify-dpi", "--dims", "3,3,2", "--trials", "500", "--seed", "42"], capsys)
    assert code == 0
    assert json.loads(out)["pass"] is True
