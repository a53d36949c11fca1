import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from entrodyn import runner
from entrodyn.cli import cookbook, cookbook_dir, main
from entrodyn.scenario import ScenarioError, parse_scenario

from conftest import CORRUPT


@pytest.fixture
def book(tmp_path, monkeypatch):
    """Cookbook copied to a scratch directory, with outputs redirected there."""
    dst = tmp_path / "book"
    shutil.copytree(cookbook_dir(), dst)
    monkeypatch.setenv(runner.OUT_ENV, str(tmp_path / "out"))
    return dst


def write(path, raw):
    path.write_text(json.dumps(raw))
    return path


def test_every_cookbook_scenario_parses():
    names = cookbook()
    assert {"classical_pd", "quantum_unitary", "infotheory_battery", "thermo_fit"} <= set(names)
    for path in names.values():
        assert parse_scenario(path).name == path.stem


def corrupted_variants():
    return [
        pytest.param(path.name, key, id=f"{path.stem}-{key}")
        for path in cookbook().values()
        for key in json.loads(path.read_text())
    ]


@pytest.mark.parametrize("scenario,key", corrupted_variants())
def test_corrupted_field_is_named(book, capsys, scenario, key):
    raw = json.loads((book / scenario).read_text())
    raw[key] = CORRUPT[key]
    bad = write(book / "bad.json", raw)
    assert main(["validate", str(bad)]) == 2
    assert f"'{key}'" in capsys.readouterr().err
    assert main(["run", str(bad)]) == 2


def test_unknown_and_missing_keys(book, capsys):
    raw = json.loads((book / "classical_pd.json").read_text())
    assert main(["validate", str(write(book / "bad.json", dict(raw, tend=5)))]) == 2
    assert "'tend'" in capsys.readouterr().err
    del raw["dt"]
    assert main(["validate", str(write(book / "bad.json", raw))]) == 2
    assert "'dt'" in capsys.readouterr().err


def test_dt_larger_than_t_end(book):
    raw = json.loads((book / "classical_pd.json").read_text())
    with pytest.raises(ScenarioError) as info:
        parse_scenario(write(book / "bad.json", dict(raw, t_end=0.1, dt=0.5)))
    assert info.value.field == "dt"


def test_negative_gamma(book):
    raw = json.loads((book / "quantum_unitary.json").read_text())
    with pytest.raises(ScenarioError, match=">= 0|non-negative") as info:
        parse_scenario(write(book / "bad.json", dict(raw, gamma=-1)))
    assert info.value.field == "gamma"


def test_malformed_json_and_missing_file(book, capsys):
    (book / "bad.json").write_text("{kind: classical")
    assert main(["validate", str(book / "bad.json")]) == 2
    assert main(["run", str(book / "absent.json")]) == 3


@pytest.mark.parametrize("name", sorted(cookbook()))
def test_runs_are_byte_identical(book, tmp_path, monkeypatch, name):
    outputs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        monkeypatch.setenv(runner.OUT_ENV, str(out))
        assert main(["run", str(book / f"{name}.json")]) == 0
        csvs = sorted((out / name).glob("*.csv"))
        assert csvs and all(p.stat().st_size > 0 for p in csvs)
        outputs.append({p.name: p.read_bytes() for p in csvs})
    assert outputs[0] == outputs[1]


def test_output_dir_env_and_default(book, tmp_path, monkeypatch):
    r = runner.run_scenario(parse_scenario(book / "classical_rps.json"))
    assert all(p.is_file() and p.stat().st_size > 0 for p in r.files)
    assert r.files[0].parent == tmp_path / "out" / "classical_rps"
    monkeypatch.delenv(runner.OUT_ENV)
    monkeypatch.chdir(tmp_path)
    r = runner.run_scenario(parse_scenario(book / "classical_rps.json"))
    assert r.files[0].parent == tmp_path / "runs" / "classical_rps"


def test_failed_run_leaves_nothing(book, tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise FloatingPointError("injected")

    monkeypatch.setattr(runner, "quantum_csv", boom)
    assert main(["run", str(book / "quantum_unitary.json")]) == 3
    out = tmp_path / "out"
    assert not out.exists() or list(out.rglob("*")) == []


def test_failure_midway_keeps_previous_outputs(book, tmp_path, monkeypatch):
    assert main(["run", str(book / "thermo_beta.json")]) == 0
    before = (tmp_path / "out" / "thermo_beta" / "scan.csv").read_bytes()
    monkeypatch.setattr(runner, "maxent_verify", lambda *a, **k: 1 / 0)
    assert main(["run", str(book / "thermo_beta.json")]) == 3
    assert (tmp_path / "out" / "thermo_beta" / "scan.csv").read_bytes() == before
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["thermo_beta"]


def summary_of(text):
    return dict(ln.split("=", 1) for ln in text.splitlines() if "=" in ln)


def test_classical_pd_report(book, capsys):
    assert main(["run", str(book / "classical_pd.json")]) == 0
    text = capsys.readouterr().out
    values = summary_of(text)
    assert "final_entropy" in values and values["nash"] == "true"
    x = np.array(values["final_state"].split(), float)
    np.testing.assert_allclose(x, [0, 1], atol=1e-3)


def test_quantum_unitary_report(book, capsys):
    assert main(["run", str(book / "quantum_unitary.json")]) == 0
    values = summary_of(capsys.readouterr().out)
    assert float(values["max_entropy_drift"]) < 1e-9
    assert values["unitary_entropy_conserved"] == "pass"


def test_thermo_fit_report(book, capsys):
    assert main(["run", str(book / "thermo_fit.json")]) == 0
    values = summary_of(capsys.readouterr().out)
    assert float(values["beta_roundtrip_error"]) < 1e-8
    assert float(values["fit_residual"]) < 1e-10


def test_infotheory_report_has_check_table(book, capsys):
    assert main(["run", str(book / "infotheory_battery.json")]) == 0
    text = capsys.readouterr().out
    table = text.split("[checks]")[1].split("[files]")[0].split()
    assert len(table) == 10 and all(ln.endswith("=pass") for ln in table)
    assert "H_A_given_B=0.875488750216" in text


def test_two_sample_run_renders(book, capsys):
    raw = json.loads((book / "classical_rps.json").read_text())
    path = write(book / "short.json", dict(raw, name="short", t_end=0.1, dt=0.1))
    assert main(["run", str(path)]) == 0
    values = summary_of(capsys.readouterr().out)
    assert values["samples"] == "2"
    assert np.isfinite(float(values["mean_entropy_rate"]))


def test_version_and_demo_list(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.startswith("entrodyn ")
    assert main(["demo", "--list"]) == 0
    assert "classical_pd" in capsys.readouterr().out.split()
    assert main(["demo", "nonexistent"]) == 2


def test_console_entry_point(book):
    proc = subprocess.run(
        [sys.executable, "-m", "entrodyn", "validate", str(book / "thermo_fit.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("ok:")
