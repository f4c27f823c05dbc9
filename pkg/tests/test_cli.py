import json
import os
import subprocess
import sys

import pytest

from tangential import __version__
from tangential.cli import atomic_write, main, rows_to_csv

CONFIG = {"kernel": "poisson", "curve": {"family": "power", "c": 1.0, "alpha": 0.25},
          "variant": "theorem1", "K": 2, "N": 15, "beta_target": 0.98, "tail_exponent": 1}


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def config(tmp_path):
    return write(tmp_path / "c.json", CONFIG)


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert __version__ in out and "schema" in out


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_zero_depth_is_config_error(tmp_path):
    cfg = write(tmp_path / "bad.json", {**CONFIG, "K": 0})
    assert main(["schedule", "--config", cfg, "--out", str(tmp_path / "s.json")]) == 2
    assert not (tmp_path / "s.json").exists()


@pytest.mark.parametrize("change", [{"kernel": "gauss"}, {"N": -1}, {"curve": {"family": "power"}},
                                    {"beta_target": 0.3}, {"tol": 1e-12}, {"schema_version": 99}])
def test_invalid_configs(tmp_path, change):
    cfg = write(tmp_path / "bad.json", {**CONFIG, **change})
    assert main(["oscillate", "--variant", "theorem1", "--config", cfg, "--csv", str(tmp_path / "t.csv")]) == 2


def test_unreadable_config(tmp_path):
    (tmp_path / "c.json").write_text("{not json")
    assert main(["schedule", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "s.json")]) == 2


def test_pipeline(tmp_path, config, capsys):
    sched = str(tmp_path / "s.json")
    assert main(["schedule", "--config", config, "--out", sched, "--validate"]) == 0
    data = json.loads(open(sched).read())
    assert data["validation"]["passed"] and len(data["entries"]) == 2

    obj = str(tmp_path / "o.json")
    assert main(["construct", "--schedule", sched, "--out", obj]) == 0
    assert len(json.loads(open(obj).read())["sets"]) == 2

    csv1, csv2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    summary = tmp_path / "sum.json"
    args = ["oscillate", "--variant", "theorem1", "--config", config]
    assert main(args + ["--schedule", sched, "--csv", str(csv1), "--out", str(summary)]) == 0
    assert main(args + ["--csv", str(csv2)]) == 0
    assert csv1.read_bytes() == csv2.read_bytes()
    assert json.loads(summary.read_text())["violations"] == 0
    assert capsys.readouterr().out.count("\n") == 4


def test_schedule_failure_exits_1(tmp_path):
    cfg = write(tmp_path / "c.json", {**CONFIG, "curve": {"family": "linear", "c": 1.0}})
    assert main(["schedule", "--config", cfg, "--out", str(tmp_path / "s.json")]) == 1


def test_schedule_variant_mismatch(tmp_path, config):
    sched = str(tmp_path / "s.json")
    main(["schedule", "--config", config, "--out", sched])
    cfg2 = write(tmp_path / "c2.json", {**CONFIG, "tail_exponent": None, "beta_target": 1.0, "K": 1})
    assert main(["oscillate", "--variant", "theorem2", "--config", cfg2, "--schedule", sched,
                 "--csv", str(tmp_path / "t.csv")]) == 2


def test_beta_outputs(tmp_path):
    cfg = write(tmp_path / "b.json", {"kernel": "poisson", "curve": {"family": "linear"}, "deltas": [0.1, 0.01]})
    csv = tmp_path / "b.csv"
    assert main(["beta", "--config", cfg, "--csv", str(csv), "--out", str(tmp_path / "b.out.json")]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "delta,r,inner_mass" and len(lines) == 1 + 2 * 37
    assert json.loads((tmp_path / "b.out.json").read_text())["value"] < 0.07


def test_phi_batch(tmp_path, capsys):
    cfg = write(tmp_path / "p.json", {"kernel": "poisson", "x": 0.3, "r_grid": [0.9, 0.99], "set": [[0, 1]]})
    assert main(["phi", "--config", cfg]) == 0
    assert capsys.readouterr().out.count("value=") == 2
    cfg = write(tmp_path / "p.json", {"kernel": "poisson", "x": 0.3, "r": 0.99,
                                      "blaschke": {"factors": [{"n": 4, "delta": 1e-3}]}})
    assert main(["phi", "--config", cfg, "--csv", str(tmp_path / "p.csv")]) == 0
    assert (tmp_path / "p.csv").read_text().startswith("r,x,phi_re,phi_im")
    cfg = write(tmp_path / "p.json", {"kernel": "poisson", "x": 0.3, "r": 1.5, "set": [[0, 1]]})
    assert main(["phi", "--config", cfg]) == 2


def test_verify_lemma1(tmp_path):
    assert main(["verify-lemma1", "--n", "16", "--delta", "1e-4", "--out", str(tmp_path / "l.json")]) == 0
    assert json.loads((tmp_path / "l.json").read_text())["passed"]
    assert main(["verify-lemma1", "--n", "16", "--delta", "0.5"]) == 2


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write(str(target), "a")
    atomic_write(str(target), "b")
    assert target.read_text() == "b"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_csv_uses_repr():
    text = rows_to_csv([{"a": 0.1, "b": 1 / 3, "c": True, "z": 1 + 2j}])
    assert text == "a,b,c,z_re,z_im\n0.1,0.3333333333333333,true,1.0,2.0\n"
    assert rows_to_csv([]) == ""


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tangential", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
