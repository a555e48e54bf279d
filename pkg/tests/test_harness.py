import json

import numpy as np
import pytest

from rmtlab.errors import ConfigurationError
from rmtlab.harness import KIND_PARAMS, ExperimentConfig, emit, load_config, run_experiment
from rmtlab.harness import experiments
from rmtlab.harness.cli import main
from rmtlab.harness.config import REQUIRED as _REQUIRED, grid_points, parse_param
from rmtlab.harness.report import to_json


def small(kind="semicircle", **kw):
    base = dict(n=40, reps=12, dist="rademacher", seed=5)
    base.update(kw)
    return ExperimentConfig(kind, **base)


# --- config validation --------------------------------------------------------

REQUIRED = [(kind, name) for kind, spec in KIND_PARAMS.items()
            for name, (_, default) in spec.items() if default is _REQUIRED]


def test_every_kind_with_required_params_is_covered():
    assert {k for k, _ in REQUIRED} == {"bulk-clt", "universality", "edge-measure", "prop-shell", "prop-volume-ratio"}


@pytest.mark.parametrize("kind,name", REQUIRED)
def test_missing_required_param_is_named(kind, name):
    full = {"k": 5, "r_exp": 0.5, "m1": 3, "m2": 3}
    params = {k: v for k, v in full.items() if k in KIND_PARAMS[kind] and k != name}
    with pytest.raises(ConfigurationError, match=repr(name)):
        ExperimentConfig(kind, n=20, reps=2, params=params)


@pytest.mark.parametrize("bad", [
    dict(kind="nope"),
    dict(reps=0),
    dict(workers=0),
    dict(n=0),
    dict(seed=-1),
    dict(dist="cauchy"),
    dict(params={"unknown": 1}),
    dict(params={"tol": "abc"}),
])
def test_invalid_configs(bad):
    kw = dict(kind="semicircle", n=10, reps=2)
    kw.update(bad)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**kw)


def test_kind_specific_ranges():
    with pytest.raises(ConfigurationError):
        ExperimentConfig("bulk-clt", n=10, reps=2, params={"k": 10})
    with pytest.raises(ConfigurationError):
        ExperimentConfig("edge-measure", n=10, reps=2, params={"r_exp": 0.9})
    with pytest.raises(ConfigurationError):
        ExperimentConfig("trace-moment", n=10, reps=2, params={"p": 3})


def test_dist_is_canonicalised_and_params_parsed():
    cfg = ExperimentConfig("bulk-clt", n=30, reps=2, dist="student_t:20.0", params={"k": "15"})
    assert cfg.dist == "student_t:20"
    assert cfg.params["k"] == 15 and cfg.params["tol"] == 0.05
    assert "workers" not in cfg.echo()


def test_grid_and_param_parsing():
    assert grid_points("-1:1:0.5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert parse_param("k=250") == ("k", "250")
    with pytest.raises(ConfigurationError):
        parse_param("k250")
    with pytest.raises(ConfigurationError):
        grid_points("1:0:0.1")


def test_load_config_sections(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(
        "[semicircle]\nn = 30\nreps = 4\ndist = uniform\nseed = 3\n\n"
        "[edge]\nkind = edge-tw\nn = 30\nreps = 4\ndist = gue\nref = rademacher\n"
    )
    all_cfgs = load_config(path)
    assert set(all_cfgs) == {"semicircle", "edge"}
    assert all_cfgs["edge"].kind == "edge-tw" and all_cfgs["edge"].params["ref"] == "rademacher"
    one = load_config(path, "semicircle", {"reps": 6})
    assert one.reps == 6 and one.dist == "uniform"
    with pytest.raises(ConfigurationError):
        load_config(path, "missing")


# --- running ------------------------------------------------------------------

def test_rows_match_reps_and_are_indexed():
    rep = run_experiment(small())
    assert len(rep.rows) == 12
    assert [r["index"] for r in rep.rows] == list(range(12))
    assert "ks" in rep.summary and rep.summary["status"] == "ok"


@pytest.mark.parametrize("cfg", [
    small(),
    small("universality", params={"k": 20}),
    small("edge-tw", dist="gue", params={"ref": "goe"}),
    small("prop-volume-ratio", n=6, params={"m1": 1, "m2": 1}),
], ids=lambda c: c.kind)
def test_worker_count_independence(cfg):
    one = run_experiment(cfg)
    two = run_experiment(cfg.with_workers(2))
    assert one.to_json() == two.to_json()
    assert one.to_csv() == two.to_csv()


def test_rerun_is_byte_identical():
    assert run_experiment(small()).to_json() == run_experiment(small()).to_json()


def test_error_fraction_marks_report(monkeypatch):
    rep_fn, red_fn = experiments.KINDS["semicircle"]

    def flaky(cfg, i):
        if i % 5 == 0:
            raise ArithmeticError("synthetic failure")
        return rep_fn(cfg, i)

    monkeypatch.setitem(experiments.KINDS, "semicircle", (flaky, red_fn))
    rep = run_experiment(small(reps=20))
    assert rep.errored and rep.exit_code == 2
    assert "synthetic failure" in rep.summary["first_error"]
    assert sum("error" in r for r in rep.rows) == 4


def test_tw_table():
    rep = run_experiment(ExperimentConfig("tw-table", params={"grid": "-4:2:0.5"}))
    xs = [r["x"] for r in rep.rows]
    f = [r["F2"] for r in rep.rows]
    assert xs[0] == -4.0 and xs[-1] == 2.0 and len(xs) == 13
    assert np.all(np.diff(f) > 0)
    with pytest.raises(ConfigurationError):
        run_experiment(ExperimentConfig("tw-table", params={"grid": "-12:0:1"}))


def test_summary_carries_reference_comparison():
    rep = run_experiment(small("trace-moment", n=100, reps=10))
    assert rep.summary["p"] == 8
    assert rep.summary["target"] == pytest.approx(2**1.5 / np.sqrt(np.pi))
    names = [c["name"] for c in rep.checks]
    assert "relative_deviation" in names and "max_conservation_error" in names


# --- emitting -----------------------------------------------------------------

def test_csv_json_plot(tmp_path):
    rep = run_experiment(small())
    paths = emit(rep, tmp_path, ["csv", "json", "plot"])
    names = {p.name for p in paths}
    assert names == {"semicircle.csv", "semicircle.json", "semicircle.dat", "manifest.json"}
    assert len((tmp_path / "semicircle.csv").read_text().splitlines()) == rep.metadata["config"]["reps"] + 1
    text = (tmp_path / "semicircle.json").read_text()
    assert to_json(json.loads(text)) == text
    lines = (tmp_path / "semicircle.dat").read_text().splitlines()
    assert lines[0].split()[1:] == ["t", "ecdf", "semicircle_cdf"]
    g = np.array([float(line.split()[2]) for line in lines[1:]])
    assert np.all(np.diff(g) >= 0)


def test_manifest_and_overwrite(tmp_path):
    import hashlib

    rep = run_experiment(small())
    emit(rep, tmp_path, ["json"])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    art = manifest["artifacts"][0]
    data = (tmp_path / art["file"]).read_bytes()
    assert art["sha256"] == hashlib.sha256(data).hexdigest()
    assert "wall_time_seconds" in manifest and manifest["config"]["kind"] == "semicircle"
    with pytest.raises(FileExistsError):
        emit(rep, tmp_path, ["json"])
    emit(rep, tmp_path, ["json"], force=True)


# --- CLI ----------------------------------------------------------------------

def test_cli_pass(tmp_path, capsys):
    code = main(["semicircle", "--n", "200", "--reps", "10", "--dist", "gaussian", "--seed", "1",
                 "--out", str(tmp_path), "--format", "csv,json", "-q"])
    assert code == 0
    assert (tmp_path / "semicircle.csv").exists() and (tmp_path / "manifest.json").exists()


def test_cli_statistical_failure(tmp_path):
    # an impossible tolerance turns into exit status 1
    code = main(["semicircle", "--n", "50", "--reps", "2", "--param", "tol=1e-9", "--out", str(tmp_path), "-q"])
    assert code == 1


def test_cli_config_errors(tmp_path, capsys):
    assert main(["bulk-clt", "--n", "50", "--reps", "2", "--out", str(tmp_path)]) == 2
    assert "'k'" in capsys.readouterr().err
    assert main(["semicircle", "--n", "10", "--reps", "2", "--format", "xml", "--out", str(tmp_path)]) == 2


def test_cli_refuses_overwrite(tmp_path):
    argv = ["semicircle", "--n", "30", "--reps", "2", "--out", str(tmp_path), "-q"]
    assert main(argv) in (0, 1)
    assert main(argv) == 2
    assert main(argv + ["--force"]) in (0, 1)


def test_cli_env_default_out(tmp_path, monkeypatch):
    monkeypatch.setenv("RMTLAB_OUT", str(tmp_path / "env-out"))
    assert main(["tw-table", "--param", "grid=-2:2:1", "--format", "plot", "-q"]) == 0
    assert (tmp_path / "env-out" / "tw-table.dat").exists()


def test_cli_config_file(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text("[quick]\nkind = semicircle\nn = 40\nreps = 3\nseed = 2\n")
    assert main(["quick", "--config", str(path), "--reps", "4", "--out", str(tmp_path / "o"), "-q"]) in (0, 1)
    rep = json.loads((tmp_path / "o" / "semicircle.json").read_text())
    assert rep["metadata"]["config"]["reps"] == 4
