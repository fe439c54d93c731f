import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest
import yaml

from oneshot.benchmark import read_results
from oneshot.cli import main, parse_method_spec
from oneshot.config import ConfigError, ExperimentConfig


def _config(tmp_path, **data):
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


SMALL = dict(
    replicas=4,
    methods=["Random", "MetaRctgScrHammersley"],
    grid=dict(critical=[3], useless_factors=[0, 5], budgets=[10, 30], functions=["Sphere", "Cigar"]),
)


# ---- config


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig.from_dict(dict(SMALL, kind="report", seed=17))
    again = ExperimentConfig.from_dict(yaml.safe_load(cfg.dump()))
    assert again == cfg
    path = tmp_path / "c.yaml"
    path.write_text(cfg.dump())
    assert ExperimentConfig.load(path) == cfg
    assert ExperimentConfig.from_dict(ExperimentConfig().to_dict()) == ExperimentConfig()


@pytest.mark.parametrize("bad", [
    dict(kind="train"), dict(seed=-1), dict(seed=2**64), dict(replicas=0), dict(jobs=0),
    dict(methods=["Nope"]), dict(methods=[]), dict(methods=["Random", "Random"]),
    dict(color="red"), dict(grid=dict(functions=["Ackley"])), dict(grid=dict(prior="Uniform")),
    dict(grid=dict(budgets=[0])), dict(sample=dict(method="RescaleRandom", target="unbounded")),
    dict(report=dict(quantiles=[1.5])), dict(grid="x"), dict(seed="abc"),
])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(bad)


def test_full_grid_replicas():
    cfg = ExperimentConfig().override(full_grid=True)
    assert cfg.bench_replicas() == 7400
    assert cfg.effective_grid().budgets[-1] == 300000
    assert ExperimentConfig().override(full_grid=True, replicas=50).bench_replicas() == 50
    assert ExperimentConfig().bench_replicas() == 1000


def test_functions_case_insensitive():
    cfg = ExperimentConfig.from_dict(dict(grid=dict(functions=["sphere", "RASTRIGIN"])))
    assert cfg.grid.functions == ("Sphere", "Rastrigin")


def test_method_names_round_trip_through_canonical_form():
    cfg = ExperimentConfig()
    for name in cfg.method_names():
        assert parse_method_spec(name).name == name


# ---- subcommands


def test_sample_halton(tmp_path, capsys):
    out = tmp_path / "o"
    rc = main(["sample", "--method", "Halton", "-n", "3", "-d", "2", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(open(out / "points.csv")))
    assert rows[0] == ["x0", "x1"]
    got = np.array(rows[1:], dtype=float)
    np.testing.assert_allclose(got, [[0.5, 1 / 3], [0.25, 2 / 3], [0.75, 1 / 9]], atol=1e-15)


def test_sample_unbounded(tmp_path):
    out = tmp_path / "o"
    assert main(["sample", "--method", "CauchyRctg0.55ScrHammersleyPlusMiddlePoint", "-n", "50", "-d", "4",
                 "--target", "unbounded", "--seed", "3", "--out", str(out)]) == 0
    got = np.loadtxt(out / "points.csv", delimiter=",", skiprows=1)
    assert got.shape == (50, 4) and np.all(got[0] == 0) and np.all(np.isfinite(got))


def test_bench_one_method_one_replica(tmp_path):
    cfg = _config(tmp_path, methods=["Random"], replicas=1,
                  grid=dict(critical=[3], useless_factors=[0], budgets=[10], functions=["Sphere"]))
    out = tmp_path / "b"
    assert main(["bench", "--config", cfg, "--out", str(out)]) == 0
    assert len(read_results(out / "results.csv")) == 1
    assert sorted(os.listdir(out)) == ["config.yaml", "results.csv", "win_frequencies.csv", "wintable.tsv"]


def test_bench_outputs_byte_identical(tmp_path):
    cfg = _config(tmp_path, **SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["bench", "--config", cfg, "--out", str(a), "--seed", "5"]) == 0
    assert main(["bench", "--config", cfg, "--out", str(b), "--seed", "5", "--jobs", "2"]) == 0
    for name in ("results.csv", "wintable.tsv", "win_frequencies.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = tmp_path / "c"
    main(["bench", "--config", cfg, "--out", str(c), "--seed", "6"])
    assert (a / "results.csv").read_bytes() != (c / "results.csv").read_bytes()
    saved = ExperimentConfig.load(a / "config.yaml")
    assert saved.seed == 5 and saved.methods == tuple(SMALL["methods"])


def test_wintable_names_parse_back(tmp_path):
    cfg = _config(tmp_path, **dict(SMALL, methods=["Cchy Rctg.55 Scr Hmsley", "QORctg0.4ScrHammersley"]))
    out = tmp_path / "w"
    assert main(["bench", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "wintable.tsv").read_text().splitlines()
    for line in lines[1:]:
        for name in line.split("\t")[2:]:
            assert parse_method_spec(name).name == name


def test_check_bounds(tmp_path):
    out = tmp_path / "cb"
    assert main(["check-bounds", "--replicas", "300", "--out", str(out)]) == 0
    lines = (out / "bounds.jsonl").read_text().splitlines()
    assert len(lines) == 3
    recs = [json.loads(ln) for ln in lines]
    assert [r["name"] for r in recs] == ["lhs_corner", "projected_jittered", "middle_point"]
    assert all(r["passed"] for r in recs)


def test_report_from_results(tmp_path):
    cfg = _config(tmp_path, **SMALL)
    bench_out, rep_out = tmp_path / "b", tmp_path / "r"
    main(["bench", "--config", cfg, "--out", str(bench_out)])
    assert main(["report", "--config", cfg, "--results", str(bench_out / "results.csv"),
                 "--out", str(rep_out)]) == 0
    rows = list(csv.DictReader(open(rep_out / "summary.csv")))
    assert len(rows) == 2 * 2 * 2 * 2  # functions x cells x budgets x methods
    assert set(rows[0]) >= {"budget", "method", "mean_regret", "q10", "q50", "q90"}
    pngs = sorted(os.listdir(rep_out / "figures"))
    assert len(pngs) == 4 and all(p.endswith(".png") for p in pngs)


def test_report_runs_bench_when_no_results(tmp_path):
    cfg = _config(tmp_path, **SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["report", "--config", cfg, "--out", str(a)]) == 0
    assert main(["report", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "results.csv").exists()
    for name in ("summary.csv", "results.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    for png in os.listdir(a / "figures"):
        assert (a / "figures" / png).read_bytes() == (b / "figures" / png).read_bytes()


# ---- failures


def _last_err(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    return err[0]


def test_bad_method_exit_two(tmp_path, capsys):
    out = tmp_path / "x"
    assert main(["sample", "--method", "ScrHamersley", "--out", str(out)]) == 2
    line = _last_err(capsys)
    assert line.startswith("oneshot: error code=2 kind=config") and "ScrHammersley" in line
    assert not out.exists()


def test_missing_config_exit_two(tmp_path, capsys):
    assert main(["bench", "--config", str(tmp_path / "none.yaml")]) == 2
    assert "code=2" in _last_err(capsys)


def test_malformed_yaml_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("methods: [Random\n")
    assert main(["bench", "--config", str(p)]) == 2
    _last_err(capsys)


def test_numeric_failure_exit_three(tmp_path, capsys):
    out = tmp_path / "n"
    # a single point cannot be rescaled
    assert main(["sample", "--method", "RescaleRandom", "-n", "1", "--out", str(out)]) == 3
    assert "kind=numeric" in _last_err(capsys)
    assert not out.exists()


def test_failure_leaves_existing_outputs_alone(tmp_path, capsys):
    out = tmp_path / "keep"
    out.mkdir()
    (out / "old.txt").write_text("x")
    assert main(["sample", "--method", "RescaleRandom", "-n", "1", "--out", str(out)]) == 3
    assert sorted(os.listdir(out)) == ["old.txt"]


def test_bound_failure_exit_four(tmp_path, monkeypatch):
    from oneshot import cli
    from oneshot.metrics import BoundCheckReport

    fake = [BoundCheckReport("fake", {}, 1.0, 0.0, 0.5, False)]
    monkeypatch.setattr(cli, "default_checks", lambda replicas, seed: fake)
    out = tmp_path / "f"
    assert main(["check-bounds", "--out", str(out)]) == 4
    assert (out / "bounds.jsonl").read_text().count("\n") == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "m"
    proc = subprocess.run([sys.executable, "-m", "oneshot", "sample", "--method", "Sobol", "-n", "4",
                           "-d", "2", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "points.csv").exists()
