import csv
import json

import pytest

from hetnet_nbs.runner import (ExperimentPlan, PlanError, main, run_experiment, validate_config)
from hetnet_nbs.scenario import ConfigError, ScenarioConfig


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_empty_config_gives_reference_defaults():
    cfg = validate_config("")
    assert cfg == ScenarioConfig()
    assert (cfg.bandwidth_hz, cfg.noise_psd_dbm_hz, cfg.pbs_power_dbm, cfg.mbs_power_dbm,
            cfg.r_min_bps, cfg.pathloss_exponent) == (1e7, -127.0, 30.0, 46.0, 1e5, 3.5)
    assert validate_config(None) == validate_config({})


def test_negative_bandwidth_names_field():
    with pytest.raises(ConfigError) as exc:
        validate_config("bandwidth_hz = -5")
    assert "bandwidth_hz" in exc.value.field


def test_single_bs_rejected():
    with pytest.raises(ConfigError) as exc:
        validate_config({"num_bs": 1})
    assert exc.value.field == "scenario.num_bs"


def test_unknown_and_bad_keys_all_reported():
    with pytest.raises(ConfigError) as exc:
        validate_config("[scenario]\nbandwith_hz = 1\nseed = 1.5\nr_min_bps = -1\n")
    fields = [f for f, _ in exc.value.errors]
    assert "scenario.bandwith_hz" in fields and "scenario.seed" in fields


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        validate_config("[scenery]\nseed = 1\n")


def test_plan_guards():
    with pytest.raises(PlanError):
        ExperimentPlan(drops=0)
    with pytest.raises(PlanError, match="brute-force"):
        ExperimentPlan(schemes=["brute-force"], n_users_sweep=[15], b_sweep=[2])
    with pytest.raises(PlanError):
        ExperimentPlan(schemes=["fastest"])


def test_single_drop_single_row(tmp_path):
    run_experiment(ExperimentPlan(n_users_sweep=[10], b_sweep=[3], schemes=["scga-nbs"],
                                  drops=1, out_dir=tmp_path))
    rows = _rows(tmp_path / "results.csv")
    assert len(rows) == 2
    assert rows[0][:4] == ["n_users", "num_bs", "scheme", "drop"]
    assert rows[0][-3:] == ["load_b0", "load_b1", "load_b2"]
    assert sum(int(v) for v in rows[1][-3:]) == 10


def test_rerun_is_byte_identical_and_row_count(tmp_path):
    kw = dict(base=ScenarioConfig(seed=9), n_users_sweep=[8, 12], b_sweep=[2, 3],
              schemes=["scga-nbs", "max-sum-rate"], drops=3)
    run_experiment(ExperimentPlan(out_dir=tmp_path / "a", **kw))
    run_experiment(ExperimentPlan(out_dir=tmp_path / "b", **kw))
    a = (tmp_path / "a" / "results.csv").read_bytes()
    assert a == (tmp_path / "b" / "results.csv").read_bytes()
    assert len(_rows(tmp_path / "a" / "results.csv")) - 1 == 2 * 2 * 2 * 3
    assert (tmp_path / "a" / "summary.csv").read_bytes() == \
        (tmp_path / "b" / "summary.csv").read_bytes()


def test_parallel_matches_serial(tmp_path):
    kw = dict(n_users_sweep=[12], b_sweep=[3], drops=4)
    run_experiment(ExperimentPlan(out_dir=tmp_path / "s", **kw))
    run_experiment(ExperimentPlan(out_dir=tmp_path / "p", parallel=2, **kw))
    assert (tmp_path / "s" / "results.csv").read_bytes() == \
        (tmp_path / "p" / "results.csv").read_bytes()


def test_variable_width_load_tail(tmp_path):
    run_experiment(ExperimentPlan(n_users_sweep=[10], b_sweep=[2, 4], schemes=["max-sum-rate"],
                                  drops=1, out_dir=tmp_path))
    header, small, big = _rows(tmp_path / "results.csv")
    assert header[-4:] == ["load_b0", "load_b1", "load_b2", "load_b3"]
    assert small[-2:] == ["", ""] and big[-1] != ""


def test_per_user_dump_and_manifest(tmp_path):
    manifest = run_experiment(ExperimentPlan(n_users_sweep=[6], b_sweep=[2], drops=2,
                                             schemes=["brute-force"], emit_per_user=True,
                                             out_dir=tmp_path))
    assert len(_rows(tmp_path / "per_user.csv")) == 1 + 2 * 6
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["seed"] == manifest["seed"] == 0 and on_disk["rows"] == 2
    assert "version" in on_disk and on_disk["plan"]["base"]["num_users"] == 40


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["--out-dir", str(out), "--drops", "1", "--n-users", "8", "--num-bs", "2"]) == 0
    assert len(_rows(out / "results.csv")) == 3

    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nbandwidth_hz = -1\n")
    assert main(["--config", str(bad), "--out-dir", str(out)]) == 1
    assert "bandwidth_hz" in capsys.readouterr().err

    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["--out-dir", str(blocker / "sub"), "--drops", "1", "--n-users", "8",
                 "--num-bs", "2"]) == 2


def test_cli_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[scenario]\nseed = 4\n[experiment]\ndrops = 2\nn_users = 8\nnum_bs = 2\n"
                   "schemes = max-sum-rate\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out-dir", str(out), "--drops", "3"]) == 0
    rows = _rows(out / "results.csv")
    assert len(rows) == 4 and {r[2] for r in rows[1:]} == {"max-sum-rate"}
    assert json.loads((out / "manifest.json").read_text())["seed"] == 4


def test_infeasible_drop_recorded_and_exit_two(tmp_path):
    # seed 25, N=6, B=2: no association gives both BSs a nonnegative utility
    out = tmp_path / "inf"
    code = main(["--out-dir", str(out), "--seed", "25", "--drops", "1", "--n-users", "6",
                 "--num-bs", "2", "--scheme", "scga-nbs", "--scheme", "brute-force"])
    assert code == 2
    rows = _rows(out / "results.csv")
    assert len(rows) == 3 and all(r[4] == "nan" for r in rows[1:])
    assert len(json.loads((out / "manifest.json").read_text())["failures"]) == 2
