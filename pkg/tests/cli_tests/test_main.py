import csv
import json

import numpy as np
import pytest

from src.cli.checks import CHECKS, DissipationRatioCheck, registered_checks
from src.cli.config import CheckName, parse_config
from src.cli.runner import PROFILE_HEADER, build_checks, emit_profile_curve, run
from src.main import main
from src.spectral_core.errors import ConfigError, HypothesisError


def write_config(tmp_path, **overrides):
    config = {
        "model": {"theta": 2.0, "n": 3},
        "datum0": {"family": "zero"},
        "datum1": {"family": "gaussian", "a": 0.5, "amplitude": 1.0},
        "t_grid": {"t_min": 100.0, "t_max": 1e6, "points_per_decade": 5},
        "checks": ["lemma21"],
        "output_dir": str(tmp_path / "results"),
        **overrides,
    }
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


def test_every_check_name_is_registered():
    assert set(CHECKS) == set(CheckName)
    assert [check.name for check in registered_checks()] == list(CheckName)


def test_list_checks(capsys):
    assert main(["list-checks"]) == 0
    assert capsys.readouterr().out.split() == [name.value for name in CheckName]


def test_unconditional_check_passes(tmp_path, capsys):
    assert main(["run", str(write_config(tmp_path))]) == 0
    summary = read_rows(tmp_path / "results" / "summary.csv")
    assert summary[0] == ["check", "predicted", "fitted", "stderr", "ratio_spread", "verdict"]
    assert summary[1][0] == "lemma21:dissipation_ratio"
    assert summary[1][1] == "nan"
    assert summary[1][-1] == "pass"
    assert (tmp_path / "results" / "lemma21.csv").exists()
    assert "CHECK SUMMARY" in capsys.readouterr().out


def test_hypothesis_violation_exits_with_config_status(tmp_path, capsys):
    path = write_config(tmp_path, model={"theta": 2.0, "n": 2}, checks=["thm12"])
    assert main(["run", str(path)]) == 2
    assert "n >= 3" in capsys.readouterr().err
    assert not (tmp_path / "results").exists()


def test_unknown_check_exits_with_config_status(tmp_path, capsys):
    assert main(["run", str(write_config(tmp_path, checks=["lemma99"]))]) == 2
    assert "invalid config" in capsys.readouterr().err


def test_missing_config(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_unwritable_output_dir(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    path = write_config(tmp_path, output_dir=str(blocker / "results"))
    assert main(["run", str(path)]) == 2
    assert "not writable" in capsys.readouterr().err


def test_runs_are_deterministic(tmp_path):
    path = write_config(tmp_path, checks=["lemma21", "lemma32", "highfreqsup"])
    main(["run", str(path), "--output-dir", str(tmp_path / "first")])
    main(["run", str(path), "--output-dir", str(tmp_path / "second"), "--parallel"])
    first = sorted(p.name for p in (tmp_path / "first").iterdir())
    assert first == sorted(p.name for p in (tmp_path / "second").iterdir())
    for name in first:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_summary_follows_registry_order(tmp_path):
    config = parse_config(write_config(tmp_path, checks=["highfreqsup", "lemma21"]).read_text(encoding="utf-8"))
    assert [check.name for check in build_checks(config)] == [CheckName.LEMMA21, CheckName.HIGH_FREQ_SUP]
    outcome = run(config)
    checks = [row[0].split(":")[0] for row in read_rows(outcome.summary_path)[1:]]
    assert checks.index("lemma21") < checks.index("highfreqsup")


def test_validation_happens_before_any_work(tmp_path):
    config = parse_config(write_config(tmp_path, checks=["lemma21", "thm45"]).read_text(encoding="utf-8"))
    with pytest.raises(HypothesisError, match="n = 1"):
        build_checks(config)


def test_decay_check_writes_samples_and_bounds(tmp_path):
    config = parse_config(write_config(tmp_path, checks=["highfreqsup"]).read_text(encoding="utf-8"))
    outcome = run(config)
    assert outcome.exit_code == 0
    samples = read_rows(tmp_path / "results" / "highfreqsup.csv")
    assert samples[0] == ["variant", "t", "value"]
    assert len(samples) == 1 + 21
    bounds = read_rows(tmp_path / "results" / "highfreqsup_bounds.csv")
    assert [row[0] for row in bounds[1:]] == ["grid_agreement", "bound"]


def test_profile_curve_at_time_zero(tmp_path):
    config = parse_config(
        write_config(tmp_path, datum0={"family": "gaussian", "a": 1.0, "amplitude": 2.0}).read_text(encoding="utf-8")
    )
    path = emit_profile_curve(config, 0.0)
    rows = read_rows(path)
    assert tuple(rows[0]) == PROFILE_HEADER
    table = np.array([[float(cell) for cell in row] for row in rows[1:]])
    u0 = config.data[0]
    np.testing.assert_allclose(table[:, 1], u0.values(table[:, 0]), rtol=1e-12)
    assert len(table) == 300
    assert np.isnan(table[:, 5]).sum() == 100


def test_profile_curve_residual_below_envelope(tmp_path, capsys):
    path = write_config(tmp_path)
    assert main(["profile", str(path), "--t", "1000"]) == 0
    rows = read_rows(tmp_path / "results" / "profile_t1000.csv")
    table = np.array([[float(cell) for cell in row] for row in rows[1:]])
    low = ~np.isnan(table[:, 5])
    assert np.all(table[low, 4] <= table[low, 5])
    assert "Profile written" in capsys.readouterr().out


def test_profile_needs_theta_two(tmp_path):
    path = write_config(tmp_path, model={"theta": 1.5, "n": 3})
    assert main(["profile", str(path), "--t", "1"]) == 2


def test_energy_balance_check_runs(tmp_path):
    assert main(["run", str(write_config(tmp_path, checks=["energy_balance"]))]) == 0
    rows = read_rows(tmp_path / "results" / "energy_balance.csv")
    assert [row[0] for row in rows[1:]] == ["lyapunov_identity", "free_energy_identity", "exponential_bound"]
    assert all(row[-1] == "pass" for row in rows[1:])


def test_unexpected_failure_exits_with_error_status(tmp_path, monkeypatch, capsys):
    def broken(self):
        raise RuntimeError("boom")

    monkeypatch.setattr(DissipationRatioCheck, "evaluate", broken)
    assert main(["run", str(write_config(tmp_path))]) == 2
    assert "boom" in capsys.readouterr().err


def test_unwritable_output_dir_fails_before_any_check(tmp_path, monkeypatch):
    def must_not_run(self):
        raise AssertionError("evaluated before the output directory was checked")

    monkeypatch.setattr(DissipationRatioCheck, "evaluate", must_not_run)
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    path = write_config(tmp_path, output_dir=str(blocker / "results"))
    config = parse_config(path.read_text(encoding="utf-8"))
    with pytest.raises(ConfigError, match="not writable"):
        run(config)
