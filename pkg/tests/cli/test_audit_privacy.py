import sys

sys.path.append("..")

import json

import pytest

from cli import audit_privacy
from cli.audit_privacy import audit
from accounting.zcdp import eps_to_zcdp
from cli.run_config import RunConfig


def run_audit(capsys, argv):
    assert audit_privacy.main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_parallel_guarantee_ignores_batch_count(write_run_config, capsys):
    config = str(write_run_config())
    one = run_audit(capsys, ["-c", config, "-n", "1"])["report"]
    many = run_audit(capsys, ["-c", config, "-n", "50"])["report"]
    assert one["corpus_rho"] == many["corpus_rho"] == one["sequence_rho"]
    assert one["epsilon"] == many["epsilon"]
    assert one["epsilon"] == pytest.approx(10.0, rel=1e-4)
    assert many["num_batches"] == 50


def test_sequential_composition_adds_up(write_run_config, capsys):
    config = str(write_run_config())
    argv = ["-c", config, "-n", "4", "--composition", "sequential"]
    report = run_audit(capsys, argv)["report"]
    assert report["corpus_rho"] == pytest.approx(4 * report["sequence_rho"])


def test_batch_count_defaults_to_reference_file(write_run_config, capsys):
    report = run_audit(capsys, ["-c", str(write_run_config())])["report"]
    assert report["num_batches"] == 3


def test_round_trip_rho(write_run_config):
    run = RunConfig.load(str(write_run_config()))
    result = audit(run, 3)
    assert result["round_trip_rho"] == pytest.approx(
        result["report"]["sequence_rho"], rel=1e-4
    )
    assert result["config"]["generation"]["B"] == 2


def test_rho_target_has_no_round_trip(write_run_config):
    path = write_run_config(accounting={"epsilon": None, "delta": None, "rho": 0.3})
    result = audit(RunConfig.load(str(path)), 3)
    assert "round_trip_rho" not in result
    assert result["report"]["sequence_rho"] == pytest.approx(0.3)


def test_add_or_remove_is_rejected(write_run_config, capsys):
    argv = ["-c", str(write_run_config()), "--adjacency", "add_or_remove"]
    assert audit_privacy.main(argv) == 2
    assert "Error: " in capsys.readouterr().err


def test_table_output(write_run_config, capsys):
    argv = ["-c", str(write_run_config()), "-n", "2", "--table"]
    assert audit_privacy.main(argv) == 0
    out = capsys.readouterr().out
    assert "corpus_rho" in out
    assert "Round trip rho: " in out


def test_report_is_json_by_default(write_run_config, capsys):
    result = run_audit(capsys, ["-c", str(write_run_config()), "-n", "2"])
    assert result["report"]["inputs"]["B"] == 2
    assert result["config"]["accounting"]["delta"] == 1e-6


def test_epsilon_flag_replaces_file_rho(write_run_config, capsys):
    path = write_run_config(accounting={"epsilon": None, "rho": 5.0})
    argv = ["-c", str(path), "-n", "1", "--epsilon", "1.0", "--delta", "1e-6"]
    result = run_audit(capsys, argv)
    assert result["report"]["epsilon"] == pytest.approx(1.0, rel=1e-4)
    assert result["report"]["sequence_rho"] == pytest.approx(eps_to_zcdp(1.0, 1e-6))
    assert result["config"]["accounting"]["rho"] is None


def test_rho_flag_replaces_file_epsilon(write_run_config, capsys):
    argv = ["-c", str(write_run_config()), "-n", "1", "--rho", "0.2"]
    result = run_audit(capsys, argv)
    assert result["report"]["sequence_rho"] == pytest.approx(0.2)
    assert result["config"]["accounting"]["epsilon"] is None


def test_clip_norm_flag_replaces_file_target(write_run_config, capsys):
    argv = ["-c", str(write_run_config()), "-n", "1", "--C", "0.3"]
    result = run_audit(capsys, argv)
    assert result["report"]["inputs"]["C"] == 0.3
    assert result["config"]["accounting"]["epsilon"] is None


def test_target_flag_replaces_file_clip_norm(write_run_config, capsys):
    path = write_run_config(generation={"C": 0.3})
    result = run_audit(capsys, ["-c", str(path), "-n", "1", "--rho", "0.2"])
    assert result["report"]["sequence_rho"] == pytest.approx(0.2)
    assert result["config"]["generation"]["C"] is None


def test_two_target_flags_are_rejected(write_run_config, capsys):
    argv = ["-c", str(write_run_config()), "--rho", "0.2", "--epsilon", "1.0"]
    assert audit_privacy.main(argv) == 2
    assert "one privacy target" in capsys.readouterr().err
