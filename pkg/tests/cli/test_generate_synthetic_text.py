import sys

sys.path.append("..")

import json

import pytest

from cli import generate_synthetic_text
from tests.cli.conftest import REFERENCES


def read_generations(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_generate_writes_generations_and_sidecar(tmp_path, write_run_config, capsys):
    config = write_run_config()
    assert generate_synthetic_text.main(["-c", str(config)]) == 0
    generations = read_generations(tmp_path / "generations.jsonl")
    assert len(generations) == len(REFERENCES) // 2
    assert [line["batch"] for line in generations] == [0, 1, 2]
    for line in generations:
        assert set(line) == {"batch", "tokens", "text", "finished_by"}
        assert 1 <= len(line["tokens"]) <= 4
        assert line["finished_by"] in ("eos", "budget_T")

    sidecar = json.loads((tmp_path / "accounting.json").read_text())
    assert sidecar["config"]["generation"]["B"] == 2
    assert sidecar["report"]["epsilon"] == pytest.approx(10.0, rel=1e-4)
    assert sidecar["report"]["unused_references"] == 1
    assert sidecar["generations"] == 3
    assert sidecar["provider_requests"] <= 3 * 3 * 4
    assert "Script completed" in capsys.readouterr().out


def test_seed_fixes_outputs(tmp_path, write_run_config):
    config = write_run_config()
    outputs = []
    for name in ("first", "second"):
        generations = tmp_path / (name + ".jsonl")
        argv = ["-c", str(config), "-o", str(generations), "--seed", "11"]
        assert generate_synthetic_text.main(argv) == 0
        outputs.append(generations.read_bytes())
    assert outputs[0] == outputs[1]


def test_jobs_do_not_change_outputs(tmp_path, write_run_config):
    config = write_run_config()
    outputs = []
    for jobs in ("1", "3"):
        generations = tmp_path / ("jobs" + jobs + ".jsonl")
        argv = ["-c", str(config), "-o", str(generations), "-j", jobs]
        assert generate_synthetic_text.main(argv) == 0
        outputs.append(generations.read_bytes())
    assert outputs[0] == outputs[1]


def test_trace_flag_writes_trace(tmp_path, write_run_config):
    config = write_run_config()
    assert generate_synthetic_text.main(["-c", str(config), "--trace"]) == 0
    for line in read_generations(tmp_path / "generations.jsonl"):
        assert len(line["trace"]) == len(line["tokens"])
        assert all(step["effective_k"] >= 3 for step in line["trace"])


def test_calibration_failure_writes_nothing(tmp_path, write_run_config, capsys):
    config = write_run_config(accounting={"epsilon": None, "delta": None})
    assert generate_synthetic_text.main(["-c", str(config)]) == 2
    assert capsys.readouterr().err.startswith("Error: ")
    assert not (tmp_path / "accounting.json").exists()
    assert not (tmp_path / "generations.jsonl").exists()


def test_add_or_remove_is_rejected(tmp_path, write_run_config):
    config = write_run_config()
    argv = ["-c", str(config), "--adjacency", "add_or_remove"]
    assert generate_synthetic_text.main(argv) == 2
    assert not (tmp_path / "accounting.json").exists()


def test_dry_run_prints_request_bound(tmp_path, write_run_config, capsys):
    config = write_run_config()
    assert generate_synthetic_text.main(["-c", str(config), "--dry-run"]) == 0
    assert "at most 36 provider requests" in capsys.readouterr().out
    assert not (tmp_path / "generations.jsonl").exists()


def test_clip_norm_flag_wins_over_file_target(tmp_path, write_run_config):
    config = write_run_config()
    assert generate_synthetic_text.main(["-c", str(config), "--C", "0.3"]) == 0
    sidecar = json.loads((tmp_path / "accounting.json").read_text())
    assert sidecar["report"]["inputs"]["C"] == 0.3
    assert sidecar["config"]["accounting"]["epsilon"] is None
