import sys

sys.path.append("..")

import json
import math

import pytest

from accounting.notions import DCLIP, AdjacencyNotion
from cli import calibrate_clip_norm
from cli.calibrate_clip_norm import calibrate
from common.exceptions import ConfigError


@pytest.mark.parametrize("epsilon, expected_C", [(1, 0.08), (10, 0.66)])
def test_calibration_goldens(capsys, epsilon, expected_C):
    argv = ["--B", "7", "--tau", "1.2", "--T", "500", "--epsilon", str(epsilon)]
    assert calibrate_clip_norm.main(argv + ["--delta", "1e-6", "--json"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert abs(row["C"] - expected_C) <= 0.01
    assert row["method"] == "tight"
    assert row["rho_tok"] == pytest.approx(row["rho_seq"] / 500)


def test_rho_target_is_closed_form():
    row = calibrate(B=7, T=500, tau=1.2, rho=0.5)
    assert row["C"] == pytest.approx(7 * 1.2 * math.sqrt(2 * 0.5 / 500))
    assert row["epsilon"] is None
    zeroed = calibrate(
        B=7, T=500, tau=1.2, rho=0.5, adjacency=AdjacencyNotion.ZERO_OUT
    )
    assert zeroed["C"] == pytest.approx(row["C"] / 2)
    assert zeroed["sensitivity"] == pytest.approx(2 * zeroed["C"] / 7)


def test_temperature_from_clip_norm():
    C = calibrate(B=7, T=500, tau=1.2, epsilon=10, delta=1e-6)["C"]
    row = calibrate(B=7, T=500, C=C, epsilon=10, delta=1e-6, strategy=DCLIP)
    assert row["tau"] == pytest.approx(1.2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"B": 7, "T": 500, "tau": 1.0},
        {"B": 7, "T": 500, "rho": 0.5},
        {"B": 7, "T": 500, "rho": 0.5, "tau": 1.0, "C": 0.5},
        {"B": None, "T": 500, "rho": 0.5, "tau": 1.0},
        {"B": 7, "T": 500, "epsilon": 1.0, "tau": 1.0},
    ],
)
def test_calibrate_rejects(kwargs):
    with pytest.raises(ConfigError):
        calibrate(**kwargs)


def test_table_output_and_usage_error(capsys):
    argv = ["--B", "7", "--tau", "1.2", "--T", "500", "--rho", "0.5"]
    assert calibrate_clip_norm.main(argv) == 0
    assert "rho_seq" in capsys.readouterr().out
    assert calibrate_clip_norm.main(["--B", "7", "--T", "500", "--rho", "0.5"]) == 2
    assert "Error: " in capsys.readouterr().err
