import sys

sys.path.append("..")

import pytest

from accounting.budget import PrivacyBudget
from accounting.notions import NAIVE_CLIP, AdjacencyNotion
from accounting.zcdp import calibrate_clip_norm
from common.exceptions import (
    CalibrationError,
    ConfigError,
    UnsupportedAdjacencyError,
)
from generation.config import GenerationConfig


def test_calibrated_from_target():
    target = PrivacyBudget.from_rho(0.5, 1e-6)
    config = GenerationConfig(B=7, tau=1.2, T=500, k=10, target=target)
    assert not config.is_calibrated
    calibrated = config.calibrated()
    assert calibrated.is_calibrated
    assert calibrated.C == calibrate_clip_norm(0.5, 7, 1.2, 500)
    assert calibrated.calibrated_from == target
    assert calibrated.clip.C == calibrated.C
    assert calibrated.calibrated() is calibrated


def test_clip_norm_given_directly():
    config = GenerationConfig(B=2, tau=1.0, T=5, C=0.3, strategy="naive_clip")
    assert config.strategy == NAIVE_CLIP
    assert config.calibrated() is config
    assert config.clip.strategy == NAIVE_CLIP


def test_calibration_needs_exactly_one_source():
    target = PrivacyBudget.from_rho(0.5)
    with pytest.raises(ConfigError):
        GenerationConfig(B=2, tau=1.0, T=5, C=0.3, target=target).calibrated()
    with pytest.raises(CalibrationError):
        GenerationConfig(B=2, tau=1.0, T=5).calibrated()


def test_uncalibrated_config_has_no_clip():
    config = GenerationConfig(B=2, tau=1.0, T=5, target=PrivacyBudget(0.5))
    with pytest.raises(CalibrationError):
        config.clip
    with pytest.raises(CalibrationError):
        config.require_calibrated()


def test_add_or_remove_is_rejected():
    config = GenerationConfig(
        B=2, tau=1.0, T=5, C=0.3, adjacency=AdjacencyNotion.ADD_OR_REMOVE
    )
    with pytest.raises(UnsupportedAdjacencyError):
        config.calibrated()


@pytest.mark.parametrize(
    "settings",
    [
        {"B": 0, "tau": 1.0, "T": 5},
        {"B": 2, "tau": 0.0, "T": 5},
        {"B": 2, "tau": 1.0, "T": 0},
        {"B": 2, "tau": 1.0, "T": 5, "k": 0},
        {"B": 2, "tau": 1.0, "T": 5, "C": -1.0},
        {"B": 2, "tau": 1.0, "T": 5, "adjacency": "swap"},
    ],
)
def test_invalid_settings(settings):
    with pytest.raises(ConfigError):
        GenerationConfig(**settings)
