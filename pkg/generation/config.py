"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: config.py                                                       |
|     Authors: dp-decode contributors                                          |
| Description: Hyperparameters of one decoding run and their calibration       |
|              against a privacy target                                        |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from accounting.budget import PrivacyBudget
from accounting.notions import (
    DCLIP,
    AdjacencyNotion,
    ClippingStrategy,
    parse_adjacency,
    require_accountable,
)
from accounting.zcdp import calibrate_clip_norm
from common.exceptions import CalibrationError, ConfigError
from mechanism.clipping import ClipParams


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationConfig:
    """Inputs of the decoding loop.

    Exactly one of C and target drives calibration. calibrated() turns a
    target into a clip norm and keeps the target in calibrated_from, so the
    privacy report can quote the (epsilon, delta) it was derived from.
    k = None decodes over the whole vocabulary.
    """

    B: int
    tau: float
    T: int
    k: Optional[int] = None
    C: Optional[float] = None
    strategy: ClippingStrategy = DCLIP
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL
    target: Optional[PrivacyBudget] = None
    seed: int = 0
    recenter: bool = False
    collect_trace: bool = False
    calibrated_from: Optional[PrivacyBudget] = None

    def __post_init__(self) -> None:
        if int(self.B) != self.B or self.B < 1:
            raise ConfigError(f"B must be a positive integer, got {self.B}")
        if not self.tau > 0 or not math.isfinite(self.tau):
            raise ConfigError(f"tau must be a positive number, got {self.tau}")
        if int(self.T) != self.T or self.T < 1:
            raise ConfigError(f"T must be a positive integer, got {self.T}")
        if self.k is not None and (int(self.k) != self.k or self.k < 1):
            raise ConfigError(f"k must be a positive integer or None, got {self.k}")
        if self.C is not None and (self.C < 0 or not math.isfinite(self.C)):
            raise ConfigError(f"C must be a non-negative number, got {self.C}")
        if isinstance(self.strategy, str):
            object.__setattr__(self, "strategy", ClippingStrategy(self.strategy))
        try:
            object.__setattr__(self, "adjacency", parse_adjacency(self.adjacency))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def is_calibrated(self) -> bool:
        return self.C is not None and self.target is None

    def calibrated(self) -> "GenerationConfig":
        """Return a copy whose clip norm is fixed.

        Returns:
            GenerationConfig: self when C was given, else a copy with
                              C = calibrate_clip_norm(target.rho, ...)
        """
        require_accountable(self.adjacency)
        if self.C is not None and self.target is not None:
            raise ConfigError(
                "give either a clip norm C or a privacy target, not both"
            )
        if self.C is not None:
            return self
        if self.target is None:
            raise CalibrationError(
                "no clip norm C and no privacy target (epsilon/delta or rho) given"
            )
        C = calibrate_clip_norm(
            self.target.rho, self.B, self.tau, self.T, self.strategy, self.adjacency
        )
        log.info(
            "Calibrated C=%g from rho_seq=%g (B=%d tau=%g T=%d)",
            C,
            self.target.rho,
            self.B,
            self.tau,
            self.T,
        )
        if C == 0:
            log.warning("Clip norm is 0: decoding falls back to public top-k sampling")
        return replace(self, C=C, target=None, calibrated_from=self.target)

    def require_calibrated(self) -> None:
        if not self.is_calibrated:
            raise CalibrationError(
                "configuration is not calibrated, call calibrated() first"
            )

    @property
    def clip(self) -> ClipParams:
        self.require_calibrated()
        return ClipParams(self.C, self.strategy, self.recenter)
