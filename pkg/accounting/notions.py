"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: notions.py                                                      |
|     Authors: dp-decode contributors                                          |
| Description: Adjacency notions, clipping strategies and conversion methods   |
|                                                                              |
|------------------------------------------------------------------------------|
"""

from dataclasses import dataclass
from enum import Enum

from common.exceptions import UnsupportedAdjacencyError


class AdjacencyNotion(str, Enum):
    """What counts as changing one sensitive reference.

    replace_by_null swaps a reference for the empty string (its logits become
    the public logits); zero_out swaps it for a null element whose logits are
    all zero. add_or_remove is listed for completeness only: it makes the
    number of references private, so no guarantee is computed under it.
    """

    REPLACE_BY_NULL = "replace_by_null"
    ZERO_OUT = "zero_out"
    ADD_OR_REMOVE = "add_or_remove"


class ConversionMethod(str, Enum):
    TIGHT = "tight"
    LOOSE = "loose"


CLIPPING_STRATEGY_NAMES = ("dclip", "naive_clip")


@dataclass(frozen=True)
class ClippingStrategy:
    """How private logits are clipped before averaging.

    dclip clips the deviation from the public logits; naive_clip clips the
    raw logits. sensitivity_advantage reproduces the experimental convention
    of (incorrectly) using the zero-out sensitivity C/B for naive_clip under
    replace-by-null; it has no meaning for dclip.
    """

    name: str = "dclip"
    sensitivity_advantage: bool = False

    def __post_init__(self) -> None:
        if self.name not in CLIPPING_STRATEGY_NAMES:
            raise ValueError(
                f"unknown clipping strategy {self.name!r}, "
                + f"expected one of {CLIPPING_STRATEGY_NAMES}"
            )
        if self.sensitivity_advantage and self.name != "naive_clip":
            raise ValueError("sensitivity_advantage only applies to naive_clip")

    @property
    def is_dclip(self) -> bool:
        return self.name == "dclip"

    def __str__(self) -> str:
        if self.sensitivity_advantage:
            return self.name + "+advantage"
        return self.name


DCLIP = ClippingStrategy("dclip")
NAIVE_CLIP = ClippingStrategy("naive_clip")


def parse_adjacency(value) -> AdjacencyNotion:
    """Parse an adjacency name, accepting enum members unchanged."""
    try:
        return AdjacencyNotion(value)
    except ValueError:
        raise ValueError(
            f"unknown adjacency {value!r}, expected one of "
            + f"{[notion.value for notion in AdjacencyNotion]}"
        ) from None


def parse_method(value) -> ConversionMethod:
    """Parse a conversion method name, accepting enum members unchanged."""
    try:
        return ConversionMethod(value)
    except ValueError:
        raise ValueError(
            f"unknown conversion method {value!r}, expected 'tight' or 'loose'"
        ) from None


def require_accountable(adjacency: AdjacencyNotion) -> AdjacencyNotion:
    """Reject adjacency notions that cannot back a privacy guarantee.

    Args:
        adjacency (AdjacencyNotion): the notion to check

    Returns:
        AdjacencyNotion: the parsed notion
    """
    adjacency = parse_adjacency(adjacency)
    if adjacency is AdjacencyNotion.ADD_OR_REMOVE:
        raise UnsupportedAdjacencyError(
            "add_or_remove adjacency cannot be used for accounting: adding or "
            + "removing a reference changes the batch size B, which is then "
            + "itself privacy sensitive. Use replace_by_null (the empty "
            + "reference) or zero_out instead."
        )
    return adjacency
