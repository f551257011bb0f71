#!/usr/bin/env python3
"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: calibrate_clip_norm.py                                          |
|     Authors: dp-decode contributors                                          |
| Description: Derive the clip norm (or temperature) that spends a privacy     |
|              target over a T-token generation.                               |
|                                                                              |
|------------------------------------------------------------------------------|
"""
# Imports.
import sys

sys.path.append("..")
import json
from typing import Optional

from accounting.budget import PrivacyBudget
from accounting.notions import (
    DCLIP,
    AdjacencyNotion,
    ClippingStrategy,
    ConversionMethod,
    parse_adjacency,
    parse_method,
)
from accounting.zcdp import (
    calibrate_clip_norm,
    calibrate_temperature,
    compose_sequence,
    sensitivity,
)
from common.exceptions import EXIT_OK, ConfigError, exit_code
from common.parser import argparser, configure_logging
from common.utils import print_table

TABLE_FIELDS = ["epsilon", "delta", "method", "rho_seq", "rho_tok", "C", "tau"]


def calibrate(
    B: int,
    T: int,
    tau: Optional[float] = None,
    C: Optional[float] = None,
    epsilon: Optional[float] = None,
    delta: Optional[float] = None,
    rho: Optional[float] = None,
    method: ConversionMethod = ConversionMethod.TIGHT,
    strategy: ClippingStrategy = DCLIP,
    adjacency: AdjacencyNotion = AdjacencyNotion.REPLACE_BY_NULL,
) -> dict:
    """Spend a privacy target on T tokens.

    With tau given the clip norm C is derived; with C given instead the
    temperature is. rho bypasses the (epsilon, delta) conversion.

    Returns:
        dict: one row with TABLE_FIELDS keys
    """
    if B is None or T is None:
        raise ConfigError("--B and --T are required")
    if rho is not None:
        budget = PrivacyBudget.from_rho(rho, delta, method)
    elif epsilon is not None and delta is not None:
        budget = PrivacyBudget.from_epsilon(epsilon, delta, method)
    else:
        raise ConfigError("give a target as --rho, or --epsilon with --delta")
    if (tau is None) == (C is None):
        raise ConfigError("give exactly one of --tau (to derive C) or --C")

    if tau is not None:
        C = calibrate_clip_norm(budget.rho, B, tau, T, strategy, adjacency)
    else:
        tau = calibrate_temperature(budget.rho, B, C, T, strategy, adjacency)
    return {
        "epsilon": budget.epsilon,
        "delta": budget.delta,
        "method": parse_method(method).value,
        "rho_seq": budget.rho,
        "rho_tok": budget.rho / compose_sequence(1.0, T),
        "C": C,
        "tau": tau,
        "sensitivity": sensitivity(strategy, adjacency, C, B),
    }


def main(argv: Optional[list] = None) -> int:
    """Main function"""
    # Get the command line arguments from the user.
    parser = argparser()
    parser.parser.description = "Calibrate the clip norm of a decoding run."
    parser.add_mechanism_arguments()
    parser.parser.add_argument(
        "--json",
        action="store_true",
        help="print the result as JSON instead of a table",
    )
    args = parser.parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        row = calibrate(
            B=args.B,
            T=args.T,
            tau=args.tau,
            C=args.C,
            epsilon=args.epsilon,
            delta=args.delta,
            rho=args.rho,
            method=parse_method(args.method or "tight"),
            strategy=ClippingStrategy(args.strategy or "dclip"),
            adjacency=parse_adjacency(args.adjacency or "replace_by_null"),
        )
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    if args.json:
        print(json.dumps(row, indent=2, sort_keys=True))
    else:
        print_table(TABLE_FIELDS, [[row[field] for field in TABLE_FIELDS]])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
