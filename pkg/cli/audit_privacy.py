#!/usr/bin/env python3
"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: audit_privacy.py                                                |
|     Authors: dp-decode contributors                                          |
| Description: Report the privacy guarantee of a run configuration without     |
|              generating anything.                                            |
|                                                                              |
|------------------------------------------------------------------------------|
"""
# Imports.
import sys

sys.path.append("..")
import json
from typing import Optional

from accounting.budget import PARALLEL, SEQUENTIAL
from accounting.zcdp import eps_to_zcdp
from cli.run_config import RunConfig
from common.exceptions import EXIT_OK, ConfigError, exit_code
from common.parser import argparser, configure_logging
from common.utils import print_dict_table, read_lines
from generation.engine import account


def audit(run: RunConfig, num_batches: int, composition: str = PARALLEL) -> dict:
    """Accounting report of the run over num_batches batches.

    When an epsilon is reported, it is converted back to rho as a check of
    the conversion.
    """
    config = run.generation_config().calibrated()
    report = account(
        config,
        num_batches,
        delta=run.delta,
        method=run.method,
        batch_composition=composition,
    )
    audit = {"report": report.to_dict(), "config": run.to_dict()}
    if report.epsilon:
        audit["round_trip_rho"] = eps_to_zcdp(
            report.epsilon, report.delta, report.conversion_method
        )
    return audit


def main(argv: Optional[list] = None) -> int:
    """Main function"""
    # Get the command line arguments from the user.
    parser = argparser()
    parser.parser.description = "Audit the privacy guarantee of a run config."
    parser.add_mechanism_arguments()
    parser.add_config_argument()
    parser.parser.add_argument(
        "-n",
        "--batches",
        metavar="batches",
        type=int,
        help="number of generations (default: from the reference file)",
    )
    parser.parser.add_argument(
        "--composition",
        choices=[PARALLEL, SEQUENTIAL],
        default=PARALLEL,
        help="parallel for disjoint batches, sequential when they share data",
    )
    parser.parser.add_argument(
        "--table",
        action="store_true",
        help="print the report as a table instead of JSON",
    )
    args = parser.parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        run = RunConfig.load(args.config).apply_args(args)
        num_batches = args.batches
        if num_batches is None:
            references = run.get("dataset", "references")
            if references is None:
                raise ConfigError("give --batches or a dataset.references file")
            num_batches = len(read_lines(references)) // run.get("generation", "B")
        result = audit(run, num_batches, args.composition)
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    if args.table:
        print_dict_table(result["report"])
        if "round_trip_rho" in result:
            print("Round trip rho: " + str(result["round_trip_rho"]))
    else:
        print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
