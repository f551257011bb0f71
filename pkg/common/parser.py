#!/usr/bin/env python3

import argparse
import logging
from os import getenv

ADJACENCY_CHOICES = ["replace_by_null", "zero_out", "add_or_remove"]
STRATEGY_CHOICES = ["dclip", "naive_clip"]
METHOD_CHOICES = ["tight", "loose"]


class argparser:
    def __init__(self) -> None:
        self.parser = argparse.ArgumentParser()
        self.parser.add_argument(
            "-v",
            "--verbose",
            action="store_true",
            help="Use this flag to log debug information to stderr",
        )
        self.parser.add_argument(
            "--seed",
            metavar="seed",
            type=int,
            default=None,
            help="seed of the random streams (overrides the config file)",
        )

    def add_mechanism_arguments(self) -> None:
        """Add the mechanism hyperparameter and privacy budget flags.

        Every flag defaults to None so that values from a config file are only
        overridden when the flag is given.
        """
        group = self.parser.add_argument_group("mechanism")
        group.add_argument("--epsilon", type=float, help="target epsilon")
        group.add_argument(
            "--delta", type=float, help="target delta (example: 1e-6)"
        )
        group.add_argument(
            "--rho",
            type=float,
            help="target sequence-level zCDP rho; bypasses the (epsilon, delta) "
            + "conversion",
        )
        group.add_argument("--B", type=int, help="references per batch")
        group.add_argument("--tau", type=float, help="sampling temperature")
        group.add_argument(
            "--k", type=int, help="top-k parameter (omit for the full vocabulary)"
        )
        group.add_argument("--T", type=int, help="maximum tokens per generation")
        group.add_argument(
            "--C", type=float, help="clip norm (instead of a privacy target)"
        )
        group.add_argument("--adjacency", choices=ADJACENCY_CHOICES)
        group.add_argument("--strategy", choices=STRATEGY_CHOICES)
        group.add_argument(
            "--method",
            choices=METHOD_CHOICES,
            help="zCDP to (epsilon, delta) conversion",
        )

    def add_config_argument(self) -> None:
        self.parser.add_argument(
            "-c",
            "--config",
            metavar="config",
            type=str,
            help="path to the run config YAML file, see "
            + "cli/run_config_example.yaml",
        )

    def add_run_arguments(self) -> None:
        """Add the run config, parallelism and remote provider flags."""
        self.add_config_argument()
        self.parser.add_argument(
            "-j",
            "--jobs",
            metavar="jobs",
            type=int,
            default=None,
            help="number of batches decoded in parallel",
        )
        self.parser.add_argument(
            "--dry-run",
            dest="dry_run",
            action="store_true",
            help="print the provider request upper bound and exit",
        )
        self.parser.add_argument(
            "--remote_token",
            metavar="remote_token",
            type=str,
            default=getenv("DPDECODE_REMOTE_TOKEN"),
            help="auth token of the remote logits server "
            + "(default: $DPDECODE_REMOTE_TOKEN)",
        )


def configure_logging(verbose: bool) -> None:
    """Route library logging to stderr.

    Args:
        verbose (bool): log at debug level when set, warnings only otherwise
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
