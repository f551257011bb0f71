import sys
import os

sys.path.append("../..")

from common.parser import argparser


def test_create_parser():
    parser = argparser()
    args = parser.parser.parse_args([])
    assert args.verbose is False
    assert args.seed is None
    args = parser.parser.parse_args(["-v", "--seed", "7"])
    assert args.verbose is True
    assert args.seed == 7


def test_mechanism_arguments_default_to_none():
    parser = argparser()
    parser.add_mechanism_arguments()
    args = parser.parser.parse_args([])
    for flag in ("epsilon", "delta", "rho", "B", "tau", "k", "T", "C"):
        assert getattr(args, flag) is None
    args = parser.parser.parse_args(
        ["--epsilon", "10", "--delta", "1e-6", "--B", "7", "--method", "loose"]
    )
    assert args.epsilon == 10.0
    assert args.delta == 1e-6
    assert args.B == 7
    assert args.method == "loose"


def test_run_arguments_read_token_from_environment():
    os.environ["DPDECODE_REMOTE_TOKEN"] = "token-1"
    parser = argparser()
    parser.add_run_arguments()
    args = parser.parser.parse_args(["-c", "run.yaml", "--dry-run", "-j", "3"])
    assert args.remote_token == "token-1"
    assert args.config == "run.yaml"
    assert args.dry_run is True
    assert args.jobs == 3
    args = parser.parser.parse_args(["--remote_token", "token-2"])
    assert args.remote_token == "token-2"
    del os.environ["DPDECODE_REMOTE_TOKEN"]
