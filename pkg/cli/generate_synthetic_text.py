#!/usr/bin/env python3
"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: generate_synthetic_text.py                                      |
|     Authors: dp-decode contributors                                          |
| Description: Generate one private synthetic text per disjoint batch of       |
|              references and write the accounting sidecar.                    |
|                                                                              |
|------------------------------------------------------------------------------|
"""
# Imports.
import sys

sys.path.append("..")
from typing import Optional

from cli.run_config import RunConfig
from common.exceptions import EXIT_OK, CorpusGenerationError, exit_code
from common.format_dicts import record_to_dict
from common.parser import argparser, configure_logging
from common.utils import (
    print_dict_table,
    print_error_table,
    print_final_help,
    read_lines,
    write_json,
    write_jsonl,
)
from generation.engine import (
    Dataset,
    count_requests,
    generate_corpus,
    request_upper_bound,
)


def accounting_payload(run: RunConfig, report, records: list) -> dict:
    """Accounting sidecar: the report, the resolved config and the cost."""
    B = run.get("generation", "B")
    return {
        "report": report.to_dict(),
        "config": run.to_dict(),
        "generations": len(records),
        "provider_requests": count_requests(records, B),
    }


def write_outputs(run: RunConfig, records: list, report, vocabulary) -> list:
    outputs = run.data["outputs"]
    include_trace = outputs["include_trace"]
    write_jsonl(
        outputs["generations"],
        (record_to_dict(record, vocabulary, include_trace) for record in records),
    )
    write_json(outputs["accounting"], accounting_payload(run, report, records))
    return [outputs["generations"], outputs["accounting"]]


def main(argv: Optional[list] = None) -> int:
    """Main function"""
    # Get the command line arguments from the user.
    parser = argparser()
    parser.parser.description = "Generate differentially private synthetic text."
    parser.add_mechanism_arguments()
    parser.add_run_arguments()
    parser.parser.add_argument(
        "-r",
        "--references",
        metavar="references",
        type=str,
        help="the sensitive reference texts, one per line",
    )
    parser.parser.add_argument(
        "-o",
        "--output",
        metavar="output",
        type=str,
        help="path of the generations JSONL file",
    )
    parser.parser.add_argument(
        "-a",
        "--accounting",
        metavar="accounting",
        type=str,
        help="path of the accounting JSON file",
    )
    parser.parser.add_argument(
        "-q", "--query", metavar="query", type=str, help="the public query text"
    )
    parser.parser.add_argument(
        "--trace",
        action="store_true",
        help="record and write per-step effective k statistics",
    )
    args = parser.parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        run = RunConfig.load(args.config).apply_args(args)
        if args.references:
            run.data["dataset"]["references"] = args.references
        if args.output:
            run.data["outputs"]["generations"] = args.output
        if args.accounting:
            run.data["outputs"]["accounting"] = args.accounting
        if args.query is not None:
            run.data["generation"]["query"] = args.query
        if args.trace:
            run.data["generation"]["collect_trace"] = True
            run.data["outputs"]["include_trace"] = True

        # Calibration errors must surface before any output is written.
        config = run.generation_config().calibrated()
        references_path = run.get("dataset", "references")
        if references_path is None:
            raise ValueError("no reference file given (--references)")
        texts = read_lines(references_path)

        if args.dry_run:
            n = len(texts) // config.B
            print(
                "Dry run: at most "
                + str(request_upper_bound(n, config.B, config.T))
                + f" provider requests ({n} batches x (B+1)={config.B + 1} x "
                + f"T={config.T})"
            )
            return EXIT_OK

        provider = run.build_provider(args.remote_token)
        skip_unknown = run.get("dataset", "skip_unknown")
        dataset = Dataset.from_texts(texts, provider.vocabulary, skip_unknown)
        query = provider.vocabulary.encode(
            run.get("generation", "query"), skip_unknown=skip_unknown
        )
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    try:
        records, report = generate_corpus(
            config,
            dataset,
            provider,
            query=query,
            jobs=run.get("generation", "jobs"),
            delta=run.delta,
            method=run.method,
        )
    except CorpusGenerationError as e:
        print("Error: " + str(e), file=sys.stderr)
        print_error_table(e.errors)
        write_outputs(run, e.records, e.report, provider.vocabulary)
        return exit_code(e)
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    outputs = write_outputs(run, records, report, provider.vocabulary)
    print_dict_table(report.to_dict())
    print_final_help(outputs)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
