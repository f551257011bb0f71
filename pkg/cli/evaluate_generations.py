#!/usr/bin/env python3
"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: evaluate_generations.py                                         |
|     Authors: dp-decode contributors                                          |
| Description: Score generated texts against the references under a held-out   |
|              n-gram evaluation model.                                        |
|                                                                              |
|------------------------------------------------------------------------------|
"""
# Imports.
import sys

sys.path.append("..")
import json
from typing import Optional

from common.exceptions import EXIT_OK, exit_code
from common.format_dicts import METRIC_CSV_FIELDS, metric_rows, record_from_dict
from common.parser import argparser, configure_logging
from common.utils import (
    print_dict_table,
    print_final_help,
    read_jsonl,
    read_lines,
    write_csv,
    write_json,
)
from evaluation.metrics import evaluate
from generation.engine import FINISHED_EOS, GenerationRecord
from providers.ngram import NGramProvider
from providers.vocabulary import Vocabulary


def load_generations(path: str, vocabulary: Vocabulary) -> list:
    """Read a generations JSONL file, re-tokenized with the evaluation
    vocabulary; texts that stopped at EOS get it back."""
    records = []
    for line in read_jsonl(path):
        record = record_from_dict(line)
        tokens = vocabulary.encode(line["text"], skip_unknown=True)
        if record.finished_by == FINISHED_EOS:
            tokens.append(vocabulary.eos_index)
        records.append(
            GenerationRecord(
                tokens=tuple(tokens),
                finished_by=record.finished_by,
                batch_index=record.batch_index,
                trace=record.trace,
            )
        )
    return records


def main(argv: Optional[list] = None) -> int:
    """Main function"""
    # Get the command line arguments from the user.
    parser = argparser()
    parser.parser.description = "Evaluate generated synthetic text."
    parser.parser.add_argument(
        "generations", metavar="generations", type=str, help="the generations JSONL"
    )
    parser.parser.add_argument(
        "references",
        metavar="references",
        type=str,
        help="the reference texts, one per line",
    )
    parser.parser.add_argument(
        "eval_model",
        metavar="eval_model",
        type=str,
        help="n-gram evaluation model, trained apart from the generation model",
    )
    parser.parser.add_argument(
        "-o",
        "--output",
        metavar="output",
        type=str,
        help="path of the metric report JSON file",
    )
    parser.parser.add_argument(
        "--csv",
        metavar="csv",
        type=str,
        help="path of a per-generation CSV file",
    )
    parser.parser.add_argument(
        "--json", action="store_true", help="print the report as JSON"
    )
    args = parser.parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        eval_provider = NGramProvider.load(args.eval_model)
        vocabulary = eval_provider.vocabulary
        records = load_generations(args.generations, vocabulary)
        references = [
            vocabulary.encode(text, skip_unknown=True)
            for text in read_lines(args.references)
        ]
        report = evaluate(records, references, eval_provider)
        payload = {
            "metrics": report.to_dict(),
            "inputs": {
                "generations": args.generations,
                "references": args.references,
                "eval_model": args.eval_model,
            },
        }
        outputs = []
        if args.output:
            write_json(args.output, payload)
            outputs.append(args.output)
        if args.csv:
            rows = metric_rows(records, report.perplexities, report.mean_reference_ppl)
            write_csv(args.csv, rows, METRIC_CSV_FIELDS)
            outputs.append(args.csv)
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print_dict_table(report.to_dict())
        print_final_help(outputs)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
