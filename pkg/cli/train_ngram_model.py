#!/usr/bin/env python3
"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: train_ngram_model.py                                            |
|     Authors: dp-decode contributors                                          |
| Description: Train the character n-gram logit provider on a text corpus.     |
|                                                                              |
|------------------------------------------------------------------------------|
"""
# Imports.
import sys

sys.path.append("..")
from typing import Optional

from common.exceptions import EXIT_OK, exit_code
from common.parser import argparser, configure_logging
from common.utils import print_final_help, print_table, read_lines
from providers.ngram import train_ngram
from providers.provider import DEFAULT_MAX_CONTEXT
from providers.vocabulary import Vocabulary


def main(argv: Optional[list] = None) -> int:
    """Main function"""
    # Get the command line arguments from the user.
    parser = argparser()
    parser.parser.description = "Train a character n-gram logit provider."
    parser.parser.add_argument(
        "corpus",
        metavar="corpus",
        type=str,
        help="the training corpus, one text per line",
    )
    parser.parser.add_argument(
        "-o",
        "--output",
        metavar="output",
        type=str,
        required=True,
        help="path of the model file to write",
    )
    parser.parser.add_argument(
        "--order", metavar="order", type=int, default=3, help="n of the n-gram model"
    )
    parser.parser.add_argument(
        "--alpha",
        metavar="alpha",
        type=float,
        default=0.1,
        help="additive smoothing constant",
    )
    parser.parser.add_argument(
        "--vocabulary",
        metavar="vocabulary",
        type=str,
        help="vocabulary JSON file to train with, instead of the corpus "
        + "characters",
    )
    parser.parser.add_argument(
        "--save_vocabulary",
        metavar="save_vocabulary",
        type=str,
        help="also write the vocabulary to this JSON file",
    )
    parser.parser.add_argument(
        "--max_context",
        metavar="max_context",
        type=int,
        default=DEFAULT_MAX_CONTEXT,
        help="longest context the provider accepts",
    )
    args = parser.parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        texts = read_lines(args.corpus)
        if args.vocabulary:
            vocabulary = Vocabulary.load(args.vocabulary)
        else:
            vocabulary = Vocabulary.from_texts(texts)
        corpus = [vocabulary.encode(text, skip_unknown=True) for text in texts]
        provider = train_ngram(
            corpus, args.order, args.alpha, vocabulary, max_context=args.max_context
        )
        provider.save(args.output)
        outputs = [args.output]
        if args.save_vocabulary:
            vocabulary.save(args.save_vocabulary)
            outputs.append(args.save_vocabulary)
    except Exception as e:
        print("Error: " + str(e), file=sys.stderr)
        return exit_code(e)

    print_table(
        ["Texts", "Vocabulary", "Order", "Alpha", "Contexts"],
        [
            [
                len(corpus),
                vocabulary.size,
                args.order,
                args.alpha,
                len(provider.count_table()),
            ]
        ],
    )
    print_final_help(outputs)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
