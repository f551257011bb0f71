"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: utils.py                                                        |
|     Authors: dp-decode contributors                                          |
| Description: Common file and console helpers shared by the command           |
|              scripts                                                         |
|                                                                              |
|------------------------------------------------------------------------------|
"""

import csv
import json
import logging
from typing import Iterable, Sequence

from prettytable import PrettyTable


log = logging.getLogger(__name__)


def read_lines(path: str) -> list:
    """Non-empty lines of a UTF-8 text file, without line endings."""
    with open(path, encoding="utf-8") as file:
        lines = [line.rstrip("\r\n") for line in file]
    lines = [line for line in lines if line]
    log.debug("Read %d lines from %s", len(lines), path)
    return lines


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as file:
        json.dump(payload, file, indent=2, sort_keys=True)
        file.write("\n")


def read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as file:
        return json.load(file)


def write_jsonl(path: str, lines: Iterable[dict]) -> int:
    """Write one JSON object per line and return the number of lines."""
    count = 0
    with open(path, "w", encoding="utf-8") as file:
        for line in lines:
            file.write(json.dumps(line, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_jsonl(path: str) -> list:
    with open(path, encoding="utf-8") as file:
        return [json.loads(line) for line in file if line.strip()]


def write_csv(path: str, rows: Sequence[dict], fields: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.DictWriter(file, fieldnames=list(fields))
        writer.writeheader()
        writer.writerows(rows)


def print_table(field_names: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Print rows as a left-aligned table."""
    table = PrettyTable()
    table.field_names = list(field_names)
    for row in rows:
        table.add_row(list(row))
    table.align = "l"
    print(table)


def print_dict_table(values: dict, header: Sequence[str] = ("Field", "Value")) -> None:
    """Print a flat dictionary as a two column table; nested dicts are
    flattened with dotted keys."""

    def flatten(prefix: str, value):
        if isinstance(value, dict):
            for key, item in value.items():
                yield from flatten(f"{prefix}.{key}" if prefix else str(key), item)
        else:
            yield prefix, value

    print_table(header, flatten("", values))


def print_error_table(error_messages: dict) -> None:
    """Takes errors of failed batches and prints a formatted table with the
    batch indices and their corresponding errors.

    Args:
        error_messages (dict[int, str]): batch index -> error message
    """
    if error_messages:
        print_table(
            ["Batch", "Error Message"],
            ([index, error_messages[index]] for index in sorted(error_messages)),
        )
    else:
        print("No errors detected!")
        print("\n")


def print_final_help(outputs: Sequence[str] = ()) -> None:
    """Print the final usage help for the user"""
    print("Script completed, see responses for any issues.")
    for output in outputs:
        print("Wrote " + output)
    print()
