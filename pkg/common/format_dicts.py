"""
|------------------------------------------------------------------------------|
|                                                                              |
|    Filename: format_dicts.py                                                 |
|     Authors: dp-decode contributors                                          |
| Description: Helpers to turn records, traces and reports into dictionaries   |
|              and rows for the JSONL, JSON and CSV outputs                    |
|                                                                              |
|------------------------------------------------------------------------------|
"""

from typing import Optional, Sequence

from common.exceptions import ConfigError
from generation.engine import GenerationRecord, StepTrace
from providers.vocabulary import Vocabulary

RECORD_FIELDS = ("batch", "tokens", "text", "finished_by")
METRIC_CSV_FIELDS = ("batch", "length", "finished_by", "perplexity", "ppl_gap")


def trace_to_dict(step: StepTrace) -> dict:
    return {
        "position": step.position,
        "token": step.token,
        "effective_k": step.effective_k,
        "expansion_size": step.expansion_size,
        "from_expansion": step.from_expansion,
    }


def record_to_dict(
    record: GenerationRecord, vocabulary: Vocabulary, include_trace: bool = False
) -> dict:
    """One JSONL line of the generation output.

    Args:
        record (GenerationRecord):  the generation
        vocabulary (Vocabulary):    decodes the tokens into text
        include_trace (bool):       add the per-step trace when recorded

    Returns:
        dict: {"batch", "tokens", "text", "finished_by"} (+ "trace")
    """
    line = {
        "batch": record.batch_index,
        "tokens": list(record.tokens),
        "text": vocabulary.decode(record.tokens),
        "finished_by": record.finished_by,
    }
    if include_trace and record.trace is not None:
        line["trace"] = [trace_to_dict(step) for step in record.trace]
    return line


def record_from_dict(line: dict) -> GenerationRecord:
    """Inverse of record_to_dict; the text field is ignored."""
    missing = [key for key in RECORD_FIELDS if key not in line]
    if missing:
        raise ConfigError(f"generation line is missing {missing}")
    trace = line.get("trace")
    if trace is not None:
        trace = tuple(StepTrace(**step) for step in trace)
    return GenerationRecord(
        tokens=tuple(int(token) for token in line["tokens"]),
        finished_by=line["finished_by"],
        batch_index=int(line["batch"]),
        trace=trace,
    )


def metric_rows(
    records: Sequence[GenerationRecord],
    perplexities: Sequence[float],
    mean_reference_ppl: Optional[float],
) -> list:
    """Per-generation CSV rows with METRIC_CSV_FIELDS columns."""
    rows = []
    for record, ppl in zip(records, perplexities):
        gap = None if mean_reference_ppl is None else abs(ppl - mean_reference_ppl)
        rows.append(
            {
                "batch": record.batch_index,
                "length": len(record.tokens),
                "finished_by": record.finished_by,
                "perplexity": ppl,
                "ppl_gap": gap,
            }
        )
    return rows
