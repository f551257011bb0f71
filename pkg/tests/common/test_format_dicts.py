import pytest

import common.format_dicts as format_dicts
from common.exceptions import ConfigError
from generation.engine import GenerationRecord, StepTrace


@pytest.fixture
def record():
    trace = (StepTrace(1, 2, 5, 1, True), StepTrace(2, 3, 4, 0, False))
    return GenerationRecord(
        tokens=(2, 3),
        finished_by="eos",
        batch_index=4,
        provider_requests=6,
        trace=trace,
    )


def test_record_to_dict(record, vocabulary):
    line = format_dicts.record_to_dict(record, vocabulary)
    assert line == {"batch": 4, "tokens": [2, 3], "text": "c", "finished_by": "eos"}
    line = format_dicts.record_to_dict(record, vocabulary, include_trace=True)
    assert line["trace"][0] == {
        "position": 1,
        "token": 2,
        "effective_k": 5,
        "expansion_size": 1,
        "from_expansion": True,
    }


def test_record_from_dict(record, vocabulary):
    line = format_dicts.record_to_dict(record, vocabulary, include_trace=True)
    parsed = format_dicts.record_from_dict(line)
    assert parsed.tokens == record.tokens
    assert parsed.batch_index == 4
    assert parsed.trace == record.trace
    with pytest.raises(ConfigError):
        format_dicts.record_from_dict({"batch": 0, "tokens": []})


def test_metric_rows(record):
    rows = format_dicts.metric_rows([record], [5.0], 3.0)
    assert rows == [
        {
            "batch": 4,
            "length": 2,
            "finished_by": "eos",
            "perplexity": 5.0,
            "ppl_gap": 2.0,
        }
    ]
    assert tuple(rows[0]) == format_dicts.METRIC_CSV_FIELDS
