import sys

sys.path.append("..")

import pytest
import yaml

from cli import train_ngram_model

CORPUS = ["abc abc", "cab ba", "bca ac", "aab bc", "ccb ab", "ba cab"]
REFERENCES = ["abca", "cba", "bb ca", "acab", "cc", "bac", "x abc"]


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(CORPUS) + "\n")
    return path


@pytest.fixture
def references_file(tmp_path):
    path = tmp_path / "references.txt"
    path.write_text("\n".join(REFERENCES) + "\n")
    return path


@pytest.fixture
def model_file(tmp_path, corpus_file):
    path = tmp_path / "model.json"
    assert train_ngram_model.main([str(corpus_file), "-o", str(path)]) == 0
    return path


@pytest.fixture
def write_run_config(tmp_path, model_file, references_file):
    """Write a run config YAML; keyword sections are merged into the base."""

    def write(name="run.yaml", **sections):
        data = {
            "generation": {"B": 2, "tau": 1.0, "T": 4, "k": 3, "seed": 5},
            "accounting": {"epsilon": 10.0, "delta": 1e-6},
            "provider": {"type": "ngram", "model": str(model_file)},
            "dataset": {"references": str(references_file)},
            "outputs": {
                "generations": str(tmp_path / "generations.jsonl"),
                "accounting": str(tmp_path / "accounting.json"),
            },
        }
        for section, values in sections.items():
            data[section].update(values)
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data))
        return path

    return write
