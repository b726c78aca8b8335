"""
Shared fixtures: the hand-made sample corpus and a small synthetic corpus
with its planted ledger.
"""
from pathlib import Path

import pytest

from src.corpus import ingest_file
from src.lexicon import build_dtm, load_dictionary, restrict_to_dictionary
from src.synthgen import GeneratorSpec, load_ledger, write_synthetic

FIXTURES = Path(__file__).parent / "fixtures"
SYNTHETIC_SEED = 7
SYNTHETIC_SCALE = 0.01


@pytest.fixture
def sample_corpus_path() -> Path:
    return FIXTURES / "sample_posts.jsonl"


@pytest.fixture
def sample_dictionary_path() -> Path:
    return FIXTURES / "sample_dictionary.csv"


@pytest.fixture
def sample_corpus(sample_corpus_path):
    return ingest_file(sample_corpus_path)


@pytest.fixture
def sample_dictionary(sample_dictionary_path):
    return load_dictionary(sample_dictionary_path)


@pytest.fixture
def sample_dtm(sample_corpus, sample_dictionary):
    """Dictionary-restricted matrix of the sample corpus (terms seen twice or more)."""
    dtm = build_dtm(sample_corpus, min_occurrences=1, phrases=sample_dictionary.phrases)
    return restrict_to_dictionary(dtm, sample_dictionary)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("synthetic")
    write_synthetic(GeneratorSpec.reference_shaped(SYNTHETIC_SCALE), out, seed=SYNTHETIC_SEED)
    return out


@pytest.fixture(scope="session")
def synthetic_corpus(synthetic_dir):
    return ingest_file(synthetic_dir / "corpus.jsonl")


@pytest.fixture(scope="session")
def synthetic_ledger(synthetic_dir):
    return load_ledger(synthetic_dir / "ledger.json")
