"""
Tests for the Lexicon Module.

Covers tokenization, phrase merging, dictionary loading and the
document-term matrix.
"""
import numpy as np
import pandas as pd
import pytest

from src.corpus import ingest
from src.errors import (
    DictionaryDisjointError,
    DictionaryError,
    EmptyDocumentSetError,
    EmptyVocabularyError,
)
from src.lexicon import (
    DocTermMatrix,
    Normalization,
    PhraseMatcher,
    TermDictionary,
    build_dtm,
    count_terms,
    load_dictionary,
    normalize_term,
    restrict_to_dictionary,
    tokenize,
)

SAMPLE_TERMS = (
    "cancer", "climate", "detox", "nato", "new world order",
    "pollution", "sugar", "the", "vaccine", "war",
)


# =============================================================================
# TESTS - TOKENIZER
# =============================================================================

def test_tokenize_default():
    """Test lowercasing and punctuation stripping."""
    assert tokenize("Climate change and pollution: climate lies!") == [
        "climate", "change", "and", "pollution", "climate", "lies",
    ]


def test_tokenize_empty():
    """Test that an empty message has no terms."""
    assert tokenize("") == []


def test_tokenize_fold_accents():
    """Test optional accent folding."""
    assert tokenize("Café Olé") == ["café", "olé"]
    assert tokenize("Café Olé", Normalization(fold_accents=True)) == ["cafe", "ole"]


def test_tokenize_keep_punctuation():
    """Test whitespace splitting when punctuation is kept."""
    assert tokenize("Don't stop!", Normalization(strip_punctuation=False)) == ["don't", "stop!"]


def test_tokenize_stemmer():
    """Test that a stemmer is applied after splitting."""
    norm = Normalization(stemmer=lambda t: t[:4])
    assert tokenize("Vaccines vaccinated", norm) == ["vacc", "vacc"]


def test_tokenize_drops_bare_underscores():
    """Test that runs of underscores are not terms."""
    assert tokenize("___ a_b") == ["a_b"]


def test_normalize_term():
    """Test that multi-word terms normalize to single-spaced lowercase."""
    assert normalize_term("  New   World Order ") == "new world order"


def test_phrase_matcher_longest_first():
    """Test that the longest matching phrase wins."""
    matcher = PhraseMatcher(["new world", "new world order"])
    tokens = ["the", "new", "world", "order", "new", "world"]
    assert matcher.merge(tokens) == ["the", "new world order", "new world"]


def test_phrase_matcher_ignores_single_words():
    """Test that single-word entries do not make a matcher."""
    matcher = PhraseMatcher(["nato"])
    assert not matcher
    assert matcher.merge(["nato", "war"]) == ["nato", "war"]


def test_count_terms_with_phrases():
    """Test per-message counts after phrase merging."""
    counts = count_terms("The new world order, THE NEW WORLD ORDER", phrases=PhraseMatcher(["new world order"]))
    assert counts == {"the": 2, "new world order": 2}


# =============================================================================
# TESTS - DICTIONARY
# =============================================================================

def test_load_dictionary_confidence_cut(sample_dictionary):
    """Test that rows below the confidence cut are dropped and terms normalized."""
    assert len(sample_dictionary) == 9
    assert "gmo" not in sample_dictionary
    assert "detox" in sample_dictionary
    assert sample_dictionary.label_of("nato") == "geopolitics"
    assert sample_dictionary.phrases == ["new world order"]


def test_load_dictionary_stricter_cut(sample_dictionary_path):
    """Test a higher confidence cut."""
    strict = load_dictionary(sample_dictionary_path, min_confidence=0.95)
    assert "detox" not in strict
    assert "pollution" in strict
    assert len(strict) == 8


def test_load_dictionary_invalid_confidence(sample_dictionary_path):
    """Test that the confidence cut must lie in [0, 1]."""
    with pytest.raises(ValueError):
        load_dictionary(sample_dictionary_path, min_confidence=1.5)


def test_load_dictionary_missing_file(tmp_path):
    """Test that a missing dictionary raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_dictionary(tmp_path / "missing.csv")


def test_load_dictionary_missing_columns(tmp_path):
    """Test that a CSV without a label column is rejected."""
    path = tmp_path / "dict.csv"
    path.write_text("term\nclimate\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_dictionary(path)


def test_dictionary_unknown_label():
    """Test that labels outside the topic set are rejected."""
    with pytest.raises(DictionaryError):
        TermDictionary.from_pairs([("climate", "sports")])


def test_dictionary_duplicate_after_normalization():
    """Test that terms colliding after normalization are rejected."""
    with pytest.raises(DictionaryError, match="duplicate"):
        TermDictionary.from_pairs([("War", "geopolitics"), ("war", "geopolitics")])


def test_dictionary_terms_for(sample_dictionary):
    """Test the per-topic term lists."""
    assert sample_dictionary.terms_for("diet") == ["sugar", "detox"]
    frame = sample_dictionary.to_frame()
    assert list(frame.columns) == ["term", "label"]
    assert len(frame) == 9


# =============================================================================
# TESTS - DOCUMENT-TERM MATRIX
# =============================================================================

def test_build_dtm_sample(sample_corpus, sample_dictionary):
    """Test rows, sorted columns and the strict occurrence threshold."""
    dtm = build_dtm(sample_corpus, min_occurrences=1, phrases=sample_dictionary.phrases)
    assert dtm.rows == ("p1", "p2", "p3", "p4", "p5", "p7", "p8")
    assert dtm.cols == SAMPLE_TERMS
    assert dtm.marginals[dtm.column_index()["cancer"]] == 6
    assert dtm.row_counts("p4") == {"nato": 1, "new world order": 2, "the": 2, "war": 2}
    assert dtm.row_counts("p7") == {}


def test_build_dtm_marginals_match_columns(sample_corpus):
    """Test that marginals equal the column sums."""
    dtm = build_dtm(sample_corpus, min_occurrences=1)
    np.testing.assert_array_equal(np.asarray(dtm.matrix.sum(axis=0)).ravel(), dtm.marginals)


def test_build_dtm_without_phrases(sample_corpus):
    """Test that phrase words count separately without merging."""
    dtm = build_dtm(sample_corpus, min_occurrences=1)
    assert "new world order" not in dtm.cols
    assert {"new", "world", "order"} <= set(dtm.cols)


def test_build_dtm_higher_threshold(sample_corpus):
    """Test that only terms above the threshold survive."""
    dtm = build_dtm(sample_corpus, min_occurrences=2)
    assert dtm.cols == ("cancer", "climate", "detox", "sugar", "the")


def test_build_dtm_invalid_threshold(sample_corpus):
    """Test that the threshold must be at least 1."""
    with pytest.raises(ValueError):
        build_dtm(sample_corpus, min_occurrences=0)


def test_build_dtm_empty_vocabulary(sample_corpus):
    """Test both behaviors when no term survives."""
    with pytest.raises(EmptyVocabularyError):
        build_dtm(sample_corpus, min_occurrences=100)
    empty = build_dtm(sample_corpus, min_occurrences=100, on_empty="empty")
    assert empty.shape == (7, 0)


def test_build_dtm_empty_document_set():
    """Test that a corpus without messages is an empty document set."""
    corpus = ingest(['{"post_id": "a", "page_id": "p", "created_at": 1, "message": "  "}'])
    with pytest.raises(EmptyDocumentSetError):
        build_dtm(corpus, min_occurrences=1)


def test_restrict_to_dictionary(sample_corpus, sample_dictionary, sample_dtm):
    """Test that only dictionary columns remain and all rows are kept."""
    assert sample_dtm.cols == tuple(t for t in SAMPLE_TERMS if t != "the")
    assert len(sample_dtm.rows) == 7
    full = build_dtm(sample_corpus, min_occurrences=1, phrases=sample_dictionary.phrases)
    for term in sample_dtm.cols:
        assert sample_dtm.marginals[sample_dtm.column_index()[term]] == full.marginals[full.column_index()[term]]


def test_restrict_to_dictionary_disjoint(sample_corpus):
    """Test that a dictionary sharing no term with the matrix is an error."""
    dtm = build_dtm(sample_corpus, min_occurrences=1)
    with pytest.raises(DictionaryDisjointError):
        restrict_to_dictionary(dtm, TermDictionary({"quinoa": "diet"}))


def test_dtm_frame_triplets(sample_dtm):
    """Test the long post_id,term,count layout."""
    frame = sample_dtm.to_frame()
    assert list(frame.columns) == ["post_id", "term", "count"]
    p1 = frame[frame["post_id"] == "p1"]
    assert dict(zip(p1["term"], p1["count"])) == {"climate": 2, "pollution": 1}
    assert int(frame["count"].sum()) == int(sample_dtm.marginals.sum())


def test_dtm_frame_keeps_empty_posts(sample_dtm, tmp_path):
    """Test that a post without kept terms survives a CSV round trip."""
    frame = sample_dtm.to_frame()
    p7 = frame[frame["post_id"] == "p7"]
    assert p7["term"].tolist() == [""]
    assert p7["count"].tolist() == [0]

    path = tmp_path / "dtm.csv"
    frame.to_csv(path, index=False)
    again = DocTermMatrix.from_frame(pd.read_csv(path, dtype={"post_id": str, "term": str}))
    assert again.shape == sample_dtm.shape
    assert again.rows == sample_dtm.rows
    assert again.cols == sample_dtm.cols
    assert (again.matrix != sample_dtm.matrix).nnz == 0


def test_dtm_frame_without_columns(sample_corpus):
    """Test that an empty vocabulary keeps every document row."""
    empty = build_dtm(sample_corpus, min_occurrences=100, on_empty="empty")
    again = DocTermMatrix.from_frame(empty.to_frame())
    assert again.shape == (7, 0)
    assert again.rows == empty.rows


# =============================================================================
# RUN TESTS
# =============================================================================

if __name__ == "__main__":
    pytest.main([__file__, "-v"])
