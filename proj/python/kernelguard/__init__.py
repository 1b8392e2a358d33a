"""Fake-website detection with a composite-kernel SVM (Python bindings)."""

from ._core import (
    Corpus,
    Detector,
    Page,
    Website,
    build_catalog,
    corpus_fingerprint,
    cross_validate,
    evaluate,
    extract_page_cues,
    generate_synthetic_corpus,
    load_corpus,
    load_detector,
    select_top_k,
    train_detector,
    write_corpus,
)

__all__ = [
    "Corpus",
    "Detector",
    "Page",
    "Website",
    "build_catalog",
    "corpus_fingerprint",
    "cross_validate",
    "evaluate",
    "extract_page_cues",
    "generate_synthetic_corpus",
    "load_corpus",
    "load_detector",
    "select_top_k",
    "train_detector",
    "write_corpus",
]
