"""Figurative-language detection: tokenizer, engineered features, from-scratch
autodiff, three neural classifiers and their soft-voting ensemble."""

from .ensemble import compute_weights, ensemble_predict, soft_vote
from .features import FEATURE_NAMES, extract_features, fit_tfidf, transform_tfidf
from .resources import load_resources
from .text import Document, Token, tokenize

__version__ = "0.1.0"

__all__ = [
    "FEATURE_NAMES",
    "Document",
    "Token",
    "compute_weights",
    "ensemble_predict",
    "extract_features",
    "fit_tfidf",
    "load_resources",
    "soft_vote",
    "tokenize",
    "transform_tfidf",
    "__version__",
]
