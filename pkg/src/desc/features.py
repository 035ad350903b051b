"""Engineered text features (44 per document) and a unigram+bigram Tf-Idf vectorizer."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .errors import EmptyCorpus
from .resources import MOOD_DIMENSIONS, POS_INDEX, POS_TAGS, SENTIMENT_LEXICON_NAMES, Resources
from .text import Document, Kind, count_syllables, is_complex, is_polysyllabic

SYNTACTIC_NAMES = tuple(f"pos_{t.lower()}" for t in POS_TAGS)
DEMONSTRATIVE_NAMES = (
    "n_words",
    "n_emojis",
    "avg_word_length",
    "punctuation_freq",
    "n_exclaim_question",
    "n_elongated",
    "polysyllabic_freq",
    "n_all_caps",
)
SENTIMENT_NAMES = tuple(
    f"{lex}_{part}" for lex in SENTIMENT_LEXICON_NAMES for part in ("pos", "neg", "contrast")
)
MOOD_NAMES = tuple(f"mood_{d}" for d in MOOD_DIMENSIONS)
READABILITY_NAMES = ("n_difficult_words", "dale_chall", "flesch", "gunning_fog")

FEATURE_NAMES = SYNTACTIC_NAMES + DEMONSTRATIVE_NAMES + SENTIMENT_NAMES + MOOD_NAMES + READABILITY_NAMES
assert len(FEATURE_NAMES) == 44

FEATURE_GROUPS = {
    "syntactic": SYNTACTIC_NAMES,
    "demonstrative": DEMONSTRATIVE_NAMES,
    "sentiment": SENTIMENT_NAMES,
    "mood": MOOD_NAMES,
    "readability": READABILITY_NAMES,
}

_NON_WORD_TAGS = {Kind.PUNCT: "PUNCT", Kind.NUMBER: "NUM"}


def syntactic_features(doc: Document, pos_lexicon) -> np.ndarray:
    """Relative frequency of the 12 coarse POS tags.

    Every token is tagged except hashtag markers (their body is already a word
    token), so the frequencies of a non-empty document sum to 1.
    """
    counts = np.zeros(len(POS_TAGS))
    for tok in doc.tokens:
        if tok.kind is Kind.HASHTAG:
            continue
        if tok.tag is not None and tok.tag in POS_INDEX:
            counts[POS_INDEX[tok.tag]] += 1
        elif tok.kind is Kind.WORD:
            counts[pos_lexicon.tag(tok.normalized)] += 1
        else:
            counts[POS_INDEX[_NON_WORD_TAGS.get(tok.kind, "OTHER")]] += 1
    total = counts.sum()
    return counts / total if total else counts


def demonstrative_features(doc: Document) -> np.ndarray:
    words = doc.words
    n_words = len(words)
    n_tokens = len(doc.tokens)
    n_punct = sum(1 for t in doc.tokens if t.kind is Kind.PUNCT)
    return np.array(
        [
            n_words,
            sum(1 for t in doc.tokens if t.kind is Kind.EMOJI),
            sum(len(t.surface) for t in words) / n_words if n_words else 0.0,
            n_punct / n_tokens if n_tokens else 0.0,
            sum(t.surface.count("!") + t.surface.count("?") for t in doc.tokens if t.kind is Kind.PUNCT),
            sum(1 for t in words if t.is_elongated),
            sum(1 for t in words if is_polysyllabic(t.normalized)) / n_words if n_words else 0.0,
            sum(1 for t in words if t.is_all_caps),
        ],
        dtype=float,
    )


def sentiment_features(doc: Document, lexicons: Sequence) -> np.ndarray:
    """Mean positive, mean negative and their difference, per lexicon.

    Means run over word tokens; words absent from a lexicon contribute 0.
    """
    words = doc.words
    n = len(words)
    out = np.zeros(3 * len(lexicons))
    if n == 0:
        return out
    for k, lex in enumerate(lexicons):
        pos_sum = 0.0
        neg_sum = 0.0
        for tok in words:
            p, q = lex.lookup(tok.normalized)
            pos_sum += p
            neg_sum += q
        s_pos = pos_sum / n
        s_neg = neg_sum / n
        out[3 * k : 3 * k + 3] = (s_pos, s_neg, s_pos - s_neg)
    return out


def mood_features(doc: Document, mood_lexicon) -> np.ndarray:
    words = doc.words
    if not words:
        return np.zeros(len(MOOD_DIMENSIONS))
    return sum((mood_lexicon.lookup(t.normalized) for t in words), np.zeros(len(MOOD_DIMENSIONS))) / len(words)


def readability_scores(words: int, sentences: int, syllables: int, difficult: int, complex_words: int):
    """Dale-Chall, Flesch and Gunning Fog from raw counts; all 0 when words or sentences is 0."""
    if words == 0 or sentences == 0:
        return 0.0, 0.0, 0.0
    wps = words / sentences
    dale_chall = 0.1579 * (difficult / words * 100) + 0.0496 * wps
    flesch = 206.835 - 1.015 * wps - 84.6 * (syllables / words)
    fog = 0.4 * (wps + 100 * (complex_words / words))
    return dale_chall, flesch, fog


def readability_features(doc: Document, easy_words) -> np.ndarray:
    """Difficult-word count, Dale-Chall, Flesch and Gunning Fog."""
    n_words = syllables = difficult = complex_words = 0
    for start, end in doc.sentences:
        mid_sentence = False
        for tok in doc.tokens[start:end]:
            if tok.kind is not Kind.WORD:
                continue
            n_words += 1
            syllables += count_syllables(tok.normalized)
            if tok.normalized not in easy_words:
                difficult += 1
            if is_complex(tok.surface, mid_sentence=mid_sentence):
                complex_words += 1
            mid_sentence = True
    n_sentences = len(doc.sentences)
    if n_words == 0 or n_sentences == 0:
        return np.zeros(4)
    dc, fl, fog = readability_scores(n_words, n_sentences, syllables, difficult, complex_words)
    return np.array([difficult, dc, fl, fog], dtype=float)


def extract_features(doc: Document, resources: Resources) -> np.ndarray:
    """The 44-dimensional feature vector, in ``FEATURE_NAMES`` order."""
    return np.concatenate(
        [
            syntactic_features(doc, resources.pos),
            demonstrative_features(doc),
            sentiment_features(doc, resources.sentiment),
            mood_features(doc, resources.mood),
            readability_features(doc, resources.easy_words),
        ]
    )


def extract_matrix(docs: Iterable[Document], resources: Resources) -> np.ndarray:
    rows = [extract_features(d, resources) for d in docs]
    return np.vstack(rows) if rows else np.zeros((0, len(FEATURE_NAMES)))


# --------------------------------------------------------------------------
# Tf-Idf


def ngrams(doc: Document) -> List[str]:
    """Normalized unigrams followed by space-joined adjacent bigrams."""
    uni = [t.normalized for t in doc.tokens]
    return uni + [f"{a} {b}" for a, b in zip(uni, uni[1:])]


@dataclass
class TfidfModel:
    vocabulary: Dict[str, int]
    document_frequency: Dict[str, int]
    n_documents: int

    @property
    def idf(self) -> np.ndarray:
        out = np.empty(len(self.vocabulary))
        for term, j in self.vocabulary.items():
            out[j] = math.log((1 + self.n_documents) / (1 + self.document_frequency[term])) + 1.0
        return out

    def to_json(self) -> str:
        terms = sorted(self.vocabulary, key=self.vocabulary.get)
        return json.dumps(
            {
                "n_documents": self.n_documents,
                "terms": terms,
                "document_frequency": [self.document_frequency[t] for t in terms],
            },
            ensure_ascii=False,
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "TfidfModel":
        obj = json.loads(text)
        terms = obj["terms"]
        return cls(
            {t: i for i, t in enumerate(terms)},
            dict(zip(terms, obj["document_frequency"])),
            obj["n_documents"],
        )


def fit_tfidf(corpus: Sequence[Document], min_df: int = 2) -> TfidfModel:
    if not corpus:
        raise EmptyCorpus("cannot fit Tf-Idf on an empty corpus")
    df = Counter()
    for doc in corpus:
        df.update(set(ngrams(doc)))
    kept = sorted(t for t, c in df.items() if c >= min_df)
    return TfidfModel({t: i for i, t in enumerate(kept)}, {t: df[t] for t in kept}, len(corpus))


def transform_tfidf(model: TfidfModel, doc: Document, idf=None) -> Dict[int, float]:
    """Sparse L2-normalized count*idf vector as ``{column: value}``."""
    idf = model.idf if idf is None else idf
    counts = Counter(t for t in ngrams(doc) if t in model.vocabulary)
    vec = {model.vocabulary[t]: c * idf[model.vocabulary[t]] for t, c in counts.items()}
    norm = math.sqrt(sum(v * v for v in vec.values()))
    if norm == 0.0:
        return {}
    return {j: v / norm for j, v in sorted(vec.items())}


def tfidf_matrix(model: TfidfModel, docs: Sequence[Document]) -> np.ndarray:
    idf = model.idf
    out = np.zeros((len(docs), len(model.vocabulary)))
    for i, doc in enumerate(docs):
        for j, v in transform_tfidf(model, doc, idf).items():
            out[i, j] = v
    return out
