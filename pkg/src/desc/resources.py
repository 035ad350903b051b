"""Loaders for lexicons, word lists and word embeddings.

All resources share one normalized on-disk layout (UTF-8, tab separated,
``#`` comment lines skipped). Lookups are total: a missing word yields the
documented zero default instead of raising.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import EmptyFile, InconsistentDimension, MalformedRow, MissingFile
from .text import collapse_elongation

log = logging.getLogger(__name__)

MOOD_DIMENSIONS = (
    "happiness",
    "sadness",
    "annoyance",
    "inspiration",
    "fear",
    "indifference",
    "anger",
    "amusement",
)
POS_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CONJ", "NUM", "INTJ", "PUNCT", "OTHER")
POS_INDEX = {tag: i for i, tag in enumerate(POS_TAGS)}

DEFAULT_SUFFIX_RULES = (
    ("ly", "ADV"),
    ("ing", "VERB"),
    ("ed", "VERB"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ness", "NOUN"),
    ("ment", "NOUN"),
    ("ity", "NOUN"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ive", "ADJ"),
    ("less", "ADJ"),
    ("ish", "ADJ"),
    ("est", "ADJ"),
)


def _lookup_keys(word: str):
    w = collapse_elongation(word.lower())
    yield w
    # "goood" -> "good" -> also try single letters for "sooo" -> "so"
    squeezed = "".join(c for i, c in enumerate(w) if i == 0 or c != w[i - 1])
    if squeezed != w:
        yield squeezed


@dataclass
class SentimentLexicon:
    name: str
    entries: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    n_clamped: int = 0

    def lookup(self, word: str) -> Tuple[float, float]:
        for key in _lookup_keys(word):
            if key in self.entries:
                return self.entries[key]
        return (0.0, 0.0)

    def __len__(self):
        return len(self.entries)


@dataclass
class MoodLexicon:
    entries: Dict[str, np.ndarray] = field(default_factory=dict)
    n_clamped: int = 0

    def lookup(self, word: str) -> np.ndarray:
        for key in _lookup_keys(word):
            if key in self.entries:
                return self.entries[key]
        return np.zeros(len(MOOD_DIMENSIONS))

    def as_sentiment(self, name: str = "depechemood") -> SentimentLexicon:
        """View the mood lexicon as a polarity lexicon.

        pos = mean(happiness, amusement, inspiration),
        neg = mean(sadness, anger, fear), both clamped to [0, 1].
        """
        idx = {d: i for i, d in enumerate(MOOD_DIMENSIONS)}
        pos_ids = [idx["happiness"], idx["amusement"], idx["inspiration"]]
        neg_ids = [idx["sadness"], idx["anger"], idx["fear"]]
        entries = {}
        for word, vec in self.entries.items():
            pos = min(max(float(np.mean(vec[pos_ids])), 0.0), 1.0)
            neg = min(max(float(np.mean(vec[neg_ids])), 0.0), 1.0)
            entries[word] = (pos, neg)
        return SentimentLexicon(name, entries)


@dataclass
class WordList:
    words: frozenset = frozenset()

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self):
        return len(self.words)


@dataclass
class PosLexicon:
    entries: Dict[str, int] = field(default_factory=dict)
    suffix_rules: List[Tuple[str, int]] = field(
        default_factory=lambda: [(s, POS_INDEX[t]) for s, t in DEFAULT_SUFFIX_RULES]
    )

    def tag(self, word: str) -> int:
        """Lexicon lookup, then the first matching suffix rule, then OTHER."""
        for key in _lookup_keys(word):
            if key in self.entries:
                return self.entries[key]
        w = word.lower()
        for suffix, tag in self.suffix_rules:
            if w.endswith(suffix) and len(w) > len(suffix):
                return tag
        return POS_INDEX["OTHER"]


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def oov_vector(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def lookup(self, token: str) -> np.ndarray:
        vec = self.vectors.get(token)
        if vec is None:
            vec = self.vectors.get(token.lower())
        return self.oov_vector if vec is None else vec

    def __len__(self):
        return len(self.vectors)


def _rows(path):
    """Yield (row_number, fields) for non-blank, non-comment lines."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such resource file: {path}")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def _parse_scores(path, lineno, raw):
    out = []
    for value in raw:
        try:
            x = float(value)
        except ValueError:
            raise MalformedRow(path, lineno, f"non-numeric score {value!r}") from None
        if not math.isfinite(x):
            raise MalformedRow(path, lineno, f"non-finite score {value!r}")
        out.append(x)
    return out


def _clamp(values):
    clamped = [min(max(v, 0.0), 1.0) for v in values]
    return clamped, sum(1 for a, b in zip(values, clamped) if a != b)


def load_sentiment_lexicon(path, name: Optional[str] = None) -> SentimentLexicon:
    """Read ``word<TAB>pos<TAB>neg`` rows; out-of-range scores are clamped and counted."""
    entries = {}
    n_clamped = 0
    for lineno, fields in _rows(path):
        if len(fields) != 3:
            raise MalformedRow(path, lineno, f"expected 3 columns, got {len(fields)}")
        scores, n = _clamp(_parse_scores(path, lineno, fields[1:]))
        n_clamped += n
        entries[fields[0].lower()] = (scores[0], scores[1])
    if n_clamped:
        log.warning("%s: clamped %d score(s) into [0, 1]", path, n_clamped)
    return SentimentLexicon(name or Path(path).stem, entries, n_clamped)


def load_mood_lexicon(path) -> MoodLexicon:
    entries = {}
    n_clamped = 0
    width = 1 + len(MOOD_DIMENSIONS)
    for lineno, fields in _rows(path):
        if len(fields) != width:
            raise MalformedRow(path, lineno, f"expected {width} columns, got {len(fields)}")
        scores, n = _clamp(_parse_scores(path, lineno, fields[1:]))
        n_clamped += n
        entries[fields[0].lower()] = np.array(scores)
    if n_clamped:
        log.warning("%s: clamped %d mood score(s) into [0, 1]", path, n_clamped)
    return MoodLexicon(entries, n_clamped)


def load_wordlist(path) -> WordList:
    words = set()
    for lineno, fields in _rows(path):
        if len(fields) != 1:
            raise MalformedRow(path, lineno, "expected one word per line")
        words.add(fields[0].strip().lower())
    return WordList(frozenset(words))


def load_pos_lexicon(path) -> PosLexicon:
    """Read ``word<TAB>TAG`` rows. Rows whose word starts with ``-`` are suffix rules
    (``-ing<TAB>VERB``); they take precedence over the built-in suffix rules."""
    entries = {}
    rules = []
    for lineno, fields in _rows(path):
        if len(fields) != 2:
            raise MalformedRow(path, lineno, f"expected 2 columns, got {len(fields)}")
        word, tag = fields[0].lower(), fields[1].strip().upper()
        if tag not in POS_INDEX:
            raise MalformedRow(path, lineno, f"unknown POS tag {tag!r}")
        if word.startswith("-") and len(word) > 1:
            rules.append((word[1:], POS_INDEX[tag]))
        else:
            entries[word] = POS_INDEX[tag]
    lex = PosLexicon(entries)
    lex.suffix_rules = rules + lex.suffix_rules
    return lex


def load_embeddings(path) -> EmbeddingTable:
    """Read a GloVe-style text file: ``token v1 ... vD`` per line, D from the first line."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"no such embedding file: {path}")
    vectors = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\r\n").split(" ")
            if len(parts) == 1 and not parts[0]:
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                if not values:
                    raise InconsistentDimension(f"{path}: line {lineno} has no vector values")
                dim = len(values)
            elif len(values) != dim:
                raise InconsistentDimension(
                    f"{path}: line {lineno} has {len(values)} values, expected {dim}"
                )
            try:
                vectors[token] = np.array([float(v) for v in values])
            except ValueError:
                raise MalformedRow(path, lineno, "non-numeric vector component") from None
    if dim is None:
        raise EmptyFile(f"{path}: no embedding rows")
    return EmbeddingTable(dim, vectors)


def save_sentiment_lexicon(lex: SentimentLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, (pos, neg) in lex.entries.items():
            fh.write(f"{word}\t{pos!r}\t{neg!r}\n")


def save_mood_lexicon(lex: MoodLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, vec in lex.entries.items():
            fh.write(word + "\t" + "\t".join(repr(float(v)) for v in vec) + "\n")


def save_wordlist(words: WordList, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w in sorted(words.words):
            fh.write(w + "\n")


def save_pos_lexicon(lex: PosLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for suffix, tag in lex.suffix_rules:
            fh.write(f"-{suffix}\t{POS_TAGS[tag]}\n")
        for word, tag in lex.entries.items():
            fh.write(f"{word}\t{POS_TAGS[tag]}\n")


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token, vec in table.vectors.items():
            fh.write(token + " " + " ".join(repr(float(v)) for v in vec) + "\n")


SENTIMENT_LEXICON_NAMES = ("sentiwordnet", "vader", "afinn", "depechemood")


@dataclass
class Resources:
    """Everything feature extraction and the sequence models need."""

    sentiment: List[SentimentLexicon]
    mood: MoodLexicon
    easy_words: WordList
    pos: PosLexicon
    embeddings: Optional[EmbeddingTable] = None


def builtin_path(name: str) -> Path:
    """Path of a fixture bundled with the package (``desc/data/<name>``)."""
    return Path(str(importlib_resources.files("desc") / "data" / name))


BUILTIN_FILES = {
    "sentiwordnet": "sentiwordnet.tsv",
    "vader": "vader.tsv",
    "afinn": "afinn.tsv",
    "mood_lexicon": "depechemood.tsv",
    "dale_chall": "dale_chall.txt",
    "pos_lexicon": "pos.tsv",
    "embeddings": "embeddings.txt",
}


def resolve_resource(key: str, value) -> Path:
    if value is None or str(value) == "builtin":
        return builtin_path(BUILTIN_FILES[key])
    return Path(value)


def load_resources(paths: Optional[Dict[str, object]] = None) -> Resources:
    """Load every resource; keys missing from `paths` (or set to "builtin")
    fall back to the bundled fixtures."""
    paths = dict(paths or {})
    p = {key: resolve_resource(key, paths.get(key)) for key in BUILTIN_FILES}
    mood = load_mood_lexicon(p["mood_lexicon"])
    sentiment = [
        load_sentiment_lexicon(p["sentiwordnet"], "sentiwordnet"),
        load_sentiment_lexicon(p["vader"], "vader"),
        load_sentiment_lexicon(p["afinn"], "afinn"),
        mood.as_sentiment("depechemood"),
    ]
    return Resources(
        sentiment=sentiment,
        mood=mood,
        easy_words=load_wordlist(p["dale_chall"]),
        pos=load_pos_lexicon(p["pos_lexicon"]),
        embeddings=load_embeddings(p["embeddings"]),
    )
