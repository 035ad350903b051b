"""Tokenization, sentence splitting and syllable heuristics for short social-media texts.

Everything here is a pure function of its input. Token kinds are assigned by a
fixed rule order (url, mention, hashtag, emoji, number, punctuation, word), so
the same string always yields the same token stream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple


class Kind(str, Enum):
    WORD = "word"
    PUNCT = "punctuation"
    EMOJI = "emoji"
    HASHTAG = "hashtag"
    MENTION = "mention"
    URL = "url"
    NUMBER = "number"


# Codepoint ranges treated as emoji. Fixed table; no external data.
EMOJI_RANGES = (
    (0x1F000, 0x1F02F),  # mahjong / domino
    (0x1F0A0, 0x1F0FF),  # playing cards
    (0x1F100, 0x1F1FF),  # enclosed alphanumerics, regional indicators
    (0x1F200, 0x1F2FF),
    (0x1F300, 0x1F5FF),  # symbols & pictographs
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport & map
    (0x1F700, 0x1F77F),
    (0x1F780, 0x1F7FF),
    (0x1F800, 0x1F8FF),
    (0x1F900, 0x1F9FF),  # supplemental symbols & pictographs
    (0x1FA00, 0x1FAFF),
    (0x2600, 0x26FF),  # misc symbols
    (0x2700, 0x27BF),  # dingbats
    (0x2B00, 0x2BFF),
    (0x2300, 0x23FF),  # misc technical (watch, hourglass, ...)
    (0x2190, 0x21FF),  # arrows
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3299),
)
# Modifiers that glue onto the preceding emoji instead of forming tokens.
_EMOJI_JOINERS = "‍︎️\U0001f3fb-\U0001f3ff"

_EMOJI_CLASS = "".join(
    f"\\U{lo:08x}" if lo == hi else f"\\U{lo:08x}-\\U{hi:08x}" for lo, hi in EMOJI_RANGES
)

_TOKEN_RE = re.compile(
    r"""
    (?P<url>https?://\S+|www\.\S+)
    |(?P<mention>@\w+)
    |(?P<hashtag>\#\w+)
    |(?P<emoji>[{emoji}](?:[{joiners}]+[{emoji}]?)*)
    |(?P<number>\d+(?:[.,:]\d+)*)
    |(?P<punctuation>\.\.\.+|[^\w\s])
    |(?P<word>[^\W\d_](?:[\w'’]*\w)?|_+\w*)
    """.format(emoji=_EMOJI_CLASS, joiners=_EMOJI_JOINERS),
    re.VERBOSE,
)

_ELONGATION_RE = re.compile(r"([^\W\d_])\1{2,}", re.IGNORECASE)
TERMINAL_PUNCTUATION = frozenset({".", "!", "?", "…", "..."})


def collapse_elongation(text: str) -> str:
    """Reduce every run of three or more identical letters (case-insensitive) to
    its first and last character."""
    return _ELONGATION_RE.sub(lambda m: m.group(0)[0] + m.group(0)[-1], text)


def is_elongated(text: str) -> bool:
    return _ELONGATION_RE.search(text) is not None


@dataclass(frozen=True)
class Token:
    surface: str
    kind: Kind
    normalized: str
    is_elongated: bool = False
    is_all_caps: bool = False
    tag: Optional[str] = None  # externally supplied POS tag (pretagged corpora)


@dataclass
class Document:
    raw_text: str
    tokens: List[Token] = field(default_factory=list)
    sentences: List[Tuple[int, int]] = field(default_factory=list)
    label: Optional[int] = None
    score: Optional[int] = None
    doc_id: Optional[str] = None

    def __post_init__(self):
        if self.score is not None and not (-5 <= self.score <= 5):
            raise ValueError(f"score {self.score} outside [-5, 5]")

    @property
    def words(self) -> List[Token]:
        return [t for t in self.tokens if t.kind is Kind.WORD]


def _make_token(surface: str, kind: Kind, tag: Optional[str] = None) -> Token:
    if kind is Kind.WORD:
        letters = [c for c in surface if c.isalpha()]
        caps = len(letters) >= 2 and all(c.isupper() for c in letters)
        lowered = surface.lower()
        return Token(surface, kind, collapse_elongation(lowered), is_elongated(lowered), caps, tag)
    return Token(surface, kind, surface.lower(), False, False, tag)


def _scan(text: str, tag: Optional[str] = None) -> List[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = Kind(m.lastgroup)
        surface = m.group()
        tokens.append(_make_token(surface, kind, tag))
        if kind is Kind.HASHTAG:
            body = surface[1:]
            body_kind = Kind.NUMBER if body.isdigit() else Kind.WORD
            tokens.append(_make_token(body, body_kind, tag))
    return tokens


def tokenize(raw_text: str, pretagged: bool = False) -> Document:
    """Tokenize `raw_text` and split it into sentences.

    With ``pretagged=True`` the input is whitespace-separated ``surface/TAG``
    items; every token produced from a surface carries that tag.
    """
    if pretagged:
        tokens = []
        for item in raw_text.split():
            surface, sep, tag = item.rpartition("/")
            if not sep or not surface:
                surface, tag = item, None
            tokens.extend(_scan(surface, tag.upper() if tag else None))
        surface_text = " ".join(t.surface for t in tokens)
        doc = Document(raw_text=surface_text, tokens=tokens)
    else:
        doc = Document(raw_text=raw_text, tokens=_scan(raw_text))
    return split_sentences(doc)


def split_sentences(doc: Document) -> Document:
    """Set sentence ranges: a boundary follows each run of terminal punctuation.

    A trailing segment holding no word tokens (say, an emoji after the final
    "!") is folded into the preceding sentence.
    """
    tokens = doc.tokens
    sentences = []
    start = 0
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i].kind is Kind.PUNCT and tokens[i].surface in TERMINAL_PUNCTUATION:
            while i + 1 < n and tokens[i + 1].kind is Kind.PUNCT and tokens[i + 1].surface in TERMINAL_PUNCTUATION:
                i += 1
            sentences.append((start, i + 1))
            start = i + 1
        i += 1
    if start < n:
        tail_has_word = any(t.kind is Kind.WORD for t in tokens[start:])
        if sentences and not tail_has_word:
            sentences[-1] = (sentences[-1][0], n)
        else:
            sentences.append((start, n))
    doc.sentences = sentences
    return doc


_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")
_VOWELS = set("aeiouy")


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate with a silent-e correction."""
    w = word.lower()
    groups = len(_VOWEL_GROUP_RE.findall(w))
    if groups == 0:
        return 0
    if len(w) >= 2 and w.endswith("e") and w[-2].isalpha() and w[-2] not in _VOWELS:
        groups -= 1
    return max(groups, 1)


def is_polysyllabic(word: str) -> bool:
    return count_syllables(word) >= 3


_INFLECTIONS = ("es", "ed", "ing")


def is_complex(word: str, mid_sentence: bool = False) -> bool:
    """Gunning Fog "complex word": three or more syllables, excluding proper
    nouns (capitalized when not sentence-initial) and words that only reach
    three syllables through an -es/-ed/-ing ending."""
    if mid_sentence and word[:1].isupper():
        return False
    lowered = word.lower()
    for suffix in _INFLECTIONS:
        if lowered.endswith(suffix) and len(lowered) > len(suffix):
            return count_syllables(lowered[: -len(suffix)]) >= 3
    return count_syllables(lowered) >= 3
