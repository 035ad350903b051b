"""Generated toy corpus whose label is fixed by a marker token.

Ironic rows pair one positive and one negative lexicon word with the marker
``obviously``; literal rows use two words of a single polarity and never the
marker. Every word used here is covered by the bundled fixtures.
"""

from __future__ import annotations

import numpy as np

MARKER = "obviously"
POSITIVE = ("love", "great", "wonderful", "happy", "awesome", "fantastic", "nice", "perfect")
NEGATIVE = ("hate", "awful", "terrible", "sad", "broken", "late", "sick", "boring")
SUBJECTS = ("monday", "work", "traffic", "phone", "train", "meeting", "weather", "day")
OPENERS = ("i", "just", "so", "this", "my", "the", "it", "is", "a", "was")
EMOJI = ("😒", "🙂", "😂")

VOCABULARY = POSITIVE + NEGATIVE + SUBJECTS + OPENERS + (MARKER,)


def generate_corpus(n: int = 400, seed: int = 0, labels=("ironic", "literal")):
    """Return ``n`` rows of ``(id, label, text)``, classes alternating so the
    corpus is balanced."""
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(n):
        ironic = k % 2 == 0
        subject = SUBJECTS[rng.integers(len(SUBJECTS))]
        opener = OPENERS[rng.integers(len(OPENERS))]
        if ironic:
            first = POSITIVE[rng.integers(len(POSITIVE))]
            second = NEGATIVE[rng.integers(len(NEGATIVE))]
        else:
            pool = POSITIVE if rng.random() < 0.5 else NEGATIVE
            first, second = (pool[i] for i in rng.choice(len(pool), size=2, replace=False))
        if rng.random() < 0.2:
            first = first[:-1] + first[-1] * 3  # elongated emphasis
        words = [opener, first, subject]
        if ironic:
            words.insert(int(rng.integers(len(words) + 1)), MARKER)
        words.append(second)
        text = " ".join(words)
        if rng.random() < 0.3:
            text += " " + EMOJI[rng.integers(len(EMOJI))]
        if rng.random() < 0.5:
            text += " !"
        if rng.random() < 0.2:
            text = text.upper()
        rows.append((f"s{k:04d}", labels[0] if ironic else labels[1], text))
    return rows


def write_corpus(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# id\tlabel\ttext\n")
        for row_id, label, text in rows:
            fh.write(f"{row_id}\t{label}\t{text}\n")
