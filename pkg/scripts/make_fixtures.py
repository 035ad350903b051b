"""Regenerate the small lexicon/embedding fixtures bundled in src/desc/data."""

from pathlib import Path

import numpy as np

from desc.synthetic import NEGATIVE, OPENERS, POSITIVE, SUBJECTS, VOCABULARY

DATA = Path(__file__).resolve().parents[1] / "src" / "desc" / "data"


def main():
    rng = np.random.default_rng(2019)
    polar = POSITIVE + NEGATIVE
    for name, scale in (("sentiwordnet", 0.6), ("vader", 0.8), ("afinn", 1.0)):
        with open(DATA / f"{name}.tsv", "w", encoding="utf-8") as fh:
            fh.write(f"# {name} fixture: word<TAB>pos<TAB>neg\n")
            for w in polar:
                strength = round(float(scale * rng.uniform(0.5, 1.0)), 3)
                pos, neg = (strength, 0.0) if w in POSITIVE else (0.0, strength)
                fh.write(f"{w}\t{pos}\t{neg}\n")
    # happiness sadness annoyance inspiration fear indifference anger amusement
    with open(DATA / "depechemood.tsv", "w", encoding="utf-8") as fh:
        fh.write("# mood fixture: word + 8 scores\n")
        for w in polar + SUBJECTS[:4]:
            v = rng.uniform(0.0, 0.2, size=8)
            if w in POSITIVE:
                v[[0, 3, 7]] += rng.uniform(0.4, 0.8, size=3)
            elif w in NEGATIVE:
                v[[1, 2, 4, 6]] += rng.uniform(0.4, 0.8, size=4)
            else:
                v[5] += 0.5
            fh.write(w + "\t" + "\t".join(f"{x:.3f}" for x in v) + "\n")
    easy = OPENERS + ("love", "great", "happy", "nice", "hate", "sad", "late", "sick", "day", "work", "train",
                      "phone", "the", "and", "to", "of", "in", "you", "that", "he", "she", "we", "they",
                      "good", "bad", "cat", "sat", "dog", "run", "yes", "no", "not")
    with open(DATA / "dale_chall.txt", "w", encoding="utf-8") as fh:
        fh.write("# easy-word fixture\n")
        for w in sorted(set(easy)):
            fh.write(w + "\n")
    pos_tags = {
        "i": "PRON", "it": "PRON", "my": "PRON", "this": "DET", "the": "DET", "a": "DET",
        "is": "VERB", "was": "VERB", "just": "ADV", "so": "ADV", "obviously": "ADV",
        "love": "VERB", "hate": "VERB", "great": "ADJ", "wonderful": "ADJ", "happy": "ADJ",
        "awesome": "ADJ", "fantastic": "ADJ", "nice": "ADJ", "perfect": "ADJ", "awful": "ADJ",
        "terrible": "ADJ", "sad": "ADJ", "broken": "ADJ", "late": "ADJ", "sick": "ADJ",
        "boring": "ADJ", "monday": "NOUN", "work": "NOUN", "traffic": "NOUN", "phone": "NOUN",
        "train": "NOUN", "meeting": "NOUN", "weather": "NOUN", "day": "NOUN", "cat": "NOUN",
        "sat": "VERB", "and": "CONJ", "but": "CONJ", "in": "ADP", "on": "ADP", "wow": "INTJ",
        "yeah": "INTJ", "one": "NUM", "two": "NUM",
    }
    with open(DATA / "pos.tsv", "w", encoding="utf-8") as fh:
        fh.write("# POS fixture: word<TAB>TAG\n")
        for w, t in pos_tags.items():
            fh.write(f"{w}\t{t}\n")
    with open(DATA / "embeddings.txt", "w", encoding="utf-8") as fh:
        for w in VOCABULARY + ("!",):
            vec = rng.normal(0.0, 0.5, size=12)
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


if __name__ == "__main__":
    main()
