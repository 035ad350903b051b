"""Classification, ranking and regression metrics plus per-class feature profiles."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import EmptyClass, EmptyInput, LengthMismatch, SingleClassInput
from .features import FEATURE_NAMES, extract_features


@dataclass(frozen=True)
class ConfusionCounts:
    classes: tuple
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.tp[0] + self.fp[0] + self.fn[0] + self.tn[0])


class Metrics(NamedTuple):
    accuracy: float
    precision: float
    recall: float
    f1: float


def _check_pair(gold, predicted):
    gold = np.asarray(gold)
    predicted = np.asarray(predicted)
    if gold.shape != predicted.shape:
        raise LengthMismatch(f"{gold.size} gold labels vs {predicted.size} predictions")
    if gold.size == 0:
        raise EmptyInput("metrics need at least one sample")
    return gold, predicted


def confusion_counts(gold, predicted, classes: Optional[Sequence] = None) -> ConfusionCounts:
    """One-vs-rest counts per class; ``classes`` defaults to those seen in either list."""
    gold, predicted = _check_pair(gold, predicted)
    if classes is None:
        classes = sorted(set(gold.tolist()) | set(predicted.tolist()))
    tp, fp, fn, tn = (np.zeros(len(classes), dtype=int) for _ in range(4))
    for k, c in enumerate(classes):
        g = gold == c
        p = predicted == c
        tp[k] = np.sum(g & p)
        fp[k] = np.sum(~g & p)
        fn[k] = np.sum(g & ~p)
        tn[k] = np.sum(~g & ~p)
    return ConfusionCounts(tuple(classes), tp, fp, fn, tn)


def _ratio(num, den):
    return num / den if den else 0.0


def _f1(p, r):
    return _ratio(2 * p * r, p + r)


def per_class_scores(counts: ConfusionCounts):
    """(precision, recall, f1) arrays; a zero denominator scores 0."""
    p = np.array([_ratio(a, a + b) for a, b in zip(counts.tp, counts.fp)])
    r = np.array([_ratio(a, a + b) for a, b in zip(counts.tp, counts.fn)])
    f = np.array([_f1(a, b) for a, b in zip(p, r)])
    return p, r, f


def classification_metrics(gold, predicted, classes: Optional[Sequence] = None) -> Metrics:
    """Accuracy and macro-averaged precision, recall and F1."""
    gold, predicted = _check_pair(gold, predicted)
    counts = confusion_counts(gold, predicted, classes)
    p, r, f = per_class_scores(counts)
    acc = float(np.mean(gold == predicted))
    return Metrics(acc, float(p.mean()), float(r.mean()), float(f.mean()))


def positive_class_metrics(gold, predicted, positive=1) -> Metrics:
    """Accuracy with precision/recall/F1 of the single ``positive`` class."""
    gold, predicted = _check_pair(gold, predicted)
    counts = confusion_counts(gold, predicted, [positive])
    p, r, f = per_class_scores(counts)
    return Metrics(float(np.mean(gold == predicted)), float(p[0]), float(r[0]), float(f[0]))


def f1_score(gold, predicted, flavor: str = "macro", positive=1) -> float:
    if flavor == "macro":
        return classification_metrics(gold, predicted).f1
    if flavor == "positive":
        return positive_class_metrics(gold, predicted, positive).f1
    raise ValueError(f"unknown F1 flavor {flavor!r}")


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    def to_csv(self) -> str:
        lines = ["fpr,tpr"]
        lines += [f"{a!r},{b!r}" for a, b in zip(self.fpr.tolist(), self.tpr.tolist())]
        return "\n".join(lines) + "\n"


def roc_auc(gold, scores) -> RocCurve:
    """ROC curve from a sweep over the distinct scores, area by the trapezoid rule.

    Counts stay integral until the final division, so the area equals the
    Mann-Whitney statistic (ties count one half) exactly.
    """
    gold = np.asarray(gold).astype(int)
    scores = np.asarray(scores, dtype=np.float64)
    if gold.shape != scores.shape:
        raise LengthMismatch(f"{gold.size} labels vs {scores.size} scores")
    n_pos = int(np.sum(gold == 1))
    n_neg = int(np.sum(gold != 1))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC needs both positive and negative samples")
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    g = gold[order] == 1
    distinct = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tp = np.r_[0, np.cumsum(g)[distinct]]
    fp = np.r_[0, np.cumsum(~g)[distinct]]
    twice_area = int(np.sum((fp[1:] - fp[:-1]) * (tp[1:] + tp[:-1])))
    auc = twice_area / (2 * n_pos * n_neg)
    return RocCurve(fp / n_neg, tp / n_pos, np.r_[np.inf, s[distinct]], auc)


def sentiment_metrics(gold, predicted):
    """(cosine similarity, mean squared error) between score vectors."""
    g = np.asarray(gold, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if g.shape != p.shape:
        raise LengthMismatch(f"{g.size} gold scores vs {p.size} predictions")
    if g.size == 0:
        raise EmptyInput("sentiment metrics need at least one sample")
    ng, np_ = np.linalg.norm(g), np.linalg.norm(p)
    cosine = float(g @ p / (ng * np_)) if ng > 0 and np_ > 0 else 0.0
    mse = float(np.mean((g - p) ** 2))
    return cosine, mse


@dataclass
class FeatureProfile:
    classes: List[str]
    names: tuple
    means: np.ndarray  # (classes, features)
    counts: List[int]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "n", *self.names])
        for cls, n, row in zip(self.classes, self.counts, self.means):
            w.writerow([cls, n, *(repr(float(x)) for x in row)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "features": list(self.names),
                "classes": {
                    cls: {"n": n, "means": dict(zip(self.names, map(float, row)))}
                    for cls, n, row in zip(self.classes, self.counts, self.means)
                },
            },
            indent=1,
            ensure_ascii=False,
        )


def class_feature_profile(documents, labels, resources, class_names: Optional[Dict[int, str]] = None,
                          n_classes: Optional[int] = None) -> FeatureProfile:
    """Mean engineered feature vector per class.

    With ``n_classes`` given, every class id below it must have a document;
    otherwise the classes are the labels present.
    """
    labels = np.asarray(labels)
    if len(documents) != len(labels):
        raise LengthMismatch(f"{len(documents)} documents vs {len(labels)} labels")
    classes = list(range(n_classes)) if n_classes is not None else sorted(set(labels.tolist()))
    if not classes:
        raise EmptyClass("no labelled documents to profile")
    vectors = np.array([extract_features(d, resources) for d in documents]).reshape(len(documents), -1)
    means, counts = [], []
    for c in classes:
        rows = vectors[labels == c]
        if rows.shape[0] == 0:
            raise EmptyClass(f"class {c!r} has no documents")
        means.append(rows.mean(axis=0))
        counts.append(int(rows.shape[0]))
    names = [class_names.get(c, str(c)) if class_names else str(c) for c in classes]
    return FeatureProfile(names, FEATURE_NAMES, np.array(means), counts)
