"""Soft-voting ensemble over the three member classifiers.

Member weights are a softmax over cross-validated F1 scores; prediction takes
the argmax of the weighted sum of member confidence vectors, breaking ties
toward the lowest class id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .errors import OutOfRangeF1, TooFewSamplesPerClass
from .evaluation import f1_score
from .models import ModelParams, predict_batch

MEMBER_ORDER = ("DNN", "BILSTM", "ATTLSTM")


@dataclass(frozen=True)
class EnsembleWeights:
    w: np.ndarray
    source_f1: np.ndarray

    def to_dict(self):
        return {"w": [float(x) for x in self.w], "source_f1": [float(x) for x in self.source_f1]}


def compute_weights(f1_scores: Sequence[float]) -> EnsembleWeights:
    """w_i = exp(F1_i) / sum_j exp(F1_j)."""
    f1 = np.asarray(f1_scores, dtype=np.float64)
    if f1.ndim != 1 or f1.size == 0:
        raise OutOfRangeF1("need a non-empty vector of F1 scores")
    if not np.all((f1 >= 0.0) & (f1 <= 1.0)):
        raise OutOfRangeF1(f"F1 scores must lie in [0, 1], got {f1.tolist()}")
    e = np.exp(f1)
    return EnsembleWeights(e / e.sum(), f1.copy())


def soft_vote(weights: Sequence[float], member_probs: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Weighted sum of member probability matrices and its row-wise argmax.

    ``np.argmax`` returns the first maximum, which is the lowest-id tie rule.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if len(member_probs) != weights.size:
        raise ValueError(f"{weights.size} weights for {len(member_probs)} members")
    combined = sum(w * np.asarray(p, dtype=np.float64) for w, p in zip(weights, member_probs))
    return np.argmax(combined, axis=1), combined


@dataclass
class EnsembleInputs:
    """All three input views of the same rows: dense vectors and token-embedding sequences."""

    dense: np.ndarray
    sequences: List[np.ndarray]

    def __len__(self):
        return len(self.sequences)

    def for_member(self, architecture: str):
        return self.dense if architecture == "DNN" else self.sequences


@dataclass
class EnsembleModel:
    members: Dict[str, ModelParams]
    weights: EnsembleWeights
    n_classes: int = field(init=False)

    def __post_init__(self):
        sizes = {m.n_classes for m in self.members.values()}
        if len(sizes) != 1:
            raise ValueError(f"members disagree on the class count: {sorted(sizes)}")
        if len(self.members) != self.weights.w.size:
            raise ValueError("one weight per member required")
        self.n_classes = sizes.pop()

    def member_probs(self, inputs: EnsembleInputs) -> Dict[str, np.ndarray]:
        return {name: predict_batch(m, inputs.for_member(m.architecture)) for name, m in self.members.items()}


def ensemble_predict(model: EnsembleModel, inputs: EnsembleInputs) -> List[Tuple[int, np.ndarray]]:
    probs = model.member_probs(inputs)
    labels, combined = soft_vote(model.weights.w, [probs[name] for name in model.members])
    return [(int(c), row) for c, row in zip(labels, combined)]


# ---------------------------------------------------------------- cross-validation


def stratified_folds(labels: Sequence[int], k: int, seed: int) -> List[np.ndarray]:
    """Indices of ``k`` test folds, each class spread round-robin after a seeded shuffle."""
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("cross-validation needs k >= 2")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    offset = 0
    for c in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == c)
        if idx.size < k:
            raise TooFewSamplesPerClass(f"class {c} has {idx.size} samples, fewer than k={k} folds")
        idx = idx[rng.permutation(idx.size)]
        for j, i in enumerate(idx):
            folds[(j + offset) % k].append(int(i))
        offset += idx.size
    return [np.array(sorted(f)) for f in folds]


def _take(items, idx):
    if isinstance(items, np.ndarray):
        return items[idx]
    if hasattr(items, "subset"):
        return items.subset(idx)
    return [items[i] for i in idx]


def cross_validated_f1(
    factory: Callable,
    items,
    labels: Sequence[int],
    k: int = 5,
    seed: int = 0,
    flavor: str = "macro",
    positive: int = 1,
) -> float:
    """Mean F1 over ``k`` stratified folds.

    ``factory(train_items, train_labels)`` must return a callable mapping items
    to class-probability rows (or directly to predicted class ids).
    """
    labels = np.asarray(labels, dtype=int)
    scores = []
    for test_idx in stratified_folds(labels, k, seed):
        train_idx = np.setdiff1d(np.arange(labels.size), test_idx)
        predict = factory(_take(items, train_idx), labels[train_idx])
        out = np.asarray(predict(_take(items, test_idx)))
        predicted = out.argmax(axis=1) if out.ndim == 2 else out.astype(int)
        scores.append(f1_score(labels[test_idx], predicted, flavor, positive))
    return float(np.mean(scores))
