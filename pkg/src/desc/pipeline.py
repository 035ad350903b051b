"""From documents to trained members: featurization, member fitting and ensemble assembly."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import models as M
from .ensemble import EnsembleInputs, EnsembleModel, MEMBER_ORDER, compute_weights, cross_validated_f1
from .features import FEATURE_NAMES, TfidfModel, extract_matrix, fit_tfidf, tfidf_matrix
from .resources import Resources
from .text import Document

log = logging.getLogger(__name__)


@dataclass
class ModelSettings:
    """Architecture and optimization knobs shared by the three members."""

    n_classes: int = 2
    hidden: int = 64
    dense: int = 128
    dnn_widths: Tuple[int, ...] = M.DEFAULT_DNN_WIDTHS
    max_len: int = 50
    leaky_slope: float = 0.01
    min_df: int = 2
    validation_fraction: float = 0.1
    train: M.TrainConfig = field(default_factory=M.TrainConfig)


def derive_seed(*parts: int) -> int:
    """Independent, reproducible child seed for (run seed, member, fold, ...)."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# ---------------------------------------------------------------- featurization


def fit_scaler(matrix: np.ndarray):
    mean = matrix.mean(axis=0) if len(matrix) else np.zeros(matrix.shape[1])
    std = matrix.std(axis=0) if len(matrix) else np.ones(matrix.shape[1])
    return mean, np.where(std > 0, std, 1.0)


def dense_inputs(docs: Sequence[Document], resources: Resources, tfidf: TfidfModel, mean, scale) -> np.ndarray:
    """Tf-Idf columns followed by the standardized 44 engineered features."""
    feats = (extract_matrix(docs, resources) - mean) / scale
    return np.hstack([tfidf_matrix(tfidf, docs), feats])


def embed_sequence(doc: Document, resources: Resources) -> np.ndarray:
    """Embedding per token; an empty document becomes a single OOV step."""
    table = resources.embeddings
    if not doc.tokens:
        return table.oov_vector[None, :]
    return np.vstack([table.lookup(t.normalized) for t in doc.tokens])


def sequence_inputs(docs: Sequence[Document], resources: Resources) -> List[np.ndarray]:
    return [embed_sequence(d, resources) for d in docs]


@dataclass
class DenseFeaturizer:
    tfidf: TfidfModel
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, docs, resources, min_df):
        tfidf = fit_tfidf(docs, min_df)
        mean, scale = fit_scaler(extract_matrix(docs, resources))
        return cls(tfidf, mean, scale)

    def transform(self, docs, resources):
        return dense_inputs(docs, resources, self.tfidf, self.mean, self.scale)

    def spec(self) -> Dict:
        return {
            "feature_names": list(FEATURE_NAMES),
            "n_tfidf": len(self.tfidf.vocabulary),
            "feature_mean": [float(x) for x in self.mean],
            "feature_scale": [float(x) for x in self.scale],
        }


# ---------------------------------------------------------------- members


def holdout_split(labels: np.ndarray, fraction: float, seed: int):
    """Stratified (train, validation) index split; empty validation if fraction is 0
    or a class is too small to spare a sample."""
    labels = np.asarray(labels)
    if fraction <= 0:
        return np.arange(labels.size), np.array([], dtype=int)
    rng = np.random.default_rng(seed)
    val = []
    for c in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == c)
        n_val = int(round(fraction * idx.size))
        if idx.size - n_val < 1:
            n_val = 0
        val.extend(idx[rng.permutation(idx.size)[:n_val]].tolist())
    val = np.array(sorted(val), dtype=int)
    return np.setdiff1d(np.arange(labels.size), val), val


def init_member(architecture: str, input_dim: int, settings: ModelSettings, seed: int, input_spec=None):
    if architecture == "DNN":
        return M.init_dnn(input_dim, settings.n_classes, settings.dnn_widths, seed, input_spec)
    if architecture == "BILSTM":
        return M.init_bilstm(
            input_dim, settings.n_classes, settings.hidden, settings.dense, settings.max_len,
            settings.leaky_slope, seed, input_spec,
        )
    if architecture == "ATTLSTM":
        return M.init_attention(
            input_dim, settings.n_classes, settings.hidden, settings.max_len, settings.leaky_slope,
            seed, input_spec,
        )
    raise ValueError(f"unknown architecture {architecture!r}")


@dataclass
class TrainedMember:
    model: M.ModelParams
    featurizer: Optional[DenseFeaturizer]
    result: M.TrainResult

    def inputs(self, docs, resources):
        if self.model.architecture == "DNN":
            return self.featurizer.transform(docs, resources)
        return sequence_inputs(docs, resources)

    def predict_proba(self, docs, resources) -> np.ndarray:
        return M.predict_batch(self.model, self.inputs(docs, resources))


def fit_member(architecture: str, docs: Sequence[Document], labels, resources: Resources,
               settings: ModelSettings, seed: int) -> TrainedMember:
    """Fit the member's featurizer (DNN only) and weights on ``docs`` alone."""
    labels = np.asarray(labels, dtype=int)
    featurizer = None
    if architecture == "DNN":
        featurizer = DenseFeaturizer.fit(docs, resources, settings.min_df)
        inputs = featurizer.transform(docs, resources)
        input_dim, spec = inputs.shape[1], featurizer.spec()
    else:
        inputs = sequence_inputs(docs, resources)
        input_dim, spec = resources.embeddings.dimension, {}
    model = init_member(architecture, input_dim, settings, derive_seed(seed, 1), spec)
    train_idx, val_idx = holdout_split(labels, settings.validation_fraction, derive_seed(seed, 2))
    cfg = M.TrainConfig(**{**settings.train.to_dict(), "seed": derive_seed(seed, 3)})
    validation = None
    if val_idx.size:
        validation = (M.gather_rows(inputs, val_idx), labels[val_idx])
    result = M.train(model, M.gather_rows(inputs, train_idx), labels[train_idx], cfg, validation)
    return TrainedMember(result.model, featurizer, result)


# ---------------------------------------------------------------- ensemble


@dataclass
class FittedEnsemble:
    ensemble: EnsembleModel
    members: Dict[str, TrainedMember]
    cv_f1: Dict[str, float]

    @property
    def tfidf(self) -> TfidfModel:
        return self.members["DNN"].featurizer.tfidf


def fit_ensemble(docs: Sequence[Document], labels, resources: Resources, settings: ModelSettings,
                 seed: int, k: int = 5, flavor: str = "macro", positive: int = 1) -> FittedEnsemble:
    """Cross-validate each member for its ensemble weight, then refit all three on every row."""
    labels = np.asarray(labels, dtype=int)
    cv_f1 = {}
    for m_idx, arch in enumerate(MEMBER_ORDER):
        fold_counter = iter(range(10**6))

        def factory(train_docs, train_labels, arch=arch, m_idx=m_idx, folds=fold_counter):
            member = fit_member(arch, train_docs, train_labels, resources, settings,
                                derive_seed(seed, m_idx, 1 + next(folds)))
            return lambda test_docs: member.predict_proba(test_docs, resources)

        cv_f1[arch] = cross_validated_f1(factory, list(docs), labels, k, derive_seed(seed, 99), flavor, positive)
        log.info("%s cross-validated F1 %.4f", arch, cv_f1[arch])
    members = {
        arch: fit_member(arch, docs, labels, resources, settings, derive_seed(seed, m_idx, 0))
        for m_idx, arch in enumerate(MEMBER_ORDER)
    }
    weights = compute_weights([cv_f1[a] for a in MEMBER_ORDER])
    ensemble = EnsembleModel({a: members[a].model for a in MEMBER_ORDER}, weights)
    return FittedEnsemble(ensemble, members, cv_f1)


def ensemble_inputs(docs: Sequence[Document], resources: Resources, dnn: M.ModelParams,
                    tfidf: TfidfModel) -> EnsembleInputs:
    spec = dnn.input_spec
    dense = dense_inputs(docs, resources, tfidf, np.array(spec["feature_mean"]), np.array(spec["feature_scale"]))
    return EnsembleInputs(dense, sequence_inputs(docs, resources))


def decode_scores(probs: np.ndarray, mode: str = "argmax") -> np.ndarray:
    """Map 11-class sentiment probabilities to scores in [-5, 5]."""
    if mode == "argmax":
        return probs.argmax(axis=1).astype(float) - 5.0
    if mode == "expectation":
        return probs @ (np.arange(probs.shape[1]) - 5.0)
    raise ValueError(f"unknown decode mode {mode!r}")
