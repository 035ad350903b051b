"""The three member classifiers and their shared training loop.

* ``DNN``: six affine layers, ReLU on the hidden ones, softmax head.
* ``BILSTM``: BiLSTM -> per-step dense LeakyReLU -> BiLSTM -> final states -> softmax.
* ``ATTLSTM``: BiLSTM (LeakyReLU) -> scalar tanh score per step -> masked
  softmax over steps -> weighted sum of hidden states -> softmax.

Sequence inputs are lists of ``(length, dim)`` arrays. They are truncated to
``max_len`` and pre-padded; padded steps leave the recurrent state untouched and
receive zero attention.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tensor as T
from .errors import (
    DimensionMismatch,
    EmptyDataset,
    EmptySequence,
    LabelOutOfRange,
    MissingArtifact,
    VersionMismatch,
)
from .tensor import Tensor

log = logging.getLogger(__name__)

ARCHITECTURES = ("DNN", "BILSTM", "ATTLSTM")
MODEL_FORMAT = "desc-model"
MODEL_VERSION = 1
GATES = ("f", "i", "o", "c")

DEFAULT_DNN_WIDTHS = (512, 256, 128, 64, 32)


@dataclass
class ModelParams:
    architecture: str
    n_classes: int
    config: Dict
    input_spec: Dict
    tensors: Dict[str, Tensor] = field(default_factory=dict)

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.n_classes < 2:
            raise ValueError("a classifier needs at least two classes")

    def parameters(self) -> List[Tensor]:
        return list(self.tensors.values())

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.architecture,
            self.n_classes,
            copy.deepcopy(self.config),
            copy.deepcopy(self.input_spec),
            {k: T.parameter(v.data.copy(), name=k) for k, v in self.tensors.items()},
        )

    # ------------------------------------------------------------ serialization

    def to_dict(self) -> Dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "architecture": self.architecture,
            "n_classes": self.n_classes,
            "config": self.config,
            "input_spec": self.input_spec,
            "tensors": [
                {"name": k, "shape": list(v.shape), "values": [float(x) for x in v.data.ravel()]}
                for k, v in self.tensors.items()
            ],
        }

    @classmethod
    def from_dict(cls, obj: Dict) -> "ModelParams":
        if obj.get("format") != MODEL_FORMAT or obj.get("version") != MODEL_VERSION:
            raise VersionMismatch(
                f"unsupported model document {obj.get('format')!r} version {obj.get('version')!r}"
            )
        tensors = {}
        for entry in obj["tensors"]:
            data = np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
            tensors[entry["name"]] = T.parameter(data, name=entry["name"])
        return cls(obj["architecture"], obj["n_classes"], obj["config"], obj["input_spec"], tensors)


def save_model(model: ModelParams, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=1, ensure_ascii=False), encoding="utf-8")


def load_model(path) -> ModelParams:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f"model file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise VersionMismatch(f"{path}: not a model document ({exc})") from None
    return ModelParams.from_dict(obj)


# ---------------------------------------------------------------- initialization


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _init_lstm(tensors, prefix, input_dim, hidden, rng):
    for g in GATES:
        tensors[f"{prefix}.W_{g}"] = T.parameter(xavier_uniform(rng, input_dim, hidden), f"{prefix}.W_{g}")
        tensors[f"{prefix}.U_{g}"] = T.parameter(xavier_uniform(rng, hidden, hidden), f"{prefix}.U_{g}")
        bias = np.ones(hidden) if g == "f" else np.zeros(hidden)
        tensors[f"{prefix}.b_{g}"] = T.parameter(bias, f"{prefix}.b_{g}")


def _init_dense(tensors, prefix, fan_in, fan_out, rng):
    tensors[f"{prefix}.W"] = T.parameter(xavier_uniform(rng, fan_in, fan_out), f"{prefix}.W")
    tensors[f"{prefix}.b"] = T.parameter(np.zeros(fan_out), f"{prefix}.b")


def init_dnn(input_dim: int, n_classes: int, widths=DEFAULT_DNN_WIDTHS, seed: int = 0, input_spec=None) -> ModelParams:
    rng = np.random.default_rng(seed)
    sizes = [input_dim, *widths, n_classes]
    tensors = {}
    for k, (a, b) in enumerate(zip(sizes[:-1], sizes[1:])):
        _init_dense(tensors, f"dense{k}", a, b, rng)
    spec = {"input_dim": input_dim, **(input_spec or {})}
    return ModelParams("DNN", n_classes, {"widths": list(widths)}, spec, tensors)


def init_bilstm(
    embedding_dim: int,
    n_classes: int,
    hidden: int = 64,
    dense: int = 128,
    max_len: int = 50,
    slope: float = 0.01,
    seed: int = 0,
    input_spec=None,
) -> ModelParams:
    rng = np.random.default_rng(seed)
    tensors = {}
    _init_lstm(tensors, "lstm1.fw", embedding_dim, hidden, rng)
    _init_lstm(tensors, "lstm1.bw", embedding_dim, hidden, rng)
    _init_dense(tensors, "mid", 2 * hidden, dense, rng)
    _init_lstm(tensors, "lstm2.fw", dense, hidden, rng)
    _init_lstm(tensors, "lstm2.bw", dense, hidden, rng)
    _init_dense(tensors, "head", 2 * hidden, n_classes, rng)
    config = {"hidden": hidden, "dense": dense, "slope": slope}
    spec = {"embedding_dim": embedding_dim, "max_len": max_len, **(input_spec or {})}
    return ModelParams("BILSTM", n_classes, config, spec, tensors)


def init_attention(
    embedding_dim: int,
    n_classes: int,
    hidden: int = 64,
    max_len: int = 50,
    slope: float = 0.01,
    seed: int = 0,
    input_spec=None,
) -> ModelParams:
    rng = np.random.default_rng(seed)
    tensors = {}
    _init_lstm(tensors, "lstm.fw", embedding_dim, hidden, rng)
    _init_lstm(tensors, "lstm.bw", embedding_dim, hidden, rng)
    tensors["att.w"] = T.parameter(xavier_uniform(rng, 2 * hidden, 1), "att.w")
    tensors["att.b"] = T.parameter(np.zeros(1), "att.b")
    _init_dense(tensors, "head", 2 * hidden, n_classes, rng)
    config = {"hidden": hidden, "slope": slope}
    spec = {"embedding_dim": embedding_dim, "max_len": max_len, **(input_spec or {})}
    return ModelParams("ATTLSTM", n_classes, config, spec, tensors)


# ---------------------------------------------------------------- sequence plumbing


def pad_sequences(sequences: Sequence[np.ndarray], max_len: int, dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Truncate to ``max_len`` and pre-pad with zeros.

    Returns ``(x, mask)`` with ``x`` of shape (batch, steps, dim) where ``steps``
    is the longest kept length in the batch.
    """
    kept = []
    for seq in sequences:
        seq = np.asarray(seq, dtype=np.float64)
        if seq.ndim != 2 or seq.shape[0] == 0:
            raise EmptySequence("every input sequence needs at least one step")
        if seq.shape[1] != dim:
            raise DimensionMismatch(f"sequence step has dimension {seq.shape[1]}, model expects {dim}")
        kept.append(seq[:max_len])
    steps = max(len(s) for s in kept)
    x = np.zeros((len(kept), steps, dim))
    mask = np.zeros((len(kept), steps))
    for b, seq in enumerate(kept):
        x[b, steps - len(seq) :] = seq
        mask[b, steps - len(seq) :] = 1.0
    return x, mask


def lstm_pass(model: ModelParams, prefix: str, inputs: List, mask: np.ndarray, reverse: bool = False):
    """Run one LSTM direction over a list of per-step inputs (each (batch, in)).

    Returns the per-step hidden states (in input order) and the final state.
    Steps with mask 0 carry the previous state through unchanged.
    """
    p = model.tensors
    hidden = p[f"{prefix}.U_f"].shape[0]
    W = T.concat([p[f"{prefix}.W_{g}"] for g in GATES], axis=1)
    U = T.concat([p[f"{prefix}.U_{g}"] for g in GATES], axis=1)
    b = T.concat([p[f"{prefix}.b_{g}"] for g in GATES], axis=0)
    batch = mask.shape[0]
    h = Tensor(np.zeros((batch, hidden)))
    c = Tensor(np.zeros((batch, hidden)))
    outputs = [None] * len(inputs)
    order = range(len(inputs) - 1, -1, -1) if reverse else range(len(inputs))
    for t in order:
        z = T.matmul(inputs[t], W) + T.matmul(h, U) + b
        f = T.sigmoid(T.narrow(z, 0, hidden))
        i = T.sigmoid(T.narrow(z, hidden, 2 * hidden))
        o = T.sigmoid(T.narrow(z, 2 * hidden, 3 * hidden))
        g = T.tanh(T.narrow(z, 3 * hidden, 4 * hidden))
        c_new = f * c + i * g
        h_new = o * T.tanh(c_new)
        m = mask[:, t : t + 1]
        if m.all():
            h, c = h_new, c_new
        else:
            h = h + m * (h_new - h)
            c = c + m * (c_new - c)
        outputs[t] = h
    return outputs, h


def bilstm_layer(model: ModelParams, prefix: str, inputs: List, mask: np.ndarray):
    fw, fw_last = lstm_pass(model, f"{prefix}.fw", inputs, mask)
    bw, bw_last = lstm_pass(model, f"{prefix}.bw", inputs, mask, reverse=True)
    states = [T.concat([a, b], axis=1) for a, b in zip(fw, bw)]
    return states, fw, bw, T.concat([fw_last, bw_last], axis=1)


def attention_pool(states: Tensor, mask: np.ndarray, w: Tensor, b: Tensor):
    """Score each step with tanh(h_t . w + b), normalize over unmasked steps,
    and return (weighted sum of states, weights)."""
    batch, steps, _ = states.shape
    scores = T.tanh(T.reshape(T.matmul(states, w), (batch, steps)) + b)
    weights = T.softmax(scores, axis=1, mask=mask)
    pooled = T.sum(states * T.reshape(weights, (batch, steps, 1)), axis=1)
    return pooled, weights


# ---------------------------------------------------------------- forward passes


def _dense(model, prefix, x):
    return T.matmul(x, model.tensors[f"{prefix}.W"]) + model.tensors[f"{prefix}.b"]


def dnn_logits(model: ModelParams, x: np.ndarray, rng=None, dropout: float = 0.0) -> Tensor:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_spec["input_dim"]:
        raise DimensionMismatch(
            f"DNN expects inputs of width {model.input_spec['input_dim']}, got shape {x.shape}"
        )
    n_layers = len(model.config["widths"]) + 1
    h = Tensor(x)
    for k in range(n_layers - 1):
        h = T.dropout(T.relu(_dense(model, f"dense{k}", h)), dropout, rng)
    return _dense(model, f"dense{n_layers - 1}", h)


def _sequence_inputs(model, sequences):
    x, mask = pad_sequences(sequences, model.input_spec["max_len"], model.input_spec["embedding_dim"])
    return [x[:, t, :] for t in range(x.shape[1])], mask


def bilstm_logits(model: ModelParams, sequences, rng=None, dropout: float = 0.0) -> Tensor:
    inputs, mask = _sequence_inputs(model, sequences)
    slope = model.config["slope"]
    states, _, _, _ = bilstm_layer(model, "lstm1", inputs, mask)
    mid = [T.dropout(T.leaky_relu(_dense(model, "mid", h), slope), dropout, rng) for h in states]
    _, _, _, final = bilstm_layer(model, "lstm2", mid, mask)
    return _dense(model, "head", T.dropout(final, dropout, rng))


def attention_logits(model: ModelParams, sequences, rng=None, dropout: float = 0.0, return_weights=False):
    inputs, mask = _sequence_inputs(model, sequences)
    states, _, _, _ = bilstm_layer(model, "lstm", inputs, mask)
    slope = model.config["slope"]
    stacked = T.stack([T.leaky_relu(h, slope) for h in states], axis=1)
    pooled, weights = attention_pool(stacked, mask, model.tensors["att.w"], model.tensors["att.b"])
    logits = _dense(model, "head", T.dropout(pooled, dropout, rng))
    return (logits, weights) if return_weights else logits


_LOGITS = {"DNN": dnn_logits, "BILSTM": bilstm_logits, "ATTLSTM": attention_logits}


def logits(model: ModelParams, inputs, rng=None, dropout: float = 0.0) -> Tensor:
    return _LOGITS[model.architecture](model, inputs, rng=rng, dropout=dropout)


def _probs(logit_tensor: Tensor) -> np.ndarray:
    return T.softmax(logit_tensor.data, axis=1).data


def dnn_forward(model: ModelParams, x) -> np.ndarray:
    """Confidence vector for one dense input vector."""
    return _probs(dnn_logits(model, np.asarray(x, dtype=np.float64)[None, :]))[0]


def bilstm_forward(model: ModelParams, sequence) -> np.ndarray:
    return _probs(bilstm_logits(model, [sequence]))[0]


def attention_forward(model: ModelParams, sequence) -> np.ndarray:
    return _probs(attention_logits(model, [sequence]))[0]


def predict_batch(model: ModelParams, inputs, batch_size: int = 256) -> np.ndarray:
    """Class probabilities, one row per input, order preserved."""
    n = len(inputs)
    if n == 0:
        return np.zeros((0, model.n_classes))
    out = []
    for lo in range(0, n, batch_size):
        out.append(_probs(logits(model, _slice(inputs, lo, lo + batch_size))))
    return np.vstack(out)


def _slice(inputs, lo, hi):
    if isinstance(inputs, np.ndarray):
        return inputs[lo:hi]
    return [inputs[i] for i in range(lo, min(hi, len(inputs)))]


def gather_rows(inputs, idx):
    if isinstance(inputs, np.ndarray):
        return inputs[idx]
    return [inputs[i] for i in idx]


# ---------------------------------------------------------------- training


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    clip_norm: float = 5.0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    patience: int = 3
    dropout: float = 0.0

    def __post_init__(self):
        for name in ("epochs", "batch_size", "clip_norm", "adam_eps", "patience"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("moment coefficients must lie in (0, 1)")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainResult:
    model: ModelParams
    losses: List[float]
    val_losses: List[float] = field(default_factory=list)
    best_epoch: int = 0


class Adam:
    def __init__(self, params: List[Tensor], cfg: TrainConfig):
        self.params = params
        self.cfg = cfg
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]
        self.t = 0

    def step(self):
        cfg = self.cfg
        self.t += 1
        grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        norm = np.sqrt(sum(float((g * g).sum()) for g in grads))
        if norm > cfg.clip_norm:
            grads = [g * (cfg.clip_norm / norm) for g in grads]
        c1 = 1.0 - cfg.beta1**self.t
        c2 = 1.0 - cfg.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * g * g
            p.data -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.adam_eps)


def _check_labels(labels, n_classes):
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise LabelOutOfRange(f"labels must lie in [0, {n_classes})")
    return labels


def evaluate_loss(model: ModelParams, inputs, labels, batch_size: int = 256) -> float:
    labels = np.asarray(labels, dtype=int)
    total = 0.0
    for lo in range(0, len(labels), batch_size):
        chunk = labels[lo : lo + batch_size]
        total += float(T.cross_entropy(logits(model, _slice(inputs, lo, lo + batch_size)), chunk).data) * len(chunk)
    return total / len(labels)


def train(
    model: ModelParams,
    inputs,
    labels,
    config: TrainConfig,
    validation: Optional[Tuple[object, Sequence[int]]] = None,
) -> TrainResult:
    """Minibatch Adam on mean cross-entropy.

    The input model is left untouched; a trained copy is returned together with
    the per-epoch mean training loss. With ``validation`` given, training stops
    once the validation loss has not improved for ``patience`` epochs and the
    best-scoring parameters are restored.
    """
    labels = _check_labels(labels, model.n_classes)
    if len(labels) == 0:
        raise EmptyDataset("training needs at least one sample")
    if len(inputs) != len(labels):
        raise DimensionMismatch(f"{len(inputs)} inputs but {len(labels)} labels")
    if validation is not None:
        val_inputs, val_labels = validation[0], _check_labels(validation[1], model.n_classes)
        if len(val_labels) == 0:
            validation = None

    model = model.copy()
    params = model.parameters()
    opt = Adam(params, config)
    rng = np.random.default_rng(config.seed)
    losses, val_losses = [], []
    best = (np.inf, 0, None)
    stale = 0
    n = len(labels)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            T.zero_grads(params)
            loss = T.cross_entropy(logits(model, gather_rows(inputs, idx), rng=rng, dropout=config.dropout), labels[idx])
            T.backward(loss)
            opt.step()
            total += float(loss.data) * len(idx)
        losses.append(total / n)
        if validation is not None:
            vl = evaluate_loss(model, val_inputs, val_labels)
            val_losses.append(vl)
            if vl < best[0]:
                best = (vl, epoch, {k: v.data.copy() for k, v in model.tensors.items()})
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    log.info("early stop at epoch %d (best %d)", epoch, best[1])
                    break
        log.debug("%s epoch %d loss %.5f", model.architecture, epoch, losses[-1])
    T.zero_grads(params)
    best_epoch = len(losses) - 1
    if best[2] is not None:
        for k, data in best[2].items():
            model.tensors[k].data = data
        best_epoch = best[1]
    return TrainResult(model, losses, val_losses, best_epoch)
