"""Dataset ingestion, artifact persistence and the train/evaluate/predict/extract/profile commands."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import plotting
from .config import RunConfig
from .ensemble import MEMBER_ORDER, EnsembleModel, EnsembleWeights, ensemble_predict
from .errors import DuplicateId, MalformedRow, MissingArtifact, MissingFile, UnparseableLabel, VersionMismatch
from .evaluation import (
    class_feature_profile,
    classification_metrics,
    positive_class_metrics,
    roc_auc,
    sentiment_metrics,
)
from .features import FEATURE_NAMES, TfidfModel, extract_matrix
from .models import load_model, save_model
from .pipeline import decode_scores, ensemble_inputs, fit_ensemble
from .resources import Resources, load_resources
from .text import Document, tokenize

log = logging.getLogger(__name__)

MANIFEST_FORMAT = "desc-ensemble"
MANIFEST_VERSION = 1
MEMBER_FILES = {"DNN": "models/dnn.json", "BILSTM": "models/bilstm.json", "ATTLSTM": "models/attlstm.json"}
TFIDF_FILE = "models/tfidf.json"
UNLABELED = ("", "?", "_")


# ---------------------------------------------------------------- ingestion


@dataclass
class LabelMap:
    """Class names in id order."""

    task: str
    classes: List[str]

    @property
    def ids(self) -> Dict[str, int]:
        return {c: i for i, c in enumerate(self.classes)}

    @classmethod
    def sentiment11(cls) -> "LabelMap":
        return cls("sentiment11", [str(s) for s in range(-5, 6)])

    @classmethod
    def from_names(cls, names, positive: Optional[str] = None) -> "LabelMap":
        distinct = sorted(set(names), key=lambda s: (0, int(s)) if _is_int(s) else (1, s))
        if positive is not None:
            if positive not in distinct:
                raise UnparseableLabel(f"positive class {positive!r} does not occur in the data")
            distinct.remove(positive)
            distinct.append(positive)
        return cls("binary", distinct)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def _parse_score(raw: str, path, lineno) -> int:
    try:
        score = int(raw)
    except ValueError:
        raise UnparseableLabel(f"{path}: row {lineno}: sentiment label {raw!r} is not an integer") from None
    if not -5 <= score <= 5:
        raise UnparseableLabel(f"{path}: row {lineno}: sentiment score {score} outside [-5, 5]")
    return score


def read_rows(path) -> List[Tuple[int, str, str, str]]:
    """``(line number, id, label, text)`` for each data row; ``#`` lines are headers/comments."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"input file not found: {path}")
    rows, seen = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t", 2)
            if len(fields) != 3:
                raise MalformedRow(path, lineno, "expected id<TAB>label<TAB>text")
            row_id, label, text = fields[0].strip(), fields[1].strip(), fields[2]
            if not row_id:
                raise MalformedRow(path, lineno, "empty id")
            if row_id in seen:
                raise DuplicateId(f"{path}: row {lineno}: duplicate id {row_id!r}")
            seen.add(row_id)
            rows.append((lineno, row_id, label, text))
    return rows


def ingest(path, task: str, label_map: Optional[LabelMap] = None, allow_unlabeled: bool = False,
           positive_class: Optional[str] = None, pretagged: bool = False) -> Tuple[List[Document], LabelMap]:
    """Read a ``id<TAB>label<TAB>text`` file into tokenized documents.

    For binary tasks the label map is built from the data unless one is given
    (evaluation reuses the training map); sentiment labels are integers in [-5, 5].
    """
    rows = read_rows(path)
    if task == "sentiment11":
        label_map = LabelMap.sentiment11()
    elif label_map is None:
        names = [label for _, _, label, _ in rows if label not in UNLABELED]
        label_map = LabelMap.from_names(names, positive_class)
        if len(label_map.classes) != 2 and rows:
            raise UnparseableLabel(f"{path}: binary task needs exactly 2 label names, found {label_map.classes}")
    ids = label_map.ids
    docs = []
    for lineno, row_id, label, text in rows:
        doc = tokenize(text, pretagged=pretagged)
        doc.doc_id = row_id
        if label in UNLABELED:
            if not allow_unlabeled:
                raise UnparseableLabel(f"{path}: row {lineno}: missing label")
        elif task == "sentiment11":
            doc.score = _parse_score(label, path, lineno)
            doc.label = doc.score + 5
        else:
            if label not in ids:
                raise UnparseableLabel(f"{path}: row {lineno}: unknown label {label!r}")
            doc.label = ids[label]
        docs.append(doc)
    return docs, label_map


# ---------------------------------------------------------------- artifacts


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _json(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False, sort_keys=False) + "\n"


def weight_report(cv_f1: Dict[str, float], weights: EnsembleWeights, cfg: RunConfig) -> Tuple[str, str]:
    """(JSON, aligned text) describing the ensemble weights."""
    obj = {
        "members": list(MEMBER_ORDER),
        "cv_folds": cfg.cv_folds,
        "f1_flavor": cfg.f1_flavor,
        "cv_f1": {a: cv_f1[a] for a in MEMBER_ORDER},
        "weights": {a: float(w) for a, w in zip(MEMBER_ORDER, weights.w)},
    }
    lines = [f"{'member':<10}{'cv_f1':>12}{'weight':>12}"]
    for a, w in zip(MEMBER_ORDER, weights.w):
        lines.append(f"{a:<10}{cv_f1[a]:>12.6f}{w:>12.6f}")
    return _json(obj), "\n".join(lines) + "\n"


def save_ensemble(out: Path, fitted, label_map: LabelMap, cfg: RunConfig) -> Dict:
    members = []
    for arch in MEMBER_ORDER:
        path = out / MEMBER_FILES[arch]
        path.parent.mkdir(parents=True, exist_ok=True)
        save_model(fitted.ensemble.members[arch], path)
        members.append({"name": arch, "architecture": arch, "path": MEMBER_FILES[arch], "sha256": sha256_file(path)})
    tfidf_path = _write(out / TFIDF_FILE, fitted.tfidf.to_json())
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "task": label_map.task,
        "classes": label_map.classes,
        "members": members,
        "tfidf": {"path": TFIDF_FILE, "sha256": sha256_file(tfidf_path)},
        "weights": fitted.ensemble.weights.to_dict(),
        "config": cfg.to_dict(),
    }
    _write(out / "manifest.json", _json(manifest))
    _write(out / "labels.json", _json({"task": label_map.task, "classes": label_map.classes}))
    return manifest


@dataclass
class LoadedEnsemble:
    manifest: Dict
    ensemble: EnsembleModel
    tfidf: TfidfModel
    label_map: LabelMap

    @property
    def config(self) -> Dict:
        return self.manifest["config"]


def load_ensemble(model_dir) -> LoadedEnsemble:
    """Load the manifest and members, refusing any member whose digest does not match."""
    model_dir = Path(model_dir)
    manifest_path = model_dir / "manifest.json"
    if not manifest_path.is_file():
        raise MissingArtifact(f"no manifest in {model_dir}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise VersionMismatch(f"{manifest_path}: unreadable manifest ({exc})") from None
    if manifest.get("format") != MANIFEST_FORMAT or manifest.get("version") != MANIFEST_VERSION:
        raise VersionMismatch(f"unsupported manifest {manifest.get('format')!r} v{manifest.get('version')!r}")

    def checked(entry):
        path = model_dir / entry["path"]
        if not path.is_file():
            raise MissingArtifact(f"artifact missing: {path}")
        if sha256_file(path) != entry["sha256"]:
            raise VersionMismatch(f"digest mismatch for {path}")
        return path

    members = {e["name"]: load_model(checked(e)) for e in manifest["members"]}
    tfidf = TfidfModel.from_json(checked(manifest["tfidf"]).read_text(encoding="utf-8"))
    w = manifest["weights"]
    weights = EnsembleWeights(np.array(w["w"]), np.array(w["source_f1"]))
    ensemble = EnsembleModel({a: members[a] for a in MEMBER_ORDER}, weights)
    return LoadedEnsemble(manifest, ensemble, tfidf, LabelMap(manifest["task"], manifest["classes"]))


def digest_tree(root) -> Dict[str, str]:
    """sha256 of every file below ``root`` keyed by relative path."""
    root = Path(root)
    return {str(p.relative_to(root)): sha256_file(p) for p in sorted(root.rglob("*")) if p.is_file()}


# ---------------------------------------------------------------- commands


def _resources_for(cfg: RunConfig) -> Resources:
    return load_resources(cfg.resources)


def cmd_train(cfg: RunConfig, input_path, out_dir) -> Dict:
    """Train the three members and the ensemble weights; write everything under ``out_dir``.

    Work happens in a staging directory that replaces the outputs only on
    success, so a failed run leaves no partial artifacts.
    """
    seed = cfg.require_seed()
    out_dir = Path(out_dir)
    docs, label_map = ingest(input_path, cfg.task, positive_class=cfg.positive_class, pretagged=cfg.pretagged)
    labels = np.array([d.label for d in docs])
    resources = _resources_for(cfg)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".desc-train-", dir=out_dir.parent))
    try:
        fitted = fit_ensemble(
            docs, labels, resources, cfg.settings(), seed, cfg.cv_folds, cfg.f1_flavor,
            positive=1,
        )
        manifest = save_ensemble(staging, fitted, label_map, cfg)
        report_json, report_txt = weight_report(fitted.cv_f1, fitted.ensemble.weights, cfg)
        _write(staging / "reports" / "weights.json", report_json)
        _write(staging / "reports" / "weights.txt", report_txt)
        traces = {a: m.result.losses for a, m in fitted.members.items()}
        _write(staging / "reports" / "train_losses.json", _json(
            {a: {"train": m.result.losses, "validation": m.result.val_losses, "best_epoch": m.result.best_epoch}
             for a, m in fitted.members.items()}))
        plotting.plot_loss_traces(traces, staging / "reports" / "loss_curves.png")
        plotting.plot_weights(fitted.cv_f1, fitted.ensemble.weights.w, staging / "reports" / "weights.png")
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in ("models", "reports", "manifest.json", "labels.json"):
            target = out_dir / name
            if target.is_dir():
                shutil.rmtree(target)
            elif target.exists():
                target.unlink()
            shutil.move(str(staging / name), str(target))
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    log.info("trained ensemble written to %s", out_dir)
    return manifest


def _load_for_inference(model_dir, cfg: Optional[RunConfig]):
    loaded = load_ensemble(model_dir)
    saved = loaded.config
    resources = load_resources(cfg.resources if cfg is not None else saved["resources"])
    decode = cfg.decode if cfg is not None else saved.get("decode", "argmax")
    pretagged = cfg.pretagged if cfg is not None else saved.get("pretagged", False)
    return loaded, resources, decode, pretagged


def _predict_all(loaded: LoadedEnsemble, docs, resources):
    """Member probability matrices and the combined ensemble output."""
    n_classes = loaded.ensemble.n_classes
    if not docs:
        empty = np.zeros((0, n_classes))
        return {a: empty for a in MEMBER_ORDER}, np.zeros(0, dtype=int), empty
    inputs = ensemble_inputs(docs, resources, loaded.ensemble.members["DNN"], loaded.tfidf)
    member_probs = loaded.ensemble.member_probs(inputs)
    out = ensemble_predict(loaded.ensemble, inputs)
    return member_probs, np.array([c for c, _ in out]), np.vstack([v for _, v in out])


def metrics_table(report: Dict) -> str:
    keys = sorted({k for m in report.values() for k in m})
    lines = [f"{'model':<10}" + "".join(f"{k:>20}" for k in keys)]
    for name, metrics in report.items():
        lines.append(f"{name:<10}" + "".join(f"{metrics.get(k, float('nan')):>20.6f}" for k in keys))
    return "\n".join(lines) + "\n"


def cmd_evaluate(cfg: Optional[RunConfig], model_dir, input_path, out_dir=None) -> Dict:
    """Per-member and ensemble metrics on a labelled file (unlabelled rows are predicted but not scored)."""
    loaded, resources, decode, pretagged = _load_for_inference(model_dir, cfg)
    out_dir = Path(out_dir) if out_dir is not None else Path(model_dir) / "evaluation"
    docs, _ = ingest(input_path, loaded.label_map.task, loaded.label_map, allow_unlabeled=True, pretagged=pretagged)
    member_probs, _, combined = _predict_all(loaded, docs, resources)
    scored = np.array([d.label is not None for d in docs], dtype=bool)
    gold = np.array([d.label for d in docs if d.label is not None], dtype=int)
    all_probs = {**member_probs, "DESC": combined}
    report, curves = {}, {}
    for name, probs in all_probs.items():
        probs = probs[scored]
        if loaded.label_map.task == "sentiment11":
            cosine, mse = sentiment_metrics(gold - 5, decode_scores(probs, decode))
            report[name] = {"cosine": cosine, "mse": mse}
            continue
        predicted = probs.argmax(axis=1)
        macro = classification_metrics(gold, predicted, classes=[0, 1])
        positive = positive_class_metrics(gold, predicted, positive=1)
        entry = {
            "accuracy": macro.accuracy,
            "precision": macro.precision,
            "recall": macro.recall,
            "f1": macro.f1,
            "positive_precision": positive.precision,
            "positive_recall": positive.recall,
            "positive_f1": positive.f1,
        }
        if len(set(gold.tolist())) == 2:
            curve = roc_auc(gold, probs[:, 1])
            entry["auc"] = curve.auc
            curves[name] = curve
        report[name] = entry
    _write(out_dir / "metrics.json", _json({"task": loaded.label_map.task, "n_scored": int(scored.sum()),
                                             "models": report}))
    _write(out_dir / "metrics.txt", metrics_table(report))
    for name, curve in curves.items():
        _write(out_dir / f"roc_{name.lower()}.csv", curve.to_csv())
    if curves:
        plotting.plot_roc(curves, out_dir / "roc.png")
    return report


def cmd_predict(model_dir, input_path, out_dir=None, cfg: Optional[RunConfig] = None) -> str:
    """TSV of id, predicted class name and combined confidence per class; written to
    ``out_dir/predictions.tsv`` when given. Returns the TSV text."""
    loaded, resources, decode, pretagged = _load_for_inference(model_dir, cfg)
    docs, _ = ingest(input_path, loaded.label_map.task, loaded.label_map, allow_unlabeled=True, pretagged=pretagged)
    _, predicted, combined = _predict_all(loaded, docs, resources)
    classes = loaded.label_map.classes
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    header = ["id", "prediction"] + [f"p_{c}" for c in classes]
    if loaded.label_map.task == "sentiment11":
        header.append("score")
        scores = decode_scores(combined, decode) if len(docs) else np.zeros(0)
    writer.writerow(header)
    for i, doc in enumerate(docs):
        row = [doc.doc_id, classes[predicted[i]], *(repr(float(p)) for p in combined[i])]
        if loaded.label_map.task == "sentiment11":
            row.append(repr(float(scores[i])))
        writer.writerow(row)
    text = buf.getvalue()
    if out_dir is not None:
        _write(Path(out_dir) / "predictions.tsv", text)
    return text


def features_csv(matrix: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_NAMES)
    for row in matrix:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def cmd_extract_features(cfg: RunConfig, input_path, out_dir=None) -> str:
    """CSV with the 44 canonical feature names as header, one row per input row in order."""
    rows = read_rows(input_path)
    docs = [tokenize(text, pretagged=cfg.pretagged) for _, _, _, text in rows]
    text = features_csv(extract_matrix(docs, _resources_for(cfg)))
    if out_dir is not None:
        _write(Path(out_dir) / "features.csv", text)
    return text


def cmd_profile(cfg: RunConfig, input_path, out_dir=None):
    """Per-class mean feature table (CSV + JSON) and its radar chart."""
    docs, label_map = ingest(input_path, cfg.task, positive_class=cfg.positive_class, pretagged=cfg.pretagged)
    labels = np.array([d.label for d in docs])
    profile = class_feature_profile(docs, labels, _resources_for(cfg),
                                    class_names={i: c for i, c in enumerate(label_map.classes)},
                                    n_classes=None if cfg.task == "sentiment11" else len(label_map.classes))
    if out_dir is not None:
        out_dir = Path(out_dir)
        _write(out_dir / "profile.csv", profile.to_csv())
        _write(out_dir / "profile.json", profile.to_json() + "\n")
        plotting.plot_profile(profile, out_dir / "profile.png")
    return profile
