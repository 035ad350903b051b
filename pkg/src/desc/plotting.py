"""Report figures rendered straight to files (no GUI backend, no pyplot state)."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping, Sequence

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "figsize": (5.0, 4.0),
    "dpi": 120,
    "fontsize": 9,
}
# Fig. 5-style radar uses a handful of readable features; all 44 crowd the axes.
PROFILE_FEATURES = (
    "n_words",
    "avg_word_length",
    "punctuation_freq",
    "n_elongated",
    "n_all_caps",
    "vader_pos",
    "vader_neg",
    "vader_contrast",
    "mood_happiness",
    "mood_anger",
    "flesch",
    "gunning_fog",
)


def _new_figure(**kw):
    fig = Figure(figsize=kw.pop("figsize", STYLE["figsize"]), dpi=STYLE["dpi"])
    FigureCanvasAgg(fig)
    return fig


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None})
    return path


def plot_roc(curves: Mapping[str, object], path) -> Path:
    """One ROC line per model, AUC in the legend."""
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    ax.plot([0, 1], [0, 1], color="0.7", lw=0.8, ls="--")
    for name, curve in curves.items():
        ax.plot(curve.fpr, curve.tpr, lw=1.4, label=f"{name} (AUC {curve.auc:.3f})")
    ax.set_xlabel("False positive rate", fontsize=STYLE["fontsize"])
    ax.set_ylabel("True positive rate", fontsize=STYLE["fontsize"])
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.legend(loc="lower right", fontsize=STYLE["fontsize"] - 1, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_loss_traces(traces: Mapping[str, Sequence[float]], path) -> Path:
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    for name, losses in traces.items():
        ax.plot(np.arange(1, len(losses) + 1), losses, marker="o", ms=3, lw=1.2, label=name)
    ax.set_xlabel("epoch", fontsize=STYLE["fontsize"])
    ax.set_ylabel("mean cross-entropy", fontsize=STYLE["fontsize"])
    ax.legend(fontsize=STYLE["fontsize"] - 1, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_profile(profile, path, features: Sequence[str] = PROFILE_FEATURES) -> Path:
    """Radar chart of per-class feature means.

    Each spoke is scaled by the largest absolute class mean on it so features
    with different units share one axis.
    """
    names = [f for f in features if f in profile.names]
    cols = [profile.names.index(f) for f in names]
    values = profile.means[:, cols]
    peak = np.abs(values).max(axis=0)
    values = values / np.where(peak > 0, peak, 1.0)
    angles = np.linspace(0, 2 * np.pi, len(names), endpoint=False)
    closed = np.r_[angles, angles[:1]]

    fig = _new_figure(figsize=(6.0, 6.0))
    ax = fig.add_subplot(1, 1, 1, projection="polar")
    for cls, row in zip(profile.classes, values):
        ring = np.r_[row, row[:1]]
        ax.plot(closed, ring, lw=1.4, label=str(cls))
        ax.fill(closed, ring, alpha=0.12)
    ax.set_xticks(angles)
    ax.set_xticklabels(names, fontsize=STYLE["fontsize"] - 1)
    ax.set_yticklabels([])
    ax.legend(loc="upper right", bbox_to_anchor=(1.15, 1.1), fontsize=STYLE["fontsize"], frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_weights(cv_f1: Dict[str, float], weights: Sequence[float], path) -> Path:
    fig = _new_figure(figsize=(5.0, 3.2))
    ax = fig.add_subplot(1, 1, 1)
    names = list(cv_f1)
    x = np.arange(len(names))
    ax.bar(x - 0.18, [cv_f1[n] for n in names], width=0.36, label="CV F1")
    ax.bar(x + 0.18, list(weights), width=0.36, label="weight")
    ax.set_xticks(x)
    ax.set_xticklabels(names, fontsize=STYLE["fontsize"])
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=STYLE["fontsize"] - 1, frameon=False)
    fig.tight_layout()
    return _save(fig, path)
