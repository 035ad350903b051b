"""Run configuration: a flat ``key = value`` text file, validated fail-closed."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from .errors import ConfigError
from .models import DEFAULT_DNN_WIDTHS, TrainConfig
from .pipeline import ModelSettings
from .resources import BUILTIN_FILES, resolve_resource

TASKS = ("binary", "sentiment11")
RESOURCE_KEYS = tuple(BUILTIN_FILES)

_INT_KEYS = {"epochs", "batch_size", "patience", "hidden", "dense", "max_len", "min_df", "cv_folds", "seed"}
_FLOAT_KEYS = {
    "learning_rate", "clip_norm", "beta1", "beta2", "adam_eps", "dropout", "leaky_slope", "validation_fraction",
}
_STR_KEYS = {"task", "positive_class", "f1_flavor", "decode", "output_dir"} | set(RESOURCE_KEYS)
_BOOL_KEYS = {"pretagged"}
_LIST_KEYS = {"dnn_widths"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _BOOL_KEYS | _LIST_KEYS


@dataclass
class RunConfig:
    task: str = "binary"
    seed: Optional[int] = None
    positive_class: Optional[str] = None
    resources: Dict[str, str] = field(default_factory=lambda: {k: "builtin" for k in RESOURCE_KEYS})
    pretagged: bool = False
    train: TrainConfig = field(default_factory=TrainConfig)
    hidden: int = 64
    dense: int = 128
    dnn_widths: tuple = DEFAULT_DNN_WIDTHS
    max_len: int = 50
    leaky_slope: float = 0.01
    min_df: int = 2
    validation_fraction: float = 0.1
    cv_folds: int = 5
    f1_flavor: str = "macro"
    decode: str = "argmax"
    output_dir: Optional[str] = None

    @property
    def n_classes(self) -> int:
        return 2 if self.task == "binary" else 11

    def settings(self) -> ModelSettings:
        return ModelSettings(
            n_classes=self.n_classes,
            hidden=self.hidden,
            dense=self.dense,
            dnn_widths=tuple(self.dnn_widths),
            max_len=self.max_len,
            leaky_slope=self.leaky_slope,
            min_df=self.min_df,
            validation_fraction=self.validation_fraction,
            train=self.train,
        )

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required: set `seed` in the config or pass --seed")
        return self.seed

    def validate(self) -> "RunConfig":
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.f1_flavor not in ("macro", "positive"):
            raise ConfigError(f"f1_flavor must be macro or positive, got {self.f1_flavor!r}")
        if self.decode not in ("argmax", "expectation"):
            raise ConfigError(f"decode must be argmax or expectation, got {self.decode!r}")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be at least 2")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError("validation_fraction must lie in [0, 1)")
        for name in ("hidden", "dense", "max_len", "min_df"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not self.dnn_widths or any(w < 1 for w in self.dnn_widths):
            raise ConfigError("dnn_widths must be a non-empty list of positive integers")
        for key, value in self.resources.items():
            path = resolve_resource(key, value)
            if not path.is_file():
                raise ConfigError(f"resource {key} not found: {path}")
        return self

    def to_dict(self) -> Dict:
        return {
            "task": self.task,
            "seed": self.seed,
            "positive_class": self.positive_class,
            "resources": dict(self.resources),
            "pretagged": self.pretagged,
            "train": self.train.to_dict(),
            "hidden": self.hidden,
            "dense": self.dense,
            "dnn_widths": list(self.dnn_widths),
            "max_len": self.max_len,
            "leaky_slope": self.leaky_slope,
            "min_df": self.min_df,
            "validation_fraction": self.validation_fraction,
            "cv_folds": self.cv_folds,
            "f1_flavor": self.f1_flavor,
            "decode": self.decode,
        }


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected `key = value`")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _convert(key: str, value: str, source: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            lowered = value.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return lowered in ("true", "1", "yes")
        if key in _LIST_KEYS:
            return tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{source}: bad value for {key}: {value!r}") from None
    return value


def build_config(values: Dict[str, str], base_dir: Optional[Path] = None, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    train_kwargs = {}
    train_fields = set(TrainConfig.__dataclass_fields__) - {"seed"}
    for key, raw in values.items():
        value = _convert(key, raw, source)
        if key in RESOURCE_KEYS:
            if value != "builtin" and base_dir is not None and not Path(value).is_absolute():
                value = str((base_dir / value).resolve())
            cfg.resources[key] = value
        elif key in train_fields:
            train_kwargs[key] = value
        else:
            setattr(cfg, key, value)
    try:
        cfg.train = TrainConfig(**train_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def load_config(path=None, seed: Optional[int] = None) -> RunConfig:
    """Read a config file (or start from defaults) and apply a command-line seed."""
    if path is None:
        cfg = RunConfig()
    else:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        values = parse_config_text(path.read_text(encoding="utf-8"), str(path))
        cfg = build_config(values, path.parent, str(path))
    if seed is not None:
        cfg.seed = seed
    if cfg.seed is not None:
        cfg.train = TrainConfig(**{**cfg.train.to_dict(), "seed": cfg.seed})
    return cfg.validate()
