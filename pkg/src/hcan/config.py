"""Run configuration and its ``key = value`` INI representation.

Sections mirror the modules: ``[data]``, ``[model]``, ``[loss]``,
``[train]``, ``[ablation]``, ``[output]``.  Unknown sections or keys are
rejected so a typo can never silently fall back to a default.
"""

import configparser
import hashlib
from dataclasses import asdict, dataclass, field, replace

from .errors import ConfigError
from .model import AblationFlags
from .pipeline.losses import LossWeights


@dataclass(frozen=True)
class DatasetConfig:
    path: str = ""
    columns: tuple = ()
    lookback: int = 336
    horizon: int = 96
    split: str = "ratio"  # ratio | ett-hour | ett-minute
    ratios: tuple = (0.6, 0.2, 0.2)
    normalization: str = "zscore"  # zscore | none

    def __post_init__(self):
        if self.lookback < 1 or self.horizon < 1:
            raise ConfigError("lookback and horizon must be >= 1")
        if self.split not in ("ratio", "ett-hour", "ett-minute"):
            raise ConfigError(f"unknown split mode {self.split!r}")
        if len(self.ratios) != 3 or abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ConfigError(f"split ratios must sum to 1, got {self.ratios}")
        if self.normalization not in ("zscore", "none"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")


@dataclass(frozen=True)
class RunConfig:
    data: DatasetConfig = field(default_factory=DatasetConfig)
    backbone: str = "dlinear"
    kernel_size: int = 25
    hidden: int = 512
    class_counts: tuple = (1, 2, 4)
    weights: LossWeights = field(default_factory=LossWeights)
    lr: float = 5e-4
    epochs: int = 30
    patience: int = 5
    batch_size: int = 32
    eval_batch_size: int = 256
    seed: int = 2021
    flags: AblationFlags = field(default_factory=AblationFlags)
    out_dir: str = "runs"

    def __post_init__(self):
        if self.backbone not in ("linear", "dlinear"):
            raise ConfigError(f"unknown backbone {self.backbone!r}; choose 'linear' or 'dlinear'")
        if self.epochs < 1 or self.batch_size < 1 or self.hidden < 1:
            raise ConfigError("epochs, batch_size and hidden must be >= 1")
        if self.lr <= 0:
            raise ConfigError(f"learning rate must be > 0, got {self.lr}")

    def with_updates(self, **kw):
        return replace(self, **kw)

    # -------------------------------------------------------------- INI

    def to_ini(self):
        cp = configparser.ConfigParser()
        for section, items in _sections(self).items():
            cp[section] = {k: _fmt(v) for k, v in items.items()}
        lines = []
        for section in cp.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in cp[section].items())
            lines.append("")
        return "\n".join(lines)

    def hash(self):
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]

    def to_dict(self):
        return {s: dict(items) for s, items in _sections(self).items()}


def _sections(cfg):
    return {
        "data": asdict(cfg.data),
        "model": {
            "backbone": cfg.backbone,
            "kernel_size": cfg.kernel_size,
            "hidden": cfg.hidden,
            "class_counts": cfg.class_counts,
        },
        "loss": asdict(cfg.weights),
        "train": {
            "lr": cfg.lr,
            "epochs": cfg.epochs,
            "patience": cfg.patience,
            "batch_size": cfg.batch_size,
            "eval_batch_size": cfg.eval_batch_size,
            "seed": cfg.seed,
        },
        "ablation": cfg.flags.as_dict(),
        "output": {"out_dir": cfg.out_dir},
    }


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


_BOOL = {"true": True, "yes": True, "1": True, "on": True, "false": False, "no": False, "0": False, "off": False}


def _parse_value(raw, template, key):
    raw = raw.strip()
    try:
        if isinstance(template, bool):
            return _BOOL[raw.lower()]
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, tuple):
            if not raw:
                return ()
            items = [x.strip() for x in raw.split(",")]
            if key == "columns":
                return tuple(items)
            if key == "class_counts":
                return tuple(int(x) for x in items)
            return tuple(float(x) for x in items)
        return raw
    except (ValueError, KeyError):
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None


def parse_config(text):
    """Parse INI text into a RunConfig, starting from defaults."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    defaults = RunConfig()
    sections = _sections(defaults)
    resolved = {s: dict(items) for s, items in sections.items()}
    for section in cp.sections():
        if section not in sections:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp[section].items():
            if key not in sections[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
            resolved[section][key] = _parse_value(raw, sections[section][key], key)
    model, train = resolved["model"], resolved["train"]
    return RunConfig(
        data=DatasetConfig(**resolved["data"]),
        backbone=model["backbone"],
        kernel_size=model["kernel_size"],
        hidden=model["hidden"],
        class_counts=model["class_counts"],
        weights=LossWeights(**resolved["loss"]),
        lr=train["lr"],
        epochs=train["epochs"],
        patience=train["patience"],
        batch_size=train["batch_size"],
        eval_batch_size=train["eval_batch_size"],
        seed=train["seed"],
        flags=AblationFlags(**resolved["ablation"]),
        out_dir=resolved["output"]["out_dir"],
    )


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def config_from_dict(d):
    """Inverse of ``RunConfig.to_dict`` (via the INI text path)."""
    cp = configparser.ConfigParser()
    for section, items in d.items():
        cp[section] = {k: _fmt(tuple(v) if isinstance(v, list) else v) for k, v in items.items()}
    lines = []
    for section in cp.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in cp[section].items())
    return parse_config("\n".join(lines))


