"""Sweep configuration and the flat ``key = value`` config file format."""

import re
from dataclasses import dataclass, field, fields

import numpy as np

from ..optim import L1_MODES

DATA_SOURCES = ("mnist-dir", "synthetic")


class ConfigError(ValueError):
    pass


def default_alphas():
    return [float(a) for a in np.logspace(-6, -1, 25)]


@dataclass
class SweepConfig:
    kernel_dims: list = field(default_factory=lambda: [5, 10, 25, 50, 75, 100])
    alphas: list = field(default_factory=default_alphas)
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    train_size: int = 5000
    test_size: int = 1000
    epochs: int = 40
    batch_size: int = 64
    lr: float = 0.05
    l1_mode: str = "proximal"
    regularize_biases: bool = False
    eps_sparsity: float = 1e-3
    eval_every: int = 10
    data_source: str = "mnist-dir"
    data_dir: str = None
    data_seed: int = 0
    synthetic_classes: int = 10
    synthetic_dim: int = 20
    synthetic_separation: float = 3.0
    workers: int = 1
    record_wall_time: bool = True

    def validate(self):
        for key in ("kernel_dims", "alphas", "seeds"):
            if not getattr(self, key):
                raise ConfigError(f"{key}: must be a nonempty list")
        if any(k < 1 for k in self.kernel_dims):
            raise ConfigError("kernel_dims: all entries must be >= 1")
        if len(set(self.kernel_dims)) != len(self.kernel_dims):
            raise ConfigError("kernel_dims: duplicate entries")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds: duplicate entries")
        if any(a <= 0 for a in self.alphas):
            raise ConfigError("alphas: all entries must be positive")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ConfigError("alphas: must be strictly increasing")
        for key in ("train_size", "test_size", "epochs", "batch_size", "eval_every", "workers",
                    "synthetic_classes", "synthetic_dim"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key}: must be >= 1")
        if not self.lr > 0:
            raise ConfigError("lr: must be > 0")
        if self.eps_sparsity < 0:
            raise ConfigError("eps_sparsity: must be >= 0")
        if self.l1_mode not in L1_MODES:
            raise ConfigError(f"l1_mode: must be one of {', '.join(L1_MODES)}")
        if self.data_source not in DATA_SOURCES:
            raise ConfigError(f"data_source: must be one of {', '.join(DATA_SOURCES)}")
        return self


_LOGSPACE = re.compile(r"^logspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)$")


def _parse_bool(text):
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_value(key, text, kind):
    if key == "alphas":
        m = _LOGSPACE.match(text)
        if m:
            lo, hi, num = float(m.group(1)), float(m.group(2)), int(m.group(3))
            return [float(a) for a in np.logspace(np.log10(lo), np.log10(hi), num)]
        return [float(v) for v in text.split(",") if v.strip()]
    if key in ("kernel_dims", "seeds"):
        return [int(v) for v in text.split(",") if v.strip()]
    if kind is bool:
        return _parse_bool(text)
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


def parse_config(text):
    """Parse ``key = value`` lines (``#`` comments allowed). Unknown keys are errors."""
    kinds = {f.name: type(f.default) if f.default is not None else str for f in fields(SweepConfig)}
    for f in fields(SweepConfig):
        if f.name in ("kernel_dims", "alphas", "seeds"):
            kinds[f.name] = list
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in kinds:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _parse_value(key, value, kinds[key])
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return SweepConfig(**values).validate()


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg):
    lines = []
    for f in fields(SweepConfig):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if isinstance(v, list):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
