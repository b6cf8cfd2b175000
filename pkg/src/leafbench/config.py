"""JSON run configuration.

Example::

    {
      "corpus_dir": "corpus/",
      "output_dir": "out/",
      "master_seed": 20240501,
      "noises": [{"kind": "gaussian", "variance": 0.01}, {"kind": "salt_pepper"}],
      "filters": ["mean", {"kind": "nlm", "h": 10}],
      "experiments": ["E01", "E06", "E09"],
      "metric_config": {"ssim_window": 7},
      "timing": {"image_count": 500, "repetitions": 3},
      "threads": 1
    }

Only ``corpus_dir``, ``output_dir`` and ``master_seed`` are required; the
lists default to the full grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigError
from .filters import FilterSpec, default_filters
from .metrics import MetricConfig
from .noise import NoiseSpec, default_noises
from .pipeline import EXPERIMENT_IDS, GridSpec, experiment

REQUIRED = ("corpus_dir", "output_dir", "master_seed")


@dataclass(frozen=True)
class TimingConfig:
    image_count: int = 500
    repetitions: int = 3
    noise: Optional[str] = "gaussian"


@dataclass(frozen=True)
class RunConfig:
    corpus_dir: Path
    output_dir: Path
    master_seed: int
    noises: Tuple[NoiseSpec, ...] = field(default_factory=lambda: tuple(default_noises()))
    filters: Tuple[FilterSpec, ...] = field(default_factory=lambda: tuple(default_filters()))
    experiments: Tuple[str, ...] = EXPERIMENT_IDS
    metric_config: MetricConfig = MetricConfig()
    timing: TimingConfig = TimingConfig()
    image_size: int = 256
    threads: Optional[int] = None

    def grid_spec(self, threads: Optional[int] = None) -> GridSpec:
        return GridSpec(
            noises=list(self.noises),
            filters=list(self.filters),
            experiments=list(self.experiments),
            master_seed=self.master_seed,
            metric_config=self.metric_config,
            image_size=(self.image_size, self.image_size),
            threads=threads or self.threads or 1,
        )


def _build(cls, name: str, value):
    if isinstance(value, str) and cls in (NoiseSpec, FilterSpec):
        value = {"kind": value}
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object, got {type(value).__name__}")
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"{name}: unknown field(s) {', '.join(unknown)}")
    try:
        return cls(**value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _list(raw: dict, key: str, cls) -> Optional[tuple]:
    if key not in raw:
        return None
    items = raw[key]
    if not isinstance(items, list) or not items:
        raise ConfigError(f"{key}: must be a non-empty list")
    return tuple(_build(cls, f"{key}[{i}]", v) for i, v in enumerate(items))


def config_from_dict(raw: dict, base_dir: Optional[Path] = None) -> RunConfig:
    """Validate a decoded JSON object; relative paths resolve against ``base_dir``."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    for key in REQUIRED:
        if key not in raw or raw[key] is None:
            raise ConfigError(f"{key}: missing required field")
    allowed = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")

    base = Path(base_dir) if base_dir is not None else Path.cwd()
    corpus = base / raw["corpus_dir"]
    if not corpus.is_dir():
        raise ConfigError(f"corpus_dir: {corpus} is not a directory")
    seed = raw["master_seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError("master_seed: must be an integer in [0, 2**64)")

    kwargs = dict(corpus_dir=corpus, output_dir=base / raw["output_dir"], master_seed=seed)
    noises = _list(raw, "noises", NoiseSpec)
    if noises is not None:
        kwargs["noises"] = noises
    filters = _list(raw, "filters", FilterSpec)
    if filters is not None:
        kwargs["filters"] = filters
    if "experiments" in raw:
        exps = raw["experiments"]
        if not isinstance(exps, list) or not exps:
            raise ConfigError("experiments: must be a non-empty list")
        try:
            kwargs["experiments"] = tuple(experiment(e).id for e in exps)
        except (AttributeError, ValueError) as exc:
            raise ConfigError(f"experiments: {exc}") from None
    if "metric_config" in raw:
        kwargs["metric_config"] = _build(MetricConfig, "metric_config", raw["metric_config"])
    if "timing" in raw:
        timing = _build(TimingConfig, "timing", raw["timing"])
        if timing.image_count < 1 or timing.repetitions < 3:
            raise ConfigError("timing: image_count must be >= 1 and repetitions >= 3")
        kwargs["timing"] = timing
    if "image_size" in raw:
        if not isinstance(raw["image_size"], int) or raw["image_size"] < 8:
            raise ConfigError("image_size: must be an integer >= 8")
        kwargs["image_size"] = raw["image_size"]
    if raw.get("threads") is not None:
        if not isinstance(raw["threads"], int) or raw["threads"] < 1:
            raise ConfigError("threads: must be a positive integer")
        kwargs["threads"] = raw["threads"]
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config: {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    return config_from_dict(raw, path.parent)

