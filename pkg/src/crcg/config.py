"""JSON run configuration: scenario, training, output directory and seeds.

Unknown keys and ill-typed values are rejected with a message naming the
offending field. Every field falls back to the defaults of
:class:`ScenarioConfig`, :class:`TrainConfig` and :class:`RcamConfig`.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .composer import STD_LEVELS, ScenarioConfig
from .motifs import MotifKind
from .rcam import RcamConfig
from .train import TrainConfig

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
TOP_KEYS = ("scenario", "train", "output_dir", "seeds")
_KIND_FIELDS = ("causal_kinds", "confounder_kinds", "irrelevant_kinds")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    output_dir: str = "runs"
    seeds: tuple = DEFAULT_SEEDS

    def with_seeds(self, seeds) -> "Config":
        return dataclasses.replace(self, seeds=tuple(int(s) for s in seeds))

    def with_train(self, **kw) -> "Config":
        return dataclasses.replace(self, train=dataclasses.replace(self.train, **kw))


def _type_name(default) -> str:
    if isinstance(default, bool):
        return "boolean"
    if isinstance(default, int):
        return "integer"
    if isinstance(default, float):
        return "number"
    if isinstance(default, str):
        return "string"
    if isinstance(default, tuple):
        return "list"
    return type(default).__name__


def _mismatch(path: str, default, value) -> ConfigError:
    return ConfigError(f"field {path}: expected {_type_name(default)}, got {type(value).__name__}")


def _kind(path: str, value) -> MotifKind:
    if isinstance(value, int) and not isinstance(value, bool) and 1 <= value <= 25:
        return MotifKind.from_index(value)
    try:
        return MotifKind(value)
    except ValueError:
        raise ConfigError(f"field {path}: expected motif kind name or index 1..25, got {value!r}") from None


def _coerce(path: str, default, value):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, tuple):
        if not isinstance(value, list):
            raise _mismatch(path, default, value)
        if path.rsplit(".", 1)[-1] in _KIND_FIELDS:
            return tuple(_kind(f"{path}[{i}]", v) for i, v in enumerate(value))
        proto = default[0] if default else 0.0
        return tuple(_coerce(f"{path}[{i}]", proto, v) for i, v in enumerate(value))
    else:
        ok = True
    if not ok:
        raise _mismatch(path, default, value)
    return value


def _section(path: str, cls, data, nested=None):
    if not isinstance(data, dict):
        raise ConfigError(f"field {path}: expected object, got {type(data).__name__}")
    nested = nested or {}
    proto = cls()
    names = [f.name for f in dataclasses.fields(cls)]
    kw = {}
    for key, value in data.items():
        if key not in names:
            raise ConfigError(f"unknown key: {path}.{key}")
        if key in nested:
            kw[key] = _section(f"{path}.{key}", nested[key], value)
        else:
            kw[key] = _coerce(f"{path}.{key}", getattr(proto, key), value)
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_from_dict(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in data:
        if key not in TOP_KEYS:
            raise ConfigError(f"unknown key: {key}")
    scenario = _section("scenario", ScenarioConfig, data.get("scenario", {}))
    train = _section("train", TrainConfig, data.get("train", {}), nested={"rcam": RcamConfig})
    out = _coerce("output_dir", "", data.get("output_dir", Config.output_dir))
    seeds = _coerce("seeds", DEFAULT_SEEDS, data.get("seeds", list(DEFAULT_SEEDS)))
    if not seeds:
        raise ConfigError("field seeds: expected a non-empty list")
    return Config(scenario, train, out, seeds)


def parse_config(source=None) -> Config:
    """Config from a file path, an inline JSON object string, or ``None`` (defaults)."""
    if source is None:
        return Config()
    if isinstance(source, dict):
        return config_from_dict(source)
    text = str(source)
    if not text.lstrip().startswith("{"):
        if not os.path.exists(text):
            raise ConfigError(f"missing config file: {text}")
        with open(text) as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(data)


def _plain(value):
    if isinstance(value, MotifKind):
        return value.value
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    return value


def config_to_dict(cfg: Config) -> dict:
    return _plain(cfg)


def dump_config(cfg: Config) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


def write_resolved(cfg: Config, output_dir=None) -> str:
    """Write ``config.resolved.json`` under the output directory; returns its path."""
    out = output_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "config.resolved.json")
    with open(path, "w") as fh:
        fh.write(dump_config(cfg))
    return path


def scenario_name(s: ScenarioConfig) -> str:
    """Short column label for a scenario, in the style ``P=20%`` or ``Size=3``."""
    if s.variant == "probability":
        return f"P={s.p * 100:g}%"
    if s.variant == "size_scaled":
        return f"Size={s.multiplier}"
    if s.variant == "complexity":
        return s.std_level
    return f"noise={s.noise_sets}"


def scenario_sort_key(name: str):
    if name in STD_LEVELS:
        return (1, list(STD_LEVELS).index(name), name)
    digits = "".join(ch for ch in name.split("=", 1)[-1] if ch.isdigit() or ch == ".")
    try:
        return (0, float(digits), name)
    except ValueError:
        return (2, 0.0, name)
