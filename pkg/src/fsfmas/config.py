"""MAS configuration: thresholds, indicator constants and referenced files.

Loaded from JSON; file paths inside it are resolved relative to the config
file. Every key is optional; see ``data/mas_config.json`` for the defaults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .atn import AtnSpec, default_atn, load_atn
from .errors import ConfigError
from .ontology import Ontology, default_ontology, load_ontology
from .proximity import ProximityParams


@dataclass(frozen=True)
class FireIndicatorParams:
    coefficient: float = 0.05
    scale: float = 10.0
    brigade_weight: float = 5.0
    brigade_radius: float = 10.0
    brigade_classes: tuple[str, ...] = ("FireBrigade",)


@dataclass(frozen=True)
class BrigadeIndicatorParams:
    k1: float = 1.0
    k2: float = 1.0
    k3: float = 5.0
    radius: float = 10.0
    coefficient: float = 0.05
    scale: float = 10.0


@dataclass(frozen=True)
class Thresholds:
    theta_ai: float = 2.0
    theta_pi: float = 5.0
    theta_dead: float = 1.0
    n_dead: int = 3
    extinguished_value: int = 8


@dataclass(frozen=True)
class MasConfig:
    creation_threshold: float = 0.3
    acquaintance_prune_epsilon: float = 0.01
    proximity: ProximityParams = field(default_factory=ProximityParams)
    fire: FireIndicatorParams = field(default_factory=FireIndicatorParams)
    brigade: BrigadeIndicatorParams = field(default_factory=BrigadeIndicatorParams)
    thresholds: Thresholds = field(default_factory=Thresholds)
    ontology_path: str | None = None
    phenomenon_atn_path: str | None = None
    actor_atn_path: str | None = None

    def __post_init__(self):
        if not -1.0 <= self.creation_threshold <= 1.0:
            raise ConfigError("creation_threshold must lie in [-1, 1]")
        if self.acquaintance_prune_epsilon < 0:
            raise ConfigError("acquaintance_prune_epsilon must be >= 0")
        if self.fire.brigade_radius <= 0 or self.brigade.radius <= 0:
            raise ConfigError("radii must be positive")

    def load_ontology(self) -> Ontology:
        return load_ontology(self.ontology_path) if self.ontology_path else default_ontology()

    def atn_overrides(self) -> dict[str, float]:
        return asdict(self.thresholds)

    def load_atns(self) -> tuple[AtnSpec, AtnSpec]:
        """(phenomenon automaton, actor automaton)."""
        ov = self.atn_overrides()
        fire = load_atn(self.phenomenon_atn_path, ov) if self.phenomenon_atn_path \
            else default_atn("fire", ov)
        brigade = load_atn(self.actor_atn_path, ov) if self.actor_atn_path \
            else default_atn("brigade", ov)
        return fire, brigade

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "proximity": ProximityParams,
    "fire": FireIndicatorParams,
    "brigade": BrigadeIndicatorParams,
    "thresholds": Thresholds,
}


def config_from_dict(doc: dict, base_dir: Path | None = None) -> MasConfig:
    known = {f.name for f in fields(MasConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in doc.items():
        if key in _SECTIONS:
            cls = _SECTIONS[key]
            names = {f.name for f in fields(cls)}
            if not isinstance(value, dict) or set(value) - names:
                raise ConfigError(f"bad '{key}' section: allowed keys {sorted(names)}")
            if "brigade_classes" in value:
                value = dict(value, brigade_classes=tuple(value["brigade_classes"]))
            try:
                kwargs[key] = cls(**value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad '{key}' section: {exc}") from exc
        elif key.endswith("_path") and value is not None:
            p = Path(value)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            kwargs[key] = str(p)
        else:
            kwargs[key] = value
    return MasConfig(**kwargs)


def load_config(path) -> MasConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(doc, path.parent)


def with_thresholds(config: MasConfig, **changes) -> MasConfig:
    return replace(config, thresholds=replace(config.thresholds, **changes))
