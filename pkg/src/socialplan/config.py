"""Workbench configuration file: one JSON document with a block per module."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .features import DEFAULT_FEATURES, FeatureConfig
from .irl import TrainConfig
from .oracle import DEFAULT_ORACLE, OracleConfig
from .planner import PlannerConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioGenConfig:
    resolution: float = 0.02
    empty_map: bool = False
    robot_radius: float = 0.2
    goal_radius: float = 0.25
    ped_body_radius: float = 0.3

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "empty_map": self.empty_map,
            "robot_radius": self.robot_radius,
            "goal_radius": self.goal_radius,
            "ped_body_radius": self.ped_body_radius,
        }


@dataclass(frozen=True)
class WorkbenchConfig:
    scenario: ScenarioGenConfig
    features: FeatureConfig
    planner: PlannerConfig
    train: TrainConfig
    oracle: OracleConfig

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "features": self.features.to_dict(),
            "planner": self.planner.to_dict(),
            "train": self.train.to_dict(),
            "oracle": self.oracle.to_dict(),
        }


DEFAULT_CONFIG = WorkbenchConfig(
    scenario=ScenarioGenConfig(),
    features=DEFAULT_FEATURES,
    planner=PlannerConfig(),
    train=TrainConfig(),
    oracle=DEFAULT_ORACLE,
)

_BLOCKS = {
    "scenario": ScenarioGenConfig,
    "features": FeatureConfig,
    "planner": PlannerConfig,
    "train": TrainConfig,
    "oracle": OracleConfig,
}


def _build_block(name: str, cls, defaults, overrides: dict):
    known = set(defaults.to_dict().keys())
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(f"{name}: unknown keys {sorted(unknown)}")
    try:
        return replace(defaults, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def config_from_dict(doc: dict) -> WorkbenchConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - set(_BLOCKS)
    if unknown:
        raise ConfigError(f"unknown config blocks {sorted(unknown)}")
    blocks = {}
    for name, cls in _BLOCKS.items():
        overrides = doc.get(name, {})
        if not isinstance(overrides, dict):
            raise ConfigError(f"{name}: must be an object")
        blocks[name] = _build_block(name, cls, getattr(DEFAULT_CONFIG, name), overrides)
    return WorkbenchConfig(**blocks)


def load_config(path=None) -> WorkbenchConfig:
    if path is None:
        return DEFAULT_CONFIG
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in config file: {exc}") from exc
    return config_from_dict(doc)
