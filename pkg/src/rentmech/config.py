"""Experiment configuration: one JSON document shared by every subcommand."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import dist as dist_mod
from . import reward as reward_mod
from .dist import Distribution, same_distribution
from .errors import ConfigError
from .reward import NEGATIVE, RewardFn

FAMILIES = ("fixed_rate", "threshold", "custom_menu")

_DIST = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["uniform", "grid"]},
        "lo": {"type": "number"},
        "hi": {"type": "number"},
        "cdf_points": {"type": "array", "items": {
            "type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["horizon", "reward"],
    "properties": {
        "kind": {"enum": list(FAMILIES)},
        "horizon": {"type": "integer", "minimum": 1},
        "distribution": _DIST,
        "distributions": {"type": "array", "items": _DIST, "minItems": 1},
        "reward": {
            "type": "object",
            "required": ["class"],
            "properties": {
                "class": {"enum": ["linear", "negative_tradeoff", "consumer_surplus",
                                   "revenue", "welfare"]},
                "alpha": {"type": "number"},
                "beta": {"type": "number"},
                "f_points": {"type": "array"},
            },
            "additionalProperties": False,
        },
        "menu_file": {"type": "string"},
        "grid": {
            "type": "object",
            "properties": {
                "ironing": {"type": "integer", "minimum": 16},
                "audit": {"type": "integer", "minimum": 100},
            },
            "additionalProperties": False,
        },
        "normalize_base_payment": {"type": "boolean"},
        "analytic": {"type": "boolean"},
        "seed": {"type": "integer", "minimum": 0},
        "episodes": {"type": "integer", "minimum": 1},
        "outputs": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "oneOf": [{"required": ["distribution"]}, {"required": ["distributions"]}],
    "additionalProperties": False,
}


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    horizon: int
    distributions: tuple[Distribution, ...]  # D_n, ..., D_1
    reward: RewardFn
    kind: str = "fixed_rate"
    menu_file: str | None = None
    ironing_grid: int = 10_000
    audit_grid: int = 1000
    normalize_base_payment: bool = False
    analytic: bool = False
    seed: int = 0
    episodes: int = 100_000
    outputs: dict = field(default_factory=dict)

    @property
    def iid(self) -> bool:
        return same_distribution(self.distributions)

    @property
    def shared(self) -> Distribution | tuple[Distribution, ...]:
        """A single distribution when i.i.d., else the per-horizon tuple."""
        return self.distributions[0] if self.iid else self.distributions

    def check_family(self, family: str) -> None:
        if family == "threshold":
            if self.reward.kind != NEGATIVE:
                raise ConfigError(f"threshold mechanism needs a negative-tradeoff reward, "
                                  f"got {self.reward.kind}", "reward.class")
            if not self.iid:
                raise ConfigError("threshold mechanism requires i.i.d. agents", "distributions")
        if family == "custom_menu" and not self.menu_file:
            raise ConfigError("custom_menu needs menu_file", "menu_file")


def parse_config(data: dict) -> ExperimentConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise ConfigError(e.message, _path(e.absolute_path) or "<root>")
    n = data["horizon"]
    if "distribution" in data:
        ds = (dist_mod.from_config(data["distribution"], "distribution"),) * n
    else:
        raw = data["distributions"]
        if len(raw) != n:
            raise ConfigError(f"expected {n} per-horizon distributions, got {len(raw)}",
                              "distributions")
        ds = tuple(dist_mod.from_config(d, f"distributions[{i}]") for i, d in enumerate(raw))
    g = reward_mod.from_config(data["reward"], "reward")
    grid = data.get("grid", {})
    cfg = ExperimentConfig(
        horizon=n, distributions=ds, reward=g, kind=data.get("kind", "fixed_rate"),
        menu_file=data.get("menu_file"), ironing_grid=grid.get("ironing", 10_000),
        audit_grid=grid.get("audit", 1000),
        normalize_base_payment=data.get("normalize_base_payment", False),
        analytic=data.get("analytic", False), seed=data.get("seed", 0),
        episodes=data.get("episodes", 100_000), outputs=dict(data.get("outputs", {})),
    )
    cfg.check_family(cfg.kind)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                          str(path)) from None
    return parse_config(data)
