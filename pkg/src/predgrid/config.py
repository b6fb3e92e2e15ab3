"""Configuration objects and the flat key-value config file format.

All tunable constants live in :class:`SimConfig` / :class:`ExperimentConfig`
with the standard values as defaults, so ablation studies change config, not
code. ``load_config`` parses ``key = value`` files, rejects unknown keys, and
applies command-line overrides on top.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path


class ConfigError(ValueError):
    """Raised for unknown keys, malformed values, or out-of-range settings."""


class Condition(str, Enum):
    """Punishment ablation arm."""

    FAILURE_ONLY = "failure_only"
    FAILURE_PLUS_PROBABILISTIC = "failure_plus_probabilistic"
    NO_PUNISHMENT = "no_punishment"


# Fixed sensor/actuator placement for the standard 9x9 network.
DEFAULT_INPUT_COORDS = ((0, 1), (0, 3), (0, 5), (0, 7))
DEFAULT_OUTPUT_COORDS = ((8, 2), (8, 6))


@dataclass(frozen=True)
class SimConfig:
    """Constants of the grid network and its plasticity rules."""

    grid_width: int = 9
    grid_height: int = 9
    n_processing: int = 30
    input_coords: tuple[tuple[int, int], ...] = DEFAULT_INPUT_COORDS
    output_coords: tuple[tuple[int, int], ...] = DEFAULT_OUTPUT_COORDS
    learning_rate: float = 0.02
    desire_threshold: float = 0.1
    # Chance a mover picks a uniformly random axis instead of the
    # influx-weighted one.
    explore_prob: float = 0.05
    # Chance a cell below the desire threshold still becomes a movement
    # candidate. Independent of explore_prob.
    random_move_prob: float = 0.025
    macro_episode_len: int = 4
    catastrophic_epicenters: int = 10
    punish_angle_min_deg: float = 4.0
    punish_angle_max_deg: float = 12.0
    punish_prob_min: float = 0.01
    punish_prob_max: float = 0.10
    epicenter_fraction_min: float = 0.01
    epicenter_fraction_max: float = 0.30


@dataclass(frozen=True)
class ExperimentConfig:
    """A full experiment: how many agents, for how long, under which arm."""

    seed: int = 0
    agents: int = 1
    episodes: int = 300
    eval_episodes: int = 100
    max_steps: int = 500
    condition: Condition = Condition.FAILURE_ONLY
    lock_on_success: bool = True
    workers: int = 1
    snapshots: int = 1
    sim: SimConfig = field(default_factory=SimConfig)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_condition(text: str) -> Condition:
    try:
        return Condition(text.strip().lower())
    except ValueError:
        names = ", ".join(c.value for c in Condition)
        raise ConfigError(f"unknown condition {text!r} (expected one of: {names})") from None


# key -> (target section, attribute, parser). "exp" = ExperimentConfig,
# "sim" = the nested SimConfig.
_KEYS = {
    "seed": ("exp", "seed", int),
    "agents": ("exp", "agents", int),
    "episodes": ("exp", "episodes", int),
    "eval_episodes": ("exp", "eval_episodes", int),
    "max_steps": ("exp", "max_steps", int),
    "condition": ("exp", "condition", _parse_condition),
    "lock_on_success": ("exp", "lock_on_success", _parse_bool),
    "workers": ("exp", "workers", int),
    "snapshots": ("exp", "snapshots", int),
    "grid_width": ("sim", "grid_width", int),
    "grid_height": ("sim", "grid_height", int),
    "processing_cells": ("sim", "n_processing", int),
    "learning_rate": ("sim", "learning_rate", float),
    "desire_threshold": ("sim", "desire_threshold", float),
    "explore_prob": ("sim", "explore_prob", float),
    "random_move_prob": ("sim", "random_move_prob", float),
    "macro_episode_len": ("sim", "macro_episode_len", int),
    "catastrophic_epicenters": ("sim", "catastrophic_epicenters", int),
    "punish_angle_min_deg": ("sim", "punish_angle_min_deg", float),
    "punish_angle_max_deg": ("sim", "punish_angle_max_deg", float),
    "punish_prob_min": ("sim", "punish_prob_min", float),
    "punish_prob_max": ("sim", "punish_prob_max", float),
    "epicenter_fraction_min": ("sim", "epicenter_fraction_min", float),
    "epicenter_fraction_max": ("sim", "epicenter_fraction_max", float),
}


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Range-check a config; returns it unchanged if everything is sane."""
    sim = cfg.sim
    if cfg.agents < 1:
        raise ConfigError("agents must be >= 1")
    if cfg.episodes < 1:
        raise ConfigError("episodes must be >= 1")
    if cfg.eval_episodes < 0:
        raise ConfigError("eval_episodes must be >= 0")
    if cfg.max_steps < 1:
        raise ConfigError("max_steps must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.snapshots < 0:
        raise ConfigError("snapshots must be >= 0")
    if sim.grid_width < 1 or sim.grid_height < 1:
        raise ConfigError("grid dimensions must be >= 1")
    if sim.n_processing < 1:
        raise ConfigError("processing_cells must be >= 1")
    if sim.learning_rate <= 0:
        raise ConfigError("learning_rate must be > 0")
    if sim.desire_threshold < 0:
        raise ConfigError("desire_threshold must be >= 0")
    for name in ("explore_prob", "random_move_prob", "punish_prob_min", "punish_prob_max"):
        val = getattr(sim, name)
        if not 0.0 <= val <= 1.0:
            raise ConfigError(f"{name} must lie in [0, 1]")
    if sim.macro_episode_len < 1:
        raise ConfigError("macro_episode_len must be >= 1")
    if sim.catastrophic_epicenters < 1:
        raise ConfigError("catastrophic_epicenters must be >= 1")
    if sim.punish_angle_min_deg > sim.punish_angle_max_deg:
        raise ConfigError("punish_angle_min_deg must not exceed punish_angle_max_deg")
    if sim.punish_prob_min > sim.punish_prob_max:
        raise ConfigError("punish_prob_min must not exceed punish_prob_max")
    if not 0.0 < sim.epicenter_fraction_min <= sim.epicenter_fraction_max <= 1.0:
        raise ConfigError("epicenter fractions must satisfy 0 < min <= max <= 1")
    for x, y in tuple(sim.input_coords) + tuple(sim.output_coords):
        if not (0 <= x < sim.grid_width and 0 <= y < sim.grid_height):
            raise ConfigError(f"fixed cell coordinate ({x}, {y}) is outside the grid")
    fixed = tuple(sim.input_coords) + tuple(sim.output_coords)
    if len(set(fixed)) != len(fixed):
        raise ConfigError("input/output coordinates overlap")
    return cfg


def _apply(cfg_kwargs: dict, sim_kwargs: dict, key: str, raw: str) -> None:
    if key not in _KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    section, attr, parser = _KEYS[key]
    try:
        value = parser(raw)
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None
    (cfg_kwargs if section == "exp" else sim_kwargs)[attr] = value


def load_config(path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from an optional flat file plus overrides.

    File format: one ``key = value`` per line, ``#`` comments, blank lines
    ignored. Overrides (already-parsed strings, e.g. from CLI flags) win over
    file values. Unknown keys are an error in both.
    """
    cfg_kwargs: dict = {}
    sim_kwargs: dict = {}
    if path is not None:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            _apply(cfg_kwargs, sim_kwargs, key, raw)
    for key, raw in (overrides or {}).items():
        _apply(cfg_kwargs, sim_kwargs, key, str(raw))
    cfg = ExperimentConfig(sim=SimConfig(**sim_kwargs), **cfg_kwargs)
    return validate_config(cfg)


def config_echo(cfg: ExperimentConfig, command: str) -> str:
    """Render the effective config as a flat file, for provenance/replay."""
    lines = [f"command = {command}"]
    values = {}
    for key, (section, attr, _parser) in _KEYS.items():
        obj = cfg if section == "exp" else cfg.sim
        val = getattr(obj, attr)
        if isinstance(val, Condition):
            val = val.value
        elif isinstance(val, bool):
            val = "true" if val else "false"
        values[key] = val
    for key in sorted(values):
        lines.append(f"{key} = {values[key]}")
    return "\n".join(lines) + "\n"


def read_echo(path: str | Path) -> tuple[str, ExperimentConfig]:
    """Parse a config echo back into (command, config) for replay."""
    command = None
    overrides: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key == "command":
            command = raw
        else:
            overrides[key] = raw
    if command is None:
        raise ConfigError(f"{path}: missing 'command' line; not a run echo")
    return command, load_config(None, overrides)
