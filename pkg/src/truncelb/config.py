"""Run configuration: one JSON file, flags layered on top."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ParameterError
from .model import BASELINE, ModelParams, ShockSpec
from .regions import DEFAULT_ELL_CAP

TOP_LEVEL_KEYS = {"params", "shock", "exit_period", "grid", "mode", "multiplier", "ell_cap", "workers"}
GRID_KEYS = {"p_min", "p_max", "n_p", "d_min", "d_max", "n_d"}
MULTIPLIER_KEYS = {"context", "p", "d", "ell_max", "sweep"}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass
class GridSpec:
    p_min: float = 0.0
    p_max: float = 0.99
    n_p: int = 200
    d_min: float = 0.0
    d_max: float | None = None  # resolved to params.d_max
    n_d: int = 200


@dataclass
class MultiplierSpec:
    context: str = "PL"
    p: float | None = None
    d: float | None = None
    ell_max: int = 64
    sweep: dict[str, list[float]] | None = None


@dataclass
class RunConfig:
    params: ModelParams
    shock: ShockSpec | None = None
    exit_period: int | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    mode: str = "msv"
    multiplier: MultiplierSpec = field(default_factory=MultiplierSpec)
    ell_cap: int = DEFAULT_ELL_CAP
    workers: int = 1

    def resolved(self) -> dict[str, Any]:
        """Every setting after defaults, for echoing into outputs."""
        grid = dict(vars(self.grid))
        if grid["d_max"] is None:
            grid["d_max"] = self.params.d_max
        return {
            "params": self.params.to_dict(),
            "shock": None if self.shock is None else vars(self.shock).copy(),
            "exit_period": self.exit_period,
            "grid": grid,
            "mode": self.mode,
            "multiplier": dict(vars(self.multiplier)),
            "ell_cap": self.ell_cap,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        _reject_unknown("config", raw, TOP_LEVEL_KEYS)
        try:
            params = ModelParams.from_dict(raw.get("params", BASELINE))
        except ParameterError as exc:
            raise ConfigError(f"params.{exc}") from exc
        except TypeError as exc:
            raise ConfigError(f"params: {exc}") from exc

        cfg = cls(params=params)
        if raw.get("shock") is not None:
            cfg.shock = _shock(raw["shock"])
        if raw.get("exit_period") is not None:
            cfg.exit_period = _int("exit_period", raw["exit_period"])
        if "grid" in raw:
            _reject_unknown("grid", raw["grid"], GRID_KEYS)
            cfg.grid = GridSpec(**raw["grid"])
        if "mode" in raw:
            cfg.mode = raw["mode"]
        if "multiplier" in raw:
            _reject_unknown("multiplier", raw["multiplier"], MULTIPLIER_KEYS)
            cfg.multiplier = MultiplierSpec(**raw["multiplier"])
        if "ell_cap" in raw:
            cfg.ell_cap = _int("ell_cap", raw["ell_cap"])
        if "workers" in raw:
            cfg.workers = _int("workers", raw["workers"])
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def validate(self) -> None:
        if self.mode not in ("msv", "truncated"):
            raise ConfigError(f"mode: must be 'msv' or 'truncated', got {self.mode!r}")
        if self.ell_cap < 2:
            raise ConfigError(f"ell_cap: must be >= 2, got {self.ell_cap!r}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers!r}")
        if self.grid.n_p < 1 or self.grid.n_d < 1:
            raise ConfigError("grid: n_p and n_d must be >= 1")
        if self.multiplier.context not in ("PN", "PL", "Mixed"):
            raise ConfigError(f"multiplier.context: must be PN, PL or Mixed, got {self.multiplier.context!r}")
        if self.multiplier.ell_max < 1:
            raise ConfigError("multiplier.ell_max: must be >= 1")
        if self.shock is not None:
            try:
                self.shock.check_against(self.params)
            except ParameterError as exc:
                raise ConfigError(f"shock.{exc}") from exc


def _reject_unknown(where: str, block: Any, allowed: set[str]) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: must be a JSON object")
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key {unknown[0]!r}")


def _int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    return value


def _shock(block: Any) -> ShockSpec:
    _reject_unknown("shock", block, {"d", "p", "ell"})
    missing = [k for k in ("d", "p", "ell") if k not in block]
    if missing:
        raise ConfigError(f"shock.{missing[0]}: missing")
    try:
        return ShockSpec(float(block["d"]), float(block["p"]), block["ell"])
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"shock.{exc}") from exc
