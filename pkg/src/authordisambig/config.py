"""Run configuration shared by every CLI command."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .errors import DataError


class ConfigError(DataError):
    """Invalid configuration value or file."""

    exit_code = 1


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.5
    min_count: int = 5
    delta: float = 0.05
    stop_threshold: float = 0.5
    max_passes: int = 10
    low_weight_factor: float = 0.5
    prior_p0: float = 0.1
    seed: int = 42
    nonmatch_size: int = 10000
    popularity_thresholds: tuple[int, int] = (5, 50)
    thread_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "popularity_thresholds", tuple(self.popularity_thresholds))
        checks = [
            (self.alpha > 0, "alpha must be > 0"),
            (self.min_count >= 1, "min_count must be >= 1"),
            (self.delta > 0, "delta must be > 0"),
            (0.0 <= self.stop_threshold <= 1.0, "stop_threshold must lie in [0, 1]"),
            (self.max_passes >= 0, "max_passes must be >= 0"),
            (0 < self.low_weight_factor <= 1, "low_weight_factor must lie in (0, 1]"),
            (0 < self.prior_p0 < 1, "prior_p0 must lie in (0, 1)"),
            (self.nonmatch_size >= 1, "nonmatch_size must be >= 1"),
            (len(self.popularity_thresholds) == 2, "popularity_thresholds needs two values"),
            (self.thread_count >= 0, "thread_count must be >= 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        t1, t2 = self.popularity_thresholds
        if not 0 <= t1 <= t2:
            raise ConfigError("popularity_thresholds must satisfy 0 <= t1 <= t2")

    def to_dict(self, include_runtime: bool = True) -> dict[str, Any]:
        """Plain-JSON form. ``thread_count`` never changes results, so artifacts omit it."""
        d = asdict(self)
        d["popularity_thresholds"] = list(self.popularity_thresholds)
        if not include_runtime:
            d.pop("thread_count")
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        known = {f.name: f for f in fields(cls)}
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values = {}
        for key, value in data.items():
            try:
                if key == "popularity_thresholds":
                    values[key] = tuple(int(v) for v in value)
                elif known[key].type == "int":
                    if isinstance(value, bool) or int(value) != value:
                        raise ValueError
                    values[key] = int(value)
                else:
                    values[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        return cls(**values)

    def override(self, **changes: Any) -> RunConfig:
        """Copy with every non-None change applied (flags win over the file)."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON config file.

    A run summary is accepted too: its embedded ``config`` object is used,
    which is how a run is replayed.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    if isinstance(data.get("config"), dict):
        data = data["config"]
    return RunConfig.from_dict(data)


def save_config(config: RunConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
