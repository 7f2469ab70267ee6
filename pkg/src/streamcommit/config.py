"""Engine tunables and their flat-JSON representation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError

DEFAULT_ANNOTATION_PATTERNS: tuple[str, ...] = (
    r"^\[.*\]$",
    r"^\(.*\)$",
    r"^\{.*\}$",
    r"^\*\*.*\*\*$",
)


@dataclass(frozen=True)
class EngineConfig:
    """All engine tunables. Times are in seconds, lengths in characters."""

    delta_s: float = 1.0  # decode interval
    buffer_cap_s: float = 30.0  # FIFO cap on the active window
    alpha: float = 0.6  # per-word similarity needed for compatibility
    theta: float = 0.5  # running/prefix similarity threshold
    l1_chars: int = 20  # fast-path minimum prefix length
    l2_chars: int = 17  # staged-path minimum prefix length
    tau_s: float = 10.0  # timeout since last commit
    epsilon_s: float = 0.0  # overlap tail kept after slicing
    sample_rate: int = 16000

    gamma_ann: float = 0.6
    gamma_ns: float = 0.9
    r_max: int = 5
    lang_persistence: int = 3
    energy_gate: bool = True
    energy_threshold: float = 0.005  # RMS
    energy_hangover_s: float = 1.0
    annotation_patterns: tuple[str, ...] = field(default=DEFAULT_ANNOTATION_PATTERNS)

    def __post_init__(self):
        object.__setattr__(self, "annotation_patterns", tuple(self.annotation_patterns))
        checks = [
            (0 < self.theta <= 1, "theta must be in (0, 1]"),
            (0 < self.alpha <= 1, "alpha must be in (0, 1]"),
            (0 <= self.l2_chars <= self.l1_chars, "need 0 <= l2_chars <= l1_chars"),
            (0 <= self.epsilon_s <= 0.2, "epsilon_s must be in [0, 0.2]"),
            (self.delta_s > 0, "delta_s must be positive"),
            (self.buffer_cap_s > 0, "buffer_cap_s must be positive"),
            (self.tau_s > 0, "tau_s must be positive"),
            (self.sample_rate > 0, "sample_rate must be positive"),
            (0.5 <= self.gamma_ann <= 0.8, "gamma_ann must be in [0.5, 0.8]"),
            (0 <= self.gamma_ns <= 1, "gamma_ns must be in [0, 1]"),
            (self.r_max >= 0, "r_max must be non-negative"),
            (self.lang_persistence >= 1, "lang_persistence must be >= 1"),
            (self.energy_threshold >= 0, "energy_threshold must be non-negative"),
            (self.energy_hangover_s >= 0, "energy_hangover_s must be non-negative"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EngineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        kwargs = {}
        for name, value in data.items():
            default = known[name].default
            try:
                if isinstance(default, bool):
                    if not isinstance(value, bool):
                        raise TypeError
                elif isinstance(default, int):
                    if isinstance(value, bool) or float(value) != int(value):
                        raise TypeError
                    value = int(value)
                elif isinstance(default, float):
                    if isinstance(value, bool):
                        raise TypeError
                    value = float(value)
                elif isinstance(default, tuple):
                    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                        raise TypeError
                    value = tuple(value)
            except (TypeError, ValueError):
                raise ConfigError(f"config field {name!r} has invalid value {value!r}") from None
            kwargs[name] = value
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["annotation_patterns"] = list(self.annotation_patterns)
        return d


def load_config(path: Optional[str | Path]) -> EngineConfig:
    if path is None:
        return EngineConfig()
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return EngineConfig.from_dict(data)
