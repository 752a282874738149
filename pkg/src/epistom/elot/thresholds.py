"""Probability thresholds for graded epistemic terms."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Mapping

THRESHOLD_NAMES = (
    "believes", "certain", "uncertain", "likely", "unlikely",
    "could", "might", "may", "should", "must",
)


@dataclass(frozen=True)
class ThresholdTable:
    believes: float = 0.75
    certain: float = 0.95
    uncertain: float = 0.70
    likely: float = 0.70
    unlikely: float = 0.40
    could: float = 0.20
    might: float = 0.20
    may: float = 0.30
    should: float = 0.80
    must: float = 0.95
    most: float = 1.5  # multiplier for strict superlatives

    def __post_init__(self):
        for name in THRESHOLD_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"threshold {name}={value} outside [0, 1]")
        if not self.most > 0:
            raise ValueError(f"multiplier most={self.most} must be positive")

    def threshold(self, name: str) -> float:
        if name not in THRESHOLD_NAMES:
            raise KeyError(f"unknown threshold {name!r}")
        return getattr(self, name)

    def with_values(self, **values: float) -> ThresholdTable:
        return replace(self, **values)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> ThresholdTable:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"unknown threshold name(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def load(cls, path: str | Path) -> ThresholdTable:
        """Read a JSON or YAML mapping of overrides on top of the defaults."""
        text = Path(path).read_text()
        if str(path).endswith((".yaml", ".yml")):
            import yaml

            data = yaml.safe_load(text) or {}
        else:
            data = json.loads(text)
        return cls.from_mapping(data)


DEFAULT_THRESHOLDS = ThresholdTable()

# starting point of the coordinate-ascent fit (literature values)
INITIAL_THRESHOLDS = ThresholdTable(uncertain=0.50, likely=0.60)
