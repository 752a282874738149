"""Correlation with human ratings and grid-based parameter fitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..elot.thresholds import THRESHOLD_NAMES, ThresholdTable

BETA_GRID = tuple(0.5 * math.sqrt(2) ** j for j in range(7))
STEP = 0.05
RADIUS = 0.2


class DegenerateDataError(ValueError):
    pass


def pearson_r(model: Sequence[float], human: Sequence[float]) -> float:
    x = np.asarray(model, dtype=float)
    y = np.asarray(human, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise DegenerateDataError("need two equal-length vectors with at least 2 entries")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(float(dx @ dx)), math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateDataError("zero variance")
    return max(-1.0, min(1.0, float(dx @ dy) / (sx * sy)))


def mean_absolute_error(model: Sequence[float], human: Sequence[float]) -> float:
    return float(np.mean(np.abs(np.asarray(model, dtype=float) - np.asarray(human, dtype=float))))


@dataclass(frozen=True)
class Rating:
    scenario: str
    statement: str
    judgment_point: str
    mean_rating: float


class RatingsDataset:
    """Mean human ratings in [0, 1], one row per (scenario, statement, judgment point)."""

    COLUMNS = tuple(f.name for f in fields(Rating))

    def __init__(self, rows: Sequence[Rating]):
        self.rows = list(rows)
        keys = set()
        for r in self.rows:
            if not 0.0 <= r.mean_rating <= 1.0:
                raise ValueError(f"rating {r.mean_rating} outside [0, 1] for {r.scenario}/{r.statement}")
            key = (r.scenario, r.statement, r.judgment_point)
            if key in keys:
                raise ValueError(f"duplicate rating row {key}")
            keys.add(key)

    def __len__(self) -> int:
        return len(self.rows)

    def ratings(self) -> list[float]:
        return [r.mean_rating for r in self.rows]

    @classmethod
    def load(cls, path: str | Path) -> RatingsDataset:
        """CSV or TSV with columns scenario, statement, judgment_point, mean_rating."""
        path = Path(path)
        text = path.read_text()
        dialect = "excel-tab" if path.suffix in (".tsv", ".tab") else "excel"
        reader = csv.DictReader(text.splitlines(), dialect=dialect)
        missing = set(cls.COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        return cls([Rating(row["scenario"], row["statement"], row["judgment_point"], float(row["mean_rating"]))
                    for row in reader])

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            for r in self.rows:
                writer.writerow([r.scenario, r.statement, r.judgment_point, repr(r.mean_rating)])


def _score(scorer: Callable[..., Sequence[float]], human: list[float], *args) -> float:
    try:
        return pearson_r(scorer(*args), human)
    except DegenerateDataError:
        return -math.inf


def fit_thresholds(base: ThresholdTable, data: RatingsDataset,
                   scorer: Callable[[ThresholdTable], Sequence[float]],
                   names: Sequence[str] = THRESHOLD_NAMES, step: float = STEP, radius: float = RADIUS,
                   max_passes: int = 50) -> ThresholdTable:
    """Coordinate ascent on Pearson r.

    Each threshold in ``names`` order is set to the best value on a ``step``
    grid within ``radius`` of its starting value, holding the others fixed; a
    move needs a strict improvement. Passes repeat until none moves.
    ``scorer`` maps a threshold table to model scores aligned with ``data``.
    """
    if len(data) == 0:
        raise DegenerateDataError("empty ratings dataset")
    human = data.ratings()
    n = int(round(radius / step))
    grids = {
        name: [round(getattr(base, name) + j * step, 10) for j in range(-n, n + 1)
               if 0.0 <= round(getattr(base, name) + j * step, 10) <= 1.0]
        for name in names
    }
    current = base
    best = _score(scorer, human, current)
    for _ in range(max_passes):
        moved = False
        for name in names:
            for value in grids[name]:
                if value == getattr(current, name):
                    continue
                candidate = current.with_values(**{name: value})
                r = _score(scorer, human, candidate)
                if r > best + 1e-12:
                    best, current, moved = r, candidate, True
        if not moved:
            break
    return current


def fit_beta(candidates: Sequence[float], data: RatingsDataset, scorer: Callable[[float], Sequence[float]]) -> float:
    """The candidate with the highest Pearson r; the first one wins ties."""
    if not candidates:
        raise ValueError("no beta candidates")
    if len(data) == 0:
        raise DegenerateDataError("empty ratings dataset")
    human = data.ratings()
    scores = [_score(scorer, human, beta) for beta in candidates]
    if all(s == -math.inf for s in scores):
        raise DegenerateDataError("model scores have zero variance for every beta")
    return candidates[int(np.argmax(scores))]
