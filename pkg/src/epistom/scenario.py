"""Scenario files: map, hidden contents, rules, actions and judgment points.

A scenario is a YAML mapping::

    name: corridor
    map: |
      #####
      #@.g#
      #####
    doors: []            # door colors in row-major order
    keys: []             # visible key colors in row-major order
    contents: {box1: blue}
    rules: {exact: [blue], require_solvable: true}
    actions: right collect_gem(3,1)  # whitespace-separated
    judgment_points: {start: 0, end: 2}

Map legend: ``#`` wall, ``.`` floor, ``@`` start, ``D`` door, ``g`` gem,
``k`` visible key, ``1``-``9`` box with that index. Gems are named
``gem1..gemN`` in row-major order unless ``gems`` lists names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .btom import BSIPS, Posterior, build_engine
from .gridworld.grid import GridMap, MapError
from .gridworld.initial import ScenarioRules
from .gridworld.state import Action, EnvState, InvalidActionError, observe, replay
from .planner import AgentPolicyParams


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    grid: GridMap
    contents: tuple[str | None, ...]
    rules: ScenarioRules
    actions: list[Action]
    judgment_points: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.trajectory = replay(self.initial_state, self.actions)
        except InvalidActionError as exc:
            raise ScenarioError(f"scenario {self.name}: {exc}") from None
        for label, t in self.judgment_points.items():
            if not 0 <= t <= len(self.actions):
                raise ScenarioError(f"scenario {self.name}: judgment point {label}={t} outside 0..{len(self.actions)}")

    @property
    def initial_state(self) -> EnvState:
        return EnvState.initial(self.grid, self.contents)

    @property
    def T(self) -> int:
        return len(self.actions)

    def observations(self):
        return [observe(s) for s in self.trajectory]

    def points(self) -> dict[str, int]:
        return dict(self.judgment_points) if self.judgment_points else default_judgment_points(self.actions)

    def engine(self, params: AgentPolicyParams = AgentPolicyParams(), k: int = 3, **kwargs) -> BSIPS:
        return build_engine(self.initial_state, rules=self.rules, k=k, params=params, **kwargs)

    def posterior(self, params: AgentPolicyParams = AgentPolicyParams(), k: int = 3, **kwargs) -> Posterior:
        engine = self.engine(params, k, **kwargs)
        return engine.run(self.actions, self.observations()[1:])


def default_judgment_points(actions: list[Action]) -> dict[str, int]:
    """The step before each box is opened, plus the end of the run."""
    points = {}
    n = 0
    for t, a in enumerate(actions):
        if a.kind == "open_box":
            n += 1
            points[f"jp{n}"] = t
    points["final"] = len(actions)
    return points


def _rules(data: Mapping[str, Any] | None) -> ScenarioRules:
    data = dict(data or {})
    allowed = {"exact", "key_colors", "min_hidden", "max_hidden", "require_solvable"}
    unknown = set(data) - allowed
    if unknown:
        raise ScenarioError(f"unknown rule field(s): {', '.join(sorted(unknown))}")
    for name in ("exact", "key_colors"):
        if data.get(name) is not None:
            data[name] = tuple(data[name])
    try:
        return ScenarioRules(**data)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad rules: {exc}") from None


def scenario_from_dict(data: Mapping[str, Any], name: str = "scenario") -> Scenario:
    if not isinstance(data, Mapping) or "map" not in data:
        raise ScenarioError("scenario needs a 'map' entry")
    name = str(data.get("name", name))
    try:
        grid = GridMap.from_ascii(
            data["map"], doors=data.get("doors") or (), gems=data.get("gems"), keys=data.get("keys") or (),
            colors=data.get("colors"), name=name,
        )
    except MapError as exc:
        raise ScenarioError(f"scenario {name}: {exc}") from None
    box_names = [b.name for b in grid.boxes]
    given = dict(data.get("contents") or {})
    unknown = set(given) - set(box_names)
    if unknown:
        raise ScenarioError(f"scenario {name}: contents for unknown box(es) {', '.join(sorted(unknown))}")
    contents = tuple(given.get(b) for b in box_names)
    for c in contents:
        if c is not None and c not in grid.colors:
            raise ScenarioError(f"scenario {name}: unknown key color {c!r}")
    try:
        raw = data.get("actions") or []
        if isinstance(raw, str):
            raw = raw.split()
        actions = [Action.parse(str(a)) for a in raw]
    except ValueError as exc:
        raise ScenarioError(f"scenario {name}: {exc}") from None
    points = data.get("judgment_points") or {}
    if isinstance(points, list):
        points = {f"t{int(t)}": int(t) for t in points}
    points = {str(k): int(v) for k, v in points.items()}
    return Scenario(name, grid, contents, _rules(data.get("rules")), actions, points)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return scenario_from_dict(data, name=path.stem)


def bundled_scenario(name: str) -> Scenario:
    """A scenario shipped in the package data directory."""
    return load_scenario(Path(__file__).parent / "data" / "scenarios" / f"{name}.yaml")
