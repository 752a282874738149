"""Enumerating the hidden box contents compatible with what is visible."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

from .grid import GridMap
from .state import HIDDEN, EnvState, Observation

MAX_HIDDEN_KEYS = 2


class InconsistentRulesError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioRules:
    """Constraints on hidden keys.

    ``exact`` fixes the multiset of hidden key colors. Otherwise any colors
    from ``key_colors`` (default: the door colors) are allowed with a count
    between ``min_hidden`` and ``max_hidden``. ``require_solvable`` keeps only
    worlds where every gem can be reached.
    """

    exact: tuple[str, ...] | None = None
    key_colors: tuple[str, ...] | None = None
    min_hidden: int = 0
    max_hidden: int = MAX_HIDDEN_KEYS
    require_solvable: bool = True

    def __post_init__(self):
        if self.max_hidden > MAX_HIDDEN_KEYS or (self.exact is not None and len(self.exact) > MAX_HIDDEN_KEYS):
            raise ValueError(f"at most {MAX_HIDDEN_KEYS} hidden keys")
        if self.min_hidden < 0 or self.min_hidden > self.max_hidden:
            raise ValueError("need 0 <= min_hidden <= max_hidden")

    def allows(self, hidden: Sequence[str]) -> bool:
        if self.exact is not None:
            return Counter(hidden) == Counter(self.exact)
        return self.min_hidden <= len(hidden) <= self.max_hidden


def _palette(grid: GridMap, rules: ScenarioRules) -> tuple[str, ...]:
    if rules.exact is not None:
        return tuple(dict.fromkeys(rules.exact))
    if rules.key_colors is not None:
        return tuple(rules.key_colors)
    return tuple(dict.fromkeys(d.color for d in grid.doors))


def enumerate_initial_states(grid: GridMap, o0: Observation, rules: ScenarioRules = ScenarioRules()) -> list[EnvState]:
    """All states consistent with ``o0`` and ``rules``, in a fixed order."""
    closed = [i for i, c in enumerate(o0.contents) if c == HIDDEN]
    options = (*_palette(grid, rules), None)  # key-in-box-1 worlds come first
    base = EnvState(
        grid=grid, pos=o0.pos, held=o0.held, contents=o0.contents, opened=o0.opened,
        floor_keys=o0.floor_keys, unlocked=o0.unlocked, collected=o0.collected,
    )
    out = []
    for combo in itertools.product(options, repeat=len(closed)):
        hidden = [c for c in combo if c is not None]
        if not rules.allows(hidden):
            continue
        contents = list(o0.contents)
        for i, c in zip(closed, combo):
            contents[i] = c
        state = replace(base, contents=tuple(contents))
        if rules.require_solvable and not _all_gems_reachable(state):
            continue
        out.append(state)
    if not out:
        raise InconsistentRulesError("no initial state is consistent with the observation and the rules")
    return out


def _all_gems_reachable(s: EnvState) -> bool:
    from ..planner import state_value

    return all(s.collected[j] or state_value(s, gem.name) < float("inf") for j, gem in enumerate(s.grid.gems))
