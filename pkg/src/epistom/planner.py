"""Cost-to-go estimates and Boltzmann action likelihoods for the modeled agent.

``state_value`` is the exact length of a shortest plan that ends by collecting
the goal gem. Plans are searched over interaction events (open, pick up,
unlock, collect) with grid BFS between them. Walkability only changes at
events, so this equals uniform-cost search over the full state graph while
visiting far fewer nodes. Interactions that cannot help under full knowledge
(opening an empty box, collecting another gem) are skipped.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .gridworld.grid import Cell, GridMap
from .gridworld.state import Action, EnvState, transition, valid_actions

if TYPE_CHECKING:
    from .btom.belief import Belief

INF = math.inf
DEFAULT_BETA = 2 ** 1.5
VARIANTS = ("full", "true_belief", "non_planning")


@dataclass(frozen=True)
class AgentPolicyParams:
    beta: float = DEFAULT_BETA
    variant: str = "full"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass
class QCache:
    """Memo tables; safe to share within a thread or to replicate per worker."""

    values: dict = field(default_factory=dict)
    distances: dict = field(default_factory=dict)
    q_values: dict = field(default_factory=dict)

    def clear(self) -> None:
        self.values.clear()
        self.distances.clear()
        self.q_values.clear()


_DEFAULT_CACHE = QCache()


def unreachable_penalty(grid: GridMap) -> float:
    """Finite stand-in for an infinite cost inside belief averages."""
    return 10.0 * grid.diameter


def _distances(s: EnvState, cache: QCache) -> dict[Cell, int]:
    key = (s.grid, s.floor_keys, s.unlocked, s.pos)
    dist = cache.distances.get(key)
    if dist is None:
        dist = {s.pos: 0}
        queue = deque([s.pos])
        while queue:
            cell = queue.popleft()
            for nxt in s.grid.neighbors(cell):
                if nxt not in dist and s.walkable(nxt):
                    dist[nxt] = dist[cell] + 1
                    queue.append(nxt)
        cache.distances[key] = dist
    return dist


def _events(s: EnvState, goal: int) -> Iterable[tuple[Cell, Action]]:
    """Useful interactions as (target cell, action) pairs."""
    g = s.grid
    held = s.held_colors()
    for i, box in enumerate(g.boxes):
        if s.contents[i] is None:
            continue
        if not s.opened[i]:
            yield box.cell, Action("open_box", i + 1)
        else:
            yield box.cell, Action("pickup_key", box.cell)
    for k, key in enumerate(g.keys):
        if s.floor_keys[k]:
            yield key.cell, Action("pickup_key", key.cell)
    for d, door in enumerate(g.doors):
        if not s.unlocked[d] and door.color in held:
            yield door.cell, Action("unlock_door", d + 1)
    if not s.collected[goal]:
        cell = g.gems[goal].cell
        yield cell, Action("collect_gem", cell)


def _value(s: EnvState, goal: int, cache: QCache) -> float:
    if s.collected[goal]:
        return 0.0
    key = (s, goal)
    hit = cache.values.get(key)
    if hit is not None:
        return hit
    dist = _distances(s, cache)
    best = INF
    for target, action in _events(s, goal):
        for cell in s.grid.neighbors(target):
            d = dist.get(cell)
            if d is None or d + 1 >= best:
                continue
            nxt = transition(replace(s, pos=cell), action)
            rest = 0.0 if action.kind == "collect_gem" else _value(nxt, goal, cache)
            best = min(best, d + 1 + rest)
    cache.values[key] = best
    return best


def state_value(s: EnvState, goal: str, cache: QCache | None = None) -> float:
    """Length of a shortest plan from ``s`` that collects ``goal``; inf if none."""
    return _value(s, s.grid.gem_index(goal), cache if cache is not None else _DEFAULT_CACHE)


def q_star(s: EnvState, a: Action, goal: str, cache: QCache | None = None) -> float:
    """Unit cost of ``a`` plus the optimal remaining cost."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    key = (s, a, goal)
    hit = cache.q_values.get(key)
    if hit is None:
        hit = 1.0 + _value(transition(s, a), s.grid.gem_index(goal), cache)
        cache.q_values[key] = hit
    return hit


def manhattan_q(s: EnvState, a: Action, goal: str) -> float:
    """Unit cost plus the grid distance from the post-action position to the gem.

    Walls and doors are ignored; on an open field this equals ``q_star``.
    """
    nxt = transition(s, a)
    j = s.grid.gem_index(goal)
    if nxt.collected[j]:
        return 1.0
    gx, gy = s.grid.gems[j].cell
    return 1.0 + abs(nxt.pos[0] - gx) + abs(nxt.pos[1] - gy)


def q_mdp(belief: Belief, a: Action, goal: str, cache: QCache | None = None,
          unreachable: float | None = None, variant: str = "full") -> float:
    """Belief-weighted average of per-state costs.

    Infinite per-state costs are replaced by ``unreachable`` (default
    :func:`unreachable_penalty`); pass ``math.inf`` for the strict average.
    """
    total = 0.0
    for state, w in belief.items():
        if w == 0.0:
            continue
        if variant == "non_planning":
            q = manhattan_q(state, a, goal)
        else:
            q = q_star(state, a, goal, cache)
        if q == INF:
            q = unreachable if unreachable is not None else unreachable_penalty(state.grid)
        total += w * q
    return total


def boltzmann_log_probs(q: Sequence[float], beta: float) -> np.ndarray:
    """log softmax of ``-beta * q``; infinite costs get -inf, all-infinite gives uniform."""
    q = np.asarray(q, dtype=float)
    logits = np.where(np.isinf(q), -np.inf, -beta * np.where(np.isinf(q), 0.0, q))
    if not np.isfinite(logits).any():
        return np.full(len(q), -math.log(len(q)))
    top = logits.max()
    return logits - (top + math.log(np.exp(logits - top).sum()))


def boltzmann(q: Sequence[float], beta: float) -> np.ndarray:
    return np.exp(boltzmann_log_probs(q, beta))


def action_likelihoods(belief: Belief, goal: str, params: AgentPolicyParams = AgentPolicyParams(),
                       cache: QCache | None = None, unreachable: float | None = None) -> dict[Action, float]:
    """Boltzmann distribution over the valid actions of the belief's observable layer."""
    actions, logp = action_log_likelihoods(belief, goal, params, cache, unreachable)
    return {a: math.exp(lp) for a, lp in zip(actions, logp)}


def action_log_likelihoods(belief: Belief, goal: str, params: AgentPolicyParams = AgentPolicyParams(),
                           cache: QCache | None = None, unreachable: float | None = None
                           ) -> tuple[list[Action], np.ndarray]:
    actions = valid_actions(belief.states[0])
    q = [q_mdp(belief, a, goal, cache, unreachable, params.variant) for a in actions]
    return actions, boltzmann_log_probs(q, params.beta)


def action_likelihood(belief: Belief, goal: str, a: Action, params: AgentPolicyParams = AgentPolicyParams(),
                      cache: QCache | None = None) -> float:
    return action_likelihoods(belief, goal, params, cache).get(a, 0.0)
