"""Exact belief-space sequential inverse plan search.

Every (goal, initial state, initial belief) hypothesis is stepped through the
observed actions. At step t the simulated state is ``s_t = T(s_{t-1}, a_t)``,
the hypothesis is weighted by ``P(a_t | b_{t-1}, g)`` and by the indicator
that ``s_t`` looks like the recorded observation ``o_t``, and the belief is
filtered to ``b_t``. Weights live in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..gridworld.state import Action, EnvState, InvalidActionError, Observation, observe, transition
from ..planner import AgentPolicyParams, QCache, action_log_likelihoods
from .belief import Belief, belief_update

DEAD_POLICIES = ("truth", "uniform", "prune")
NEG_INF = -math.inf


class DegeneratePosteriorError(RuntimeError):
    pass


@dataclass(frozen=True)
class Hypothesis:
    goal: str
    s0: int  # index into the initial states
    b0: int  # index into the initial beliefs (0 under true_belief)


def logsumexp(x: np.ndarray) -> float:
    top = np.max(x) if x.size else NEG_INF
    if top == NEG_INF:
        return NEG_INF
    return float(top + math.log(np.exp(x - top).sum()))


def normalize_log(x: np.ndarray) -> np.ndarray:
    total = logsumexp(x)
    if total == NEG_INF:
        raise DegeneratePosteriorError("all hypothesis weights are zero")
    return np.exp(x - total)


class BSIPS:
    """Incremental engine; ``step`` consumes one action and the observation after it.

    ``dead_belief`` says what happens when filtering rules out every particle
    of a simulated belief: ``prune`` gives the hypothesis weight 0,
    ``truth`` replaces the belief by a point mass on the simulated state and
    ``uniform`` spreads it evenly over the states still possible.
    """

    def __init__(self, goals: Sequence[str], initial_states: Sequence[EnvState],
                 initial_beliefs: Sequence[Belief] | None, o0: Observation,
                 params: AgentPolicyParams = AgentPolicyParams(), *, cache: QCache | None = None,
                 dead_belief: str = "truth", unreachable: float | None = None):
        if dead_belief not in DEAD_POLICIES:
            raise ValueError(f"dead_belief must be one of {DEAD_POLICIES}")
        if not goals or not initial_states:
            raise ValueError("need at least one goal and one initial state")
        self.goals = tuple(goals)
        self.initial_states = tuple(initial_states)
        self.params = params
        self.cache = cache if cache is not None else QCache()
        self.dead_belief = dead_belief
        self.unreachable = unreachable
        if params.variant == "true_belief":
            self.initial_beliefs = None
            beliefs0 = [[Belief.point(s)] for s in self.initial_states]
        else:
            if not initial_beliefs:
                raise ValueError("need at least one initial belief")
            self.initial_beliefs = tuple(initial_beliefs)
            beliefs0 = [list(self.initial_beliefs) for _ in self.initial_states]
        n_g, n_s, n_b = len(self.goals), len(self.initial_states), len(beliefs0[0])
        self.shape = (n_g, n_s, n_b)
        self.actions: list[Action] = []
        self.observations: list[Observation] = [o0]
        self.states: list[list[EnvState | None]] = [list(self.initial_states)]
        self.beliefs: list[list[list[Belief | None]]] = [beliefs0]
        uniform = -math.log(n_g) - math.log(n_s) - math.log(n_b)
        prior = np.full(self.shape, uniform)
        seen = np.array([observe(s) == o0 for s in self.initial_states])
        self.log_prior = [prior]
        self.log_weights = [np.where(seen[None, :, None], prior, NEG_INF)]
        if logsumexp(self.log_weights[0]) == NEG_INF:
            raise DegeneratePosteriorError("no initial state matches the initial observation")
        self._likelihoods: dict[tuple[Belief, str], tuple[dict[Action, int], np.ndarray]] = {}
        self._updates: dict[tuple[Belief, Observation, Action], Belief | None] = {}
        self._groups: dict[int, tuple[list, np.ndarray]] = {}

    @property
    def T(self) -> int:
        return len(self.actions)

    @property
    def hypotheses(self) -> list[Hypothesis]:
        n_g, n_s, n_b = self.shape
        return [Hypothesis(self.goals[g], s, b) for g in range(n_g) for s in range(n_s) for b in range(n_b)]

    def log_likelihood(self, belief: Belief, goal: str, action: Action) -> float:
        key = (belief, goal)
        hit = self._likelihoods.get(key)
        if hit is None:
            actions, logp = action_log_likelihoods(belief, goal, self.params, self.cache, self.unreachable)
            hit = ({a: i for i, a in enumerate(actions)}, logp)
            self._likelihoods[key] = hit
        index, logp = hit
        i = index.get(action)
        return NEG_INF if i is None else float(logp[i])

    def _update(self, b: Belief, s_new: EnvState, action: Action, possible: list[EnvState]) -> Belief | None:
        key = (b, observe(s_new), action)
        if key in self._updates:
            nxt = self._updates[key]
        else:
            nxt = self._updates[key] = belief_update(b, s_new, action)
        if nxt is not None or self.dead_belief == "prune":
            return nxt
        if self.dead_belief == "truth":
            return Belief.point(s_new)
        seen = observe(s_new)
        return Belief.uniform([s for s in possible if observe(s) == seen])

    def step(self, action: Action, observation: Observation) -> None:
        n_g, n_s, n_b = self.shape
        prev_states, prev_beliefs = self.states[-1], self.beliefs[-1]
        states: list[EnvState | None] = []
        for s in prev_states:
            try:
                states.append(None if s is None else transition(s, action))
            except InvalidActionError:
                states.append(None)
        possible = list(dict.fromkeys(s for s in states if s is not None))
        beliefs = []
        for si, s in enumerate(states):
            row = []
            for bi in range(n_b):
                b = prev_beliefs[si][bi]
                row.append(None if (b is None or s is None) else self._update(b, s, action, possible))
            beliefs.append(row)
        seen = np.array([s is not None and observe(s) == observation for s in states])
        defined = np.array([[states[si] is not None and beliefs[si][bi] is not None for bi in range(n_b)]
                            for si in range(n_s)])
        prev_w = self.log_weights[-1]
        log_w = np.full(self.shape, NEG_INF)
        for g in range(n_g):
            goal = self.goals[g]
            for si in range(n_s):
                if not seen[si]:
                    continue
                for bi in range(n_b):
                    if prev_w[g, si, bi] == NEG_INF or not defined[si, bi]:
                        continue
                    ll = self.log_likelihood(prev_beliefs[si][bi], goal, action)
                    log_w[g, si, bi] = prev_w[g, si, bi] + ll
        if logsumexp(log_w) == NEG_INF:
            raise DegeneratePosteriorError(f"no hypothesis explains step {self.T + 1} ({action})")
        self.actions.append(action)
        self.observations.append(observation)
        self.states.append(states)
        self.beliefs.append(beliefs)
        self.log_weights.append(log_w)
        self.log_prior.append(np.where(defined[None, :, :], self.log_prior[-1], NEG_INF))

    def run(self, actions: Sequence[Action], observations: Sequence[Observation]) -> Posterior:
        """Consume ``actions`` with the observations ``o_1..o_T`` that follow them."""
        if len(actions) != len(observations):
            raise ValueError("need one observation per action")
        for a, o in zip(actions, observations):
            self.step(a, o)
        return self.posterior()

    def posterior(self) -> Posterior:
        return Posterior(self, self.T)

    def pair_groups(self, t: int) -> tuple[list, np.ndarray]:
        hit = self._groups.get(t)
        if hit is None:
            n_g, n_s, n_b = self.shape
            index: dict = {}
            cells = np.empty((n_s, n_b), dtype=np.int64)
            for si in range(n_s):
                for bi in range(n_b):
                    pair = (self.states[t][si], self.beliefs[t][si][bi])
                    cells[si, bi] = index.setdefault(pair, len(index))
            hit = self._groups[t] = (list(index), np.tile(cells.ravel(), n_g))
        return hit


class Posterior:
    """Snapshot view of an engine run, truncated at step ``T``.

    Weights always carry the evidence up to ``T``; ``state``/``belief`` give
    the hypothesis' simulated values at any ``t <= T``.
    """

    def __init__(self, engine: BSIPS, T: int):
        if not 0 <= T <= engine.T:
            raise ValueError(f"T={T} outside recorded range 0..{engine.T}")
        self.engine = engine
        self.T = T
        self.hypotheses = engine.hypotheses
        self.goals = engine.goals

    def at(self, tau: int) -> Posterior:
        """The posterior given evidence only through ``tau``."""
        return Posterior(self.engine, tau)

    def _check(self, t: int) -> None:
        if not 0 <= t <= self.T:
            raise ValueError(f"t={t} outside 0..{self.T}")

    def log_weights(self) -> np.ndarray:
        return self.engine.log_weights[self.T].ravel()

    def weights(self) -> np.ndarray:
        """Normalized weights in hypothesis order."""
        return normalize_log(self.log_weights())

    def prior_weights(self, t: int | None = None) -> np.ndarray:
        """Normalized prior over hypotheses whose simulation is defined at ``t``."""
        t = self.T if t is None else t
        self._check(t)
        return normalize_log(self.engine.log_prior[t].ravel())

    def state(self, h: int, t: int) -> EnvState | None:
        _, n_s, n_b = self.engine.shape
        return self.engine.states[t][(h // n_b) % n_s]

    def belief(self, h: int, t: int) -> Belief | None:
        _, n_s, n_b = self.engine.shape
        return self.engine.beliefs[t][(h // n_b) % n_s][h % n_b]

    def initial_belief(self, h: int) -> Belief:
        return self.belief(h, 0)

    def pair_groups(self, t: int) -> tuple[list[tuple[EnvState | None, Belief | None]], np.ndarray]:
        """Distinct ``(s_t, b_t)`` pairs and, per hypothesis, the index of its pair."""
        self._check(t)
        return self.engine.pair_groups(t)

    def pairs(self, t: int) -> list[tuple[EnvState | None, Belief | None]]:
        self._check(t)
        _, n_s, n_b = self.engine.shape
        states, beliefs = self.engine.states[t], self.engine.beliefs[t]
        return [(states[(h // n_b) % n_s], beliefs[(h // n_b) % n_s][h % n_b]) for h in range(len(self.hypotheses))]


def goal_posterior(p: Posterior, t: int | None = None) -> dict[str, float]:
    """Goal marginal given the evidence through ``t`` (default: all of it)."""
    q = p.at(p.T if t is None else t)
    w = q.weights().reshape(q.engine.shape).sum(axis=(1, 2))
    return {g: float(x) for g, x in zip(q.goals, w)}


def joint_state_belief_posterior(p: Posterior, t: int) -> list[tuple[tuple[EnvState, Belief], float]]:
    """Distribution over distinct ``(s_t, b_t)`` pairs, goals marginalized out."""
    w = p.weights()
    acc: dict[tuple[EnvState, Belief], float] = {}
    for (s, b), x in zip(p.pairs(t), w):
        if x > 0:
            acc[(s, b)] = acc.get((s, b), 0.0) + float(x)
    return list(acc.items())


def initial_state_posterior(p: Posterior) -> list[float]:
    w = p.weights().reshape(p.engine.shape).sum(axis=(0, 2))
    return [float(x) for x in w]
