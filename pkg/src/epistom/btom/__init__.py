"""Bayesian theory of mind: particle beliefs and exact inverse planning."""

from __future__ import annotations

from ..gridworld.initial import ScenarioRules, enumerate_initial_states
from ..gridworld.state import Action, EnvState, observe, replay
from ..planner import AgentPolicyParams, QCache
from .belief import Belief, DeadBeliefError, belief_update, enumerate_beliefs
from .bsips import (
    BSIPS,
    DEAD_POLICIES,
    DegeneratePosteriorError,
    Hypothesis,
    Posterior,
    goal_posterior,
    initial_state_posterior,
    joint_state_belief_posterior,
)


def build_engine(true_s0: EnvState, rules: ScenarioRules = ScenarioRules(), k: int = 3,
                 params: AgentPolicyParams = AgentPolicyParams(), goals=None, **kwargs) -> BSIPS:
    """Engine over all gems, the initial states consistent with what the agent sees, and their k-particle beliefs."""
    o0 = observe(true_s0)
    states = enumerate_initial_states(true_s0.grid, o0, rules)
    goals = tuple(goals) if goals is not None else tuple(g.name for g in true_s0.grid.gems)
    beliefs = None if params.variant == "true_belief" else enumerate_beliefs(states, k)
    return BSIPS(goals, states, beliefs, o0, params, **kwargs)


def infer(true_s0: EnvState, actions: list[Action], **kwargs) -> Posterior:
    """Replay ``actions`` from the true initial state and run the engine on them."""
    engine = build_engine(true_s0, **kwargs)
    trajectory = replay(true_s0, actions)
    return engine.run(actions, [observe(s) for s in trajectory[1:]])


__all__ = [
    "BSIPS", "Belief", "DEAD_POLICIES", "DeadBeliefError", "DegeneratePosteriorError", "Hypothesis", "Posterior",
    "QCache", "belief_update", "build_engine", "enumerate_beliefs", "goal_posterior", "infer",
    "initial_state_posterior", "joint_state_belief_posterior",
]
