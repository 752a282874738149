"""Doors, Keys & Gems: maps, states, dynamics and ground truth."""

from .facts import domain_signature, key_names, state_facts, state_satisfies, universe
from .grid import Box, Cell, Door, FloorKey, Gem, GridMap, MapError
from .initial import MAX_HIDDEN_KEYS, InconsistentRulesError, ScenarioRules, enumerate_initial_states
from .state import (
    HIDDEN,
    MOVE_ACTIONS,
    NO_OP,
    Action,
    EnvState,
    InvalidActionError,
    Observation,
    is_valid,
    observe,
    replay,
    state_consistent,
    transition,
    valid_actions,
)

__all__ = [
    "Action", "Box", "Cell", "Door", "EnvState", "FloorKey", "Gem", "GridMap", "HIDDEN", "InconsistentRulesError",
    "InvalidActionError", "MAX_HIDDEN_KEYS", "MOVE_ACTIONS", "MapError", "NO_OP", "Observation", "ScenarioRules",
    "domain_signature", "enumerate_initial_states", "is_valid", "key_names", "observe", "replay",
    "state_consistent", "state_facts", "state_satisfies", "transition", "universe", "valid_actions",
]
