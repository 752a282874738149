"""Particle beliefs over world states and their filtering."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..gridworld.state import EnvState, InvalidActionError, observe, transition

WEIGHT_TOL = 1e-12


class DeadBeliefError(ValueError):
    """Every particle was ruled out."""


@dataclass(frozen=True)
class Belief:
    """Weighted support states; zero-weight particles are dropped.

    Support states share one observable layer and differ only in the
    contents of unopened boxes.
    """

    states: tuple[EnvState, ...]
    weights: tuple[float, ...]
    k: int | None = None

    def __post_init__(self):
        if len(self.states) != len(self.weights):
            raise ValueError("states and weights differ in length")
        if not self.states or not any(w > 0 for w in self.weights):
            raise DeadBeliefError("belief has no positive weight")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative particle weight")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"belief weights sum to {total}, not 1")
        layer = observe(self.states[0])
        for s in self.states[1:]:
            if observe(s) != layer:
                raise ValueError("belief support states are observationally distinct")

    @classmethod
    def from_weights(cls, pairs: Sequence[tuple[EnvState, float]], k: int | None = None) -> Belief:
        """Merge duplicate states, drop zeros and renormalize."""
        merged: dict[EnvState, float] = {}
        for s, w in pairs:
            if w > 0:
                merged[s] = merged.get(s, 0.0) + w
        total = math.fsum(merged.values())
        if total <= 0:
            raise DeadBeliefError("belief has no positive weight")
        return cls(tuple(merged), tuple(w / total for w in merged.values()), k)

    @classmethod
    def point(cls, state: EnvState) -> Belief:
        return cls((state,), (1.0,), 1)

    @classmethod
    def uniform(cls, states: Sequence[EnvState]) -> Belief:
        return cls.from_weights([(s, 1.0) for s in states])

    def items(self) -> Iterator[tuple[EnvState, float]]:
        return zip(self.states, self.weights)

    def weight_of(self, state: EnvState) -> float:
        return sum(w for s, w in self.items() if s == state)

    def __len__(self) -> int:
        return len(self.states)


def enumerate_beliefs(states: Sequence[EnvState], k: int = 3) -> list[Belief]:
    """Every way to place ``k`` particles on ``states``: C(n + k - 1, k) beliefs."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not states:
        raise ValueError("need at least one state")
    out = []
    for combo in itertools.combinations_with_replacement(range(len(states)), k):
        counts = Counter(combo)
        idx = sorted(counts)
        out.append(Belief(tuple(states[i] for i in idx), tuple(counts[i] / k for i in idx), k))
    return out


def belief_update(b: Belief, s_new: EnvState, a_prev) -> Belief | None:
    """Advance every particle by ``a_prev`` and drop those whose view differs from ``s_new``'s.

    Returns ``None`` for a dead belief.
    """
    seen = observe(s_new)
    kept = []
    for s, w in b.items():
        try:
            nxt = transition(s, a_prev)
        except InvalidActionError:
            continue
        if observe(nxt) == seen:
            kept.append((nxt, w))
    if not kept:
        return None
    return Belief.from_weights(kept, b.k)

