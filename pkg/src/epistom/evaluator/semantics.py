"""Truth of epistemic statements in BToM posteriors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..btom.belief import Belief
from ..btom.bsips import Posterior
from ..elot.ast import Node
from ..elot.lower import Lowered, Prob, evaluate_lowered, lower
from ..elot.signature import DomainSignature
from ..elot.thresholds import DEFAULT_THRESHOLDS, ThresholdTable
from ..gridworld.facts import domain_signature, state_satisfies
from ..gridworld.grid import GridMap
from ..gridworld.state import EnvState

PRIOR_MODES = ("statement", "worlds")


@lru_cache(maxsize=262144)
def prob_of(b: Belief, phi: Node) -> float:
    """Expected truth of a base formula under a belief."""
    return float(sum(w for s, w in b.items() if state_satisfies(s, phi)))


@lru_cache(maxsize=None)
def grid_domain(grid: GridMap) -> DomainSignature:
    return domain_signature(grid)


class CompiledStatement:
    """A lowered statement with a per-(state, belief) truth memo."""

    def __init__(self, f: Node, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                 domain: DomainSignature | None = None):
        self.formula = f
        self.thresholds = thresholds
        self.domain = domain
        self._lowered: dict[GridMap, Lowered] = {}
        self._truth: dict[tuple[EnvState, Belief], bool] = {}

    def lowered(self, grid: GridMap) -> Lowered:
        hit = self._lowered.get(grid)
        if hit is None:
            hit = lower(self.formula, self.thresholds, self.domain or grid_domain(grid))
            if isinstance(hit, Prob):
                raise TypeError("a degree term has no truth value")
            self._lowered[grid] = hit
        return hit

    def __call__(self, s: EnvState, b: Belief) -> bool:
        key = (s, b)
        hit = self._truth.get(key)
        if hit is None:
            hit = evaluate_lowered(
                self.lowered(s.grid),
                lambda agent, phi: prob_of(b, phi),
                lambda phi: state_satisfies(s, phi),
            )
            self._truth[key] = hit
        return hit


def _compiled(f, thresholds, domain) -> CompiledStatement:
    if isinstance(f, CompiledStatement):
        return f
    return CompiledStatement(f, thresholds, domain)


def eval_epistemic(f: Node, s: EnvState, b: Belief, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                   domain: DomainSignature | None = None) -> bool:
    """Truth of a statement in world ``s`` for an agent holding belief ``b``."""
    return _compiled(f, thresholds, domain)(s, b)


def _mass(stmt: CompiledStatement, p: Posterior, t: int, weights: np.ndarray) -> float:
    pairs, inverse = p.pair_groups(t)
    per_pair = np.bincount(inverse, weights=weights, minlength=len(pairs))
    yes, no = [], []
    for (s, b), w in zip(pairs, per_pair):
        if w > 0:
            (yes if stmt(s, b) else no).append(w)
    # ratio form so that unanimous cases come out exactly 0 or 1
    return math.fsum(yes) / math.fsum(yes + no)


def statement_posterior(f, p: Posterior, t: int, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                        domain: DomainSignature | None = None) -> float:
    """Posterior probability that ``f`` holds of ``(s_t, b_t)`` given all evidence in ``p``."""
    return _mass(_compiled(f, thresholds, domain), p, t, p.weights())


def statement_prior(f, p: Posterior, t: int, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                    domain: DomainSignature | None = None) -> float:
    """Probability of ``f`` at ``t`` under the hypothesis prior."""
    return _mass(_compiled(f, thresholds, domain), p, t, p.prior_weights(t))


def likelihood_ratio_score(q: float, pi: float) -> float:
    """Posterior under a 50-50 prior on the statement; ``q`` itself when ``pi`` is 0 or 1."""
    if pi <= 0.0 or pi >= 1.0:
        return q
    up = q / pi
    down = (1.0 - q) / (1.0 - pi)
    return up / (up + down)


@dataclass(frozen=True)
class StatementScore:
    statement: str
    t: int
    posterior: float
    normalized_likelihood: float
    prior: str = "statement"


def normalized_likelihood(f, p: Posterior, t: int, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                          prior: str = "statement", domain: DomainSignature | None = None) -> float:
    return score_statement(f, p, t, thresholds, prior, domain).normalized_likelihood


def score_statement(f, p: Posterior, t: int, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                    prior: str = "statement", domain: DomainSignature | None = None,
                    statement_id: str = "") -> StatementScore:
    """Raw posterior and normalized likelihood; ``worlds`` mode scores with the raw posterior."""
    if prior not in PRIOR_MODES:
        raise ValueError(f"prior must be one of {PRIOR_MODES}")
    stmt = _compiled(f, thresholds, domain)
    q = statement_posterior(stmt, p, t)
    if prior == "worlds":
        return StatementScore(statement_id, t, q, q, prior)
    pi = statement_prior(stmt, p, t)
    return StatementScore(statement_id, t, q, likelihood_ratio_score(q, pi), prior)
