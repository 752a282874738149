"""Scoring statement sets over scenarios, with caching for parameter sweeps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..btom.bsips import Posterior
from ..elot.ast import Node
from ..elot.lower import threshold_names
from ..elot.thresholds import DEFAULT_THRESHOLDS, ThresholdTable
from ..planner import DEFAULT_BETA, AgentPolicyParams
from ..scenario import Scenario
from .fitting import Rating, RatingsDataset
from .semantics import CompiledStatement, score_statement

TENSES = ("current", "initial")


@dataclass(frozen=True)
class StatementSpec:
    id: str
    formula: Node
    tense: str = "current"
    text: str = ""

    def __post_init__(self):
        if self.tense not in TENSES:
            raise ValueError(f"tense must be one of {TENSES}, got {self.tense!r}")

    def time(self, tau: int) -> int:
        """Initial-belief statements look at t = 0, current ones at the judgment step."""
        return 0 if self.tense == "initial" else tau


class Experiment:
    """Scenarios and statements; posteriors are cached per inverse temperature."""

    def __init__(self, scenarios: Mapping[str, Scenario], statements: Mapping[str, StatementSpec], k: int = 3,
                 variant: str = "full", prior: str = "statement", dead_belief: str = "truth"):
        self.scenarios = dict(scenarios)
        self.statements = dict(statements)
        self.k = k
        self.variant = variant
        self.prior = prior
        self.dead_belief = dead_belief
        self._posteriors: dict[tuple[str, float], Posterior] = {}
        self._compiled: dict[tuple, CompiledStatement] = {}
        self._names: dict[str, tuple[str, ...]] = {}
        self._scores: dict[tuple, float] = {}

    def posterior(self, scenario: str, beta: float = DEFAULT_BETA) -> Posterior:
        key = (scenario, beta)
        if key not in self._posteriors:
            params = AgentPolicyParams(beta=beta, variant=self.variant)
            self._posteriors[key] = self.scenarios[scenario].posterior(params, self.k, dead_belief=self.dead_belief)
        return self._posteriors[key]

    def relevant(self, statement: str, thresholds: ThresholdTable) -> tuple[float, ...]:
        """Values of the thresholds the statement depends on; cache keys use only these."""
        names = self._names.get(statement)
        if names is None:
            grid = next(iter(self.scenarios.values())).grid
            lowered = CompiledStatement(self.statements[statement].formula).lowered(grid)
            names = self._names[statement] = tuple(sorted(threshold_names(lowered)))
        return tuple(getattr(thresholds, n) for n in names)

    def compiled(self, statement: str, thresholds: ThresholdTable) -> CompiledStatement:
        key = (statement, self.relevant(statement, thresholds))
        if key not in self._compiled:
            self._compiled[key] = CompiledStatement(self.statements[statement].formula, thresholds)
        return self._compiled[key]

    def score(self, scenario: str, statement: str, judgment_point: str,
              thresholds: ThresholdTable = DEFAULT_THRESHOLDS, beta: float = DEFAULT_BETA) -> float:
        key = (scenario, statement, judgment_point, self.relevant(statement, thresholds), beta)
        hit = self._scores.get(key)
        if hit is None:
            tau = self.scenarios[scenario].points()[judgment_point]
            p = self.posterior(scenario, beta).at(tau)
            spec = self.statements[statement]
            hit = score_statement(self.compiled(statement, thresholds), p, spec.time(tau), prior=self.prior
                                  ).normalized_likelihood
            self._scores[key] = hit
        return hit

    def items(self) -> list[tuple[str, str, str]]:
        """Every (scenario, statement, judgment point) triple."""
        return [(sc, st, jp) for sc, scenario in self.scenarios.items()
                for st in self.statements for jp in scenario.points()]

    def scores(self, items: Iterable[tuple[str, str, str]], thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
               beta: float = DEFAULT_BETA) -> list[float]:
        return [self.score(sc, st, jp, thresholds, beta) for sc, st, jp in items]

    def synthesize(self, items: Sequence[tuple[str, str, str]], thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                   beta: float = DEFAULT_BETA) -> RatingsDataset:
        """Ratings equal to the model's own scores, for recovery checks."""
        values = self.scores(items, thresholds, beta)
        return RatingsDataset([Rating(sc, st, jp, v) for (sc, st, jp), v in zip(items, values)])

    @staticmethod
    def _keys(data: RatingsDataset) -> list[tuple[str, str, str]]:
        return [(r.scenario, r.statement, r.judgment_point) for r in data.rows]

    def threshold_scorer(self, data: RatingsDataset, beta: float = DEFAULT_BETA):
        keys = self._keys(data)
        return lambda thresholds: self.scores(keys, thresholds, beta)

    def beta_scorer(self, data: RatingsDataset, thresholds: ThresholdTable = DEFAULT_THRESHOLDS):
        keys = self._keys(data)
        return lambda beta: self.scores(keys, thresholds, beta)
