"""Command line: score statements against scenarios, compare contexts.

::

    epistom run SCENARIO [--statements FILE] [options]
    epistom compare --statements FILE --pairs FILE [options]

SCENARIO is a YAML file or the name of a bundled scenario. Statement files
are CSV with columns ``id, tense, elot, sentence``; each row fills exactly
one of ``elot`` and ``sentence``. Sentences go through the translator
backend. Pair files are CSV with columns ``statement, home, others`` where
``others`` lists scenarios separated by spaces.

Exit status is 0 on success, 2 for bad input and 3 when no hypothesis can
explain the observed actions.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import yaml

from .btom import DEAD_POLICIES, DegeneratePosteriorError, Posterior, goal_posterior
from .elot import DEFAULT_THRESHOLDS, ElotError, Node, ThresholdTable, parse_elot, typecheck
from .evaluator import PRIOR_MODES, CompiledStatement, score_statement
from .planner import DEFAULT_BETA, VARIANTS, AgentPolicyParams
from .scenario import Scenario, ScenarioError, bundled_scenario, load_scenario
from .translator import TranslationError, TranslatorBackend, backend_from_spec, translate

SCORE_COLUMNS = ("scenario", "statement", "judgment_point", "t", "posterior", "normalized_likelihood", "variant")
COMPARE_COLUMNS = ("statement", "home", "in_context", "out_of_context", "difference", "accurate")
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    beta: float = DEFAULT_BETA
    k: int = 3
    variant: str = "full"
    prior: str = "statement"
    thresholds: ThresholdTable = DEFAULT_THRESHOLDS
    dead_belief: str = "truth"
    mixture: bool = False

    def echo(self) -> dict[str, Any]:
        return {"beta": self.beta, "k": self.k, "variant": self.variant, "prior": self.prior,
                "dead_belief": self.dead_belief, "mixture": self.mixture, "thresholds": self.thresholds.as_dict()}


@dataclass
class StatementRow:
    id: str
    tense: str
    candidates: list[tuple[Node, float]] = field(default_factory=list)

    def time(self, tau: int) -> int:
        return 0 if self.tense == "initial" else tau


def resolve_scenario(ref: str) -> Scenario:
    path = Path(ref)
    if path.suffix in (".yaml", ".yml") or path.exists():
        return load_scenario(path)
    try:
        return bundled_scenario(ref)
    except ScenarioError:
        raise InputError(f"no scenario file or bundled scenario named {ref!r}") from None


def _read_csv(path: str | Path, required: Sequence[str]) -> list[dict[str, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    reader = csv.DictReader(io.StringIO(text))
    missing = set(required) - set(reader.fieldnames or ())
    if reader.fieldnames is not None and missing:
        raise InputError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
    return [{k: (v or "").strip() for k, v in row.items() if k is not None} for row in reader]


def load_statements(path: str | Path | None, backend: TranslatorBackend | None = None,
                    mixture: bool = False) -> list[StatementRow]:
    if path is None:
        return []
    rows = []
    seen = set()
    for line, raw in enumerate(_read_csv(path, ("id", "tense")), start=2):
        where = f"{path}:{line}"
        sid, tense = raw["id"], raw["tense"] or "current"
        if not sid or sid in seen:
            raise InputError(f"{where}: statement id {sid!r} is empty or repeated")
        seen.add(sid)
        if tense not in ("current", "initial"):
            raise InputError(f"{where}: tense must be current or initial, got {tense!r}")
        elot, sentence = raw.get("elot", ""), raw.get("sentence", "")
        if bool(elot) == bool(sentence):
            raise InputError(f"{where}: give exactly one of elot or sentence")
        if elot:
            try:
                node = parse_elot(elot)
                typecheck(node)
            except ElotError as exc:
                raise InputError(f"{where}: {exc}") from None
            candidates = [(node, 1.0)]
        else:
            if backend is None:
                raise InputError(f"{where}: natural-language row needs a translator backend")
            try:
                found = translate(sentence, backend)
            except TranslationError as exc:
                raise InputError(f"{where}: {exc}") from None
            candidates = [(c.formula, c.weight) for c in found]
            if not mixture:
                candidates = [(candidates[0][0], 1.0)]
        rows.append(StatementRow(sid, tense, candidates))
    return rows


def parse_judgment_points(text: str) -> dict[str, int]:
    """``start=0,mid=5`` or plain steps ``0,5``."""
    points = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        label, _, value = item.rpartition("=")
        try:
            t = int(value)
        except ValueError:
            raise InputError(f"bad judgment point {item!r}") from None
        points[label or f"t{t}"] = t
    if not points:
        raise InputError("empty judgment point list")
    return points


def _posterior(scenario: Scenario, config: RunConfig) -> Posterior:
    params = AgentPolicyParams(beta=config.beta, variant=config.variant)
    return scenario.posterior(params, config.k, dead_belief=config.dead_belief)


def _score(row: StatementRow, p: Posterior, tau: int, config: RunConfig) -> tuple[float, float]:
    """Weight-averaged raw posterior and normalized likelihood over the row's candidates."""
    q = lik = 0.0
    for node, w in row.candidates:
        stmt = CompiledStatement(node, config.thresholds)
        s = score_statement(stmt, p.at(tau), row.time(tau), prior=config.prior)
        q += w * s.posterior
        lik += w * s.normalized_likelihood
    return q, lik


def run_scenario(scenario: Scenario, statements: Sequence[StatementRow], config: RunConfig = RunConfig(),
                 judgment_points: dict[str, int] | None = None) -> list[dict[str, Any]]:
    """Statement rows per judgment point, then goal marginals at every step."""
    points = judgment_points or scenario.points()
    for label, t in points.items():
        if not 0 <= t <= scenario.T:
            raise InputError(f"judgment point {label}={t} outside 0..{scenario.T}")
    p = _posterior(scenario, config)
    table = []
    ordered = sorted(points.items(), key=lambda kv: (kv[1], kv[0]))
    for row in statements:
        for label, tau in ordered:
            q, lik = _score(row, p, tau, config)
            table.append(dict(scenario=scenario.name, statement=row.id, judgment_point=label, t=tau,
                              posterior=q, normalized_likelihood=lik, variant=config.variant))
    labels = {t: label for label, t in ordered}
    for t in range(scenario.T + 1):
        for goal, w in goal_posterior(p, t).items():
            table.append(dict(scenario=scenario.name, statement=f"goal:{goal}", judgment_point=labels.get(t, ""),
                              t=t, posterior=w, normalized_likelihood=None, variant=config.variant))
    return table


def run_context_comparison(pairs: Iterable[tuple[StatementRow, str, Sequence[str]]], config: RunConfig = RunConfig(),
                           judgment_point: str = "final") -> list[dict[str, Any]]:
    """In-context score against the mean over the other scenarios, at one judgment point."""
    scenarios: dict[str, Scenario] = {}
    posteriors: dict[str, Posterior] = {}

    def lik(row: StatementRow, ref: str) -> float:
        if ref not in scenarios:
            scenarios[ref] = resolve_scenario(ref)
            posteriors[ref] = _posterior(scenarios[ref], config)
        points = scenarios[ref].points()
        if judgment_point not in points:
            raise InputError(f"scenario {ref} has no judgment point {judgment_point!r}")
        return _score(row, posteriors[ref], points[judgment_point], config)[1]

    table = []
    for row, home, others in pairs:
        if not others:
            raise InputError(f"statement {row.id}: no out-of-context scenarios")
        inside = lik(row, home)
        outside = sum(lik(row, o) for o in others) / len(others)
        table.append(dict(statement=row.id, home=home, in_context=inside, out_of_context=outside,
                          difference=inside - outside, accurate=int(inside > outside)))
    return table


def accuracy(table: Sequence[dict[str, Any]]) -> float:
    return sum(r["accurate"] for r in table) / len(table) if table else 0.0


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return f"{value:.9g}"
    return "" if value is None else value


def emit(table: Sequence[dict[str, Any]], fmt: str = "csv", config: dict[str, Any] | None = None,
         columns: Sequence[str] = SCORE_COLUMNS) -> bytes:
    """CSV or JSON lines with fixed column order; floats carry 9 significant digits.

    With ``config`` the first line records the run settings: a ``#`` comment
    in CSV, a ``{"config": ...}`` object in JSON lines.
    """
    out = io.StringIO()
    if fmt == "csv":
        if config is not None:
            out.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in table:
            writer.writerow([_cell(row.get(c)) for c in columns])
    elif fmt == "jsonl":
        if config is not None:
            out.write(json.dumps({"config": config}, sort_keys=True) + "\n")
        for row in table:
            cells = {}
            for c in columns:
                v = row.get(c)
                cells[c] = float(f"{v:.9g}") if isinstance(v, float) else v
            out.write(json.dumps(cells) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return out.getvalue().encode()


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--beta", type=float, default=DEFAULT_BETA, help="inverse temperature of the agent model")
    common.add_argument("--particles", "-k", type=int, default=3, dest="k", help="particles per belief")
    common.add_argument("--variant", choices=VARIANTS, default="full")
    common.add_argument("--prior", choices=PRIOR_MODES, default="statement")
    common.add_argument("--thresholds", help="JSON or YAML file of threshold overrides")
    common.add_argument("--dead-belief", choices=DEAD_POLICIES, default="truth",
                        help="what replaces a belief that observations rule out entirely")
    common.add_argument("--backend", default="fixture", help="fixture or external:<command>")
    common.add_argument("--corpus", help="TSV corpus for the fixture backend")
    common.add_argument("--mixture", action="store_true",
                        help="average over all translation candidates instead of using the top one")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--no-config", action="store_true", help="omit the settings line")

    parser = argparse.ArgumentParser(prog="epistom", description="Score epistemic statements against scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="score statements over one scenario")
    run.add_argument("scenario")
    run.add_argument("--statements", help="statement CSV; without it only goal marginals are reported")
    run.add_argument("--judgment-points", help="e.g. start=0,mid=5 or 0,5")
    cmp = sub.add_parser("compare", parents=[common], help="in-context versus out-of-context scores")
    cmp.add_argument("--statements", required=True)
    cmp.add_argument("--pairs", required=True, help="CSV with columns statement, home, others")
    cmp.add_argument("--judgment-point", default="final")
    return parser


def _config(args) -> RunConfig:
    if args.k < 1:
        raise InputError("--particles must be at least 1")
    if not args.beta > 0:
        raise InputError("--beta must be positive")
    thresholds = DEFAULT_THRESHOLDS
    if args.thresholds:
        try:
            thresholds = ThresholdTable.load(args.thresholds)
        except (OSError, KeyError, ValueError, yaml.YAMLError) as exc:
            raise InputError(f"bad thresholds file {args.thresholds}: {exc}") from None
    return RunConfig(args.beta, args.k, args.variant, args.prior, thresholds, args.dead_belief, args.mixture)


def _backend(args, needed: bool) -> TranslatorBackend | None:
    if not needed:
        return None
    try:
        return backend_from_spec(args.backend, args.corpus)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _needs_backend(path: str | None) -> bool:
    return path is not None and any(r.get("sentence") for r in _read_csv(path, ("id", "tense")))


def _main(args) -> bytes:
    config = _config(args)
    backend = _backend(args, _needs_backend(args.statements))
    statements = load_statements(args.statements, backend, config.mixture)
    echo = None if args.no_config else config.echo()
    if args.command == "run":
        scenario = resolve_scenario(args.scenario)
        points = parse_judgment_points(args.judgment_points) if args.judgment_points else None
        return emit(run_scenario(scenario, statements, config, points), args.format, echo)
    by_id = {s.id: s for s in statements}
    pairs = []
    for line, raw in enumerate(_read_csv(args.pairs, ("statement", "home", "others")), start=2):
        if raw["statement"] not in by_id:
            raise InputError(f"{args.pairs}:{line}: unknown statement {raw['statement']!r}")
        pairs.append((by_id[raw["statement"]], raw["home"], raw["others"].split()))
    table = run_context_comparison(pairs, config, args.judgment_point)
    if echo is not None:
        echo = dict(echo, accuracy=accuracy(table))
    return emit(table, args.format, echo, COMPARE_COLUMNS)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        data = _main(args)
    except DegeneratePosteriorError as exc:
        print(f"epistom: degenerate posterior: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, ScenarioError, ElotError, TranslationError, OSError) as exc:
        print(f"epistom: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
