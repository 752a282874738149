"""Lowering epistemic formulas to probability comparisons over base formulas."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

from .ast import And, Const, Exists, Forall, Implies, Node, Not, Op, Or, Pred, class_binding, restriction_filter, substitute
from .errors import LoweringError
from .printer import print_elot
from .signature import DEFAULT_SIGNATURE, GRADABLE, MODAL_THRESHOLD_OPS, DomainSignature
from .thresholds import DEFAULT_THRESHOLDS, ThresholdTable

# absolute slack for threshold comparisons, so Pr = 0.7 satisfies >= 0.7
EPS = 1e-9


@dataclass(frozen=True)
class Prob:
    agent: str
    formula: Node


@dataclass(frozen=True)
class Threshold:
    symbol: str  # printed form, e.g. threshold(believes)
    value: float


Term = Union[Prob, Threshold]


@dataclass(frozen=True)
class Cmp:
    op: str  # one of >=, >, <=, <
    left: Term
    right: Term


@dataclass(frozen=True)
class BaseAtom:
    """Truth of a ground base formula in the actual world state."""

    formula: Node


@dataclass(frozen=True)
class LAnd:
    args: tuple[Lowered, ...]


@dataclass(frozen=True)
class LOr:
    args: tuple[Lowered, ...]


@dataclass(frozen=True)
class LNot:
    arg: Lowered


@dataclass(frozen=True)
class LConst:
    value: bool


Lowered = Union[Cmp, BaseAtom, LAnd, LOr, LNot, LConst]


def lower(node: Node, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
          domain: DomainSignature = DEFAULT_SIGNATURE) -> Lowered | Prob:
    """Rewrite ``node`` into a lowered formula.

    A ``degree`` term lowers to its bare :class:`Prob`.
    """
    return _Lowerer(thresholds, domain).statement(node)


class _Lowerer:
    def __init__(self, thresholds: ThresholdTable, domain: DomainSignature):
        self.th = thresholds
        self.domain = domain

    def threshold(self, name: str) -> Threshold:
        try:
            return Threshold(f"threshold({name})", self.th.threshold(name))
        except KeyError as exc:
            raise LoweringError(str(exc)) from None

    def members(self, cls: str) -> tuple[str, ...]:
        try:
            return self.domain.members(cls)
        except KeyError as exc:
            raise LoweringError(exc.args[0]) from None

    def instances(self, class_atom: Pred, body: Node) -> list[tuple[str, Node]]:
        var = class_atom.args[0].name
        return [(obj, substitute(body, var, Const(obj))) for obj in self.members(class_atom.name)]

    def statement(self, node: Node):
        if isinstance(node, Op):
            if node.name == "degree":
                return self.degree(node.args[0], node.args[1].name, node.args[2])
            return self.op(node)
        if isinstance(node, And):
            return LAnd(tuple(self.statement(a) for a in node.args))
        if isinstance(node, Or):
            return LOr(tuple(self.statement(a) for a in node.args))
        if isinstance(node, Not):
            return LNot(self.statement(node.arg))
        if isinstance(node, Implies):
            return LOr((LNot(self.statement(node.lhs)), self.statement(node.rhs)))
        if isinstance(node, (Exists, Forall)):
            return self.quantified(node)
        raise LoweringError(f"cannot lower a non-epistemic node at statement level: {print_elot(node)}")

    def quantified(self, node: Exists | Forall) -> Lowered:
        binding = class_binding(node.restriction)
        extra = restriction_filter(node.restriction)
        parts = []
        for obj, body in self.instances(binding, node.body):
            guard = [BaseAtom(substitute(f, binding.args[0].name, Const(obj))) for f in extra]
            inner = self.statement(body)
            if isinstance(node, Exists):
                parts.append(LAnd((*guard, inner)) if guard else inner)
            else:
                parts.append(LOr((*(LNot(g) for g in guard), inner)) if guard else inner)
        if not parts:
            return LConst(isinstance(node, Forall))
        if len(parts) == 1:
            return parts[0]
        return LOr(tuple(parts)) if isinstance(node, Exists) else LAnd(tuple(parts))

    def believes(self, agent: str, phi: Node) -> Cmp:
        return Cmp(">=", Prob(agent, phi), self.threshold("believes"))

    def knows_that(self, agent: str, phi: Node) -> Lowered:
        return LAnd((self.believes(agent, phi), BaseAtom(phi)))

    def op(self, node: Op) -> Lowered:
        name, args = node.name, node.args
        agent = args[0].name
        if name == "believes":
            return self.believes(agent, args[1])
        if name == "believes_modal":
            return self.modal(args[1], agent)
        if name == "knows_that":
            return self.knows_that(agent, args[1])
        if name == "knows_if":
            return LOr((self.knows_that(agent, args[1]), self.knows_that(agent, Not(args[1]))))
        if name == "not_knows_that":
            return LAnd((LNot(self.believes(agent, args[1])), BaseAtom(args[1])))
        if name == "not_knows_if":
            return LNot(LOr((self.knows_that(agent, args[1]), self.knows_that(agent, Not(args[1])))))
        if name == "certain_that":
            return Cmp(">=", Prob(agent, args[1]), self.threshold("certain"))
        if name == "uncertain_if":
            th = self.threshold("uncertain")
            return LAnd((Cmp("<", Prob(agent, args[1]), th), Cmp("<", Prob(agent, args[2]), th)))
        if name in ("knows_about", "certain_about"):
            parts = []
            for _, phi in self.instances(args[1], args[2]):
                if name == "knows_about":
                    parts.append(self.knows_that(agent, phi))
                else:
                    parts.append(Cmp(">=", Prob(agent, phi), self.threshold("certain")))
            return _join(LOr, parts, empty=False)
        if name == "uncertain_about":
            th = self.threshold("uncertain")
            parts = [Cmp("<", Prob(agent, phi), th) for _, phi in self.instances(args[1], args[2])]
            return _join(LAnd, parts, empty=True)
        raise LoweringError(f"{name} is not a statement-level operator")

    def degree(self, pred: Node, agent: str, phi: Node) -> Prob:
        if not isinstance(pred, Const) or pred.name not in GRADABLE:
            raise LoweringError(f"not a gradable predicate: {pred!r}")
        return Prob(agent, phi)

    def modal(self, fn: Node, agent: str) -> Lowered:
        if not isinstance(fn, Op):
            raise LoweringError(f"expected a modal function, got {print_elot(fn)}")
        name, args = fn.name, fn.args
        if name in MODAL_THRESHOLD_OPS:
            return Cmp(">=", Prob(agent, args[0]), self.threshold(name))
        if name == "unlikely":
            return Cmp("<=", Prob(agent, args[0]), self.threshold("unlikely"))
        if name in ("more", "less"):
            op = ">" if name == "more" else "<"
            return Cmp(op, self.degree(args[0], agent, args[1]), self.degree(args[0], agent, args[2]))
        if name in ("most_sup", "least_sup"):
            op = ">=" if name == "most_sup" else "<="
            target = args[1]
            class_atom, body = args[2], args[3]
            var = class_atom.args[0].name
            mine = self.degree(args[0], agent, substitute(body, var, target))
            parts = [
                Cmp(op, mine, self.degree(args[0], agent, phi))
                for obj, phi in self.instances(class_atom, body)
                if not (isinstance(target, Const) and obj == target.name)
            ]
            return _join(LAnd, parts, empty=True)
        if name in ("most_str", "least_str"):
            th = self.threshold(GRADABLE[args[0].name])
            alpha = self.th.most
            if name == "most_str":
                bound = Threshold(f"min(1, *(multiplier(most), {th.symbol}))", min(1.0, alpha * th.value))
                return Cmp(">=", self.degree(args[0], agent, args[1]), bound)
            bound = Threshold(f"/({th.symbol}, multiplier(most))", th.value / alpha)
            return Cmp("<=", self.degree(args[0], agent, args[1]), bound)
        raise LoweringError(f"{name} is not a modal function")


def _join(cls, parts: list, empty: bool) -> Lowered:
    if not parts:
        return LConst(empty)
    if len(parts) == 1:
        return parts[0]
    return cls(tuple(parts))


def negate(lowered: Lowered) -> Lowered:
    """Negation pushed into a single comparison where possible."""
    if isinstance(lowered, Cmp):
        return Cmp({">=": "<", ">": "<=", "<=": ">", "<": ">="}[lowered.op], lowered.left, lowered.right)
    return LNot(lowered)


def compare(op: str, left: float, right: float) -> bool:
    if op == ">=":
        return left >= right - EPS
    if op == ">":
        return left > right + EPS
    if op == "<=":
        return left <= right + EPS
    if op == "<":
        return left < right - EPS
    raise ValueError(op)


def evaluate_lowered(lowered: Lowered, prob: Callable[[str, Node], float], base: Callable[[Node], bool]) -> bool:
    """Evaluate a lowered formula given ``Pr`` values and actual-world base truth."""
    if isinstance(lowered, Cmp):
        return compare(lowered.op, _term_value(lowered.left, prob), _term_value(lowered.right, prob))
    if isinstance(lowered, BaseAtom):
        return base(lowered.formula)
    if isinstance(lowered, LAnd):
        return all(evaluate_lowered(a, prob, base) for a in lowered.args)
    if isinstance(lowered, LOr):
        return any(evaluate_lowered(a, prob, base) for a in lowered.args)
    if isinstance(lowered, LNot):
        return not evaluate_lowered(lowered.arg, prob, base)
    if isinstance(lowered, LConst):
        return lowered.value
    raise TypeError(f"not a lowered formula: {lowered!r}")


def _term_value(term: Term, prob) -> float:
    if isinstance(term, Prob):
        return prob(term.agent, term.formula)
    return term.value


def print_lowered(lowered) -> str:
    """Prefix syntax, e.g. ``>=(prob_of(player, empty(box3)), threshold(believes))``."""
    if isinstance(lowered, Prob):
        return f"prob_of({lowered.agent}, {print_elot(lowered.formula)})"
    if isinstance(lowered, Threshold):
        return lowered.symbol
    if isinstance(lowered, Cmp):
        return f"{lowered.op}({print_lowered(lowered.left)}, {print_lowered(lowered.right)})"
    if isinstance(lowered, BaseAtom):
        return print_elot(lowered.formula)
    if isinstance(lowered, LAnd):
        return f"and({', '.join(print_lowered(a) for a in lowered.args)})"
    if isinstance(lowered, LOr):
        return f"or({', '.join(print_lowered(a) for a in lowered.args)})"
    if isinstance(lowered, LNot):
        return f"not({print_lowered(lowered.arg)})"
    if isinstance(lowered, LConst):
        return "true" if lowered.value else "false"
    raise TypeError(f"not a lowered formula: {lowered!r}")


_THRESHOLD_REF = re.compile(r"threshold\((\w+)\)|multiplier\((most)\)")


def threshold_names(lowered) -> frozenset[str]:
    """Names of the thresholds (and multiplier) a lowered formula depends on."""
    if isinstance(lowered, Threshold):
        return frozenset(a or b for a, b in _THRESHOLD_REF.findall(lowered.symbol))
    if isinstance(lowered, Cmp):
        return threshold_names(lowered.left) | threshold_names(lowered.right)
    if isinstance(lowered, (LAnd, LOr)):
        return frozenset().union(*(threshold_names(a) for a in lowered.args))
    if isinstance(lowered, LNot):
        return threshold_names(lowered.arg)
    return frozenset()


def prob_terms(lowered) -> list[Prob]:
    """All ``Pr`` terms in evaluation order."""
    if isinstance(lowered, Prob):
        return [lowered]
    if isinstance(lowered, Cmp):
        return prob_terms(lowered.left) + prob_terms(lowered.right)
    if isinstance(lowered, (LAnd, LOr)):
        return [p for a in lowered.args for p in prob_terms(a)]
    if isinstance(lowered, LNot):
        return prob_terms(lowered.arg)
    return []
