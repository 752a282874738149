"""AST node types for the epistemic language.

Base formulas and epistemic formulas share the connective and quantifier
nodes; which level a node lives at is decided by the typechecker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Const:
    """Lowercase identifier: object, agent, or predicate symbol."""

    name: str


@dataclass(frozen=True)
class Var:
    """Uppercase identifier bound by a quantifier or class argument."""

    name: str


Term = Union[Const, Var]


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class And:
    args: tuple[Node, ...]


@dataclass(frozen=True)
class Or:
    args: tuple[Node, ...]


@dataclass(frozen=True)
class Not:
    arg: Node


@dataclass(frozen=True)
class Implies:
    lhs: Node
    rhs: Node


@dataclass(frozen=True)
class Exists:
    """``exists(restriction, body)``; the restriction's leading class atom binds the variable."""

    restriction: Node
    body: Node


@dataclass(frozen=True)
class Forall:
    restriction: Node
    body: Node


@dataclass(frozen=True)
class Op:
    """Application of an epistemic operator, modal function, comparative or degree term."""

    name: str
    args: tuple[Node, ...]


Node = Union[Const, Var, Pred, And, Or, Not, Implies, Exists, Forall, Op]

CONNECTIVES = (And, Or, Not, Implies)
QUANTIFIERS = (Exists, Forall)


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, (And, Or, Op)):
        return node.args
    if isinstance(node, Not):
        return (node.arg,)
    if isinstance(node, Implies):
        return (node.lhs, node.rhs)
    if isinstance(node, (Exists, Forall)):
        return (node.restriction, node.body)
    if isinstance(node, Pred):
        return node.args
    return ()


def walk(node: Node):
    """Pre-order traversal."""
    yield node
    for child in children(node):
        yield from walk(child)


def class_binding(restriction: Node) -> Pred | None:
    """Return the class atom ``C(X)`` that binds a quantifier's variable, if well formed."""
    head = restriction
    if isinstance(head, And) and head.args:
        head = head.args[0]
    if isinstance(head, Pred) and len(head.args) == 1 and isinstance(head.args[0], Var):
        return head
    return None


def restriction_filter(restriction: Node) -> tuple[Node, ...]:
    """Conjuncts of a restriction other than the binding class atom."""
    if isinstance(restriction, And):
        return restriction.args[1:]
    return ()


def substitute(node: Node, var: str, value: Term) -> Node:
    """Replace free occurrences of ``var``; quantifiers rebinding ``var`` shadow it."""
    if isinstance(node, Var):
        return value if node.name == var else node
    if isinstance(node, Const):
        return node
    if isinstance(node, Pred):
        return Pred(node.name, tuple(substitute(a, var, value) for a in node.args))
    if isinstance(node, And):
        return And(tuple(substitute(a, var, value) for a in node.args))
    if isinstance(node, Or):
        return Or(tuple(substitute(a, var, value) for a in node.args))
    if isinstance(node, Not):
        return Not(substitute(node.arg, var, value))
    if isinstance(node, Implies):
        return Implies(substitute(node.lhs, var, value), substitute(node.rhs, var, value))
    if isinstance(node, (Exists, Forall)):
        bound = class_binding(node.restriction)
        if bound is not None and bound.args[0].name == var:
            return node
        return type(node)(substitute(node.restriction, var, value), substitute(node.body, var, value))
    if isinstance(node, Op):
        return _substitute_op(node, var, value)
    raise TypeError(f"not an ELoT node: {node!r}")


def _substitute_op(node: Op, var: str, value: Term) -> Op:
    # a class argument such as color(C) binds C for the remaining arguments
    out = []
    shadowed = False
    for arg in node.args:
        if shadowed:
            out.append(arg)
            continue
        if (
            isinstance(arg, Pred)
            and len(arg.args) == 1
            and isinstance(arg.args[0], Var)
            and arg.args[0].name == var
            and _is_class_slot(node, len(out))
        ):
            out.append(arg)
            shadowed = True
            continue
        out.append(substitute(arg, var, value))
    return Op(node.name, tuple(out))


def _is_class_slot(node: Op, index: int) -> bool:
    from .signature import OPERATORS, Slot

    sig = OPERATORS.get(node.name)
    return sig is not None and index < len(sig.args) and sig.args[index] is Slot.CLASS


def free_vars(node: Node, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(node, Var):
        return set() if node.name in bound else {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (Exists, Forall)):
        binding = class_binding(node.restriction)
        inner = bound | {binding.args[0].name} if binding is not None else bound
        return free_vars(node.restriction, inner) | free_vars(node.body, inner)
    if isinstance(node, Op):
        out: set[str] = set()
        scope = bound
        for i, arg in enumerate(node.args):
            if _is_class_slot(node, i) and isinstance(arg, Pred) and arg.args and isinstance(arg.args[0], Var):
                scope = scope | {arg.args[0].name}
                continue
            out |= free_vars(arg, scope)
        return out
    out = set()
    for child in children(node):
        out |= free_vars(child, bound)
    return out
