from __future__ import annotations

from .ast import And, Const, Exists, Forall, Implies, Node, Not, Op, Or, Pred, Var
from .signature import OPERATORS, Slot


def print_elot(node: Node) -> str:
    """Canonical concrete syntax; ``parse_elot(print_elot(f)) == f``."""
    if isinstance(node, (Const, Var)):
        return node.name
    if isinstance(node, Pred):
        return f"{node.name}({', '.join(print_elot(a) for a in node.args)})"
    if isinstance(node, And):
        return _call("and", node.args)
    if isinstance(node, Or):
        return _call("or", node.args)
    if isinstance(node, Not):
        return _call("not", (node.arg,))
    if isinstance(node, Implies):
        return _call("implies", (node.lhs, node.rhs))
    if isinstance(node, Exists):
        return _call("exists", (node.restriction, node.body))
    if isinstance(node, Forall):
        return _call("forall", (node.restriction, node.body))
    if isinstance(node, Op):
        slots = OPERATORS[node.name].args
        parts = []
        for slot, arg in zip(slots, node.args):
            text = print_elot(arg)
            parts.append(f"formula({text})" if slot is Slot.WRAPPED else text)
        name = "believes" if node.name == "believes_modal" else node.name
        return f"{name}({', '.join(parts)})"
    raise TypeError(f"not an ELoT node: {node!r}")


def _call(name: str, args) -> str:
    return f"{name}({', '.join(print_elot(a) for a in args)})"
