"""Typechecker for ELoT trees."""

from __future__ import annotations

from .ast import And, Const, Exists, Forall, Implies, Node, Not, Op, Or, Pred, Var, class_binding, restriction_filter
from .errors import ElotTypeError, UnknownSymbolError
from .signature import (
    CLASS_PREDICATES,
    DEFAULT_SIGNATURE,
    GRADABLE,
    OPERATORS,
    DomainSignature,
    Slot,
    TypeTag,
)

_SLOT_TYPES = {
    Slot.WRAPPED: TypeTag.BASE,
    Slot.BASE: TypeTag.BASE,
    Slot.OPEN: TypeTag.BASE,
    Slot.MODAL: TypeTag.MODAL,
}


def typecheck(node: Node, signature: DomainSignature = DEFAULT_SIGNATURE) -> TypeTag:
    """Return the type of ``node`` or raise :class:`ElotTypeError` naming the offending node."""
    return _Checker(signature).infer(node, frozenset())


class _Checker:
    def __init__(self, signature: DomainSignature):
        self.sig = signature

    def infer(self, node: Node, scope: frozenset[str]) -> TypeTag:
        if isinstance(node, Var):
            if node.name not in scope:
                raise ElotTypeError(f"unbound variable {node.name}", node=node)
            return TypeTag.OBJECT
        if isinstance(node, Const):
            return self.const_type(node)
        if isinstance(node, Pred):
            return self.pred(node, scope)
        if isinstance(node, (And, Or)):
            if len(node.args) < 2:
                raise ElotTypeError(f"{type(node).__name__.lower()} needs at least two arguments", node=node)
            return self.same_level(node, node.args, scope)
        if isinstance(node, Not):
            return self.same_level(node, (node.arg,), scope)
        if isinstance(node, Implies):
            return self.same_level(node, (node.lhs, node.rhs), scope)
        if isinstance(node, (Exists, Forall)):
            return self.quantifier(node, scope)
        if isinstance(node, Op):
            return self.op(node, scope)
        raise ElotTypeError(f"not an ELoT node: {node!r}", node=node)

    def const_type(self, node: Const) -> TypeTag:
        if node.name in self.sig.agents:
            return TypeTag.AGENT
        if node.name in GRADABLE:
            return TypeTag.PREDICATE
        if self.sig.is_object(node.name):
            return TypeTag.OBJECT
        raise UnknownSymbolError(f"unknown object {node.name!r}", node=node)

    def pred(self, node: Pred, scope: frozenset[str]) -> TypeTag:
        arity = self.sig.predicates.get(node.name)
        if arity is None:
            raise UnknownSymbolError(f"unknown predicate {node.name!r}", node=node)
        if arity != len(node.args):
            raise ElotTypeError(
                f"predicate {node.name} takes {arity} argument(s), got {len(node.args)}",
                node=node, expected=arity, actual=len(node.args),
            )
        for arg in node.args:
            if isinstance(arg, Var):
                self.infer(arg, scope)
            elif isinstance(arg, Const):
                if not (self.sig.is_object(arg.name) or arg.name in self.sig.agents):
                    raise UnknownSymbolError(f"unknown object {arg.name!r} in {node.name}(...)", node=arg)
            else:
                raise ElotTypeError(f"predicate argument must be a term, got {arg!r}", node=arg)
        return TypeTag.BASE

    def same_level(self, node: Node, args, scope) -> TypeTag:
        tags = [self.infer(a, scope) for a in args]
        first = tags[0]
        if first not in (TypeTag.BASE, TypeTag.EPISTEMIC):
            raise ElotTypeError(f"connective argument must be Phi or E, got {first}", node=node, actual=first)
        for a, t in zip(args, tags):
            if t is not first:
                raise ElotTypeError(f"connective mixes {first} and {t}", node=a, expected=first, actual=t)
        return first

    def bind_class(self, restriction: Node, scope: frozenset[str], owner: Node) -> frozenset[str]:
        binding = class_binding(restriction)
        if binding is None or binding.name not in CLASS_PREDICATES:
            raise ElotTypeError(
                "quantifier restriction must start with a unary class atom such as key(K)",
                node=owner, expected="C(X)", actual=restriction,
            )
        self.pred(binding, scope | {binding.args[0].name})
        inner = scope | {binding.args[0].name}
        for extra in restriction_filter(restriction):
            if self.infer(extra, inner) is not TypeTag.BASE:
                raise ElotTypeError("quantifier restriction must be a base formula", node=extra)
        return inner

    def quantifier(self, node: Exists | Forall, scope) -> TypeTag:
        inner = self.bind_class(node.restriction, scope, node)
        tag = self.infer(node.body, inner)
        if tag not in (TypeTag.BASE, TypeTag.EPISTEMIC):
            raise ElotTypeError(f"quantifier body must be Phi or E, got {tag}", node=node.body, actual=tag)
        return tag

    def op(self, node: Op, scope: frozenset[str]) -> TypeTag:
        sig = OPERATORS.get(node.name)
        if sig is None:
            raise UnknownSymbolError(f"unknown operator {node.name!r}", node=node)
        if len(node.args) != len(sig.args):
            raise ElotTypeError(
                f"{node.name} takes {len(sig.args)} argument(s), got {len(node.args)}",
                node=node, expected=len(sig.args), actual=len(node.args),
            )
        inner = scope
        for i, (slot, arg) in enumerate(zip(sig.args, node.args), start=1):
            where = f"{node.name} argument {i}"
            if slot is Slot.AGENT:
                if not (isinstance(arg, Const) and arg.name in self.sig.agents):
                    raise ElotTypeError(f"{where}: expected an agent", node=arg, expected=TypeTag.AGENT, actual=arg)
            elif slot is Slot.PREDICATE:
                if not (isinstance(arg, Const) and arg.name in GRADABLE):
                    raise ElotTypeError(f"{where}: expected a gradable predicate symbol", node=arg,
                                        expected=TypeTag.PREDICATE, actual=arg)
            elif slot is Slot.OBJECT:
                if isinstance(arg, Var):
                    self.infer(arg, inner)
                elif not (isinstance(arg, Const) and self.sig.is_object(arg.name)):
                    raise ElotTypeError(f"{where}: expected an object", node=arg, expected=TypeTag.OBJECT, actual=arg)
            elif slot is Slot.CLASS:
                if not (isinstance(arg, Pred) and len(arg.args) == 1 and isinstance(arg.args[0], Var)
                        and arg.name in CLASS_PREDICATES):
                    raise ElotTypeError(f"{where}: expected a class abstraction such as color(C)", node=arg,
                                        expected=TypeTag.OPEN, actual=arg)
                inner = inner | {arg.args[0].name}
                self.pred(arg, inner)
            else:
                want = _SLOT_TYPES[slot]
                got = self.infer(arg, inner)
                if got is not want:
                    raise ElotTypeError(f"{where}: expected {want}, got {got}", node=arg, expected=want, actual=got)
        return sig.result
