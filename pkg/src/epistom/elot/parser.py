"""Recursive-descent parser for the Prolog-style concrete syntax.

Parsing happens in two passes: ``_TermParser`` reads generic
``name(arg, ...)`` terms, then ``_build`` maps them onto AST nodes, handling
the ``formula(...)`` wrapper and the ``believes``/``believes_modal`` overload.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import And, Const, Exists, Forall, Implies, Node, Not, Op, Or, Pred, Var
from .errors import ElotSyntaxError, ElotTypeError
from .signature import (
    DEFAULT_SIGNATURE,
    MODAL_FUNCTIONS,
    OPERATORS,
    DomainSignature,
    Slot,
    TypeTag,
)
from .types import typecheck

_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-z][A-Za-z0-9_]*)|(?P<var>[A-Z][A-Za-z0-9_]*)|(?P<punct>[(),]))")
# lowered formulas also use comparison and arithmetic functors and numbers
_LOWERED_TOKEN = re.compile(
    r"\s*(?:(?P<ident>>=|<=|>|<|\*|/|[a-z][A-Za-z0-9_]*|\d+(?:\.\d+)?)|(?P<var>[A-Z][A-Za-z0-9_]*)|(?P<punct>[(),]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | var | ( | ) | , | eof
    text: str
    pos: int


@dataclass
class _Raw:
    name: str
    args: list[_Raw] | None
    pos: int
    is_var: bool = False


def _tokenize(text: str, pattern: re.Pattern = _TOKEN) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = pattern.match(text, pos)
        if m is None or m.end() == pos:
            raise ElotSyntaxError(f"unexpected character {text[pos]!r}", pos, ("identifier", "variable", "(", ")", ","))
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        kind = value if m.lastgroup == "punct" else m.lastgroup
        tokens.append(_Token(kind, value, start))
        pos = m.end()
    tokens.append(_Token("eof", "", n))
    return tokens


class _TermParser:
    def __init__(self, text: str, pattern: re.Pattern = _TOKEN):
        self.tokens = _tokenize(text, pattern)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            got = tok.text or "end of input"
            raise ElotSyntaxError(f"unexpected {got!r}", tok.pos, expected)
        self.i += 1
        return tok

    def parse(self) -> _Raw:
        term = self.term()
        tok = self.peek()
        if tok.kind != "eof":
            raise ElotSyntaxError(f"unexpected {tok.text!r} after complete expression", tok.pos, ("end of input",))
        return term

    def term(self) -> _Raw:
        tok = self.peek()
        if tok.kind == "var":
            self.i += 1
            return _Raw(tok.text, None, tok.pos, is_var=True)
        name = self.expect("ident", ("identifier", "variable"))
        if self.peek().kind != "(":
            return _Raw(name.text, None, name.pos)
        self.i += 1
        args = [self.term()]
        while self.peek().kind == ",":
            self.i += 1
            args.append(self.term())
        self.expect(")", (",", ")"))
        return _Raw(name.text, args, name.pos)


def _show(raw: _Raw) -> str:
    if raw.args is None:
        return raw.name
    return f"{raw.name}({', '.join(_show(a) for a in raw.args)})"


def _arity(raw: _Raw, n: int | None, minimum: int = 1) -> None:
    got = len(raw.args or ())
    if (n is not None and got != n) or got < minimum:
        want = str(n) if n is not None else f"at least {minimum}"
        raise ElotTypeError(f"{raw.name} at position {raw.pos} takes {want} argument(s), got {got}", expected=want, actual=got)


def _build(raw: _Raw) -> Node:
    if raw.is_var:
        return Var(raw.name)
    if raw.args is None:
        return Const(raw.name)
    name = raw.name
    if name in ("and", "or"):
        _arity(raw, None, minimum=2)
        cls = And if name == "and" else Or
        return cls(tuple(_build(a) for a in raw.args))
    if name == "not":
        _arity(raw, 1)
        return Not(_build(raw.args[0]))
    if name == "implies":
        _arity(raw, 2)
        return Implies(_build(raw.args[0]), _build(raw.args[1]))
    if name in ("exists", "forall"):
        _arity(raw, 2)
        cls = Exists if name == "exists" else Forall
        return cls(_build(raw.args[0]), _build(raw.args[1]))
    if name == "formula":
        raise ElotTypeError(
            f"formula(...) at position {raw.pos} is only allowed as the base-formula argument of an epistemic operator",
            expected="argument slot", actual="formula(...)",
        )
    if name in OPERATORS:
        return _build_op(raw)
    args = []
    for a in raw.args:
        if a.args is not None:
            raise ElotTypeError(
                f"predicate {name} at position {raw.pos}: argument {_show(a)} must be an object or variable",
                expected=TypeTag.OBJECT, actual=_show(a),
            )
        args.append(_build(a))
    return Pred(name, tuple(args))


def _build_op(raw: _Raw) -> Op:
    name = raw.name
    args = raw.args or []
    if name == "believes" and len(args) == 2 and args[1].args is not None and args[1].name in MODAL_FUNCTIONS:
        name = "believes_modal"
    sig = OPERATORS[name]
    _arity(raw, len(sig.args))
    built = []
    for i, (slot, arg) in enumerate(zip(sig.args, args), start=1):
        wrapped = arg.args is not None and arg.name == "formula"
        if slot is Slot.WRAPPED:
            if not wrapped:
                raise ElotTypeError(
                    f"{raw.name} argument {i} at position {arg.pos}: expected a base formula wrapped in "
                    f"formula(...){' or an E/A modal function' if raw.name == 'believes' else ''}, got {_show(arg)}",
                    expected=TypeTag.BASE, actual=_show(arg),
                )
            _arity(arg, 1)
            built.append(_build(arg.args[0]))
        else:
            if wrapped:
                raise ElotTypeError(
                    f"{raw.name} argument {i} at position {arg.pos}: formula(...) is not allowed in a {slot.value} slot",
                    expected=slot.value, actual=_show(arg),
                )
            if slot is Slot.MODAL and (arg.args is None or arg.name not in MODAL_FUNCTIONS):
                raise ElotTypeError(
                    f"{raw.name} argument {i} at position {arg.pos}: expected an E/A modal function, got {_show(arg)}",
                    expected=TypeTag.MODAL, actual=_show(arg),
                )
            built.append(_build(arg))
    return Op(name, tuple(built))


def parse_term(text: str) -> Node:
    """Parse without typechecking."""
    return _build(_TermParser(text).parse())


def parse_elot(text: str, signature: DomainSignature = DEFAULT_SIGNATURE,
               expect: TypeTag | None = TypeTag.EPISTEMIC) -> Node:
    """Parse and typecheck an ELoT expression.

    By default the expression must be a top-level epistemic statement; pass
    ``expect=None`` to accept any well-typed term.
    """
    node = parse_term(text)
    tag = typecheck(node, signature)
    if expect is not None and tag is not expect:
        raise ElotTypeError(f"expected a statement of type {expect}, got {tag}", node=node, expected=expect, actual=tag)
    return node
