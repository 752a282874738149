"""Reader for lowered formulas in prefix syntax, the output of ``print_lowered``."""

from __future__ import annotations

from .errors import ElotSyntaxError, ElotTypeError
from .lower import BaseAtom, Cmp, LAnd, LConst, LNot, LOr, Lowered, Prob, Term, Threshold
from .parser import _LOWERED_TOKEN, _build, _Raw, _show, _TermParser
from .signature import DEFAULT_SIGNATURE, DomainSignature, TypeTag
from .thresholds import DEFAULT_THRESHOLDS, THRESHOLD_NAMES, ThresholdTable
from .types import typecheck

COMPARATORS = (">=", ">", "<=", "<")


def parse_lowered(text: str, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                  signature: DomainSignature = DEFAULT_SIGNATURE) -> Lowered:
    """Parse a lowered formula; grammar violations raise :class:`ElotSyntaxError`."""
    raw = _TermParser(text, _LOWERED_TOKEN).parse()
    return _LoweredBuilder(thresholds, signature).formula(raw)


class _LoweredBuilder:
    def __init__(self, thresholds: ThresholdTable, signature: DomainSignature):
        self.th = thresholds
        self.sig = signature

    def formula(self, raw: _Raw) -> Lowered:
        if raw.args is None and raw.name in ("true", "false"):
            return LConst(raw.name == "true")
        if raw.name in COMPARATORS:
            if len(raw.args or ()) != 2:
                raise ElotSyntaxError(f"{raw.name} takes two terms", raw.pos, ("2 arguments",))
            return Cmp(raw.name, self.term(raw.args[0]), self.term(raw.args[1]))
        if raw.name in ("and", "or") and raw.args and len(raw.args) >= 2:
            parts = tuple(self.formula(a) for a in raw.args)
            if all(isinstance(p, BaseAtom) for p in parts):
                return self.base(raw)
            return LAnd(parts) if raw.name == "and" else LOr(parts)
        if raw.name == "not" and raw.args and len(raw.args) == 1:
            inner = self.formula(raw.args[0])
            return self.base(raw) if isinstance(inner, BaseAtom) else LNot(inner)
        return self.base(raw)

    def base(self, raw: _Raw) -> BaseAtom:
        if raw.args is None or raw.name in ("prob_of", "threshold", *COMPARATORS, "*", "/", "min"):
            raise ElotSyntaxError(f"{_show(raw)} is not a formula", raw.pos, ("comparison", "base formula"))
        try:
            node = _build(raw)
            tag = typecheck(node, self.sig)
        except ElotTypeError as exc:
            raise ElotSyntaxError(f"not a base formula: {exc}", raw.pos, ("base formula",)) from None
        if tag is not TypeTag.BASE:
            raise ElotSyntaxError(f"epistemic operator inside a lowered formula: {_show(raw)}", raw.pos,
                                  ("base formula",))
        return BaseAtom(node)

    def term(self, raw: _Raw) -> Term:
        name, args = raw.name, raw.args or []
        if name == "prob_of" and len(args) == 2:
            agent = args[0]
            if agent.args is not None or agent.name not in self.sig.agents:
                raise ElotSyntaxError(f"prob_of expects an agent, got {_show(agent)}", agent.pos, ("agent",))
            return Prob(agent.name, self.base(args[1]).formula)
        if name == "threshold" and len(args) == 1 and args[0].args is None and args[0].name in THRESHOLD_NAMES:
            return Threshold(f"threshold({args[0].name})", self.th.threshold(args[0].name))
        if name == "min" and len(args) == 2 and args[0].name == "1" and args[0].args is None:
            scaled = self.term(args[1])
            return Threshold(f"min(1, {scaled.symbol})", min(1.0, scaled.value))
        if name == "*" and len(args) == 2 and self._is_multiplier(args[0]):
            base = self.term(args[1])
            return Threshold(f"*(multiplier(most), {base.symbol})", self.th.most * base.value)
        if name == "/" and len(args) == 2 and self._is_multiplier(args[1]):
            base = self.term(args[0])
            return Threshold(f"/({base.symbol}, multiplier(most))", base.value / self.th.most)
        raise ElotSyntaxError(
            f"expected prob_of(agent, formula) or threshold(name), got {_show(raw)}",
            raw.pos, ("prob_of(...)", "threshold(...)"),
        )

    @staticmethod
    def _is_multiplier(raw: _Raw) -> bool:
        return raw.name == "multiplier" and raw.args is not None and len(raw.args) == 1 and raw.args[0].name == "most"

