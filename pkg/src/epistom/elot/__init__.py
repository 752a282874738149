"""Epistemic language of thought: syntax, types, thresholds and lowering."""

from .ast import And, Const, Exists, Forall, Implies, Node, Not, Op, Or, Pred, Var
from .errors import ElotError, ElotSyntaxError, ElotTypeError, LoweringError, UnknownSymbolError
from .lower import BaseAtom, Cmp, LAnd, LConst, LNot, LOr, Lowered, Prob, Threshold, evaluate_lowered, lower, print_lowered
from .lowered_parser import parse_lowered
from .parser import parse_elot, parse_term
from .printer import print_elot
from .signature import DEFAULT_SIGNATURE, OPERATORS, DomainSignature, TypeTag, default_signature
from .thresholds import DEFAULT_THRESHOLDS, INITIAL_THRESHOLDS, THRESHOLD_NAMES, ThresholdTable
from .types import typecheck

__all__ = [
    "And", "BaseAtom", "Cmp", "Const", "DEFAULT_SIGNATURE", "DEFAULT_THRESHOLDS", "DomainSignature",
    "ElotError", "ElotSyntaxError", "ElotTypeError", "Exists", "Forall", "INITIAL_THRESHOLDS", "Implies",
    "LAnd", "LConst", "LNot", "LOr", "Lowered", "LoweringError", "Node", "Not", "OPERATORS", "Op", "Or",
    "Pred", "Prob", "THRESHOLD_NAMES", "Threshold", "ThresholdTable", "TypeTag", "UnknownSymbolError",
    "Var", "default_signature", "evaluate_lowered", "lower", "parse_elot", "parse_lowered", "parse_term", "print_elot",
    "print_lowered", "typecheck",
]
