"""Operator signatures, type tags and the base-language domain signature."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping


class TypeTag(enum.Enum):
    EPISTEMIC = "E"          # epistemic formula
    BASE = "Phi"             # base formula
    FUNCTION = "Phi_F"       # function term (degree)
    PREDICATE = "P"          # gradable predicate symbol
    AGENT = "A"
    OBJECT = "O"
    MODAL = "E/A"            # agent -> epistemic formula
    OPEN = "Phi/O"           # object -> base formula

    def __str__(self) -> str:
        return self.value


class Slot(enum.Enum):
    """Argument slot kinds. ``WRAPPED`` is a base formula written as ``formula(...)``."""

    AGENT = "agent"
    WRAPPED = "formula"
    BASE = "base"
    MODAL = "modal"
    PREDICATE = "predicate"
    OBJECT = "object"
    CLASS = "class"
    OPEN = "open"


@dataclass(frozen=True)
class OpSig:
    args: tuple[Slot, ...]
    result: TypeTag


_E, _M = TypeTag.EPISTEMIC, TypeTag.MODAL
A, W, B, M, P, O, C, X = (
    Slot.AGENT, Slot.WRAPPED, Slot.BASE, Slot.MODAL,
    Slot.PREDICATE, Slot.OBJECT, Slot.CLASS, Slot.OPEN,
)

OPERATORS: dict[str, OpSig] = {
    "believes": OpSig((A, W), _E),
    "believes_modal": OpSig((A, M), _E),
    "knows_that": OpSig((A, W), _E),
    "knows_if": OpSig((A, W), _E),
    "knows_about": OpSig((A, C, X), _E),
    "not_knows_that": OpSig((A, W), _E),
    "not_knows_if": OpSig((A, W), _E),
    "certain_that": OpSig((A, W), _E),
    "certain_about": OpSig((A, C, X), _E),
    "uncertain_if": OpSig((A, W, W), _E),
    "uncertain_about": OpSig((A, C, X), _E),
    "could": OpSig((B,), _M),
    "might": OpSig((B,), _M),
    "may": OpSig((B,), _M),
    "should": OpSig((B,), _M),
    "must": OpSig((B,), _M),
    "likely": OpSig((B,), _M),
    "unlikely": OpSig((B,), _M),
    "more": OpSig((P, B, B), _M),
    "less": OpSig((P, B, B), _M),
    "most_sup": OpSig((P, O, C, X), _M),
    "least_sup": OpSig((P, O, C, X), _M),
    "most_str": OpSig((P, B), _M),
    "least_str": OpSig((P, B), _M),
    "degree": OpSig((P, A, B), TypeTag.FUNCTION),
}

MODAL_THRESHOLD_OPS = ("could", "might", "may", "should", "must", "likely")
MODAL_FUNCTIONS = frozenset(n for n, s in OPERATORS.items() if s.result is TypeTag.MODAL)

# gradable predicate symbol -> threshold used by most_str/least_str
GRADABLE = {"likely": "likely"}

CONNECTIVE_NAMES = frozenset({"and", "or", "not", "implies", "exists", "forall"})
RESERVED = CONNECTIVE_NAMES | set(OPERATORS) | {"formula"}


@dataclass(frozen=True)
class DomainSignature:
    """Predicates (name -> arity) and named objects grouped by class.

    ``enumerable`` lists the classes whose members are fixed across world
    states, so quantifiers over them can be expanded outside ``Pr``.
    """

    predicates: Mapping[str, int]
    objects: Mapping[str, tuple[str, ...]]
    agents: tuple[str, ...] = ("player",)
    enumerable: frozenset[str] = field(default_factory=lambda: frozenset({"box", "color", "door", "gem", "agent"}))

    @property
    def classes(self) -> frozenset[str]:
        return frozenset(self.objects)

    def object_class(self, name: str) -> str | None:
        for cls, names in self.objects.items():
            if name in names:
                return cls
        return None

    def is_object(self, name: str) -> bool:
        return self.object_class(name) is not None

    def members(self, cls: str) -> tuple[str, ...]:
        if cls not in self.objects:
            raise KeyError(f"unregistered class {cls!r}")
        if cls not in self.enumerable:
            raise KeyError(f"class {cls!r} is not enumerable over a fixed object domain")
        return tuple(self.objects[cls])


BASE_PREDICATES = {
    "key": 1, "box": 1, "door": 1, "gem": 1, "color": 1, "agent": 1,
    "inside": 2, "iscolor": 2, "empty": 1, "has": 2,
    "locked": 1, "opened": 1, "collected": 1,
}
CLASS_PREDICATES = frozenset({"key", "box", "door", "gem", "color", "agent"})

DEFAULT_COLORS = ("red", "blue", "yellow", "green")


def default_signature(n_boxes: int = 6, n_doors: int = 6, n_keys: int = 6, n_gems: int = 4,
                      colors: tuple[str, ...] = DEFAULT_COLORS) -> DomainSignature:
    """A permissive signature for parsing statements outside any scenario."""
    return DomainSignature(
        predicates=dict(BASE_PREDICATES),
        objects={
            "agent": ("player",),
            "box": tuple(f"box{i}" for i in range(1, n_boxes + 1)),
            "door": tuple(f"door{i}" for i in range(1, n_doors + 1)),
            "key": tuple(f"key{i}" for i in range(1, n_keys + 1)),
            "gem": tuple(f"gem{i}" for i in range(1, n_gems + 1)),
            "color": tuple(colors),
        },
    )


DEFAULT_SIGNATURE = default_signature()
