"""Ground predicates of a state and truth of base formulas in it."""

from __future__ import annotations

from functools import lru_cache

from ..elot.ast import And, Const, Exists, Forall, Implies, Node, Not, Or, Pred, Var, class_binding, restriction_filter, substitute
from ..elot.errors import UnknownSymbolError
from ..elot.signature import BASE_PREDICATES, DomainSignature
from .state import EnvState

Fact = tuple[str, ...]


def key_names(s: EnvState) -> list[tuple[str, str]]:
    """(name, color) of every key that still exists."""
    g = s.grid
    keys = [(k.name, k.color) for k, present in zip(g.keys, s.floor_keys) if present]
    keys += [(s.box_key_name(i), c) for i, c in enumerate(s.contents) if c is not None]
    keys += list(s.held)
    return keys


@lru_cache(maxsize=65536)
def universe(s: EnvState) -> dict[str, tuple[str, ...]]:
    g = s.grid
    return {
        "agent": ("player",),
        "box": tuple(b.name for b in g.boxes),
        "door": tuple(d.name for d in g.doors),
        "gem": tuple(x.name for x in g.gems),
        "color": g.colors,
        "key": tuple(sorted(n for n, _ in key_names(s))),
    }


@lru_cache(maxsize=65536)
def state_facts(s: EnvState) -> frozenset[Fact]:
    g = s.grid
    facts: set[Fact] = {("agent", "player")}
    facts |= {("color", c) for c in g.colors}
    for b, content, opened in zip(g.boxes, s.contents, s.opened):
        facts.add(("box", b.name))
        if content is None:
            facts.add(("empty", b.name))
        if opened:
            facts.add(("opened", b.name))
    for i, content in enumerate(s.contents):
        if content is not None:
            facts.add(("inside", s.box_key_name(i), g.boxes[i].name))
    for d, unlocked in zip(g.doors, s.unlocked):
        facts |= {("door", d.name), ("iscolor", d.name, d.color)}
        if not unlocked:
            facts.add(("locked", d.name))
    for gem, collected in zip(g.gems, s.collected):
        facts.add(("gem", gem.name))
        if collected:
            facts.add(("collected", gem.name))
    for name, color in key_names(s):
        facts |= {("key", name), ("iscolor", name, color)}
    for name, _ in s.held:
        facts.add(("has", "player", name))
    return frozenset(facts)


def state_satisfies(s: EnvState, phi: Node) -> bool:
    """Truth of a closed base formula; unopened boxes count with their real contents."""
    return _satisfies(s, phi)


@lru_cache(maxsize=262144)
def _satisfies(s: EnvState, phi: Node) -> bool:
    return _eval(phi, state_facts(s), universe(s))


def _eval(phi: Node, facts: frozenset[Fact], objects: dict[str, tuple[str, ...]]) -> bool:
    if isinstance(phi, Pred):
        if phi.name not in BASE_PREDICATES:
            raise UnknownSymbolError(f"unknown predicate {phi.name!r}", node=phi)
        args = []
        for a in phi.args:
            if isinstance(a, Var):
                raise ValueError(f"free variable {a.name} in {phi.name}(...)")
            args.append(a.name)
        return (phi.name, *args) in facts
    if isinstance(phi, And):
        return all(_eval(a, facts, objects) for a in phi.args)
    if isinstance(phi, Or):
        return any(_eval(a, facts, objects) for a in phi.args)
    if isinstance(phi, Not):
        return not _eval(phi.arg, facts, objects)
    if isinstance(phi, Implies):
        return (not _eval(phi.lhs, facts, objects)) or _eval(phi.rhs, facts, objects)
    if isinstance(phi, (Exists, Forall)):
        binding = class_binding(phi.restriction)
        var = binding.args[0].name
        extra = restriction_filter(phi.restriction)
        results = []
        for obj in objects.get(binding.name, ()):
            c = Const(obj)
            if all(_eval(substitute(f, var, c), facts, objects) for f in extra):
                results.append(_eval(substitute(phi.body, var, c), facts, objects))
        return any(results) if isinstance(phi, Exists) else all(results)
    raise ValueError(f"not a base formula: {phi!r}")


def domain_signature(grid, agents: tuple[str, ...] = ("player",)) -> DomainSignature:
    """Object domain of a map, with one key name per floor key and per box."""
    names = grid.object_names()
    n_keys = len(grid.keys) + len(grid.boxes)
    return DomainSignature(
        predicates=dict(BASE_PREDICATES),
        objects={**names, "key": tuple(f"key{i}" for i in range(1, n_keys + 1))},
        agents=agents,
    )
