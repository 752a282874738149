"""World states, actions, deterministic dynamics and observations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Union

from .grid import MOVES, Cell, GridMap

HIDDEN = "?"

Target = Union[int, Cell, None]


class InvalidActionError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    kind: str  # up/down/left/right/no_op/open_box/unlock_door/pickup_key/collect_gem
    target: Target = None

    def __str__(self) -> str:
        if self.target is None:
            return self.kind
        if isinstance(self.target, tuple):
            return f"{self.kind}({self.target[0]},{self.target[1]})"
        return f"{self.kind}({self.target})"

    @classmethod
    def parse(cls, text: str) -> Action:
        """Inverse of ``str``: ``up``, ``open_box(2)``, ``pickup_key(3,4)``."""
        text = text.strip().replace(" ", "")
        if "(" not in text:
            if text not in (*MOVES, "no_op"):
                raise ValueError(f"unknown action {text!r}")
            return cls(text)
        kind, _, rest = text.partition("(")
        if not rest.endswith(")"):
            raise ValueError(f"malformed action {text!r}")
        parts = rest[:-1].split(",")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"malformed action {text!r}") from None
        if kind in ("open_box", "unlock_door") and len(nums) == 1:
            return cls(kind, nums[0])
        if kind in ("pickup_key", "collect_gem") and len(nums) == 2:
            return cls(kind, (nums[0], nums[1]))
        raise ValueError(f"malformed action {text!r}")


NO_OP = Action("no_op")
MOVE_ACTIONS = tuple(Action(k) for k in MOVES)


@dataclass(frozen=True)
class EnvState:
    """Full ontic state. Keys carry names: floor keys ``key1..key_m`` in map
    order, then the key hidden in box ``j`` is ``key{m+j}``."""

    grid: GridMap
    pos: Cell
    held: tuple[tuple[str, str], ...]  # (key name, color), sorted
    contents: tuple[str | None, ...]  # key color currently inside each box
    opened: tuple[bool, ...]
    floor_keys: tuple[bool, ...]  # visible key still on the floor
    unlocked: tuple[bool, ...]
    collected: tuple[bool, ...]

    @classmethod
    def initial(cls, grid: GridMap, contents: tuple[str | None, ...] | None = None) -> EnvState:
        contents = tuple(contents) if contents is not None else (None,) * len(grid.boxes)
        if len(contents) != len(grid.boxes):
            raise ValueError(f"expected contents for {len(grid.boxes)} boxes, got {len(contents)}")
        for c in contents:
            if c is not None and c not in grid.colors:
                raise ValueError(f"unregistered key color {c!r}")
        return cls(
            grid=grid,
            pos=grid.start,
            held=(),
            contents=contents,
            opened=(False,) * len(grid.boxes),
            floor_keys=(True,) * len(grid.keys),
            unlocked=(False,) * len(grid.doors),
            collected=(False,) * len(grid.gems),
        )

    def box_key_name(self, i: int) -> str:
        """Name of the key slot of box index ``i`` (0-based)."""
        return f"key{len(self.grid.keys) + i + 1}"

    def walkable(self, cell: Cell) -> bool:
        g = self.grid
        if not g.in_bounds(cell) or cell in g.blocked:
            return False
        k = g.key_at.get(cell)
        if k is not None and self.floor_keys[k]:
            return False
        d = g.door_at.get(cell)
        if d is not None and not self.unlocked[d]:
            return False
        return True

    def held_colors(self) -> tuple[str, ...]:
        return tuple(sorted(c for _, c in self.held))

    @cached_property
    def hidden_keys(self) -> int:
        return sum(1 for c, o in zip(self.contents, self.opened) if c is not None and not o)

    def key_count(self) -> int:
        """Keys held, on the floor, or inside boxes."""
        return len(self.held) + sum(self.floor_keys) + sum(c is not None for c in self.contents)


def _adjacent(a: Cell, b: Cell) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def valid_actions(s: EnvState) -> list[Action]:
    """Valid actions in a fixed order; ``no_op`` is always last."""
    g = s.grid
    out = []
    x, y = s.pos
    for name, (dx, dy) in MOVES.items():
        if s.walkable((x + dx, y + dy)):
            out.append(Action(name))
    for cell in g.neighbors(s.pos):
        i = g.box_at.get(cell)
        if i is not None:
            if not s.opened[i]:
                out.append(Action("open_box", i + 1))
            elif s.contents[i] is not None:
                out.append(Action("pickup_key", cell))
            continue
        k = g.key_at.get(cell)
        if k is not None and s.floor_keys[k]:
            out.append(Action("pickup_key", cell))
            continue
        d = g.door_at.get(cell)
        if d is not None and not s.unlocked[d] and g.doors[d].color in s.held_colors():
            out.append(Action("unlock_door", d + 1))
            continue
        j = g.gem_at.get(cell)
        if j is not None and not s.collected[j]:
            out.append(Action("collect_gem", cell))
    out.append(NO_OP)
    return out


def is_valid(s: EnvState, a: Action) -> bool:
    g = s.grid
    if a.kind == "no_op":
        return True
    if a.kind in MOVES:
        dx, dy = MOVES[a.kind]
        return s.walkable((s.pos[0] + dx, s.pos[1] + dy))
    if a.kind == "open_box":
        i = a.target - 1 if isinstance(a.target, int) else -1
        return 0 <= i < len(g.boxes) and not s.opened[i] and _adjacent(s.pos, g.boxes[i].cell)
    if a.kind == "unlock_door":
        d = a.target - 1 if isinstance(a.target, int) else -1
        return (0 <= d < len(g.doors) and not s.unlocked[d] and _adjacent(s.pos, g.doors[d].cell)
                and g.doors[d].color in s.held_colors())
    if not isinstance(a.target, tuple) or not _adjacent(s.pos, a.target):
        return False
    if a.kind == "pickup_key":
        k = g.key_at.get(a.target)
        if k is not None:
            return s.floor_keys[k]
        i = g.box_at.get(a.target)
        return i is not None and s.opened[i] and s.contents[i] is not None
    if a.kind == "collect_gem":
        j = g.gem_at.get(a.target)
        return j is not None and not s.collected[j]
    return False


def transition(s: EnvState, a: Action) -> EnvState:
    if not is_valid(s, a):
        raise InvalidActionError(f"action {a} is not valid at {s.pos}")
    g = s.grid
    if a.kind == "no_op":
        return s
    if a.kind in MOVES:
        dx, dy = MOVES[a.kind]
        return replace(s, pos=(s.pos[0] + dx, s.pos[1] + dy))
    if a.kind == "open_box":
        i = a.target - 1
        return replace(s, opened=_set(s.opened, i, True))
    if a.kind == "unlock_door":
        d = a.target - 1
        color = g.doors[d].color
        used = next(i for i, (_, c) in enumerate(s.held) if c == color)
        return replace(s, held=s.held[:used] + s.held[used + 1:], unlocked=_set(s.unlocked, d, True))
    if a.kind == "pickup_key":
        k = g.key_at.get(a.target)
        if k is not None:
            key = (g.keys[k].name, g.keys[k].color)
            return replace(s, held=tuple(sorted((*s.held, key))), floor_keys=_set(s.floor_keys, k, False))
        i = g.box_at[a.target]
        key = (s.box_key_name(i), s.contents[i])
        return replace(s, held=tuple(sorted((*s.held, key))), contents=_set(s.contents, i, None))
    j = g.gem_at[a.target]
    return replace(s, collected=_set(s.collected, j, True))


def _set(values: tuple, i: int, value) -> tuple:
    return values[:i] + (value,) + values[i + 1:]


@dataclass(frozen=True)
class Observation:
    """Everything but the contents of unopened boxes."""

    pos: Cell
    held: tuple[tuple[str, str], ...]
    contents: tuple[str | None, ...]  # HIDDEN for unopened boxes
    opened: tuple[bool, ...]
    floor_keys: tuple[bool, ...]
    unlocked: tuple[bool, ...]
    collected: tuple[bool, ...]


def observe(s: EnvState) -> Observation:
    return Observation(
        pos=s.pos,
        held=s.held,
        contents=tuple(c if o else HIDDEN for c, o in zip(s.contents, s.opened)),
        opened=s.opened,
        floor_keys=s.floor_keys,
        unlocked=s.unlocked,
        collected=s.collected,
    )


def state_consistent(o: Observation, s: EnvState) -> bool:
    return observe(s) == o


def replay(s0: EnvState, actions) -> list[EnvState]:
    """States ``s_0..s_T``; raises :class:`InvalidActionError` with the failing step."""
    states = [s0]
    for t, a in enumerate(actions, start=1):
        try:
            states.append(transition(states[-1], a))
        except InvalidActionError as exc:
            raise InvalidActionError(f"step {t}: {exc}") from None
    return states
