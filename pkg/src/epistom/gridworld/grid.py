"""Static layout of a Doors, Keys & Gems map."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

Cell = tuple[int, int]

WALL, FLOOR, AGENT, DOOR, GEM, KEY = "#", ".", "@", "D", "g", "k"
BOX_CHARS = "123456789"

MOVES: dict[str, Cell] = {"up": (0, -1), "down": (0, 1), "left": (-1, 0), "right": (1, 0)}


@dataclass(frozen=True)
class Door:
    name: str
    cell: Cell
    color: str


@dataclass(frozen=True)
class Gem:
    name: str
    cell: Cell


@dataclass(frozen=True)
class Box:
    name: str
    index: int
    cell: Cell


@dataclass(frozen=True)
class FloorKey:
    name: str
    cell: Cell
    color: str


class MapError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GridMap:
    """Walls, doors, gems, boxes and visible keys; compared by identity."""

    width: int
    height: int
    walls: frozenset[Cell]
    doors: tuple[Door, ...]
    gems: tuple[Gem, ...]
    boxes: tuple[Box, ...]
    keys: tuple[FloorKey, ...]
    start: Cell
    colors: tuple[str, ...] = ("red", "blue", "yellow", "green")
    name: str = field(default="map")

    def __post_init__(self):
        seen: dict[Cell, str] = {c: "wall" for c in self.walls}
        for kind, items in (("door", self.doors), ("gem", self.gems), ("box", self.boxes), ("key", self.keys)):
            for item in items:
                if item.cell in seen:
                    raise MapError(f"cell {item.cell} holds both a {seen[item.cell]} and a {kind}")
                seen[item.cell] = kind
        if self.start in seen:
            raise MapError(f"agent start {self.start} is not a floor cell")
        if sorted(b.index for b in self.boxes) != list(range(1, len(self.boxes) + 1)):
            raise MapError("box indices must be contiguous from 1")
        if len(self.gems) > 4:
            raise MapError("at most 4 gems")
        for item in (*self.doors, *self.keys):
            if item.color not in self.colors:
                raise MapError(f"{item.name} has unregistered color {item.color!r}")

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    @cached_property
    def blocked(self) -> frozenset[Cell]:
        """Cells never walkable: walls, boxes and gems."""
        return self.walls | {b.cell for b in self.boxes} | {g.cell for g in self.gems}

    @cached_property
    def door_at(self) -> dict[Cell, int]:
        return {d.cell: i for i, d in enumerate(self.doors)}

    @cached_property
    def key_at(self) -> dict[Cell, int]:
        return {k.cell: i for i, k in enumerate(self.keys)}

    @cached_property
    def box_at(self) -> dict[Cell, int]:
        return {b.cell: i for i, b in enumerate(self.boxes)}

    @cached_property
    def gem_at(self) -> dict[Cell, int]:
        return {g.cell: i for i, g in enumerate(self.gems)}

    def gem_index(self, name: str) -> int:
        for i, g in enumerate(self.gems):
            if g.name == name:
                return i
        raise KeyError(f"no gem named {name!r}")

    def neighbors(self, cell: Cell) -> list[Cell]:
        x, y = cell
        out = []
        for dx, dy in MOVES.values():
            nxt = (x + dx, y + dy)
            if self.in_bounds(nxt):
                out.append(nxt)
        return out

    @property
    def diameter(self) -> int:
        return self.width + self.height

    @classmethod
    def from_ascii(cls, rows: str | Sequence[str], doors: Sequence[str] = (), gems: Sequence[str] | None = None,
                   keys: Sequence[str] = (), colors: Sequence[str] | None = None, name: str = "map") -> GridMap:
        """Build a map from one character per cell.

        Legend: ``#`` wall, ``.`` floor, ``@`` agent start, ``D`` door,
        ``g`` gem, ``k`` visible key, ``1``-``9`` box with that index.
        Door and key colors and gem names are given in row-major order.
        """
        if isinstance(rows, str):
            rows = [r for r in rows.strip("\n").splitlines()]
        rows = [r.rstrip() for r in rows]
        if not rows or len({len(r) for r in rows}) != 1:
            raise MapError("map rows must be non-empty and rectangular")
        walls, door_cells, gem_cells, box_cells, key_cells = set(), [], [], [], []
        start = None
        for y, row in enumerate(rows):
            for x, ch in enumerate(row):
                cell = (x, y)
                if ch == WALL:
                    walls.add(cell)
                elif ch == FLOOR:
                    pass
                elif ch == AGENT:
                    if start is not None:
                        raise MapError("more than one agent start")
                    start = cell
                elif ch == DOOR:
                    door_cells.append(cell)
                elif ch == GEM:
                    gem_cells.append(cell)
                elif ch == KEY:
                    key_cells.append(cell)
                elif ch in BOX_CHARS:
                    box_cells.append((int(ch), cell))
                else:
                    raise MapError(f"unknown map character {ch!r} at {cell}")
        if start is None:
            raise MapError("map has no agent start '@'")
        if len(doors) != len(door_cells):
            raise MapError(f"{len(door_cells)} doors on the map but {len(doors)} door colors given")
        if len(keys) != len(key_cells):
            raise MapError(f"{len(key_cells)} keys on the map but {len(keys)} key colors given")
        if gems is None:
            gems = [f"gem{i}" for i in range(1, len(gem_cells) + 1)]
        if len(gems) != len(gem_cells):
            raise MapError(f"{len(gem_cells)} gems on the map but {len(gems)} gem names given")
        palette = tuple(colors) if colors else tuple(dict.fromkeys(["red", "blue", "yellow", "green", *doors, *keys]))
        return cls(
            width=len(rows[0]),
            height=len(rows),
            walls=frozenset(walls),
            doors=tuple(Door(f"door{i}", c, col) for i, (c, col) in enumerate(zip(door_cells, doors), start=1)),
            gems=tuple(Gem(n, c) for n, c in zip(gems, gem_cells)),
            boxes=tuple(Box(f"box{i}", i, c) for i, c in sorted(box_cells)),
            keys=tuple(FloorKey(f"key{i}", c, col) for i, (c, col) in enumerate(zip(key_cells, keys), start=1)),
            start=start,
            colors=palette,
            name=name,
        )

    def to_ascii(self) -> str:
        grid = [["." for _ in range(self.width)] for _ in range(self.height)]
        for x, y in self.walls:
            grid[y][x] = WALL
        for d in self.doors:
            grid[d.cell[1]][d.cell[0]] = DOOR
        for g in self.gems:
            grid[g.cell[1]][g.cell[0]] = GEM
        for k in self.keys:
            grid[k.cell[1]][k.cell[0]] = KEY
        for b in self.boxes:
            grid[b.cell[1]][b.cell[0]] = str(b.index)
        grid[self.start[1]][self.start[0]] = AGENT
        return "\n".join("".join(r) for r in grid)

    def object_names(self) -> Mapping[str, tuple[str, ...]]:
        return {
            "agent": ("player",),
            "box": tuple(b.name for b in self.boxes),
            "door": tuple(d.name for d in self.doors),
            "gem": tuple(g.name for g in self.gems),
            "color": self.colors,
        }
