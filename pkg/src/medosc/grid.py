"""Discrete grids, cubes, and piecewise-constant functions.

Everything in this package operates on functions that are constant on the
cells of a uniformly refined cube: a root cube (default the unit cube) split
``level`` times along every axis, giving ``2**level`` cells per axis.  With
this representation Lebesgue measure, averages, medians, and oscillations are
all exactly computable by counting cells, which is what makes the downstream
inequality checks exact rather than approximate.

Two cube families are used throughout:

* dyadic cubes: the tree obtained by repeated halving of the root cube;
* grid-aligned cubes: every axis-parallel cube whose corners lie on the
  finest grid and whose side is an integer number of cells (the finite
  stand-in for "all subcubes").

Supported dimensions are 1 and 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

__all__ = [
    "Domain",
    "GridFunction",
    "Weight",
    "DyadicCube",
    "GridCube",
    "cells",
    "average",
    "enumerate_cubes",
    "read_grid_function",
    "write_grid_function",
]


class GridError(ValueError):
    """A cube or cell reference that does not fit the domain grid."""


class ParseError(ValueError):
    """Malformed serialized grid function."""


@dataclass(frozen=True)
class Domain:
    """Geometry of the root cube: origin per axis and a common side length."""

    origin: tuple[float, ...] = (0.0,)
    side: float = 1.0

    def __post_init__(self):
        if self.side <= 0 or not np.isfinite(self.side):
            raise GridError(f"domain side must be positive and finite, got {self.side}")
        if len(self.origin) not in (1, 2):
            raise GridError("only dim 1 and 2 are supported")

    @property
    def dim(self) -> int:
        return len(self.origin)


def unit_domain(dim: int) -> Domain:
    return Domain(origin=(0.0,) * dim, side=1.0)


@dataclass(frozen=True)
class GridFunction:
    """A real function, constant on each finest cell of a refined cube.

    ``values`` is row-major over cell coordinates (axis 0 slowest).  The
    carrier for functions, weights, and operator outputs alike.
    """

    dim: int
    level: int
    values: np.ndarray
    domain: Domain = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if self.level < 1:
            raise GridError(f"level must be >= 1, got {self.level}")
        if self.domain is None:
            object.__setattr__(self, "domain", unit_domain(self.dim))
        if self.domain.dim != self.dim:
            raise GridError("domain dimension does not match dim")
        vals = np.asarray(self.values, dtype=float)
        expected = (2 ** self.level) ** self.dim
        if vals.ndim != 1 or vals.size != expected:
            raise GridError(
                f"values must be a flat array of length {expected} "
                f"(= 2^(dim*level)), got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise GridError("values must all be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # -- geometry ---------------------------------------------------------

    @property
    def n(self) -> int:
        """Cells per axis."""
        return 2 ** self.level

    @property
    def cell_width(self) -> float:
        return self.domain.side / self.n

    @property
    def cell_volume(self) -> float:
        return self.cell_width ** self.dim

    def grid(self) -> np.ndarray:
        """Values reshaped to (n,) in 1D or (n, n) in 2D."""
        if self.dim == 1:
            return self.values
        return self.values.reshape(self.n, self.n)

    def cell_centers(self, axis: int = 0) -> np.ndarray:
        o = self.domain.origin[axis]
        return o + (np.arange(self.n) + 0.5) * self.cell_width

    def full_cube(self) -> "GridCube":
        return GridCube(offset=(0,) * self.dim, side=self.n)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.dim, self.level, np.asarray(values, dtype=float), self.domain)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.level == other.level
            and self.domain == other.domain
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.dim, self.level, self.domain, self.values.tobytes()))


class Weight(GridFunction):
    """A GridFunction constrained to nonnegative values."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(np.asarray(self.values) < 0):
            raise GridError("weight values must be nonnegative")


def as_weight(f: GridFunction) -> Weight:
    return Weight(f.dim, f.level, f.values, f.domain)


# -- cubes ----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Member of the halving tree: level ``lvl`` in [0, L], index per axis in [0, 2^lvl)."""

    lvl: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.lvl < 0:
            raise GridError(f"dyadic level must be >= 0, got {self.lvl}")
        if any(i < 0 or i >= 2 ** self.lvl for i in self.index):
            raise GridError(f"dyadic index {self.index} out of range at level {self.lvl}")

    @property
    def dim(self) -> int:
        return len(self.index)

    def parent(self) -> "DyadicCube":
        if self.lvl == 0:
            raise GridError("the root cube has no dyadic parent")
        return DyadicCube(self.lvl - 1, tuple(i // 2 for i in self.index))

    def children(self) -> list["DyadicCube"]:
        d = self.dim
        kids = []
        for bits in range(2 ** d):
            idx = tuple(2 * self.index[a] + ((bits >> a) & 1) for a in range(d))
            kids.append(DyadicCube(self.lvl + 1, idx))
        return sorted(kids)

    def to_grid_cube(self, level: int) -> "GridCube":
        if self.lvl > level:
            raise GridError(f"dyadic level {self.lvl} exceeds grid level {level}")
        side = 2 ** (level - self.lvl)
        return GridCube(offset=tuple(i * side for i in self.index), side=side)


@dataclass(frozen=True, order=True)
class GridCube:
    """Axis-aligned cube with grid corners: cell offset per axis, equal integer side."""

    offset: tuple[int, ...]
    side: int

    def __post_init__(self):
        if self.side < 1:
            raise GridError(f"cube side must be >= 1 cell, got {self.side}")
        if any(o < 0 for o in self.offset):
            raise GridError(f"cube offset must be nonnegative, got {self.offset}")

    @property
    def dim(self) -> int:
        return len(self.offset)

    @property
    def cell_count(self) -> int:
        return self.side ** self.dim

    def contains_cell(self, cell: tuple[int, ...]) -> bool:
        return all(o <= c < o + self.side for o, c in zip(self.offset, cell))

    def contains_cube(self, other: "GridCube") -> bool:
        return all(
            o <= oo and oo + other.side <= o + self.side
            for o, oo in zip(self.offset, other.offset)
        )

    def measure(self, f: GridFunction) -> float:
        return self.cell_count * f.cell_volume

    def center(self, f: GridFunction) -> tuple[float, ...]:
        h = f.cell_width
        return tuple(f.domain.origin[a] + (self.offset[a] + self.side / 2.0) * h
                     for a in range(self.dim))

    def sidelength(self, f: GridFunction) -> float:
        return self.side * f.cell_width


CubeLike = "GridCube | DyadicCube"


def _as_grid_cube(q, f: GridFunction) -> GridCube:
    if isinstance(q, DyadicCube):
        q = q.to_grid_cube(f.level)
    if q.dim != f.dim:
        raise GridError(f"cube dim {q.dim} does not match function dim {f.dim}")
    if any(o + q.side > f.n for o in q.offset):
        raise GridError(f"cube {q} exceeds the {f.n}-cell domain grid")
    return q


def cells(q, f: GridFunction) -> list[tuple[int, ...]]:
    """Cell coordinates covered by the cube, lexicographic order."""
    g = _as_grid_cube(q, f)
    if f.dim == 1:
        return [(c,) for c in range(g.offset[0], g.offset[0] + g.side)]
    return [
        (c0, c1)
        for c0 in range(g.offset[0], g.offset[0] + g.side)
        for c1 in range(g.offset[1], g.offset[1] + g.side)
    ]


def cube_values(f: GridFunction, q) -> np.ndarray:
    """The (flattened) cell values of f on the cube."""
    g = _as_grid_cube(q, f)
    if f.dim == 1:
        return f.values[g.offset[0]:g.offset[0] + g.side]
    arr = f.grid()
    return arr[
        g.offset[0]:g.offset[0] + g.side, g.offset[1]:g.offset[1] + g.side
    ].reshape(-1)


def average(f: GridFunction, q) -> float:
    """(1/|Q|) integral of f over the cube: the plain mean of its cell values."""
    return float(np.mean(cube_values(f, q)))


def enumerate_cubes(
    f: GridFunction,
    mode: str = "grid-aligned",
    containing: tuple[int, ...] | None = None,
    within: GridCube | DyadicCube | None = None,
) -> Iterator[GridCube]:
    """Deterministic, duplicate-free enumeration of subcubes.

    ``mode='dyadic'`` walks the halving tree of ``within`` (default the whole
    domain); ``mode='grid-aligned'`` yields every equal-side cube with grid
    corners.  ``containing`` filters to cubes covering one cell.  Order is
    (side, offset) for grid-aligned and (level, index) for dyadic.
    """
    root = f.full_cube() if within is None else _as_grid_cube(within, f)
    if containing is not None and not root.contains_cell(containing):
        return
    if mode == "dyadic":
        yield from _enumerate_dyadic(f, root, containing)
    elif mode == "grid-aligned":
        yield from _enumerate_grid(f, root, containing)
    else:
        raise GridError(f"unknown cube mode {mode!r} (expected 'dyadic' or 'grid-aligned')")


def _enumerate_dyadic(f, root: GridCube, containing) -> Iterator[GridCube]:
    # Subtree of the domain's dyadic tree lying inside `root`; when root is
    # itself dyadic this is exactly D(root).
    stack = [root] if _is_dyadic(f, root) else []
    if not stack:
        raise GridError("dyadic enumeration requires a dyadic 'within' cube")
    while stack:
        q = stack.pop(0)
        if containing is None or q.contains_cell(containing):
            yield q
            if q.side > 1:
                stack.extend(_dyadic_children(q))


def _is_dyadic(f, q: GridCube) -> bool:
    s = q.side
    if s & (s - 1):
        return False
    return all(o % s == 0 for o in q.offset)


def _dyadic_children(q: GridCube) -> list[GridCube]:
    half = q.side // 2
    d = q.dim
    kids = []
    for bits in range(2 ** d):
        off = tuple(q.offset[a] + half * ((bits >> a) & 1) for a in range(d))
        kids.append(GridCube(offset=off, side=half))
    return sorted(kids)


def _enumerate_grid(f, root: GridCube, containing) -> Iterator[GridCube]:
    d = root.dim
    for side in range(1, root.side + 1):
        ranges = []
        for a in range(d):
            lo = root.offset[a]
            hi = root.offset[a] + root.side - side
            if containing is not None:
                lo = max(lo, containing[a] - side + 1)
                hi = min(hi, containing[a])
            ranges.append(range(lo, hi + 1))
        if d == 1:
            for o0 in ranges[0]:
                yield GridCube(offset=(o0,), side=side)
        else:
            for o0 in ranges[0]:
                for o1 in ranges[1]:
                    yield GridCube(offset=(o0, o1), side=side)


def dyadic_cubes(f: GridFunction, within: DyadicCube | None = None) -> Iterator[DyadicCube]:
    """All DyadicCube nodes of D(within) down to single cells, BFS order."""
    root = within if within is not None else DyadicCube(0, (0,) * f.dim)
    stack = [root]
    while stack:
        q = stack.pop(0)
        yield q
        if q.lvl < f.level:
            stack.extend(q.children())


# -- serialization ---------------------------------------------------------


def grid_function_to_dict(f: GridFunction) -> dict:
    return {
        "dim": f.dim,
        "level": f.level,
        "values": [float(v) for v in f.values],
        "domain": {"origin": [float(o) for o in f.domain.origin], "side": float(f.domain.side)},
    }


def grid_function_from_dict(doc: dict) -> GridFunction:
    for key in ("dim", "level", "values"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    dim, level = doc["dim"], doc["level"]
    if not isinstance(dim, int) or dim not in (1, 2):
        raise ParseError(f"field 'dim' must be 1 or 2, got {dim!r}")
    if not isinstance(level, int) or level < 1:
        raise ParseError(f"field 'level' must be a positive integer, got {level!r}")
    values = doc["values"]
    if not isinstance(values, list):
        raise ParseError("field 'values' must be a list of numbers")
    expected = (2 ** level) ** dim
    if len(values) != expected:
        raise ParseError(
            f"field 'values' has length {len(values)}, expected {expected} for "
            f"dim={dim}, level={level}"
        )
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ParseError(f"field 'values' contains a non-finite entry at position {bad}")
    dom_doc = doc.get("domain")
    if dom_doc is None:
        domain = unit_domain(dim)
    else:
        try:
            domain = Domain(origin=tuple(float(x) for x in dom_doc["origin"]),
                            side=float(dom_doc["side"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"field 'domain' is malformed: {exc}") from exc
        if domain.dim != dim:
            raise ParseError("field 'domain.origin' length does not match dim")
    return GridFunction(dim, level, arr, domain)


def write_grid_function(f: GridFunction, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(grid_function_to_dict(f), fh)
        fh.write("\n")


def read_grid_function(path) -> GridFunction:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"expected a JSON object in {path}")
    return grid_function_from_dict(doc)
