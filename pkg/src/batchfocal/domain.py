"""The (x, y, heading) sand-trap grid world.

Headings count quarter-turns counterclockwise from +x:
0 = East (+x), 1 = North (+y), 2 = West, 3 = South; turn-left = +1 mod 4.
Sand cells are traversable.  A forward move that leaves a sand cell costs
100; every other move (forward off clear ground, any turn in place) costs 1.

States are densely indexed as ``sid = (y * width + x) * 4 + heading`` so the
engines can use flat arrays; the helpers here convert both ways.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import rng

EAST, NORTH, WEST, SOUTH = 0, 1, 2, 3
HEADING_NAMES = ("east", "north", "west", "south")
DX = (1, 0, -1, 0)
DY = (0, 1, 0, -1)

STEP_COST = 1
SAND_EXIT_COST = 100

MAP_MAGIC = b"STMAP\x00\x00\x01"
_MAX_INSTANCE_ATTEMPTS = 10_000


@dataclass(frozen=True, order=True)
class GridState:
    x: int
    y: int
    heading: int


class Transition(NamedTuple):
    successor: GridState
    cost: int


@dataclass(frozen=True)
class SandMap:
    """Immutable bit-grid of sand-trap cells.

    ``bits`` packs cells row-major, LSB-first: cell index c = y*width + x
    lives in bit (c & 7) of byte (c >> 3).  Regenerating from
    (width, height, density, seed) is bit-identical.
    """

    width: int
    height: int
    density: float
    seed: int
    bits: np.ndarray

    def cell_index(self, x: int, y: int) -> int:
        return y * self.width + x

    def is_sand(self, x: int, y: int) -> bool:
        c = y * self.width + x
        return bool((self.bits[c >> 3] >> (c & 7)) & 1)

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    @property
    def num_cells(self) -> int:
        return self.width * self.height

    @property
    def num_states(self) -> int:
        return self.width * self.height * 4

    def state_index(self, s: GridState) -> int:
        return (s.y * self.width + s.x) * 4 + s.heading

    def decode_state(self, sid: int) -> GridState:
        cell, heading = divmod(sid, 4)
        y, x = divmod(cell, self.width)
        return GridState(x, y, heading)

    def sand_count(self) -> int:
        return int(np.unpackbits(self.bits, bitorder="little", count=self.num_cells).sum())


@dataclass(frozen=True)
class ProblemInstance:
    map: SandMap
    start: GridState
    goal: tuple[int, int]
    instance_seed: int

    def __post_init__(self) -> None:
        m = self.map
        gx, gy = self.goal
        if not m.in_bounds(self.start.x, self.start.y) or not m.in_bounds(gx, gy):
            raise ValueError("start or goal outside the map")
        if (self.start.x, self.start.y) == (gx, gy):
            raise ValueError("start and goal must be distinct cells")


def turn_left(heading: int) -> int:
    return (heading + 1) % 4


def turn_right(heading: int) -> int:
    return (heading + 3) % 4


def successors(s: GridState, m: SandMap) -> list[Transition]:
    """Up to three moves: forward along the heading (pruned at the map edge),
    then turn-left, then turn-right.  The order is part of the deterministic
    tie-breaking contract."""
    out = []
    nx, ny = s.x + DX[s.heading], s.y + DY[s.heading]
    if m.in_bounds(nx, ny):
        cost = SAND_EXIT_COST if m.is_sand(s.x, s.y) else STEP_COST
        out.append(Transition(GridState(nx, ny, s.heading), cost))
    out.append(Transition(GridState(s.x, s.y, turn_left(s.heading)), STEP_COST))
    out.append(Transition(GridState(s.x, s.y, turn_right(s.heading)), STEP_COST))
    return out


def transition_cost(a: GridState, b: GridState, m: SandMap) -> int:
    """Cost of a legal action pair: 100 iff the move exits a sand cell."""
    if (a.x, a.y) != (b.x, b.y) and m.is_sand(a.x, a.y):
        return SAND_EXIT_COST
    return STEP_COST


def at_goal(s: GridState, goal: tuple[int, int]) -> bool:
    return s.x == goal[0] and s.y == goal[1]


def generate_map(width: int, height: int, density: float, seed: int) -> SandMap:
    """Each cell is sand independently with probability ``density``, drawn
    from the splitmix64 stream keyed by (seed, cell index)."""
    if width <= 0 or height <= 0:
        raise ValueError("map dimensions must be positive")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must be in [0, 1]")
    draws = rng.unit_block(seed, 0, width * height)
    bits = np.packbits(draws < density, bitorder="little")
    return SandMap(width, height, density, seed & rng.MASK64, bits)


def generate_instance(m: SandMap, instance_seed: int, min_separation: int = 0) -> ProblemInstance:
    """Draw start and goal cells uniformly, rejecting pairs closer than
    ``min_separation`` in Manhattan distance (and coincident pairs).  The
    start heading is always East."""
    n = m.num_cells
    for attempt in range(_MAX_INSTANCE_ATTEMPTS):
        sc = int(rng.unit(instance_seed, 2 * attempt) * n)
        gc = int(rng.unit(instance_seed, 2 * attempt + 1) * n)
        sy, sx = divmod(sc, m.width)
        gy, gx = divmod(gc, m.width)
        if sc != gc and abs(sx - gx) + abs(sy - gy) >= min_separation:
            return ProblemInstance(m, GridState(sx, sy, EAST), (gx, gy), instance_seed & rng.MASK64)
    raise ValueError(
        f"no start/goal pair with separation >= {min_separation} found in "
        f"{_MAX_INSTANCE_ATTEMPTS} attempts on a {m.width}x{m.height} map"
    )


def save_map(m: SandMap, path: str) -> None:
    """Flat binary map format: magic, LE u64 width/height/seed, f64 density,
    then the packed cell bits."""
    header = np.zeros(3, dtype="<u8")
    header[0], header[1], header[2] = m.width, m.height, m.seed
    with open(path, "wb") as fh:
        fh.write(MAP_MAGIC)
        fh.write(header.tobytes())
        fh.write(np.float64(m.density).astype("<f8").tobytes())
        fh.write(m.bits.tobytes())


def load_map(path: str) -> SandMap:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MAP_MAGIC)] != MAP_MAGIC:
        raise ValueError(f"{path}: not a sand-trap map file")
    width, height, seed = (int(v) for v in np.frombuffer(blob, "<u8", count=3, offset=8))
    density = float(np.frombuffer(blob, "<f8", count=1, offset=32)[0])
    nbytes = (width * height + 7) // 8
    bits = np.frombuffer(blob, np.uint8, count=nbytes, offset=40).copy()
    return SandMap(width, height, density, seed, bits)
