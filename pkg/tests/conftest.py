from __future__ import annotations

import numpy as np
import pytest

from batchfocal.domain import SandMap


def map_from_rows(rows: list[str], density: float = 0.0, seed: int = 0) -> SandMap:
    """Build a map from ASCII art: '#' is sand, '.' is clear.  rows[0] is
    y=0 (the +y direction is 'north', so the picture is upside down)."""
    height = len(rows)
    width = len(rows[0])
    assert all(len(r) == width for r in rows)
    cells = np.zeros(width * height, dtype=bool)
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            cells[y * width + x] = ch == "#"
    return SandMap(width, height, density, seed, np.packbits(cells, bitorder="little"))


@pytest.fixture
def ascii_map():
    return map_from_rows
