"""Exact-cost oracles used for bound verification and tests.

``dijkstra_optimal`` is the production oracle (uniform-cost search from the
start, backend-accelerated).  ``cost_to_go_table`` runs an independent
backward Dijkstra over reversed edges and is deliberately kept in plain
Python: it cross-checks both engines and the heuristics at test scale.
"""

from __future__ import annotations

import heapq

import numpy as np

from . import backend
from .domain import DX, DY, ProblemInstance, SandMap

ORACLE_MAX_CELLS = 1024 * 1024


def dijkstra_optimal(instance: ProblemInstance, backend_name: str | None = None) -> int:
    """Exact least cost from the start to any heading at the goal cell."""
    m = instance.map
    if m.num_cells > ORACLE_MAX_CELLS:
        raise ValueError(
            f"oracle refuses {m.width}x{m.height}: full-space search above "
            f"{ORACLE_MAX_CELLS} cells would exhaust memory"
        )
    cost = backend.kernel(backend_name).dijkstra_cost(
        m.width, m.height, m.bits, m.state_index(instance.start), instance.goal[0], instance.goal[1]
    )
    if cost < 0:
        raise RuntimeError("goal unreachable; the domain guarantees connectivity")
    return cost


def cost_to_go_table(m: SandMap, goal: tuple[int, int]) -> np.ndarray:
    """Exact cost-to-go for every state, via Dijkstra over reversed edges
    from all four headings at the goal cell.  Test-scale maps only."""
    n = m.num_states
    dist = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    gx, gy = goal
    heap: list[tuple[int, int]] = []
    for h in range(4):
        sid = (gy * m.width + gx) * 4 + h
        dist[sid] = 0
        heapq.heappush(heap, (0, sid))
    while heap:
        d, sid = heapq.heappop(heap)
        if d > dist[sid]:
            continue
        cell, h = divmod(sid, 4)
        y, x = divmod(cell, m.width)
        # forward predecessor: the cell one step behind, same heading
        px, py = x - DX[h], y - DY[h]
        if m.in_bounds(px, py):
            cost = 100 if m.is_sand(px, py) else 1
            psid = (py * m.width + px) * 4 + h
            if d + cost < dist[psid]:
                dist[psid] = d + cost
                heapq.heappush(heap, (d + cost, psid))
        # turn predecessors: turning left from h-1 reaches h, right from h+1
        for ph in ((h - 1) & 3, (h + 1) & 3):
            psid = cell * 4 + ph
            if d + 1 < dist[psid]:
                dist[psid] = d + 1
                heapq.heappush(heap, (d + 1, psid))
    return dist
