"""Pure-Python search engine.

Reference implementation of the three algorithms; batchfocal._core is its
compiled twin and must stay pop-for-pop identical.  Keys are (value, -g,
insertion sequence) tuples, so equal priorities break toward larger g and
then toward earlier insertion; the sequence numbers make every key unique,
which is what keeps heap pop order deterministic across both engines.

Queue mechanics: OPEN and FOCAL are lazy-deletion binary heaps over live
per-state node records.  A third heap buffers OPEN nodes that failed the
FOCAL admission test at insertion time; whenever the admission bound
(w_so * min F_open) moves up, buffered candidates are admitted in F_open
order without rescanning OPEN.
"""

from __future__ import annotations

import heapq

import numpy as np

from . import rng

ALGO_FOCAL = 0
ALGO_NBBA = 1
ALGO_BLOCKING = 2

STATUS_SOLVED = 0
STATUS_EXPANSION_LIMIT = 1
STATUS_EXHAUSTED = 2

_DX = (1, 0, -1, 0)
_DY = (0, 1, 0, -1)


def focal_qualifies(f_open: float, f_min: float, w_so: float) -> bool:
    """FOCAL admission test, inclusive at the bound."""
    return f_open <= w_so * f_min


class _Node:
    __slots__ = (
        "sid", "g", "h_open", "h_focal", "parent",
        "open_seq", "focal_seq", "in_open", "in_focal", "in_waitlist", "pending",
    )

    def __init__(self, sid: int):
        self.sid = sid
        self.g = 0
        self.h_open = 0.0
        self.h_focal = 0.0
        self.parent = -1
        self.open_seq = -1
        self.focal_seq = -1
        self.in_open = False
        self.in_focal = False
        self.in_waitlist = False
        self.pending = False


class QueueSet:
    """OPEN/FOCAL/admission-buffer bookkeeping shared by all three algorithms."""

    def __init__(self, w_so: float, w_h: float, record_admissions: bool = False):
        self.w_so = w_so
        self.w_h = w_h
        self.nodes: dict[int, _Node] = {}
        self.open_heap: list[tuple[float, int, int, int]] = []
        self.focal_heap: list[tuple[float, int, int, int]] = []
        self.admit_heap: list[tuple[float, int, int, int]] = []
        self._seq = 0
        self.admission_log: list[tuple[int, float, float]] | None = [] if record_admissions else None

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def open_min(self) -> float | None:
        """Minimum F_open over OPEN (stale heap tops are discarded)."""
        h = self.open_heap
        while h:
            f, _, seq, sid = h[0]
            nd = self.nodes[sid]
            if nd.in_open and nd.open_seq == seq:
                return f
            heapq.heappop(h)
        return None

    def _focal_push(self, nd: _Node, checked_bound: float | None = None) -> None:
        seq = self._next_seq()
        nd.focal_seq = seq
        nd.in_focal = True
        f_focal = nd.g + self.w_h * nd.h_focal
        heapq.heappush(self.focal_heap, (f_focal, -nd.g, seq, nd.sid))
        if self.admission_log is not None and checked_bound is not None:
            self.admission_log.append((nd.sid, nd.g + nd.h_open, checked_bound))

    def add_to_queues(self, nd: _Node) -> None:
        """Insert into OPEN keyed by F_open, and into FOCAL iff F_open is
        within w_so of the current OPEN minimum (which includes the node
        itself).  Non-qualifying nodes wait in the admission buffer; nodes
        whose focal value is still pending stay out of both."""
        f_open = nd.g + nd.h_open
        seq = self._next_seq()
        nd.open_seq = seq
        nd.in_open = True
        heapq.heappush(self.open_heap, (f_open, -nd.g, seq, nd.sid))
        if nd.pending:
            return
        if nd.in_focal:
            # g improved while a FOCAL member: re-key, membership is kept
            self._focal_push(nd)
            return
        f_min = self.open_min()
        if focal_qualifies(f_open, f_min, self.w_so):
            self._focal_push(nd, self.w_so * f_min)
        else:
            heapq.heappush(self.admit_heap, (f_open, -nd.g, seq, nd.sid))

    def update_focal(self) -> None:
        """Admit every buffered OPEN node now within the admission bound,
        in F_open order."""
        f_min = self.open_min()
        if f_min is None:
            return
        bound = self.w_so * f_min
        h = self.admit_heap
        while h and h[0][0] <= bound:
            f, _, seq, sid = heapq.heappop(h)
            nd = self.nodes[sid]
            if nd.in_open and nd.open_seq == seq and not nd.in_focal and not nd.pending:
                self._focal_push(nd, bound)

    def admit_after_flush(self, nd: _Node, bound: float) -> None:
        """Blocking variant: a node just received its focal value; admit it
        or buffer it for a later admission-bound rise."""
        f_open = nd.g + nd.h_open
        if f_open <= bound:
            self._focal_push(nd, bound)
        else:
            heapq.heappush(self.admit_heap, (f_open, -nd.g, nd.open_seq, nd.sid))

    def pop_focal(self) -> _Node | None:
        """Pop the FOCAL minimum and remove it from OPEN; None if FOCAL is
        effectively empty."""
        h = self.focal_heap
        while h:
            _, _, seq, sid = heapq.heappop(h)
            nd = self.nodes[sid]
            if nd.in_focal and nd.focal_seq == seq:
                nd.in_focal = False
                nd.focal_seq = -1
                nd.in_open = False
                nd.open_seq = -1
                return nd
        return None

    # -- test hooks ---------------------------------------------------------

    def live_entries(self, which: str) -> dict[int, int]:
        """Count live heap entries per state (audits 'exactly one live entry')."""
        heap = {"open": self.open_heap, "focal": self.focal_heap}[which]
        counts: dict[int, int] = {}
        for _, _, seq, sid in heap:
            nd = self.nodes[sid]
            live = (nd.in_open and nd.open_seq == seq) if which == "open" else (nd.in_focal and nd.focal_seq == seq)
            if live:
                counts[sid] = counts.get(sid, 0) + 1
        return counts

    def focal_members(self) -> set[int]:
        return {sid for sid, nd in self.nodes.items() if nd.in_focal}

    def open_members(self) -> set[int]:
        return {sid for sid, nd in self.nodes.items() if nd.in_open}


def run_search(
    algo: int,
    width: int,
    height: int,
    sand_bits: np.ndarray,
    start_sid: int,
    goal_x: int,
    goal_y: int,
    w_so: float,
    w_h: float,
    batch_size: int,
    max_expansions: int,
    k_fast: float,
    fast_seed: int,
    evaluator=None,
    collect_events: bool = False,
) -> dict:
    sand = sand_bits
    batched = algo in (ALGO_NBBA, ALGO_BLOCKING)
    if batched and evaluator is None:
        raise ValueError("batched algorithms need a batch evaluator")

    unit = rng.unit

    def base_value(sid: int) -> float:
        cell, h = divmod(sid, 4)
        y, x = divmod(cell, width)
        hm = float(abs(x - goal_x) + abs(y - goal_y))
        u = unit(fast_seed, (x << 34) | (y << 4) | h)
        return hm * (1.0 - k_fast * u)

    queues = QueueSet(w_so, w_h)
    nodes = queues.nodes
    overlay: dict[int, float] = {}
    waitlist: list[int] = []

    expansions = 0
    generations = 0
    lazy_reinsertions = 0
    flushes = 0
    forced_flushes = 0
    flushed_states = 0
    flush_sizes: list[int] = []
    flush_forced: list[bool] = []
    inference_time = 0.0

    ev_state: list[int] = []
    ev_g: list[int] = []
    ev_fmin: list[float] = []
    ev_wl: list[int] = []

    def do_flush(forced: bool) -> None:
        nonlocal flushes, forced_flushes, flushed_states, inference_time
        if not waitlist:
            return
        sids = np.array(waitlist, dtype=np.int64)
        waitlist.clear()
        values, seconds = evaluator(sids)
        inference_time += seconds
        flushes += 1
        forced_flushes += 1 if forced else 0
        flushed_states += len(sids)
        flush_sizes.append(len(sids))
        flush_forced.append(forced)
        if algo == ALGO_NBBA:
            # cache only; FOCAL keys are corrected lazily at pop time
            for i in range(len(sids)):
                sid = int(sids[i])
                overlay[sid] = float(values[i])
                nodes[sid].in_waitlist = False
        else:
            bound = w_so * queues.open_min()  # OPEN holds every waitlisted node
            for i in range(len(sids)):
                sid = int(sids[i])
                v = float(values[i])
                overlay[sid] = v
                nd = nodes[sid]
                nd.in_waitlist = False
                nd.pending = False
                nd.h_focal = v
                queues.admit_after_flush(nd, bound)

    # start node: never waitlisted, focal value is the base fast value
    start = _Node(start_sid)
    start.h_open = start.h_focal = base_value(start_sid)
    nodes[start_sid] = start
    queues.add_to_queues(start)

    status = STATUS_EXHAUSTED
    goal_node: _Node | None = None

    while True:
        nd = queues.pop_focal()
        if nd is None:
            if algo == ALGO_BLOCKING and waitlist:
                do_flush(forced=True)
                nd = queues.pop_focal()
            if nd is None:
                status = STATUS_EXHAUSTED
                break

        cell = nd.sid >> 2
        if cell % width == goal_x and cell // width == goal_y:
            status = STATUS_SOLVED
            goal_node = nd
            break

        refreshed = False
        if algo == ALGO_NBBA:
            current = overlay.get(nd.sid, nd.h_open)  # h_open is the base value
            if current != nd.h_focal:
                nd.h_focal = current
                queues.add_to_queues(nd)
                lazy_reinsertions += 1
                refreshed = True

        if not refreshed:
            if expansions == max_expansions:
                status = STATUS_EXPANSION_LIMIT
                break
            expansions += 1
            if collect_events:
                ev_state.append(nd.sid)
                ev_g.append(nd.g)
                fm = queues.open_min()
                ev_fmin.append(float("nan") if fm is None else fm)
                ev_wl.append(len(waitlist))

            h = nd.sid & 3
            y, x = divmod(cell, width)
            succs: list[tuple[int, int]] = []
            nx, ny = x + _DX[h], y + _DY[h]
            if 0 <= nx < width and 0 <= ny < height:
                c = cell
                cost = 100 if (sand[c >> 3] >> (c & 7)) & 1 else 1
                succs.append(((ny * width + nx) * 4 + h, cost))
            base4 = cell * 4
            succs.append((base4 + ((h + 1) & 3), 1))
            succs.append((base4 + ((h + 3) & 3), 1))

            for nsid, cost in succs:
                generations += 1
                ng = nd.g + cost
                m = nodes.get(nsid)
                if m is None:
                    m = _Node(nsid)
                    nodes[nsid] = m
                    m.g = ng
                    m.parent = nd.sid
                    m.h_open = base_value(nsid)
                elif ng < m.g:
                    m.g = ng
                    m.parent = nd.sid
                else:
                    continue
                if algo == ALGO_FOCAL:
                    m.h_focal = m.h_open
                elif algo == ALGO_NBBA:
                    m.h_focal = overlay.get(nsid, m.h_open)
                else:  # blocking: withheld from FOCAL until its value arrives
                    v = overlay.get(nsid)
                    if v is None:
                        m.pending = True
                    else:
                        m.pending = False
                        m.h_focal = v
                if batched and not m.in_waitlist and nsid not in overlay:
                    waitlist.append(nsid)
                    m.in_waitlist = True
                queues.add_to_queues(m)

        queues.update_focal()

        if batched and len(waitlist) >= batch_size:
            do_flush(forced=False)

    # -- outcome ------------------------------------------------------------

    cost = None
    path = None
    if goal_node is not None:
        chain = [goal_node.sid]
        p = goal_node.parent
        limit = width * height * 4 + 1
        while p != -1:
            chain.append(p)
            p = nodes[p].parent
            if len(chain) > limit:
                raise RuntimeError("parent chain corrupt: exceeds state count")
        chain.reverse()
        # recompute along the chain: with reopening a predecessor's g may have
        # improved after this link was recorded, so the chain can be cheaper
        # than the popped g
        cost = 0
        for a, b in zip(chain, chain[1:]):
            ca = a >> 2
            cost += 100 if (ca != (b >> 2)) and ((sand[ca >> 3] >> (ca & 7)) & 1) else 1
        path = chain

    events = None
    if collect_events:
        events = {
            "state": np.array(ev_state, dtype=np.int64),
            "g": np.array(ev_g, dtype=np.int64),
            "f_min": np.array(ev_fmin, dtype=np.float64),
            "waitlist_size": np.array(ev_wl, dtype=np.int64),
        }

    return {
        "status": status,
        "cost": cost,
        "path": path,
        "expansions": expansions,
        "generations": generations,
        "lazy_reinsertions": lazy_reinsertions,
        "flushes": flushes,
        "forced_flushes": forced_flushes,
        "flushed_states": flushed_states,
        "flush_sizes": flush_sizes,
        "flush_forced": flush_forced,
        "inference_time": inference_time,
        "waitlist_residue": len(waitlist),
        "overlay_size": len(overlay),
        "events": events,
    }


def dijkstra_cost(
    width: int,
    height: int,
    sand_bits: np.ndarray,
    start_sid: int,
    goal_x: int,
    goal_y: int,
) -> int:
    """Exact least cost from the start state to any heading at the goal cell,
    by uniform-cost search over the full (x, y, heading) space."""
    sand = sand_bits
    INF = (1 << 62)
    dist: dict[int, int] = {start_sid: 0}
    heap: list[tuple[int, int]] = [(0, start_sid)]
    while heap:
        d, sid = heapq.heappop(heap)
        if d > dist.get(sid, INF):
            continue
        cell = sid >> 2
        if cell % width == goal_x and cell // width == goal_y:
            return d
        h = sid & 3
        y, x = divmod(cell, width)
        nx, ny = x + _DX[h], y + _DY[h]
        if 0 <= nx < width and 0 <= ny < height:
            cost = 100 if (sand[cell >> 3] >> (cell & 7)) & 1 else 1
            nsid = (ny * width + nx) * 4 + h
            ndist = d + cost
            if ndist < dist.get(nsid, INF):
                dist[nsid] = ndist
                heapq.heappush(heap, (ndist, nsid))
        base4 = cell * 4
        for nsid in (base4 + ((h + 1) & 3), base4 + ((h + 3) & 3)):
            ndist = d + 1
            if ndist < dist.get(nsid, INF):
                dist[nsid] = ndist
                heapq.heappush(heap, (ndist, nsid))
    return -1
