# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled search engine: the hot twin of batchfocal._core_py.

Keep this file pop-for-pop identical to the pure engine: same key ordering
(value asc, g desc, insertion sequence asc), same successor order, same
admission and flush logic.  Float expressions must match the pure engine
operation for operation (the build disables FP contraction for that reason).
"""

from cython.operator cimport dereference as deref
from libc.math cimport NAN
from libc.stdint cimport int64_t, uint64_t, uint8_t
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map

import numpy as np

ALGO_FOCAL = 0
ALGO_NBBA = 1
ALGO_BLOCKING = 2

STATUS_SOLVED = 0
STATUS_EXPANSION_LIMIT = 1
STATUS_EXHAUSTED = 2

cdef int64_t _DX[4]
cdef int64_t _DY[4]
_DX[0], _DX[1], _DX[2], _DX[3] = 1, 0, -1, 0
_DY[0], _DY[1], _DY[2], _DY[3] = 0, 1, 0, -1

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15UL
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef enum:
    C_FOCAL = 0
    C_NBBA = 1
    C_BLOCKING = 2
    F_CREATED = 1
    F_WAITLIST = 2
    F_PENDING = 4


cdef struct Entry:
    double key
    int64_t g
    int64_t seq
    int64_t sid


cdef inline bint entry_lt(const Entry& a, const Entry& b) nogil:
    if a.key != b.key:
        return a.key < b.key
    if a.g != b.g:
        return a.g > b.g          # larger g first
    return a.seq < b.seq          # then earlier insertion


cdef inline void heap_push(vector[Entry]& h, Entry e) nogil:
    cdef size_t i = h.size()
    cdef size_t p
    cdef Entry tmp
    h.push_back(e)
    while i > 0:
        p = (i - 1) >> 1
        if entry_lt(h[i], h[p]):
            tmp = h[p]; h[p] = h[i]; h[i] = tmp
            i = p
        else:
            break


cdef inline void heap_pop(vector[Entry]& h) nogil:
    cdef size_t n = h.size() - 1
    cdef size_t i = 0, l, r, best
    cdef Entry tmp
    h[0] = h[n]
    h.pop_back()
    if n == 0:
        return
    while True:
        l = 2 * i + 1
        r = l + 1
        best = i
        if l < n and entry_lt(h[l], h[best]):
            best = l
        if r < n and entry_lt(h[r], h[best]):
            best = r
        if best == i:
            break
        tmp = h[best]; h[best] = h[i]; h[i] = tmp
        i = best


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef inline int64_t iabs(int64_t v) nogil:
    return -v if v < 0 else v


cdef inline bint sand_bit(const uint8_t[::1] sand, int64_t cell) nogil:
    return (sand[cell >> 3] >> (cell & 7)) & 1


cdef class _Engine:
    cdef int64_t width, height, num_states, gx, gy
    cdef int algo
    cdef double w_so, w_h, k_fast
    cdef uint64_t fast_seed
    cdef const uint8_t[::1] sand
    cdef int64_t[::1] g, parent, open_seq, focal_seq
    cdef double[::1] h_open, h_focal
    cdef uint8_t[::1] flags
    cdef vector[Entry] open_heap, focal_heap, admit_heap
    cdef vector[int64_t] waitlist
    cdef unordered_map[int64_t, double] overlay
    cdef int64_t seq
    cdef int64_t flushes, forced_flushes, flushed_states
    cdef double inference_time
    cdef object flush_sizes, flush_forced
    cdef object _arrays
    cdef object _sids_buffer

    def __init__(self, int algo, int64_t width, int64_t height, const uint8_t[::1] sand,
                 int64_t gx, int64_t gy, double w_so, double w_h,
                 double k_fast, uint64_t fast_seed):
        cdef int64_t n = width * height * 4
        self.algo = algo
        self.width = width
        self.height = height
        self.num_states = n
        self.gx = gx
        self.gy = gy
        self.w_so = w_so
        self.w_h = w_h
        self.k_fast = k_fast
        self.fast_seed = fast_seed
        self.sand = sand
        arrays = [
            np.empty(n, dtype=np.int64),    # g
            np.empty(n, dtype=np.int64),    # parent
            np.empty(n, dtype=np.int64),    # open_seq
            np.empty(n, dtype=np.int64),    # focal_seq
            np.empty(n, dtype=np.float64),  # h_open
            np.empty(n, dtype=np.float64),  # h_focal
            np.zeros(n, dtype=np.uint8),    # flags
        ]
        self._arrays = arrays
        self.g = arrays[0]
        self.parent = arrays[1]
        self.open_seq = arrays[2]
        self.focal_seq = arrays[3]
        self.h_open = arrays[4]
        self.h_focal = arrays[5]
        self.flags = arrays[6]
        self.seq = 0
        self.flushes = 0
        self.forced_flushes = 0
        self.flushed_states = 0
        self.inference_time = 0.0
        self.flush_sizes = []
        self.flush_forced = []
        self._sids_buffer = np.empty(0, dtype=np.int64)

    cdef inline double base_value(self, int64_t sid) nogil:
        cdef int64_t cell = sid >> 2
        cdef int64_t h = sid & 3
        cdef int64_t y = cell / self.width
        cdef int64_t x = cell - y * self.width
        cdef double hm = <double>(iabs(x - self.gx) + iabs(y - self.gy))
        cdef uint64_t key = (<uint64_t>x << 34) | (<uint64_t>y << 4) | <uint64_t>h
        cdef uint64_t z = mix64(self.fast_seed + (key + 1) * GOLDEN)
        cdef double u = <double>(z >> 11) * INV_2_53
        return hm * (1.0 - self.k_fast * u)

    cdef inline void create_node(self, int64_t sid, int64_t g, int64_t parent):
        self.flags[sid] = F_CREATED
        self.g[sid] = g
        self.parent[sid] = parent
        self.open_seq[sid] = -1
        self.focal_seq[sid] = -1
        self.h_open[sid] = self.base_value(sid)
        self.h_focal[sid] = 0.0

    cdef double open_min(self):
        """Minimum F_open over OPEN; -1.0 when OPEN is empty."""
        cdef Entry e
        while self.open_heap.size() > 0:
            e = self.open_heap[0]
            if self.open_seq[e.sid] == e.seq:
                return e.key
            heap_pop(self.open_heap)
        return -1.0

    cdef void focal_push(self, int64_t sid):
        cdef Entry e
        self.seq += 1
        self.focal_seq[sid] = self.seq
        e.key = <double>self.g[sid] + self.w_h * self.h_focal[sid]
        e.g = self.g[sid]
        e.seq = self.seq
        e.sid = sid
        heap_push(self.focal_heap, e)

    cdef void add_to_queues(self, int64_t sid):
        cdef Entry e
        cdef double f_open = <double>self.g[sid] + self.h_open[sid]
        cdef double f_min
        cdef bint was_focal = self.focal_seq[sid] != -1
        self.seq += 1
        e.key = f_open
        e.g = self.g[sid]
        e.seq = self.seq
        e.sid = sid
        self.open_seq[sid] = self.seq
        heap_push(self.open_heap, e)
        if self.flags[sid] & F_PENDING:
            return
        if was_focal:
            # g improved while a FOCAL member: re-key, membership is kept
            self.focal_push(sid)
            return
        f_min = self.open_min()
        if f_open <= self.w_so * f_min:
            self.focal_push(sid)
        else:
            heap_push(self.admit_heap, e)

    cdef void update_focal(self):
        """Admit every buffered OPEN node now within the admission bound,
        in F_open order."""
        cdef double f_min = self.open_min()
        cdef double bound
        cdef Entry e
        if f_min < 0.0:
            return
        bound = self.w_so * f_min
        while self.admit_heap.size() > 0:
            e = self.admit_heap[0]
            if e.key > bound:
                break
            heap_pop(self.admit_heap)
            if (self.open_seq[e.sid] == e.seq and self.focal_seq[e.sid] == -1
                    and not (self.flags[e.sid] & F_PENDING)):
                self.focal_push(e.sid)

    cdef void admit_after_flush(self, int64_t sid, double bound):
        cdef Entry e
        cdef double f_open = <double>self.g[sid] + self.h_open[sid]
        if f_open <= bound:
            self.focal_push(sid)
        else:
            e.key = f_open
            e.g = self.g[sid]
            e.seq = self.open_seq[sid]
            e.sid = sid
            heap_push(self.admit_heap, e)

    cdef int64_t pop_focal(self):
        cdef Entry e
        cdef int64_t sid
        while self.focal_heap.size() > 0:
            e = self.focal_heap[0]
            heap_pop(self.focal_heap)
            if self.focal_seq[e.sid] == e.seq:
                sid = e.sid
                self.focal_seq[sid] = -1
                self.open_seq[sid] = -1
                return sid
        return -1

    cdef void flush(self, object evaluator, bint forced):
        cdef int64_t fsid
        cdef double fbound, fv
        cdef Py_ssize_t j, count
        cdef int64_t[::1] sids
        cdef const double[::1] values
        if self.waitlist.size() == 0:
            return
        count = <Py_ssize_t>self.waitlist.size()
        # reusable buffer: the evaluator borrows the view only for the call
        if len(self._sids_buffer) < count:
            self._sids_buffer = np.empty(max(count, 1024), dtype=np.int64)
        sids_arr = self._sids_buffer[:count]
        sids = sids_arr
        for j in range(count):
            sids[j] = self.waitlist[<size_t>j]
        self.waitlist.clear()
        values_obj, seconds = evaluator(sids_arr)
        values = np.ascontiguousarray(values_obj, dtype=np.float64)
        self.inference_time += <double>seconds
        self.flushes += 1
        if forced:
            self.forced_flushes += 1
        self.flushed_states += count
        self.flush_sizes.append(int(count))
        self.flush_forced.append(bool(forced))
        if self.algo == C_NBBA:
            # cache only; FOCAL keys are corrected lazily at pop time
            for j in range(count):
                fsid = sids[j]
                self.overlay[fsid] = values[j]
                self.flags[fsid] = self.flags[fsid] & <uint8_t>(0xFF ^ F_WAITLIST)
        else:
            fbound = self.w_so * self.open_min()  # OPEN holds every waitlisted node
            for j in range(count):
                fsid = sids[j]
                fv = values[j]
                self.overlay[fsid] = fv
                self.flags[fsid] = self.flags[fsid] & <uint8_t>(0xFF ^ (F_WAITLIST | F_PENDING))
                self.h_focal[fsid] = fv
                self.admit_after_flush(fsid, fbound)


def run_search(int algo, int64_t width, int64_t height, const uint8_t[::1] sand_bits,
               int64_t start_sid, int64_t goal_x, int64_t goal_y,
               double w_so, double w_h, int64_t batch_size, int64_t max_expansions,
               double k_fast, uint64_t fast_seed, object evaluator=None,
               bint collect_events=False):
    cdef bint batched = algo == C_NBBA or algo == C_BLOCKING
    if batched and evaluator is None:
        raise ValueError("batched algorithms need a batch evaluator")

    cdef _Engine eng = _Engine(algo, width, height, sand_bits, goal_x, goal_y,
                               w_so, w_h, k_fast, fast_seed)

    cdef int64_t expansions = 0, generations = 0, lazy_reinsertions = 0

    cdef vector[int64_t] ev_state, ev_g, ev_wl
    cdef vector[double] ev_fmin

    cdef int64_t sid, cell, x, y, h, nx, ny, nsid, ng, base4, i, n_succ
    cdef int64_t succ_sid[3]
    cdef int64_t succ_cost[3]
    cdef double current, fm
    cdef int status = STATUS_EXHAUSTED
    cdef int64_t goal_sid = -1
    cdef bint refreshed, have_value
    cdef unordered_map[int64_t, double].iterator it

    # start node: never waitlisted, focal value is the base fast value
    eng.create_node(start_sid, 0, -1)
    eng.h_focal[start_sid] = eng.h_open[start_sid]
    eng.add_to_queues(start_sid)

    while True:
        sid = eng.pop_focal()
        if sid == -1:
            if algo == C_BLOCKING and eng.waitlist.size() > 0:
                eng.flush(evaluator, True)
                sid = eng.pop_focal()
            if sid == -1:
                status = STATUS_EXHAUSTED
                break

        cell = sid >> 2
        y = cell / width
        x = cell - y * width
        if x == goal_x and y == goal_y:
            status = STATUS_SOLVED
            goal_sid = sid
            break

        refreshed = False
        if algo == C_NBBA:
            it = eng.overlay.find(sid)
            if it != eng.overlay.end():
                current = deref(it).second
            else:
                current = eng.h_open[sid]  # h_open is the base value
            if current != eng.h_focal[sid]:
                eng.h_focal[sid] = current
                eng.add_to_queues(sid)
                lazy_reinsertions += 1
                refreshed = True

        if not refreshed:
            if expansions == max_expansions:
                status = STATUS_EXPANSION_LIMIT
                break
            expansions += 1
            if collect_events:
                ev_state.push_back(sid)
                ev_g.push_back(eng.g[sid])
                fm = eng.open_min()
                ev_fmin.push_back(NAN if fm < 0.0 else fm)
                ev_wl.push_back(<int64_t>eng.waitlist.size())

            h = sid & 3
            n_succ = 0
            nx = x + _DX[h]
            ny = y + _DY[h]
            if 0 <= nx < width and 0 <= ny < height:
                succ_sid[n_succ] = (ny * width + nx) * 4 + h
                succ_cost[n_succ] = 100 if sand_bit(eng.sand, cell) else 1
                n_succ += 1
            base4 = cell * 4
            succ_sid[n_succ] = base4 + ((h + 1) & 3)
            succ_cost[n_succ] = 1
            n_succ += 1
            succ_sid[n_succ] = base4 + ((h + 3) & 3)
            succ_cost[n_succ] = 1
            n_succ += 1

            for i in range(n_succ):
                nsid = succ_sid[i]
                generations += 1
                ng = eng.g[sid] + succ_cost[i]
                if not (eng.flags[nsid] & F_CREATED):
                    eng.create_node(nsid, ng, sid)
                elif ng < eng.g[nsid]:
                    eng.g[nsid] = ng
                    eng.parent[nsid] = sid
                else:
                    continue
                have_value = False
                if algo == C_FOCAL:
                    eng.h_focal[nsid] = eng.h_open[nsid]
                else:
                    it = eng.overlay.find(nsid)
                    have_value = it != eng.overlay.end()
                    if algo == C_NBBA:
                        eng.h_focal[nsid] = deref(it).second if have_value else eng.h_open[nsid]
                    else:  # blocking: withheld from FOCAL until its value arrives
                        if have_value:
                            eng.flags[nsid] = eng.flags[nsid] & <uint8_t>(0xFF ^ F_PENDING)
                            eng.h_focal[nsid] = deref(it).second
                        else:
                            eng.flags[nsid] = eng.flags[nsid] | F_PENDING
                    if not (eng.flags[nsid] & F_WAITLIST) and not have_value:
                        eng.waitlist.push_back(nsid)
                        eng.flags[nsid] = eng.flags[nsid] | F_WAITLIST
                eng.add_to_queues(nsid)

        eng.update_focal()

        if batched and <int64_t>eng.waitlist.size() >= batch_size:
            eng.flush(evaluator, False)

    # -- outcome --------------------------------------------------------

    cost = None
    path = None
    cdef int64_t p, ca, cb, steps, total
    cdef Py_ssize_t j
    if goal_sid != -1:
        chain = [goal_sid]
        p = eng.parent[goal_sid]
        steps = 0
        while p != -1:
            chain.append(p)
            p = eng.parent[p]
            steps += 1
            if steps > eng.num_states:
                raise RuntimeError("parent chain corrupt: exceeds state count")
        chain.reverse()
        # recompute along the chain: with reopening a predecessor's g may have
        # improved after this link was recorded, so the chain can be cheaper
        # than the popped g
        total = 0
        for j in range(len(chain) - 1):
            ca = <int64_t>chain[j] >> 2
            cb = <int64_t>chain[j + 1] >> 2
            if ca != cb and sand_bit(eng.sand, ca):
                total += 100
            else:
                total += 1
        cost = total
        path = chain

    events = None
    cdef Py_ssize_t ev_n
    cdef int64_t[::1] st_v, gg_v, wl_v
    cdef double[::1] fmn_v
    if collect_events:
        ev_n = <Py_ssize_t>ev_state.size()
        st = np.empty(ev_n, dtype=np.int64)
        gg = np.empty(ev_n, dtype=np.int64)
        fmn = np.empty(ev_n, dtype=np.float64)
        wl = np.empty(ev_n, dtype=np.int64)
        st_v = st
        gg_v = gg
        fmn_v = fmn
        wl_v = wl
        for j in range(ev_n):
            st_v[j] = ev_state[<size_t>j]
            gg_v[j] = ev_g[<size_t>j]
            fmn_v[j] = ev_fmin[<size_t>j]
            wl_v[j] = ev_wl[<size_t>j]
        events = {"state": st, "g": gg, "f_min": fmn, "waitlist_size": wl}

    return {
        "status": status,
        "cost": cost,
        "path": path,
        "expansions": expansions,
        "generations": generations,
        "lazy_reinsertions": lazy_reinsertions,
        "flushes": eng.flushes,
        "forced_flushes": eng.forced_flushes,
        "flushed_states": eng.flushed_states,
        "flush_sizes": eng.flush_sizes,
        "flush_forced": eng.flush_forced,
        "inference_time": eng.inference_time,
        "waitlist_residue": <int64_t>eng.waitlist.size(),
        "overlay_size": <int64_t>eng.overlay.size(),
        "events": events,
    }


def noisy_values(const int64_t[::1] sids, int64_t width, int64_t gx, int64_t gy,
                 double k, uint64_t seed):
    """Noisy Manhattan values for dense state ids; bit-identical to the
    numpy path in batchfocal.heuristics."""
    cdef Py_ssize_t n = sids.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j
    cdef int64_t sid, cell, h, x, y
    cdef uint64_t key, z
    cdef double hm, u
    for j in range(n):
        sid = sids[j]
        cell = sid >> 2
        h = sid & 3
        y = cell / width
        x = cell - y * width
        hm = <double>(iabs(x - gx) + iabs(y - gy))
        key = (<uint64_t>x << 34) | (<uint64_t>y << 4) | <uint64_t>h
        z = mix64(seed + (key + 1) * GOLDEN)
        u = <double>(z >> 11) * INV_2_53
        out[j] = hm * (1.0 - k * u)
    return out_arr


def dijkstra_cost(int64_t width, int64_t height, const uint8_t[::1] sand_bits,
                  int64_t start_sid, int64_t goal_x, int64_t goal_y):
    """Exact least cost from the start state to any heading at the goal cell,
    by uniform-cost search over the full (x, y, heading) space."""
    cdef int64_t num_states = width * height * 4
    dist_arr = np.full(num_states, np.iinfo(np.int64).max, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef vector[Entry] heap
    cdef Entry e
    cdef int64_t sid, cell, x, y, h, nx, ny, nsid, d, ndist, base4, i, cost_c

    dist[start_sid] = 0
    e.key = 0.0
    e.g = 0
    e.seq = start_sid
    e.sid = start_sid
    heap_push(heap, e)

    while heap.size() > 0:
        e = heap[0]
        heap_pop(heap)
        sid = e.sid
        d = <int64_t>e.key
        if d > dist[sid]:
            continue
        cell = sid >> 2
        y = cell / width
        x = cell - y * width
        if x == goal_x and y == goal_y:
            return d
        h = sid & 3
        nx = x + _DX[h]
        ny = y + _DY[h]
        if 0 <= nx < width and 0 <= ny < height:
            cost_c = 100 if sand_bit(sand_bits, cell) else 1
            nsid = (ny * width + nx) * 4 + h
            ndist = d + cost_c
            if ndist < dist[nsid]:
                dist[nsid] = ndist
                e.key = <double>ndist
                e.g = 0
                e.seq = nsid
                e.sid = nsid
                heap_push(heap, e)
        base4 = cell * 4
        for i in range(2):
            nsid = base4 + ((h + 1) & 3) if i == 0 else base4 + ((h + 3) & 3)
            ndist = d + 1
            if ndist < dist[nsid]:
                dist[nsid] = ndist
                e.key = <double>ndist
                e.g = 0
                e.seq = nsid
                e.sid = nsid
                heap_push(heap, e)
    return -1
