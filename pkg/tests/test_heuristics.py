"""Heuristic sources, cache overlay, timing model, and batch evaluator."""

from __future__ import annotations

import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from batchfocal import rng
from batchfocal.domain import GridState
from batchfocal.heuristics import (
    MLP_DIMS,
    BatchEvaluator,
    HeuristicCache,
    HeuristicSource,
    MlpTimingModel,
    manhattan,
)


def test_manhattan_basics():
    assert manhattan(GridState(0, 0, 0), (3, 4)) == 7.0
    assert manhattan(GridState(3, 4, 2), (3, 4)) == 0.0


def test_noiseless_source_equals_manhattan():
    src = HeuristicSource(goal=(9, 2), k=0.0, noise_seed=555)
    for x in range(12):
        for y in range(12):
            for h in range(4):
                s = GridState(x, y, h)
                assert src.value(s) == manhattan(s, (9, 2))
    assert src.kind == "manhattan"


@given(st.floats(0.0, 1.0), st.integers(0, 2**64 - 1),
       st.integers(0, 63), st.integers(0, 63), st.integers(0, 3))
def test_noisy_value_range(k, seed, x, y, h):
    src = HeuristicSource(goal=(31, 31), k=k, noise_seed=seed)
    s = GridState(x, y, h)
    hm = manhattan(s, (31, 31))
    v = src.value(s)
    assert (1.0 - k) * hm <= v <= hm


def test_noisy_value_zero_at_goal():
    src = HeuristicSource(goal=(5, 5), k=0.7, noise_seed=1)
    for h in range(4):
        assert src.value(GridState(5, 5, h)) == 0.0


def test_noisy_value_deterministic_and_stream_keyed():
    a = HeuristicSource(goal=(10, 10), k=0.3, noise_seed=42)
    b = HeuristicSource(goal=(10, 10), k=0.3, noise_seed=42)
    c = HeuristicSource(goal=(10, 10), k=0.3, noise_seed=43)
    s = GridState(2, 7, 1)
    assert a.value(s) == b.value(s)
    assert a.value(s) != c.value(s)


def test_vectorized_values_match_scalar():
    src = HeuristicSource(goal=(17, 3), k=0.41, noise_seed=321)
    xs = np.arange(0, 40, dtype=np.int64)
    ys = (xs * 7) % 25
    hs = xs % 4
    vec = src.values(xs, ys, hs)
    for i in range(len(xs)):
        assert vec[i] == src.value(GridState(int(xs[i]), int(ys[i]), int(hs[i])))


def test_values_for_ids_matches_value():
    src = HeuristicSource(goal=(5, 9), k=0.2, noise_seed=7)
    width = 13
    sids = np.array([(y * width + x) * 4 + h for x, y, h in [(0, 0, 0), (12, 7, 3), (5, 9, 2)]], dtype=np.int64)
    vec = src.values_for_ids(sids, width)
    assert vec[0] == src.value(GridState(0, 0, 0))
    assert vec[1] == src.value(GridState(12, 7, 3))
    assert vec[2] == 0.0


def test_fast_and_nn_streams_differ_almost_everywhere():
    fast = HeuristicSource(goal=(100, 100), k=0.01, noise_seed=1111)
    nn = HeuristicSource(goal=(100, 100), k=0.01, noise_seed=2222)
    rs = np.random.default_rng(0)
    xs = rs.integers(0, 200, 10_000).astype(np.int64)
    ys = rs.integers(0, 200, 10_000).astype(np.int64)
    hs = rs.integers(0, 4, 10_000).astype(np.int64)
    a = fast.values(xs, ys, hs)
    b = nn.values(xs, ys, hs)
    hm = np.abs(xs - 100) + np.abs(ys - 100)
    differ = (a != b) | (hm == 0)  # zero-distance states agree trivially
    assert differ.mean() >= 0.99


def test_source_rejects_bad_k():
    with pytest.raises(ValueError):
        HeuristicSource(goal=(0, 0), k=1.5)


def test_cache_overlay_precedence_and_roundtrip():
    base = HeuristicSource(goal=(6, 6), k=0.1, noise_seed=3)
    cache = HeuristicCache(base, width=8)
    s = GridState(1, 2, 0)
    assert cache.lookup(s) == base.value(s)
    cache.write([(s, 12.25)])
    assert cache.lookup(s) == 12.25
    other = GridState(3, 3, 1)
    assert cache.lookup(other) == base.value(other)
    assert len(cache) == 1
    cache.write([])
    assert len(cache) == 1


def test_cache_write_ids_bit_roundtrip():
    base = HeuristicSource(goal=(6, 6), k=0.1, noise_seed=3)
    cache = HeuristicCache(base, width=8)
    value = 0.1 + 0.2  # not exactly representable sum; must round-trip bit-exact
    cache.write_ids([17], [value])
    assert cache.lookup_id(17) == value


def test_mlp_shapes_weights_and_macs():
    model = MlpTimingModel(99)
    assert [w.shape for w in model._weights] == [(242, 256), (256, 256), (256, 1)]
    for w in model._weights:
        assert float(w.min()) >= -1.0 and float(w.max()) <= 1.0
    out = model.forward(model.random_input(5))
    assert out.shape == (5, 1)
    assert model.macs_per_item() == 242 * 256 + 256 * 256 + 256 * 1
    # linear scaling of multiply-adds in the batch dimension
    assert model.macs(625) == 625 * model.macs_per_item()
    assert model.macs(7) + model.macs(3) == model.macs(10)


def test_mlp_weights_deterministic():
    a, b = MlpTimingModel(4), MlpTimingModel(4)
    for wa, wb in zip(a._weights, b._weights):
        assert np.array_equal(wa, wb)
    c = MlpTimingModel(5)
    assert not np.array_equal(a._weights[0], c._weights[0])


def test_mlp_random_input_shape_and_reuse():
    model = MlpTimingModel(1)
    x1 = model.random_input(3)
    assert x1.shape == (3, MLP_DIMS[0])
    x625 = model.random_input(625)
    assert x625.shape == (625, MLP_DIMS[0])


def _make_evaluator(width=32, goal=(20, 11), k=0.01, seed=77, latency=0.0):
    return BatchEvaluator(
        source=HeuristicSource(goal=goal, k=k, noise_seed=seed),
        model=MlpTimingModel(13),
        width=width,
        latency_offset=latency,
    )


def test_evaluator_values_and_timing():
    ev = _make_evaluator()
    width, goal = 32, (20, 11)
    sids = np.array([(y * width + x) * 4 + h for x, y, h in [(20, 11, 0), (0, 0, 1), (31, 31, 2)]], dtype=np.int64)
    values, seconds = ev(sids)
    assert seconds > 0.0
    assert values[0] == 0.0  # at the goal
    hm = np.array([0.0, 31.0, 31.0])
    assert np.all(values <= hm) and np.all(values >= 0.99 * hm)
    # order-aligned with input and equal to the source's own values
    src = HeuristicSource(goal=goal, k=0.01, noise_seed=77)
    assert np.array_equal(values, src.values_for_ids(sids, width))
    assert ev.calls == 1


def test_evaluator_rejects_empty_batch():
    ev = _make_evaluator()
    with pytest.raises(ValueError):
        ev(np.empty(0, dtype=np.int64))


def test_evaluator_latency_offset_is_timed():
    ev = _make_evaluator(latency=0.02)
    _, seconds = ev(np.array([0], dtype=np.int64))
    assert seconds >= 0.02


def test_batch_amortization():
    # per-item forward time at B=625 must beat 625 separate single calls
    model = MlpTimingModel(3)
    model.forward(model.random_input(625))  # warm up pools and BLAS
    t0 = time.perf_counter()
    for _ in range(625):
        model.forward(model.random_input(1))
    singles = time.perf_counter() - t0
    t0 = time.perf_counter()
    model.forward(model.random_input(625))
    batch = time.perf_counter() - t0
    assert singles / batch > 1.5
