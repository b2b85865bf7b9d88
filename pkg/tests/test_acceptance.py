"""Exit criteria, one test each.  Every test records a PASS/FAIL line that is
printed in the terminal summary, then asserts."""

import io
import math
import time
import tracemalloc
from contextlib import contextmanager
from itertools import product

import numpy as np

from mcube.bench import BenchConfig, run_precision, run_speed
from mcube.grid import (
    EvalStats,
    Grid,
    Mesh,
    build_grid,
    interpolate_iterative,
    interpolate_recursive,
    load_grid,
    save_grid,
)
from mcube.index import cartesian_strides, make_index_spec, projection_extent
from mcube.quantize import (
    Converter,
    max_of,
    mean_of,
    min_of,
    quantize,
    quantize_iterative,
    sum_of,
    weighted_sum,
)
from mcube.store import WindowSpec, from_values, get, subwindow


@contextmanager
def criterion(log, number, title, time_limit):
    """Time the body; the body sets ``state['ok']`` and ``state['detail']``."""
    state = {"ok": False, "detail": ""}
    t0 = time.perf_counter()
    try:
        yield state
    finally:
        elapsed = time.perf_counter() - t0
        in_time = elapsed < time_limit
        ok = state["ok"] and in_time
        log.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {state['detail']} "
                   f"({elapsed:.2f}s, limit {time_limit:g}s)")
        state["ok"] = ok


def random_shape(rng, max_ndim=4, max_size=8, max_count=4096):
    while True:
        sizes = [int(s) for s in rng.integers(1, max_size + 1, size=int(rng.integers(1, max_ndim + 1)))]
        if math.prod(sizes) <= max_count:
            return sizes


def random_fns(rng, sizes):
    makers = (sum_of, mean_of, max_of, min_of, lambda n: weighted_sum(rng.uniform(-1, 1, n)))
    return [makers[int(rng.integers(len(makers)))](n) for n in sizes]


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def test_c1_layout_partition(acceptance_log):
    rng = np.random.default_rng(2024)
    with criterion(acceptance_log, 1, "layout partition", 5) as st:
        bad = 0
        for _ in range(50):
            sizes = random_shape(rng, max_size=10)
            offsets = [int(o) for o in rng.integers(-5, 6, size=len(sizes))]
            spec = make_index_spec(sizes, offsets)
            cs = cartesian_strides(spec)
            for m in range(len(sizes) + 1):
                ranges = [range(o + 1, o + s + 1) for s, o in zip(sizes[:m], offsets[:m])]
                spans = sorted(projection_extent(spec, cs, p) for p in product(*ranges))
                cursor = 0
                for start, length in spans:
                    # sorted intervals tile [0, count) iff each starts where the last ended
                    bad += start != cursor
                    cursor = start + length
                bad += cursor != spec.count
        st["ok"] = bad == 0
        st["detail"] = f"50 shapes, {bad} overlap/gap violations"
    assert st["ok"], acceptance_log[-1]


def test_c2_quantize_equivalence(acceptance_log):
    rng = np.random.default_rng(7)
    with criterion(acceptance_log, 2, "recursive == iterative quantization", 30) as st:
        worst, fails, n = 0.0, 0, 500
        for _ in range(n):
            sizes = random_shape(rng)
            arr = from_values(make_index_spec(sizes), rng.standard_normal(math.prod(sizes)))
            fns = random_fns(rng, sizes)
            a, b = quantize(arr, fns), quantize_iterative(arr, fns)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
            fails += not rel_close(a, b, 1e-12)
        st["ok"] = fails == 0
        st["detail"] = f"{n - fails}/{n} within 1e-12 (worst rel {worst:.1e})"
    assert st["ok"], acceptance_log[-1]


def test_c3_local_global(acceptance_log):
    rng = np.random.default_rng(11)
    with criterion(acceptance_log, 3, "subwindow == materialized sub-array", 10) as st:
        fails, n = 0, 200
        conv = Converter(lambda x: 0.5 * x + 3.0)
        for _ in range(n):
            sizes = random_shape(rng)
            arr = from_values(make_index_spec(sizes), rng.standard_normal(math.prod(sizes)))
            starts = [int(rng.integers(0, s)) for s in sizes]
            lengths = [int(rng.integers(1, s - a + 1)) for s, a in zip(sizes, starts)]
            view = subwindow(arr, WindowSpec(starts, lengths))
            fns = random_fns(rng, lengths)
            fails += not rel_close(quantize(view, fns, conv),
                                   quantize(view.materialize(), fns, conv), 1e-12)
        st["ok"] = fails == 0
        st["detail"] = f"{n - fails}/{n} windows within 1e-12"
    assert st["ok"], acceptance_log[-1]


def _random_grid(rng, ndim, max_size):
    sizes = [int(s) for s in rng.integers(2, max_size + 1, size=ndim)]
    axes = tuple(np.cumsum(rng.uniform(0.3, 1.2, size=s)) for s in sizes)
    return Grid(Mesh(axes), from_values(make_index_spec(sizes),
                                        rng.uniform(1, 3, math.prod(sizes))))


def test_c4_node_reproduction(acceptance_log):
    rng = np.random.default_rng(3)
    with criterion(acceptance_log, 4, "node reproduction, all kinds", 10) as st:
        checked, fails = 0, 0
        for ndim in (1, 2, 3, 4):
            for _ in range(2):
                grid = _random_grid(rng, ndim, 5 if ndim < 4 else 4)
                for kind in ("linear", "polynomial", "rational"):
                    orders = [2 if kind == "linear" else int(rng.integers(2, s + 1))
                              for s in grid.mesh.sizes]
                    for idx in grid.data.spec.indices():
                        q = [ax[a - 1] for ax, a in zip(grid.mesh.axes, idx)]
                        got = interpolate_recursive(grid, q, orders, kind)
                        want = get(grid.data, idx)
                        fails += abs(got - want) > 1e-12 * abs(want)
                        checked += 1
        st["ok"] = fails == 0
        st["detail"] = f"{checked - fails}/{checked} nodes within 1e-12"
    assert st["ok"], acceptance_log[-1]


def test_c5_tensor_polynomial_exactness(acceptance_log):
    rng = np.random.default_rng(5)
    with criterion(acceptance_log, 5, "tensor polynomial exactness", 10) as st:
        fails, total, worst = 0, 0, 0.0
        for ndim in (2, 3):
            sizes = [int(s) for s in rng.integers(5, 9, size=ndim)]
            orders = [int(rng.integers(2, 6)) for _ in range(ndim)]
            axes = tuple(np.cumsum(rng.uniform(0.3, 1.0, size=s)) - 2.0 for s in sizes)
            coeffs = rng.uniform(-1, 1, size=orders)

            def poly(*x):
                return sum(c * math.prod(xi ** p for xi, p in zip(x, powers))
                           for powers, c in np.ndenumerate(coeffs))

            grid = build_grid(Mesh(axes), lambda p: poly(*p))
            scale = max(1.0, float(np.max(np.abs(grid.data.data))))
            for _ in range(50):
                q = [float(rng.uniform(ax[0], ax[-1])) for ax in axes]
                got = interpolate_recursive(grid, q, orders, "polynomial")
                want = poly(*q)
                err = abs(got - want) / max(scale, abs(want))
                worst = max(worst, err)
                fails += err > 1e-9
                total += 1
        st["ok"] = fails == 0
        st["detail"] = f"{total - fails}/{total} points within 1e-9 (worst rel {worst:.1e})"
    assert st["ok"], acceptance_log[-1]


def test_c6_prepare_counts(acceptance_log):
    with criterion(acceptance_log, 6, "prepare-count invariant", 5) as st:
        report = []
        ok = True
        for ndim in (2, 3, 4, 6):
            grid = build_grid(Mesh(tuple(tuple(range(6)) for _ in range(ndim))),
                              lambda *x: sum(x), vectorized=True)
            for orders in ([4] * ndim, [2 + (d % 4) for d in range(ndim)]):
                rec, it = EvalStats(), EvalStats()
                q = [2.4] * ndim
                interpolate_recursive(grid, q, orders, "polynomial", stats=rec)
                interpolate_iterative(grid, q, orders, "polynomial", stats=it)
                want_it = sum(math.prod(orders[:i]) for i in range(ndim))
                ok &= rec.prepares == [1] * ndim and it.total_prepares == want_it
                report.append(f"N={ndim} T={orders}: {rec.total_prepares}/{it.total_prepares}")
        st["ok"] = ok
        st["detail"] = "recursive/iterative prepares " + "; ".join(report[::2])
    assert st["ok"], acceptance_log[-1]


def test_c7_r6_precision(acceptance_log):
    base = BenchConfig(dim=6, size=12, kind="polynomial", order=5, samples=200, seed=42)
    checks = [(base, 1.0, 1e-4), (base, 0.5, 1e-5),
              (BenchConfig(dim=6, size=12, kind="rational", order=4, samples=200, seed=42),
               0.5, 1e-4)]
    tracemalloc.start()
    with criterion(acceptance_log, 7, "R6 precision analogue", 120) as st:
        parts, ok = [], True
        for cfg, h, limit in checks:
            row = run_precision(cfg, [h])[0]
            ok &= row.max_abs_err <= limit
            parts.append(f"{cfg.kind} T={cfg.order} h={h}: {row.max_abs_err:.3e} "
                         f"(limit {limit:g})")
        peak = tracemalloc.get_traced_memory()[1]
        tracemalloc.stop()
        ok &= peak < 512 * 2 ** 20
        st["ok"] = ok
        st["detail"] = "; ".join(parts) + f"; peak {peak / 2**20:.0f} MiB (limit 512)"
    assert st["ok"], acceptance_log[-1]


def test_c8_speed_direction(acceptance_log):
    with criterion(acceptance_log, 8, "recursive >= 2x iterative throughput", 60) as st:
        row = run_speed(BenchConfig(dim=6, size=8, kind="polynomial", order=4, samples=40))
        st["ok"] = row.speedup >= 2.0
        st["detail"] = (f"dim 6, T=4: {row.queries_per_sec:.0f} vs "
                        f"{row.iterative_queries_per_sec:.0f} q/s, speedup {row.speedup:.2f}x")
    assert st["ok"], acceptance_log[-1]


def test_c9_binary_roundtrip(acceptance_log):
    rng = np.random.default_rng(9)
    with criterion(acceptance_log, 9, "binary round-trip bit-exact", 5) as st:
        fails = 0
        for _ in range(20):
            sizes = random_shape(rng, max_size=6)
            sizes = [max(2, s) for s in sizes]
            offsets = [int(o) for o in rng.integers(-1000, 1000, size=len(sizes))]
            axes = tuple(np.cumsum(rng.uniform(0.1, 2, size=s)) - 3 for s in sizes)
            data = from_values(make_index_spec(sizes, offsets),
                               rng.standard_normal(math.prod(sizes)) * 10.0 ** rng.integers(-30, 30))
            grid = Grid(Mesh(axes), data)
            buf = io.BytesIO()
            save_grid(grid, buf)
            buf.seek(0)
            back = load_grid(buf)
            fails += not (back.data.spec == grid.data.spec
                          and back.data.data.tobytes() == grid.data.data.tobytes()
                          and back.mesh == grid.mesh)
        st["ok"] = fails == 0
        st["detail"] = f"{20 - fails}/20 grids identical (negative offsets included)"
    assert st["ok"], acceptance_log[-1]
