"""Precision and speed benchmarks against closed-form functions.

A benchmark builds a uniform grid from a function, draws seeded query
points inside a region that never needs a clamped window, and compares the
direct function value with the interpolated one.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, MemoryGuardError, ShapeError
from .grid import (
    EvalStats,
    Grid,
    Mesh,
    build_grid,
    interpolate_iterative,
    interpolate_recursive,
)
from .index import make_index_spec
from .interp1d import KINDS
from .quantize import (
    max_of,
    mean_of,
    min_of,
    quantize_equivalence_check,
    sum_of,
    weighted_sum,
)
from .store import from_values

#: Grids with more elements than this are refused before allocation.
MAX_GRID_ELEMENTS = 2 ** 27
# float64 grid plus roughly four same-sized temporaries while filling it
_BYTES_PER_ELEMENT = 8 * 5


def check_memory(sizes: Sequence[int]) -> None:
    """Refuse grids above :data:`MAX_GRID_ELEMENTS` before anything is allocated."""
    count = math.prod(sizes)
    if count > MAX_GRID_ELEMENTS:
        raise MemoryGuardError(
            f"grid of {count} elements (~{count * _BYTES_PER_ELEMENT / 2**20:.0f} MiB "
            f"while building) exceeds the limit of {MAX_GRID_ELEMENTS} elements")


@dataclass(frozen=True)
class BenchmarkFunction:
    """Closed-form test function.

    ``eval`` takes one scalar per variable and must also broadcast over
    numpy arrays; it is checked for finiteness on a dense sample of
    ``valid_domain`` when constructed.
    """

    name: str
    arity: int
    eval: Callable
    valid_domain: tuple

    def __post_init__(self):
        if len(self.valid_domain) != self.arity:
            raise ShapeError(f"{self.name}: valid_domain must have {self.arity} intervals")
        per_axis = max(2, int(4096 ** (1.0 / self.arity)))
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in self.valid_domain]
        sample = np.broadcast_to(self.eval(*np.ix_(*axes)), (per_axis,) * self.arity)
        if not np.all(np.isfinite(sample)):
            raise DomainError(f"{self.name} is not finite everywhere on its valid domain")

    def __call__(self, *v):
        return self.eval(*v)


def _r6_terms(v0, v1, v2, v3, v4, v5):
    # ten formula symbols on six variables: h6..h9 wrap to v0..v3
    with np.errstate(all="ignore"):
        return (np.log(np.sqrt(v0 * np.sqrt(np.log(v1))) * v2) + v1 * v3
                - np.exp(np.sin(v2) * np.sin(3 * v3))
                + np.sqrt(np.log(v3 * v4) * np.sqrt(v5))
                + v0 * np.sinh(v1 + 12))


def r6(v: Sequence[float]) -> float:
    """Six-variable benchmark function with ``h6..h9`` bound to ``v0..v3``."""
    if len(v) != 6:
        raise ShapeError(f"r6 takes 6 arguments, got {len(v)}")
    v0, v1, v2, v3, v4, v5 = (float(x) for x in v)
    if not all(math.isfinite(x) for x in (v0, v1, v2, v3, v4, v5)):
        raise DomainError(f"r6 arguments must be finite: {tuple(v)}")
    if not (v0 > 0 and v1 > 1 and v2 > 0 and v3 * v4 >= 1 and v5 >= 0):
        raise DomainError(
            f"r6 undefined at {tuple(v)}: needs v0>0, v1>1, v2>0, v3*v4>=1, v5>=0")
    return float(_r6_terms(v0, v1, v2, v3, v4, v5))


def _plane(*v):
    return sum(v)


def _quadratic_product(*v):
    out = 1.0
    for x in v:
        out = out * (1.0 + 0.5 * x - 0.25 * x * x)
    return out


def get_function(name: str, dim: int) -> BenchmarkFunction:
    """Registered benchmark function ``name`` for ``dim`` variables."""
    if name == "r6":
        if dim != 6:
            raise DomainError("r6 is six-dimensional; use --dim 6")
        return BenchmarkFunction("r6", 6, _r6_terms, ((2.0, 6.0),) * 6)
    if name == "plane":
        return BenchmarkFunction("plane", dim, _plane, ((-1.0, 1.0),) * dim)
    if name == "quadprod":
        return BenchmarkFunction("quadprod", dim, _quadratic_product, ((-1.0, 1.0),) * dim)
    raise DomainError(f"unknown benchmark function {name!r}; known: r6, plane, quadprod")


@dataclass(frozen=True)
class BenchConfig:
    dim: int = 6
    size: int = 12
    spacing: float = 0.5
    kind: str = "polynomial"
    order: int = 5
    samples: int = 200
    seed: int = 42
    extrapolate: bool = False
    function: str = "r6"
    anchor: float | None = None

    def validate(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dim must be >= 1, got {self.dim}")
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "linear" and self.order != 2:
            raise DomainError("linear interpolation requires --order 2")
        if not 2 <= self.order <= self.size:
            raise DomainError(f"order {self.order} outside 2..size ({self.size})")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise DomainError(f"spacing must be positive, got {self.spacing}")
        if self.samples < 1:
            raise DomainError("samples must be >= 1")
        if self.size - 1 - 2 * self.margin <= 0:
            raise DomainError(
                f"size {self.size} leaves no interior region with a margin of "
                f"{self.margin} knots per side")
        check_memory([self.size] * self.dim)

    @property
    def margin(self) -> int:
        return math.ceil(self.order / 2)

    def lower_corner(self, fn: BenchmarkFunction) -> list[float]:
        half = self.spacing * (self.size - 1) / 2
        if self.anchor is not None:
            return [self.anchor - half] * self.dim
        return [max(0.5 * (lo + hi), lo + half) - half for lo, hi in fn.valid_domain]

    def mesh(self, fn: BenchmarkFunction) -> Mesh:
        return Mesh.uniform(self.lower_corner(fn), self.spacing, [self.size] * self.dim)

    def sample_box(self, fn: BenchmarkFunction) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array(self.lower_corner(fn))
        return lo + self.margin * self.spacing, lo + (self.size - 1 - self.margin) * self.spacing


@dataclass
class BenchRow:
    spacing: float
    order: int
    kind: str
    max_abs_err: float
    mean_abs_err: float
    queries_per_sec: float
    prepare_count_per_query: float
    iterative_queries_per_sec: float | None = None
    iterative_prepare_count_per_query: float | None = None

    @property
    def speedup(self) -> float | None:
        if not self.iterative_queries_per_sec:
            return None
        return self.queries_per_sec / self.iterative_queries_per_sec


@dataclass
class _Workload:
    config: BenchConfig
    fn: BenchmarkFunction
    grid: Grid
    points: np.ndarray
    exact: np.ndarray = field(repr=False)


def _workload(config: BenchConfig) -> _Workload:
    config.validate()
    fn = get_function(config.function, config.dim)
    grid = build_grid(config.mesh(fn), fn.eval, vectorized=True)
    lo, hi = config.sample_box(fn)
    rng = np.random.default_rng(config.seed)
    points = rng.uniform(lo, hi, size=(config.samples, config.dim))
    exact = np.asarray(fn.eval(*points.T), dtype=np.float64)
    return _Workload(config, fn, grid, points, exact)


def _run(work: _Workload, path) -> tuple[np.ndarray, float, float]:
    cfg = work.config
    orders = [cfg.order] * cfg.dim
    stats = EvalStats()
    out = np.empty(len(work.points))
    prepares = 0
    t0 = time.perf_counter()
    for k, q in enumerate(work.points.tolist()):
        out[k] = path(work.grid, q, orders, cfg.kind, extrapolate=cfg.extrapolate, stats=stats)
        prepares += stats.total_prepares
    elapsed = time.perf_counter() - t0
    n = len(work.points)
    return out, n / elapsed if elapsed > 0 else math.inf, prepares / n


def _row(cfg: BenchConfig, err: np.ndarray, qps: float, prepares: float) -> BenchRow:
    return BenchRow(cfg.spacing, cfg.order, cfg.kind, float(err.max()), float(err.mean()),
                    qps, prepares)


def run_precision(config: BenchConfig, spacings: Sequence[float] | None = None) -> list[BenchRow]:
    """One row per spacing (default: ``config.spacing``) of max/mean absolute error."""
    rows = []
    for h in spacings or [config.spacing]:
        cfg = config if h == config.spacing else replace(config, spacing=h)
        work = _workload(cfg)
        got, qps, prepares = _run(work, interpolate_recursive)
        rows.append(_row(cfg, np.abs(got - work.exact), qps, prepares))
    return rows


def run_speed(config: BenchConfig, compare_iterative: bool = True) -> BenchRow:
    """Throughput of the recursive path, optionally against the iterative baseline."""
    work = _workload(config)
    got, qps, prepares = _run(work, interpolate_recursive)
    row = _row(config, np.abs(got - work.exact), qps, prepares)
    if compare_iterative:
        _, it_qps, it_prepares = _run(work, interpolate_iterative)
        row.iterative_queries_per_sec = it_qps
        row.iterative_prepare_count_per_query = it_prepares
    return row


# -- output ------------------------------------------------------------------

COLUMNS = ("spacing", "order", "kind", "max_abs_err", "mean_abs_err", "qps",
           "prepares_per_query")


def _cells(row: BenchRow) -> list[str]:
    return [
        format(row.spacing, "g"),
        str(row.order),
        row.kind,
        format(row.max_abs_err, ".6e"),
        format(row.mean_abs_err, ".6e"),
        format(row.queries_per_sec, ".1f"),
        format(row.prepare_count_per_query, "g"),
    ]


def emit(rows: Sequence[BenchRow], fmt: str = "tsv") -> str:
    """Render rows as tab-separated values or an aligned table, header first."""
    table = [list(COLUMNS)] + [_cells(r) for r in rows]
    if fmt == "tsv":
        return "\n".join("\t".join(line) for line in table) + "\n"
    if fmt == "pretty":
        widths = [max(len(line[i]) for line in table) for i in range(len(COLUMNS))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(line, widths))
                         for line in table) + "\n"
    raise DomainError(f"unknown output format {fmt!r}; use tsv or pretty")


# -- audits ------------------------------------------------------------------

def _random_grid(rng: np.random.Generator, ndim: int, max_size: int = 6) -> Grid:
    sizes = rng.integers(2, max_size + 1, size=ndim)
    axes = tuple(np.cumsum(rng.uniform(0.2, 1.5, size=s)) - 1.0 for s in sizes)
    mesh = Mesh(axes)
    values = rng.standard_normal(math.prod(sizes.tolist()))
    return Grid(mesh, from_values(make_index_spec(sizes.tolist()), values))


def run_verify(seed: int = 0, instances: int = 60) -> list[tuple[str, bool, str]]:
    """Equivalence and counter audits; each entry is ``(name, passed, detail)``."""
    rng = np.random.default_rng(seed)
    results = []

    failures = 0
    makers = (sum_of, mean_of, max_of, min_of,
              lambda n: weighted_sum(rng.uniform(-1, 1, size=n)))
    for _ in range(instances):
        ndim = int(rng.integers(1, 5))
        sizes = rng.integers(1, 7, size=ndim).tolist()
        arr = from_values(make_index_spec(sizes), rng.standard_normal(math.prod(sizes)))
        fns = [makers[int(rng.integers(len(makers)))](n) for n in sizes]
        failures += not quantize_equivalence_check(arr, fns, rel_tol=1e-12)
    results.append(("quantize recursive == iterative", failures == 0,
                    f"{instances - failures}/{instances} agree within 1e-12"))

    failures = 0
    for _ in range(instances):
        grid = _random_grid(rng, int(rng.integers(1, 5)))
        orders = [int(rng.integers(2, s + 1)) for s in grid.mesh.sizes]
        kinds = [KINDS[int(rng.integers(3))] if t == 2 else KINDS[int(rng.integers(1, 3))]
                 for t in orders]
        q = [float(rng.uniform(ax[0], ax[-1])) for ax in grid.mesh.axes]
        a = interpolate_recursive(grid, q, orders, kinds)
        b = interpolate_iterative(grid, q, orders, kinds)
        failures += not abs(a - b) <= 1e-10 * max(1.0, abs(b))
    results.append(("interpolate recursive == iterative", failures == 0,
                    f"{instances - failures}/{instances} agree within 1e-10"))

    for ndim in (2, 3, 4, 6):
        mesh = Mesh(tuple(tuple(range(5)) for _ in range(ndim)))
        grid = build_grid(mesh, _plane, vectorized=True)
        orders = [4] * ndim
        q = [1.7] * ndim
        rec, it = EvalStats(), EvalStats()
        interpolate_recursive(grid, q, orders, "polynomial", stats=rec)
        interpolate_iterative(grid, q, orders, "polynomial", stats=it)
        expected_it = sum(math.prod(orders[:i]) for i in range(ndim))
        ok = rec.total_prepares == ndim and it.total_prepares == expected_it
        results.append((f"prepare counts N={ndim}", ok,
                        f"recursive {rec.total_prepares} (want {ndim}), "
                        f"iterative {it.total_prepares} (want {expected_it})"))
    return results
