"""N-dimensional interpolation on rectilinear grids.

The recursive path prepares one stage per dimension, builds a strided
sub-window over the grid data and hands both to :func:`mcube.quantize.quantize`.
The iterative path is the unoptimized baseline: it reduces the windowed
data one dimension at a time (innermost first), materializing every
intermediate database and re-preparing a stage for every row it reduces.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, FormatError, NonFiniteError, ShapeError
from .index import make_index_spec
from .interp1d import Interpolator1D, as_quantizing_function, prepare
from .quantize import quantize
from .store import (
    MultiArray,
    WindowSpec,
    from_function,
    from_values,
    read_record,
    subwindow,
    write_record,
)


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing knot axes, one per dimension."""

    axes: tuple

    def __post_init__(self):
        if not self.axes:
            raise ShapeError("a mesh needs at least one axis")
        axes = tuple(tuple(float(v) for v in ax) for ax in self.axes)
        for d, ax in enumerate(axes):
            if len(ax) < 2:
                raise ShapeError(f"axis {d + 1} has {len(ax)} knots; at least 2 are required")
            if not all(math.isfinite(v) for v in ax):
                raise DomainError(f"axis {d + 1} contains non-finite knots")
            if all(a > b for a, b in zip(ax, ax[1:])):
                raise DomainError(
                    f"axis {d + 1} is decreasing; reverse the axis and the matching "
                    "data dimension to make it increasing")
            if not all(a < b for a, b in zip(ax, ax[1:])):
                raise DomainError(f"axis {d + 1} is not strictly increasing")
        object.__setattr__(self, "axes", axes)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def sizes(self) -> tuple:
        return tuple(len(ax) for ax in self.axes)

    @classmethod
    def uniform(cls, lower: Sequence[float], spacing: float, sizes: Sequence[int]) -> "Mesh":
        return cls(tuple(tuple(lo + spacing * k for k in range(s))
                         for lo, s in zip(lower, sizes)))


@dataclass(frozen=True)
class Grid:
    mesh: Mesh
    data: MultiArray

    def __post_init__(self):
        if self.mesh.sizes != self.data.spec.sizes:
            raise ShapeError(
                f"mesh sizes {self.mesh.sizes} do not match data sizes {self.data.spec.sizes}")

    @property
    def ndim(self) -> int:
        return self.mesh.ndim


@dataclass
class EvalStats:
    """Per-dimension prepare/quantize counts recorded during one interpolation call."""

    prepares: list = field(default_factory=list)
    quantizes: list = field(default_factory=list)

    def reset(self, ndim: int) -> None:
        self.prepares = [0] * ndim
        self.quantizes = [0] * ndim

    @property
    def total_prepares(self) -> int:
        return sum(self.prepares)


def evaluation_counters(stats: EvalStats) -> list[tuple[int, int]]:
    """``(prepare_count, quantize_count)`` for each dimension, outermost first."""
    return list(zip(stats.prepares, stats.quantizes))


def build_grid(mesh: Mesh, f: Callable, *, vectorized: bool = False,
               offsets: Sequence[int] | None = None) -> Grid:
    """Sample ``f`` at every mesh node.

    With ``vectorized=True`` ``f`` is called once with open numpy coordinate
    arrays (as from ``np.ix_``) and must broadcast to the full grid shape.
    """
    spec = make_index_spec(mesh.sizes, offsets)
    axes = mesh.axes
    if vectorized:
        coords = np.ix_(*(np.asarray(ax) for ax in axes))
        values = np.broadcast_to(np.asarray(f(*coords), dtype=np.float64), mesh.sizes)
        bad = np.flatnonzero(~np.isfinite(values.reshape(-1)))
        if bad.size:
            pos = np.unravel_index(int(bad[0]), mesh.sizes)
            knot = tuple(ax[p] for ax, p in zip(axes, pos))
            raise NonFiniteError(f"function is not finite at knot {knot}")
        data = from_values(spec, values)
    else:
        shift = spec.offsets

        def at_index(idx):
            knot = tuple(ax[a - s - 1] for ax, a, s in zip(axes, idx, shift))
            v = float(f(knot))
            if not math.isfinite(v):
                raise NonFiniteError(f"function returned {v!r} at knot {knot}")
            return v

        data = from_function(spec, at_index)
    return Grid(mesh, data)


def locate_window(axis: Sequence[float], x: float, T: int) -> int:
    """Zero-based start of the ``T``-knot window used around ``x``.

    The bracketing knot ``k`` is the last one with ``axis[k] <= x`` (0 below
    the axis, capped at ``S - 2``); the window is centred on it and clamped
    into the axis.
    """
    n = len(axis)
    if not 2 <= T <= n:
        raise ShapeError(f"window length {T} outside 2..{n}")
    if not math.isfinite(x):
        raise DomainError(f"query coordinate must be finite, got {x!r}")
    k = min(max(bisect_right(axis, x) - 1, 0), n - 2)
    return min(max(k - (T - 1) // 2, 0), n - T)


def _resolve(grid: Grid, q: Sequence[float], orders: Sequence[int], kinds,
             extrapolate: bool) -> tuple[list[Interpolator1D], list[int]]:
    n = grid.ndim
    if len(q) != n or len(orders) != n:
        raise ShapeError(f"query/orders must have {n} entries, got {len(q)}/{len(orders)}")
    if isinstance(kinds, (str, Interpolator1D)):
        kinds = [kinds] * n
    if len(kinds) != n:
        raise ShapeError(f"{len(kinds)} interpolator kinds for {n} dimensions")
    interps, starts = [], []
    for d, (ax, x, t, kind) in enumerate(zip(grid.mesh.axes, q, orders, kinds)):
        if not 2 <= t <= len(ax):
            raise ShapeError(f"dimension {d + 1}: order {t} outside 2..{len(ax)}")
        if isinstance(kind, Interpolator1D):
            if kind.order != t:
                raise ShapeError(
                    f"dimension {d + 1}: interpolator order {kind.order} != local order {t}")
            interp = kind
        else:
            interp = Interpolator1D(kind, t)
        if not math.isfinite(x):
            raise DomainError(f"query coordinate {d + 1} is not finite: {x!r}")
        if not extrapolate and not ax[0] <= x <= ax[-1]:
            raise DomainError(
                f"query coordinate {d + 1} = {x!r} outside the mesh hull "
                f"[{ax[0]!r}, {ax[-1]!r}]; pass extrapolate=True to allow it")
        interps.append(interp)
        starts.append(locate_window(ax, x, t))
    return interps, starts


def interpolate_recursive(grid: Grid, q: Sequence[float], orders: Sequence[int], kinds,
                          *, extrapolate: bool = False, stats: EvalStats | None = None) -> float:
    """Interpolate at ``q`` with one prepared stage per dimension.

    ``kinds`` is one kind name / :class:`Interpolator1D` or a sequence of
    them, one per dimension.  When every order equals the axis length the
    window is the whole grid.
    """
    interps, starts = _resolve(grid, q, orders, kinds, extrapolate)
    stages = [prepare(it, grid.mesh.axes[d][a:a + it.order], q[d])
              for d, (it, a) in enumerate(zip(interps, starts))]
    view = subwindow(grid.data, WindowSpec(starts, [it.order for it in interps]))
    result = quantize(view, [as_quantizing_function(s) for s in stages])
    if stats is not None:
        stats.prepares = [s.prepare_count for s in stages]
        stats.quantizes = [s.quantize_count for s in stages]
    return result


def interpolate_iterative(grid: Grid, q: Sequence[float], orders: Sequence[int], kinds,
                          *, extrapolate: bool = False, stats: EvalStats | None = None) -> float:
    """Stage-by-stage baseline: reduce dimension N first, then N-1, ..., 1.

    Every row reduction prepares its stage from scratch and every stage
    database is a new :class:`MultiArray`.
    """
    interps, starts = _resolve(grid, q, orders, kinds, extrapolate)
    n = grid.ndim
    prepares, quantizes = [0] * n, [0] * n
    lengths = [it.order for it in interps]
    db = subwindow(grid.data, WindowSpec(starts, lengths)).materialize()
    for d in range(n - 1, -1, -1):
        knots = grid.mesh.axes[d][starts[d]:starts[d] + lengths[d]]
        t = lengths[d]
        flat = db.flat
        out = []
        for base in range(0, len(db), t):
            stage = prepare(interps[d], knots, q[d])
            out.append(stage(flat[base:base + t].tolist()))
            prepares[d] += stage.prepare_count
            quantizes[d] += stage.quantize_count
        if d == 0:
            result = out[0]
        else:
            db = MultiArray(make_index_spec(lengths[:d]), out)
    if stats is not None:
        stats.prepares, stats.quantizes = prepares, quantizes
    return result


# -- grid files: data record followed by one 1-D record per axis ---------------

def save_grid(grid: Grid, sink) -> None:
    fh = open(sink, "wb") if isinstance(sink, (str, os.PathLike)) else sink
    try:
        write_record(grid.data, fh)
        for ax in grid.mesh.axes:
            write_record(MultiArray(make_index_spec([len(ax)]), ax), fh)
    finally:
        if fh is not sink:
            fh.close()


def load_grid(source) -> Grid:
    fh = open(source, "rb") if isinstance(source, (str, os.PathLike)) else source
    try:
        data = read_record(fh)
        axes = []
        for d in range(data.spec.ndim):
            ax = read_record(fh)
            if ax.spec.ndim != 1 or ax.spec.sizes[0] != data.spec.sizes[d]:
                raise FormatError(
                    f"axis record {d + 1} has sizes {ax.spec.sizes}, "
                    f"expected ({data.spec.sizes[d]},)")
            axes.append(ax.data.tolist())
        if fh.read(1):
            raise FormatError("trailing bytes after the last axis record")
    finally:
        if fh is not source:
            fh.close()
    return Grid(Mesh(tuple(axes)), data)
