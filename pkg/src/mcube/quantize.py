"""Quantizing a multi-array as a recursion over per-dimension functions.

A quantizing function of order ``M`` maps an ordered list of ``M`` scalars
to one scalar.  Given functions ``f_1 .. f_N`` whose orders match the view
lengths, :func:`quantize` computes

    f_1( q(sub_1), ..., q(sub_S1) )

where ``sub_k`` is the ``k``-th depth-1 sub-view and ``q`` recurses with
``f_2 .. f_N``; the innermost level applies ``f_N`` to converter-mapped raw
values.  The walk advances through storage by the view strides, so a
sub-window is quantized in place without copying.

:func:`quantize_iterative` computes the same value by materializing each
intermediate database explicitly, innermost dimension first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import NonFiniteError, ShapeError
from .store import ArrayView, MultiArray, full_view

MAX_DEPTH = 32


@dataclass(frozen=True)
class QuantizingFunction:
    """Pure map from exactly ``order`` ordered scalars to one scalar."""

    order: int
    fn: Callable[[Sequence[float]], float]

    def __post_init__(self):
        if self.order < 1:
            raise ShapeError(f"quantizing function order must be >= 1, got {self.order}")

    def evaluate(self, values: Sequence[float]) -> float:
        if len(values) != self.order:
            raise ShapeError(f"expected {self.order} values, got {len(values)}")
        return self.fn(values)


@dataclass(frozen=True)
class Converter:
    """Injective scalar map applied to raw stored values before quantizing."""

    apply: Callable[[float], float] | None = None

    @property
    def is_identity(self) -> bool:
        return self.apply is None

    def __call__(self, x: float) -> float:
        return x if self.apply is None else self.apply(x)


IDENTITY = Converter()


# -- stock quantizing functions ----------------------------------------------

def sum_of(order: int) -> QuantizingFunction:
    return QuantizingFunction(order, math.fsum)


def mean_of(order: int) -> QuantizingFunction:
    return QuantizingFunction(order, lambda v: math.fsum(v) / len(v))


def max_of(order: int) -> QuantizingFunction:
    return QuantizingFunction(order, max)


def min_of(order: int) -> QuantizingFunction:
    return QuantizingFunction(order, min)


def weighted_sum(weights: Sequence[float]) -> QuantizingFunction:
    w = tuple(float(x) for x in weights)
    return QuantizingFunction(len(w), lambda v: math.fsum(a * b for a, b in zip(w, v)))


# -- engines -----------------------------------------------------------------

def _as_view(target) -> ArrayView:
    return full_view(target) if isinstance(target, MultiArray) else target


def _check(view: ArrayView, fns: Sequence[QuantizingFunction]) -> None:
    if view.ndim > MAX_DEPTH:
        raise ShapeError(f"{view.ndim} dimensions exceed the recursion cap of {MAX_DEPTH}")
    if len(fns) != view.ndim:
        raise ShapeError(f"{len(fns)} quantizing functions for a {view.ndim}-dimensional view")
    for d, (f, (n, _)) in enumerate(zip(fns, view.dims)):
        if f.order != n:
            raise ShapeError(
                f"dimension {d + 1}: function order {f.order} != view length {n}")


def _finite(r: float, depth: int) -> float:
    if not math.isfinite(r):
        raise NonFiniteError(f"non-finite intermediate {r!r} in dimension {depth + 1}")
    return r


def quantize(view, fns: Sequence[QuantizingFunction], conv: Converter = IDENTITY) -> float:
    """Recursively quantize ``view`` (an ArrayView or MultiArray) with ``fns``.

    One scratch buffer per depth is reused across siblings.
    """
    view = _as_view(view)
    _check(view, fns)
    flat = view.array.flat
    dims = view.dims
    last = len(dims) - 1
    scratch = [[0.0] * n for n, _ in dims]
    evals = [f.evaluate for f in fns]
    mapped = conv.apply

    def descend(depth: int, base: int) -> float:
        n, stride = dims[depth]
        buf = scratch[depth]
        if depth == last:
            buf[:] = flat[base:base + (n - 1) * stride + 1:stride]
            if mapped is not None:
                for t in range(n):
                    buf[t] = _finite(mapped(buf[t]), depth)
        else:
            for t in range(n):
                buf[t] = descend(depth + 1, base + t * stride)
        r = evals[depth](buf)
        if r - r != 0.0:
            _finite(r, depth)
        return r

    return descend(0, view.base)


def quantize_iterative(view, fns: Sequence[QuantizingFunction],
                       conv: Converter = IDENTITY) -> float:
    """Stage-by-stage quantization: ``f_N`` over every innermost row, then ``f_{N-1}``, ...

    Each intermediate database is a fresh flat list in lexicographic order.
    """
    view = _as_view(view)
    _check(view, fns)
    stage = [conv(v) for v in view.values()]
    for v in stage:
        _finite(v, view.ndim - 1)
    for depth in range(view.ndim - 1, -1, -1):
        n = view.dims[depth][0]
        f = fns[depth]
        stage = [_finite(f.evaluate(stage[i:i + n]), depth) for i in range(0, len(stage), n)]
    return stage[0]


def quantize_equivalence_check(target, fns: Sequence[QuantizingFunction],
                               conv: Converter = IDENTITY, rel_tol: float = 1e-12) -> bool:
    """True when the recursive and iterative paths agree within ``rel_tol``.

    Precondition violations raise instead of returning False.
    """
    rec = quantize(target, fns, conv)
    it = quantize_iterative(target, fns, conv)
    return abs(rec - it) <= rel_tol * max(1.0, abs(it))
