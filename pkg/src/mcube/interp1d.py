"""One-dimensional interpolators split into a prepare phase and a values-only phase.

Within one N-dimensional query the knots of a stage and the query abscissa
never change; only the values fed to the stage do.  :func:`prepare` therefore
turns ``(knots, x)`` into a :class:`PreparedStage` holding every factor that
depends on them, and :func:`stage_quantize` runs the remaining recurrence on
the values alone.

Supported kinds:

``linear``
    two knots, ``(1 - t) * v1 + t * v2``.
``polynomial``
    Neville's recurrence with the ``(x - x_j) / (x_i - x_j)`` factors
    precomputed.
``rational``
    diagonal rational (Bulirsch-Stoer) recurrence in the c/d difference form;
    the knot ratios and the correction path through the tableau are
    precomputed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, PoleError, ShapeError
from .quantize import QuantizingFunction

KINDS = ("linear", "polynomial", "rational")

#: Offset added to the d column so that all-zero data cannot produce 0/0.
TINY = 1e-99
#: Denominators smaller than this in magnitude are reported as poles.
POLE_GUARD = 1e-300


@dataclass(frozen=True)
class Interpolator1D:
    kind: str
    order: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown interpolator kind {self.kind!r}; use one of {KINDS}")
        if self.order < 2:
            raise ShapeError(f"interpolator order must be >= 2, got {self.order}")
        if self.kind == "linear" and self.order != 2:
            raise ShapeError(f"linear interpolation uses exactly 2 knots, got order {self.order}")


class PreparedStage:
    """Constants of one interpolation stage, ready to consume value lists.

    Attributes
    ----------
    knots : tuple of float
        The ``M`` strictly increasing abscissae.
    x : float
        Query abscissa.
    precomputed : object
        Kind-specific constants derived from ``knots`` and ``x`` only.
    prepare_count, quantize_count : int
        Instrumentation counters.
    """

    __slots__ = ("kind", "knots", "x", "precomputed", "exact", "prepare_count",
                 "quantize_count", "_core", "_scratch")

    def __init__(self, kind, knots, x, precomputed, exact, core):
        self.kind = kind
        self.knots = knots
        self.x = x
        self.precomputed = precomputed
        # index of the knot equal to x, if any; the stage then returns that value verbatim
        self.exact = exact
        self.prepare_count = 1
        self.quantize_count = 0
        self._core = core
        self._scratch = [0.0] * len(knots)

    @property
    def order(self) -> int:
        return len(self.knots)

    def __call__(self, values: Sequence[float]) -> float:
        self.quantize_count += 1
        if self.exact is not None:
            return values[self.exact]
        return self._core(self, values)

    def __repr__(self):
        return f"PreparedStage({self.kind}, order={self.order}, x={self.x!r})"


def _linear_core(stage, v):
    t = stage.precomputed
    return (1.0 - t) * v[0] + t * v[1]


def _neville_core(stage, v):
    p = stage._scratch
    p[:] = v
    for a, b in stage.precomputed:
        for i in range(len(a)):
            p[i] = a[i] * p[i] + b[i] * p[i + 1]
    return p[0]


def _rational_core(stage, v):
    start, levels = stage.precomputed
    c = list(v)
    d = stage._scratch
    for i, y in enumerate(v):
        d[i] = y + TINY
    y = v[start]
    for m, (ratios, take_c, pick) in enumerate(levels, 1):
        for i, r in enumerate(ratios):
            ci1 = c[i + 1]
            w = ci1 - d[i]
            t = r * d[i]
            dd = t - ci1
            if -POLE_GUARD < dd < POLE_GUARD:
                raise PoleError(
                    f"rational interpolation pole at tableau cell (m={m}, i={i}), "
                    f"x={stage.x!r}")
            dd = w / dd
            d[i] = ci1 * dd
            c[i] = t * dd
        y += c[pick] if take_c else d[pick]
    return y


def _neville_factors(knots, x):
    levels = []
    m_count = len(knots)
    for m in range(1, m_count):
        a, b = [], []
        for i in range(m_count - m):
            den = knots[i] - knots[i + m]
            a.append((x - knots[i + m]) / den)
            b.append((knots[i] - x) / den)
        levels.append((a, b))
    return levels


def _rational_factors(knots, x):
    n = len(knots)
    ns = min(range(n), key=lambda i: abs(x - knots[i]))
    start = ns
    ns -= 1
    levels = []
    for m in range(1, n):
        ratios = [(knots[i] - x) / (knots[i + m] - x) for i in range(n - m)]
        if 2 * (ns + 1) < n - m:
            levels.append((ratios, True, ns + 1))
        else:
            levels.append((ratios, False, ns))
            ns -= 1
    return start, levels


def _validate_knots(knots: Sequence[float], order: int) -> tuple:
    knots = tuple(float(k) for k in knots)
    if len(knots) != order:
        raise ShapeError(f"got {len(knots)} knots for an order-{order} interpolator")
    for i in range(order - 1):
        if not knots[i] < knots[i + 1]:
            raise DomainError(
                f"knots must be strictly increasing; knot {i + 1} ({knots[i]!r}) "
                f">= knot {i + 2} ({knots[i + 1]!r})")
    return knots


def prepare(interp: Interpolator1D, knots: Sequence[float], x: float) -> PreparedStage:
    """Preprocess the constant arguments ``(knots, x)`` of one interpolation stage."""
    knots = _validate_knots(knots, interp.order)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"query abscissa must be finite, got {x!r}")
    exact = knots.index(x) if x in knots else None
    if interp.kind == "linear":
        pre, core = (x - knots[0]) / (knots[1] - knots[0]), _linear_core
        # linear blends reproduce knot values exactly without the shortcut
        exact = None
    elif interp.kind == "polynomial":
        pre = _neville_factors(knots, x) if exact is None else None
        core = _neville_core
    else:
        pre = _rational_factors(knots, x) if exact is None else None
        core = _rational_core
    return PreparedStage(interp.kind, knots, x, pre, exact, core)


def stage_quantize(stage: PreparedStage, values: Sequence[float]) -> float:
    """Interpolated estimate at ``stage.x`` from the ``M`` values at the knots."""
    if len(values) != stage.order:
        raise ShapeError(f"expected {stage.order} values, got {len(values)}")
    return stage(values)


def as_quantizing_function(stage: PreparedStage) -> QuantizingFunction:
    return QuantizingFunction(stage.order, stage)


def interpolate_1d(kind: str, knots: Sequence[float], values: Sequence[float], x: float) -> float:
    """Convenience one-shot: prepare and quantize once."""
    return stage_quantize(prepare(Interpolator1D(kind, len(knots)), knots, x), values)
