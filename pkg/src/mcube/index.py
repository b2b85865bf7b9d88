"""Indexing sets and Cartesian stride arithmetic.

An indexing set is described by per-dimension sizes ``S_i`` and integer
shifts ``s_i``; dimension ``i`` accepts coordinates ``s_i + 1 .. s_i + S_i``.
Elements are stored in lexicographic order, so coordinate ``a_i`` lands at
zero-based axis position ``a_i - s_i - 1`` and the flat offset of a full
multi-index is ``sum((a_i - s_i - 1) * CS_i)`` with

    CS_N = 1,   CS_i = S_{i+1} * CS_{i+1}.

Fixing the first ``M`` coordinates selects a Cartesian projection; in
lexicographic storage it always occupies one contiguous interval, which is
what :func:`projection_extent` reports.  The containment hierarchy of all
projections is never built explicitly: prefix/extent arithmetic stands in
for it.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence, Tuple

from .errors import CoordinateError, ShapeError

MultiIndex = Tuple[int, ...]

#: Largest element count an IndexSpec may describe.
MAX_ELEMENTS = sys.maxsize


@dataclass(frozen=True)
class IndexSpec:
    """Per-dimension sizes ``S_i`` and index shifts ``s_i``."""

    sizes: Tuple[int, ...]
    offsets: Tuple[int, ...]
    count: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        offsets = tuple(int(o) for o in self.offsets)
        if not sizes:
            raise ShapeError("an IndexSpec needs at least one dimension")
        if len(sizes) != len(offsets):
            raise ShapeError(
                f"sizes and offsets differ in length ({len(sizes)} != {len(offsets)})")
        for i, s in enumerate(sizes):
            if s < 1:
                raise ShapeError(f"size of dimension {i + 1} is {s}; sizes must be >= 1")
        count = math.prod(sizes)
        if count > MAX_ELEMENTS:
            raise ShapeError(f"element count {count} exceeds addressable range {MAX_ELEMENTS}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "count", count)

    @property
    def ndim(self) -> int:
        return len(self.sizes)

    def coordinate_range(self, dim: int) -> range:
        """Valid coordinates of zero-based dimension ``dim``."""
        return range(self.offsets[dim] + 1, self.offsets[dim] + self.sizes[dim] + 1)

    def indices(self) -> Iterator[MultiIndex]:
        """All valid multi-indices in lexicographic order."""
        return product(*(self.coordinate_range(d) for d in range(self.ndim)))

    def is_valid(self, idx: Sequence[int]) -> bool:
        if len(idx) != self.ndim:
            return False
        return all(o < a <= o + s for a, s, o in zip(idx, self.sizes, self.offsets))


@dataclass(frozen=True)
class CartesianStrides:
    strides: Tuple[int, ...]

    def __iter__(self):
        return iter(self.strides)

    def __len__(self):
        return len(self.strides)

    def __getitem__(self, i):
        return self.strides[i]


def make_index_spec(sizes: Sequence[int], offsets: Sequence[int] | None = None) -> IndexSpec:
    """Validated :class:`IndexSpec`; ``offsets`` default to all zeros."""
    if offsets is None:
        offsets = (0,) * len(sizes)
    return IndexSpec(tuple(sizes), tuple(offsets))


def cartesian_strides(spec: IndexSpec) -> CartesianStrides:
    strides = [1] * spec.ndim
    for i in range(spec.ndim - 2, -1, -1):
        strides[i] = spec.sizes[i + 1] * strides[i + 1]
    return CartesianStrides(tuple(strides))


def _axis_position(spec: IndexSpec, dim: int, a: int) -> int:
    pos = a - spec.offsets[dim] - 1
    if not 0 <= pos < spec.sizes[dim]:
        lo = spec.offsets[dim] + 1
        raise CoordinateError(
            f"coordinate {a} of dimension {dim + 1} outside {lo}..{lo + spec.sizes[dim] - 1}")
    return pos


def linear_offset(spec: IndexSpec, strides: CartesianStrides, idx: Sequence[int]) -> int:
    """Rank of ``idx`` in the lexicographic order of ``spec``'s indexing set."""
    if len(idx) != spec.ndim:
        raise ShapeError(f"multi-index has {len(idx)} coordinates, expected {spec.ndim}")
    return sum(_axis_position(spec, d, a) * cs for d, (a, cs) in enumerate(zip(idx, strides)))


def projection_extent(spec: IndexSpec, strides: CartesianStrides,
                      prefix: Sequence[int]) -> tuple[int, int]:
    """Flat ``(start, length)`` interval holding the projection fixed by ``prefix``.

    An empty prefix gives the whole array.
    """
    m = len(prefix)
    if m > spec.ndim:
        raise ShapeError(f"prefix of length {m} is longer than the {spec.ndim} dimensions")
    start = sum(_axis_position(spec, d, a) * strides[d] for d, a in enumerate(prefix))
    length = math.prod(spec.sizes[m:])
    return start, length
