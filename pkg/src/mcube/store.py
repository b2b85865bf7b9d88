"""Contiguous lexicographic storage and zero-copy strided views.

A :class:`MultiArray` keeps its scalars in one flat float64 buffer ordered
lexicographically by multi-index.  An :class:`ArrayView` addresses part of
that buffer through a base offset and ``(length, stride)`` pairs; a
sub-window keeps the parent strides and is therefore usually
non-contiguous.  Views never copy.

Binary layout (little-endian)::

    b"MCUB" | u8 version=1 | u32 N | N * (u32 size, i64 offset) | prod(S) * f64
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from itertools import product
from typing import BinaryIO, Callable, Iterator, Sequence, Tuple

import numpy as np

from .errors import FormatError, NonFiniteError, ShapeError
from .index import (
    CartesianStrides,
    IndexSpec,
    MultiIndex,
    cartesian_strides,
    linear_offset,
    make_index_spec,
)

MAGIC = b"MCUB"
VERSION = 1
_HEAD = struct.Struct("<4sBI")
_DIM = struct.Struct("<Iq")


class MultiArray:
    """Immutable N-dimensional float64 array in lexicographic order.

    Parameters
    ----------
    spec : IndexSpec
        Shape and index shifts.
    data : array_like
        ``spec.count`` scalars, already in lexicographic order.  They are
        copied once into a private read-only buffer.  Non-finite values
        are rejected.
    """

    __slots__ = ("spec", "strides", "data", "flat")

    def __init__(self, spec: IndexSpec, data):
        buf = np.array(data, dtype=np.float64).reshape(-1)
        if buf.size != spec.count:
            raise ShapeError(f"data holds {buf.size} values, spec requires {spec.count}")
        _check_finite(spec, buf)
        buf.flags.writeable = False
        self.spec = spec
        self.strides = cartesian_strides(spec)
        self.data = buf
        # float-typed memoryview: scalar indexing yields Python floats (fast path for engines)
        self.flat = memoryview(buf).cast("B").cast("d")

    def __len__(self):
        return self.spec.count

    def __repr__(self):
        return f"MultiArray(sizes={self.spec.sizes}, offsets={self.spec.offsets})"

    def __getitem__(self, idx):
        return get(self, idx)

    def to_numpy(self) -> np.ndarray:
        """Read-only N-dimensional numpy view of the data (no copy)."""
        return self.data.reshape(self.spec.sizes)


@dataclass(frozen=True)
class WindowSpec:
    """Zero-based axis starts and lengths of a sub-window."""

    starts: Tuple[int, ...]
    lengths: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(int(s) for s in self.starts))
        object.__setattr__(self, "lengths", tuple(int(n) for n in self.lengths))
        if len(self.starts) != len(self.lengths):
            raise ShapeError("window starts and lengths differ in length")


@dataclass(frozen=True)
class ArrayView:
    """Strided window over the flat storage of a :class:`MultiArray`.

    ``dims`` lists ``(length, stride)`` pairs, outermost dimension first.
    """

    array: MultiArray
    base: int
    dims: Tuple[Tuple[int, int], ...]

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def offsets(self) -> Iterator[int]:
        """Addressed flat offsets in lexicographic view order."""
        strides = [s for _, s in self.dims]
        for ks in product(*(range(n) for n, _ in self.dims)):
            yield self.base + sum(k * s for k, s in zip(ks, strides))

    def values(self) -> list[float]:
        flat = self.array.flat
        return [flat[o] for o in self.offsets()]

    def window(self, win: WindowSpec) -> "ArrayView":
        """Sub-window of this view, expressed against the same parent storage."""
        if len(win.starts) != self.ndim:
            raise ShapeError(f"window has {len(win.starts)} dimensions, view has {self.ndim}")
        for d, ((n, _), a, t) in enumerate(zip(self.dims, win.starts, win.lengths)):
            if a < 0 or t < 1 or a + t > n:
                raise ShapeError(
                    f"window [{a}, {a + t}) exceeds dimension {d + 1} of length {n}")
        base = self.base + sum(a * s for a, (_, s) in zip(win.starts, self.dims))
        dims = tuple((t, s) for t, (_, s) in zip(win.lengths, self.dims))
        return ArrayView(self.array, base, dims)

    def materialize(self, offsets: Sequence[int] | None = None) -> MultiArray:
        """Copy the addressed values into a fresh contiguous array."""
        if offsets is None:
            offsets = (0,) * self.ndim
        return MultiArray(make_index_spec(self.shape, offsets), self.values())


def _check_finite(spec: IndexSpec, buf: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(buf))
    if bad.size:
        pos = np.unravel_index(int(bad[0]), spec.sizes)
        idx = tuple(int(p) + o + 1 for p, o in zip(pos, spec.offsets))
        raise NonFiniteError(f"non-finite value {buf[bad[0]]!r} at index {idx}")


def from_function(spec: IndexSpec, eval: Callable[[MultiIndex], float]) -> MultiArray:
    """Fill an array by calling ``eval`` on every multi-index in lexicographic order."""
    out = np.empty(spec.count)
    for k, idx in enumerate(spec.indices()):
        v = float(eval(idx))
        if not math.isfinite(v):
            raise NonFiniteError(f"non-finite value {v!r} at index {idx}")
        out[k] = v
    return MultiArray(spec, out)


def from_values(spec: IndexSpec, values) -> MultiArray:
    """Array from values already in lexicographic order (or an ndarray of shape ``sizes``)."""
    return MultiArray(spec, values)


def get(arr: MultiArray, idx: Sequence[int]) -> float:
    return arr.flat[linear_offset(arr.spec, arr.strides, idx)]


def full_view(arr: MultiArray) -> ArrayView:
    return ArrayView(arr, 0, tuple(zip(arr.spec.sizes, arr.strides)))


def subwindow(arr: MultiArray, win: WindowSpec) -> ArrayView:
    return full_view(arr).window(win)


# -- binary IO ---------------------------------------------------------------

def _write(arr: MultiArray, fh: BinaryIO) -> None:
    fh.write(_HEAD.pack(MAGIC, VERSION, arr.spec.ndim))
    for s, o in zip(arr.spec.sizes, arr.spec.offsets):
        fh.write(_DIM.pack(s, o))
    fh.write(arr.data.astype("<f8", copy=False).tobytes())


def _read_exact(fh: BinaryIO, n: int, what: str) -> bytes:
    raw = fh.read(n)
    if len(raw) != n:
        raise FormatError(f"truncated {what}")
    return raw


def _read(fh: BinaryIO) -> MultiArray:
    magic, version, ndim = _HEAD.unpack(_read_exact(fh, _HEAD.size, "header"))
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")
    if ndim < 1:
        raise FormatError("file declares zero dimensions")
    dims = [_DIM.unpack(_read_exact(fh, _DIM.size, "dimension table")) for _ in range(ndim)]
    try:
        spec = make_index_spec([s for s, _ in dims], [o for _, o in dims])
    except ShapeError as exc:
        raise FormatError(f"invalid dimension table: {exc}") from exc
    payload = _read_exact(fh, 8 * spec.count, "data section")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return MultiArray(spec, data)


def _open(target, mode):
    if isinstance(target, (str, os.PathLike)):
        return open(target, mode), True
    return target, False


def save(arr: MultiArray, sink) -> None:
    """Write ``arr`` to a path or binary file object."""
    fh, owned = _open(sink, "wb")
    try:
        _write(arr, fh)
    finally:
        if owned:
            fh.close()


def load(source) -> MultiArray:
    """Read one array from a path or binary file object.

    The source must contain exactly one array record; trailing bytes are an
    error because they mean the declared count disagrees with the payload.
    """
    fh, owned = _open(source, "rb")
    try:
        arr = _read(fh)
        if fh.read(1):
            raise FormatError(
                f"payload longer than the declared {arr.spec.count} values")
        return arr
    finally:
        if owned:
            fh.close()


def write_record(arr: MultiArray, fh: BinaryIO) -> None:
    """Append one array record to an open stream (used for multi-record files)."""
    _write(arr, fh)


def read_record(fh: BinaryIO) -> MultiArray:
    """Read the next array record from an open stream."""
    return _read(fh)
