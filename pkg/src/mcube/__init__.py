"""N-dimensional interpolation on rectilinear grids, evaluated as one recursion
of per-dimension quantizing functions over contiguous lexicographic storage."""

from .errors import (
    CoordinateError,
    DomainError,
    FormatError,
    McubeError,
    MemoryGuardError,
    NonFiniteError,
    PoleError,
    ShapeError,
)
from .grid import (
    EvalStats,
    Grid,
    Mesh,
    build_grid,
    evaluation_counters,
    interpolate_iterative,
    interpolate_recursive,
    load_grid,
    locate_window,
    save_grid,
)
from .index import (
    CartesianStrides,
    IndexSpec,
    cartesian_strides,
    linear_offset,
    make_index_spec,
    projection_extent,
)
from .interp1d import (
    Interpolator1D,
    PreparedStage,
    as_quantizing_function,
    prepare,
    stage_quantize,
)
from .quantize import (
    IDENTITY,
    Converter,
    QuantizingFunction,
    quantize,
    quantize_equivalence_check,
    quantize_iterative,
)
from .store import (
    ArrayView,
    MultiArray,
    WindowSpec,
    from_function,
    from_values,
    full_view,
    get,
    load,
    save,
    subwindow,
)

__version__ = "0.1.0"
