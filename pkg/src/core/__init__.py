"""Noyau numérique : base de Fock, régions, opérateurs de région, applications CPTI."""

from .errors import (
    ConfigError,
    CorruptionError,
    DimensionMismatchError,
    ExpressionArityError,
    ExpressionSyntaxError,
    FockRegionsError,
    InvalidTruncationError,
    MapParameterError,
    NotHermitianError,
    NumericalPreconditionError,
    RegionError,
    UnknownMapKindError,
)
from .fock import (
    BasicKind,
    FockOperator,
    Spectrum,
    TruncationConfig,
    build_basic_operator,
    displacement_operator,
    hermitian_spectrum,
    position_eigenvector_amplitudes,
    spectral_function,
)
from .geometry import (
    CanonicalPolygon,
    Disk,
    DiskCluster,
    Displaced,
    IsoTriangle,
    Line,
    PointOrigin,
    QuadratureSpec,
    Rectangle,
    ReflectedOrigin,
    Region,
    Rotated,
    Segment,
    Union,
    quadrature_nodes,
    region_area,
    region_contains,
)
from .region_ops import (
    KernelConfig,
    Normalization,
    build_region_operator,
    disk_spectrum_radial,
    displaced_conjugate,
    line_projector,
    phase_kernel,
    rectangle_coherent_symbol,
    segment_operator_closed_form,
)
from .cpti import (
    KrausMap,
    MapKind,
    StepMatrix,
    TilingMode,
    TilingTrace,
    apply_kraus_map,
    diagonal_transfer,
    dilation_unitary,
    dual_apply,
    make_map,
    polygon_dilation,
    step_matrix,
    tile_run,
)
from .spectra import OrderedEigenvalues, majorizes, qpm_bounds, squeezing_check

__all__ = [
    "ConfigError", "CorruptionError", "DimensionMismatchError", "ExpressionArityError",
    "ExpressionSyntaxError", "FockRegionsError", "InvalidTruncationError",
    "MapParameterError", "NotHermitianError", "NumericalPreconditionError", "RegionError",
    "UnknownMapKindError",
    "BasicKind", "FockOperator", "Spectrum", "TruncationConfig", "build_basic_operator",
    "displacement_operator", "hermitian_spectrum", "position_eigenvector_amplitudes",
    "spectral_function",
    "CanonicalPolygon", "Disk", "DiskCluster", "Displaced", "IsoTriangle", "Line",
    "PointOrigin", "QuadratureSpec", "Rectangle", "ReflectedOrigin", "Region", "Rotated",
    "Segment", "Union", "quadrature_nodes", "region_area", "region_contains",
    "KernelConfig", "Normalization", "build_region_operator", "disk_spectrum_radial",
    "displaced_conjugate", "line_projector", "phase_kernel", "rectangle_coherent_symbol",
    "segment_operator_closed_form",
    "KrausMap", "MapKind", "StepMatrix", "TilingMode", "TilingTrace", "apply_kraus_map",
    "diagonal_transfer", "dilation_unitary", "dual_apply", "make_map", "polygon_dilation",
    "step_matrix", "tile_run",
    "OrderedEigenvalues", "majorizes", "qpm_bounds", "squeezing_check",
]
