"""Toolkit for sketch-extrude CAD command sequences in a structured
parametric code format: codecs, segmentation, voxel geometry, evaluation
metrics, annotation and corpus synthesis pipelines, and a batch CLI."""

from .model import (
    Arc,
    BooleanOp,
    CadModel,
    Circle,
    ExtentKind,
    ExtrudeCmd,
    Line,
    Loop,
    QuantSpec,
    RangeError,
    Sketch,
    SketchExtrudePair,
    ValidationError,
    Violation,
    canonical_hash,
    command_stream,
    dequantize,
    model_from_json,
    model_to_json,
    pairs_equivalent_mod_origin,
    quantize,
    validate_static,
)
from .codec import (
    ComponentAnnotation,
    DocMode,
    DocumentAnnotations,
    GlobalAnnotation,
    SpccDocument,
    SpccParseError,
    StructureError,
    parse,
    parse_model,
    print_code,
    print_spcc,
)
from .segment import Component, extrusion_direction_label, segment
from .geometry import (
    BuildCheck,
    EmptySolidError,
    PlaneFrame,
    VoxelSolid,
    check_buildable,
    evaluate_model,
    plane_frame,
    point_in_sketch,
    sample_surface_points,
)

__version__ = "0.1.0"
