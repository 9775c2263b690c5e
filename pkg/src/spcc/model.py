"""Typed sketch-extrude command sequences with 8-bit quantized parameters.

All types are immutable value objects. Construction never validates, so that
`validate_static` can report every problem as data instead of raising halfway
through an ingest. Operations that need a well-formed model (printing,
hashing, voxelization) call `validate_static` themselves and raise
`ValidationError`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

QUANT_LEVELS = 256
RECENTER_OFFSET = 128
COORD_MIN, COORD_MAX = -RECENTER_OFFSET, QUANT_LEVELS - 1 - RECENTER_OFFSET
LENGTH_MIN, LENGTH_MAX = 0, QUANT_LEVELS - 1
ANGLE_MIN, ANGLE_MAX = -180, 180
SWEEP_MIN, SWEEP_MAX = 0, 360
SCALE_MIN, SCALE_MAX = 0.0, 2.0


class RangeError(ValueError):
    """A parameter fell outside its quantized domain."""


class ValidationError(ValueError):
    """An operation required a statically valid model and did not get one."""

    def __init__(self, violations: list["Violation"]):
        self.violations = list(violations)
        shown = "; ".join(f"{v.where}: {v.message}" for v in self.violations[:4])
        more = "" if len(self.violations) <= 4 else f" (+{len(self.violations) - 4} more)"
        super().__init__(f"invalid model: {shown}{more}")


@dataclass(frozen=True)
class QuantSpec:
    """256-level quantization of the normalized unit interval.

    Coordinates (sketch endpoints, plane origin) are recentered by 128 so the
    sketch start point sits at quantized (0, 0); lengths (radius, extrusion
    distances) are not.
    """

    levels: int = QUANT_LEVELS
    recenter_offset: int = RECENTER_OFFSET


DEFAULT_QUANT = QuantSpec()


def quantize(value: float, spec: QuantSpec = DEFAULT_QUANT, recenter: bool = False,
             name: str = "value") -> int:
    if not 0.0 <= value <= 1.0:
        raise RangeError(f"{name}={value!r} outside [0, 1]")
    level = round(value * (spec.levels - 1))
    return level - spec.recenter_offset if recenter else level


def dequantize(level: int, spec: QuantSpec = DEFAULT_QUANT, recenter: bool = False,
               name: str = "level") -> float:
    if recenter:
        lo, hi = -spec.recenter_offset, spec.levels - 1 - spec.recenter_offset
    else:
        lo, hi = 0, spec.levels - 1
    if not lo <= level <= hi:
        raise RangeError(f"{name}={level!r} outside [{lo}, {hi}]")
    raw = level + spec.recenter_offset if recenter else level
    return raw / (spec.levels - 1)


class BooleanOp(Enum):
    NEW_BODY = "NewBody"
    JOIN = "Join"
    CUT = "Cut"
    INTERSECT = "Intersect"


class ExtentKind(Enum):
    ONE_SIDED = "OneSided"
    SYMMETRIC = "Symmetric"
    TWO_SIDED = "TwoSided"


@dataclass(frozen=True)
class Line:
    end: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "end", tuple(self.end))


@dataclass(frozen=True)
class Arc:
    end: tuple[int, int]
    sweep: int
    ccw: bool

    def __post_init__(self):
        object.__setattr__(self, "end", tuple(self.end))


@dataclass(frozen=True)
class Circle:
    center: tuple[int, int]
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(self.center))


CurveCmd = Line | Arc | Circle


@dataclass(frozen=True)
class Loop:
    """A closed region boundary: one circle, or a chain of lines/arcs that
    starts and ends at the recentered origin (0, 0)."""

    curves: tuple[CurveCmd, ...]

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))


@dataclass(frozen=True)
class Sketch:
    """Loops composed even-odd; the first is the outer profile."""

    loops: tuple[Loop, ...]

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(self.loops))


@dataclass(frozen=True)
class ExtrudeCmd:
    orient: tuple[int, int, int]
    origin: tuple[int, int, int]
    scale: float
    dist1: int
    dist2: int
    boolean_op: BooleanOp
    extent: ExtentKind

    def __post_init__(self):
        object.__setattr__(self, "orient", tuple(self.orient))
        object.__setattr__(self, "origin", tuple(self.origin))


@dataclass(frozen=True)
class SketchExtrudePair:
    sketch: Sketch
    extrude: ExtrudeCmd


@dataclass(frozen=True)
class CadModel:
    pairs: tuple[SketchExtrudePair, ...]
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))


@dataclass(frozen=True)
class Violation:
    where: str
    message: str


def _check_int(value: Any, lo: int, hi: int, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise RangeError(f"{name}={value!r} is not an integer")
    if not lo <= value <= hi:
        raise RangeError(f"{name}={value} outside [{lo}, {hi}]")


def check_coord(value: Any, name: str) -> None:
    _check_int(value, COORD_MIN, COORD_MAX, name)


def check_length(value: Any, name: str) -> None:
    _check_int(value, LENGTH_MIN, LENGTH_MAX, name)


def check_angle(value: Any, name: str) -> None:
    _check_int(value, ANGLE_MIN, ANGLE_MAX, name)


def check_sweep(value: Any, name: str = "sweep") -> None:
    _check_int(value, SWEEP_MIN, SWEEP_MAX, name)


def check_scale(value: Any, name: str = "scale") -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RangeError(f"{name}={value!r} is not a number")
    if not SCALE_MIN <= value <= SCALE_MAX:
        raise RangeError(f"{name}={value} outside [{SCALE_MIN}, {SCALE_MAX}]")


def _collect(out: list[Violation], where: str, fn, *args) -> None:
    try:
        fn(*args)
    except RangeError as exc:
        out.append(Violation(where, str(exc)))


def _validate_loop(loop: Loop, where: str) -> list[Violation]:
    out: list[Violation] = []
    if not loop.curves:
        return [Violation(where, "loop has no curves")]
    circles = [c for c in loop.curves if isinstance(c, Circle)]
    if circles:
        if len(loop.curves) != 1:
            out.append(Violation(where, "a circle must be the only curve in its loop"))
        c = circles[0]
        _collect(out, where, check_coord, c.center[0], "center.x")
        _collect(out, where, check_coord, c.center[1], "center.y")
        _collect(out, where, check_length, c.radius, "radius")
        return out
    if len(loop.curves) < 2:
        out.append(Violation(where, "a chain loop needs at least two curves"))
    pos = (0, 0)
    for k, curve in enumerate(loop.curves):
        cw = f"{where}.curves[{k}]"
        _collect(out, cw, check_coord, curve.end[0], "x")
        _collect(out, cw, check_coord, curve.end[1], "y")
        if isinstance(curve, Arc):
            _collect(out, cw, check_sweep, curve.sweep)
            # sweep 0 and 360 leave the arc's circle undetermined, as does a
            # zero chord; all three are rejected rather than silently dropped
            if isinstance(curve.sweep, int) and not isinstance(curve.sweep, bool):
                if curve.sweep == 0:
                    out.append(Violation(cw, "degenerate arc: sweep must be > 0"))
                elif curve.sweep == 360:
                    out.append(Violation(cw, "degenerate arc: sweep must be < 360"))
            if curve.end == pos:
                out.append(Violation(cw, "degenerate arc: endpoints coincide"))
        elif curve.end == pos:
            out.append(Violation(cw, "zero-length line segment"))
        pos = curve.end
    if pos != (0, 0):
        out.append(Violation(where, f"loop does not close: ends at {pos}, expected (0, 0)"))
    return out


def _validate_extrude(e: ExtrudeCmd, where: str) -> list[Violation]:
    out: list[Violation] = []
    for axis, v in zip("xyz", e.orient):
        _collect(out, where, check_angle, v, f"angle.{axis}")
    for axis, v in zip("xyz", e.origin):
        _collect(out, where, check_coord, v, f"origin.{axis}")
    _collect(out, where, check_scale, e.scale)
    if isinstance(e.scale, (int, float)) and not isinstance(e.scale, bool) and e.scale == 0:
        out.append(Violation(where, "scale must be positive"))
    _collect(out, where, check_length, e.dist1, "dist1")
    _collect(out, where, check_length, e.dist2, "dist2")
    if e.extent is ExtentKind.TWO_SIDED:
        if e.dist2 == 0:
            out.append(Violation(where, "two-sided extent requires dist2 > 0"))
    elif e.dist2 != 0:
        out.append(Violation(where, f"{e.extent.value} extent requires dist2 = 0"))
    return out


def validate_static(model: CadModel) -> list[Violation]:
    """Check every type invariant; returns violations as data, never raises."""
    if not model.pairs:
        return [Violation("pairs", "model has no sketch-extrude pairs")]
    out: list[Violation] = []
    if model.pairs[0].extrude.boolean_op is not BooleanOp.NEW_BODY:
        out.append(Violation("pairs[0].extrude.boolean_op", "first operation must be NewBody"))
    for i, pair in enumerate(model.pairs):
        if not pair.sketch.loops:
            out.append(Violation(f"pairs[{i}].sketch", "sketch has no loops"))
        for j, loop in enumerate(pair.sketch.loops):
            out.extend(_validate_loop(loop, f"pairs[{i}].sketch.loops[{j}]"))
        out.extend(_validate_extrude(pair.extrude, f"pairs[{i}].extrude"))
    return out


def require_valid(model: CadModel) -> None:
    violations = validate_static(model)
    if violations:
        raise ValidationError(violations)


def pairs_equivalent_mod_origin(a: SketchExtrudePair, b: SketchExtrudePair) -> bool:
    """True when every command and parameter matches except the plane origin."""
    if a.sketch != b.sketch:
        return False
    return replace(a.extrude, origin=(0, 0, 0)) == replace(b.extrude, origin=(0, 0, 0))


def canonical_hash(model: CadModel) -> str:
    """SHA-256 over the canonical code serialization of the model."""
    from . import codec  # deferred: the byte stream is the printed code text

    return hashlib.sha256(codec.print_code(model).encode("utf-8")).hexdigest()


_BOOL_INDEX = {op: i for i, op in enumerate(BooleanOp)}
_EXTENT_INDEX = {ext: i for i, ext in enumerate(ExtentKind)}

SOL_CMD = "SOL"
EXT_CMD = "Ext"


def command_stream(model: CadModel) -> list[tuple[str, tuple]]:
    """Flatten a model into (command, params) rows, one SOL per loop and one
    Ext per pair, in sequence order."""
    out: list[tuple[str, tuple]] = []
    for pair in model.pairs:
        for loop in pair.sketch.loops:
            out.append((SOL_CMD, ()))
            for c in loop.curves:
                if isinstance(c, Line):
                    out.append(("Line", (c.end[0], c.end[1])))
                elif isinstance(c, Arc):
                    out.append(("Arc", (c.end[0], c.end[1], c.sweep, int(c.ccw))))
                else:
                    out.append(("Circle", (c.center[0], c.center[1], c.radius)))
        e = pair.extrude
        out.append((EXT_CMD, (*e.orient, *e.origin, e.scale, e.dist1, e.dist2,
                              _BOOL_INDEX[e.boolean_op], _EXTENT_INDEX[e.extent])))
    return out


def curve_count(model: CadModel) -> int:
    return sum(len(loop.curves) for pair in model.pairs for loop in pair.sketch.loops)


def loop_count(model: CadModel) -> int:
    return sum(len(pair.sketch.loops) for pair in model.pairs)


# ---------------------------------------------------------------------------
# JSON ingestion: {"id": str, "pairs": [{"sketch": {"loops": [[curve...]]},
#                                        "extrude": {...}}]}

def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_point(value: Any, where: str, n: int) -> tuple[int, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ValueError(f"{where}: expected {n} integers")
    return tuple(_as_int(v, where) for v in value)


def _curve_from_json(obj: Any, where: str) -> CurveCmd:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object")
    kind = obj.get("t")
    if kind == "line":
        return Line(end=_as_point(obj.get("end"), f"{where}.end", 2))
    if kind == "arc":
        if not isinstance(obj.get("ccw"), bool):
            raise ValueError(f"{where}.ccw: expected a boolean")
        return Arc(end=_as_point(obj.get("end"), f"{where}.end", 2),
                   sweep=_as_int(obj.get("sweep"), f"{where}.sweep"),
                   ccw=obj["ccw"])
    if kind == "circle":
        return Circle(center=_as_point(obj.get("center"), f"{where}.center", 2),
                      radius=_as_int(obj.get("r"), f"{where}.r"))
    raise ValueError(f"{where}: unknown curve type {kind!r}")


def _extrude_from_json(obj: Any, where: str) -> ExtrudeCmd:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object")
    try:
        op = BooleanOp(obj.get("op"))
    except ValueError:
        raise ValueError(f"{where}.op: unknown boolean op {obj.get('op')!r}") from None
    try:
        extent = ExtentKind(obj.get("extent"))
    except ValueError:
        raise ValueError(f"{where}.extent: unknown extent {obj.get('extent')!r}") from None
    scale = obj.get("scale")
    if isinstance(scale, bool) or not isinstance(scale, (int, float)):
        raise ValueError(f"{where}.scale: expected a number")
    return ExtrudeCmd(
        orient=_as_point(obj.get("orient"), f"{where}.orient", 3),
        origin=_as_point(obj.get("origin"), f"{where}.origin", 3),
        scale=float(scale),
        dist1=_as_int(obj.get("dist1"), f"{where}.dist1"),
        dist2=_as_int(obj.get("dist2"), f"{where}.dist2"),
        boolean_op=op,
        extent=extent,
    )


def model_from_json(data: dict) -> CadModel:
    """Build a CadModel from the ingestion schema. Structural errors raise
    ValueError naming the offending path; range checking is validate_static's
    job."""
    if not isinstance(data, dict):
        raise ValueError("model: expected an object")
    model_id = data.get("id", "")
    if not isinstance(model_id, str):
        raise ValueError("id: expected a string")
    raw_pairs = data.get("pairs")
    if not isinstance(raw_pairs, list):
        raise ValueError("pairs: expected a list")
    pairs = []
    for i, rp in enumerate(raw_pairs):
        if not isinstance(rp, dict):
            raise ValueError(f"pairs[{i}]: expected an object")
        sk = rp.get("sketch")
        if not isinstance(sk, dict) or not isinstance(sk.get("loops"), list):
            raise ValueError(f"pairs[{i}].sketch.loops: expected a list")
        loops = []
        for j, rl in enumerate(sk["loops"]):
            if not isinstance(rl, list):
                raise ValueError(f"pairs[{i}].sketch.loops[{j}]: expected a list")
            loops.append(Loop(tuple(
                _curve_from_json(rc, f"pairs[{i}].sketch.loops[{j}][{k}]")
                for k, rc in enumerate(rl))))
        pairs.append(SketchExtrudePair(
            sketch=Sketch(tuple(loops)),
            extrude=_extrude_from_json(rp.get("extrude"), f"pairs[{i}].extrude"),
        ))
    return CadModel(pairs=tuple(pairs), id=model_id)


def curve_to_json(curve: CurveCmd) -> dict:
    if isinstance(curve, Line):
        return {"t": "line", "end": list(curve.end)}
    if isinstance(curve, Arc):
        return {"t": "arc", "end": list(curve.end), "sweep": curve.sweep, "ccw": curve.ccw}
    return {"t": "circle", "center": list(curve.center), "r": curve.radius}


def model_to_json(model: CadModel) -> dict:
    return {
        "id": model.id,
        "pairs": [
            {
                "sketch": {"loops": [[curve_to_json(c) for c in loop.curves]
                                     for loop in pair.sketch.loops]},
                "extrude": {
                    "orient": list(pair.extrude.orient),
                    "origin": list(pair.extrude.origin),
                    "scale": pair.extrude.scale,
                    "dist1": pair.extrude.dist1,
                    "dist2": pair.extrude.dist2,
                    "op": pair.extrude.boolean_op.value,
                    "extent": pair.extrude.extent.value,
                },
            }
            for pair in model.pairs
        ],
    }
