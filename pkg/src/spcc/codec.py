"""Bit-exact printer and parser for the structured parametric CAD code format.

The text format is line oriented. A document is an optional annotation
prefix, one sketch/extrude statement block per pair, and a terminator
comment. Identifiers are canonical and sequential per document: ``sketch_1``,
``sketch_2``, ... for sketches, ``loop1``, ``loop2``, ... for loops and
``extrude1``, ... for extrusions. The printer always emits the dense argument
form; the parser also accepts spaced argument lists, CRLF endings and blank
lines, and reproduces its input byte for byte after that whitespace
normalization.

Annotation shape determines the document mode:

* code: no annotations at all.
* tilde: a description line, a details line, and one named header per
  component (for single-component models: just the bare description line,
  since the fully and abstract-only annotated forms coincide there).
* dot: like tilde but without the details line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .model import (
    Arc,
    BooleanOp,
    CadModel,
    Circle,
    ExtentKind,
    ExtrudeCmd,
    Line,
    Loop,
    RangeError,
    Sketch,
    SketchExtrudePair,
    check_angle,
    check_coord,
    check_length,
    check_scale,
    check_sweep,
    require_valid,
    validate_static,
    ValidationError,
)

TERMINATOR = "# End of code"
GLOBAL_PREFIX = "# Description of the CAD model: "
DETAILS_PREFIX = "# Details: "
COMPONENT_PREFIX = "# Component "

# The bare global prefix doubles as the unconditional-generation prompt.
GENERATION_PROMPT = "Description of the CAD model"


class DocMode(Enum):
    TILDE = "tilde"
    DOT = "dot"
    CODE_ONLY = "code"


class SpccParseError(ValueError):
    """Lexical failure: position plus the offending content."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class StructureError(ValueError):
    """The statements are individually well formed but do not fit together."""


@dataclass(frozen=True)
class ComponentAnnotation:
    """Component description; the short name exists only once a second
    annotation stage has run, so single-component documents carry None."""

    description: str
    name: str | None = None


@dataclass(frozen=True)
class GlobalAnnotation:
    """Document-level abstract; `detailed` is None in abstract-only (dot)
    documents."""

    abstract: str
    detailed: str | None = None


@dataclass(frozen=True)
class DocumentAnnotations:
    overall: GlobalAnnotation | None = None
    components: tuple[ComponentAnnotation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def empty(self) -> bool:
        return self.overall is None and not self.components


@dataclass(frozen=True)
class SpccDocument:
    model: CadModel
    annotations: DocumentAnnotations
    mode: DocMode
    spans: tuple[tuple[int, int], ...]

    def render(self) -> str:
        if self.mode is DocMode.CODE_ONLY:
            return print_code(self.model)
        return print_spcc(self.model, self.annotations, self.mode, spans=self.spans)


def _check_text(value: str | None, what: str, required: bool = True) -> None:
    if value is None:
        if required:
            raise StructureError(f"{what} is required here")
        return
    if not isinstance(value, str) or not value.strip():
        raise StructureError(f"{what} must be non-empty text")
    if "\n" in value or "\r" in value:
        raise StructureError(f"{what} must be a single line")


class _Counters:
    def __init__(self):
        self.sketch = 0
        self.loop = 0
        self.extrude = 0


def _curve_line(loop_id: str, curve) -> str:
    if isinstance(curve, Line):
        return f"{loop_id}.Line(endpoint=({curve.end[0]},{curve.end[1]}))"
    if isinstance(curve, Arc):
        flag = "True" if curve.ccw else "False"
        return (f"{loop_id}.Arc(endpoint=({curve.end[0]},{curve.end[1]}),"
                f"degrees={curve.sweep},counterclockwise={flag})")
    return (f"{loop_id}.Circle(center=({curve.center[0]},{curve.center[1]}),"
            f"radius={curve.radius})")


def _pair_lines(pair: SketchExtrudePair, c: _Counters) -> list[str]:
    c.sketch += 1
    sk = f"sketch_{c.sketch}"
    lines = [f"{sk} = Sketch()"]
    loop_ids = []
    for loop in pair.sketch.loops:
        c.loop += 1
        lp = f"loop{c.loop}"
        loop_ids.append(lp)
        lines.append(f"{lp} = Loop()")
        for curve in loop.curves:
            lines.append(_curve_line(lp, curve))
    for lp in loop_ids:
        lines.append(f"{sk}.append({lp})")
    c.extrude += 1
    e = pair.extrude
    lines.append(
        f"extrude{c.extrude} = Extrude({sk},"
        f"origin=({e.origin[0]},{e.origin[1]},{e.origin[2]}),"
        f"angles=({e.orient[0]},{e.orient[1]},{e.orient[2]}),"
        f"scale={e.scale:.6f},dist1={e.dist1},dist2={e.dist2},"
        f"op={e.boolean_op.value},extent={e.extent.value})"
    )
    return lines


def print_code(model: CadModel) -> str:
    """Render the annotation-free code form of a model."""
    require_valid(model)
    counters = _Counters()
    lines: list[str] = []
    for pair in model.pairs:
        lines.extend(_pair_lines(pair, counters))
    lines.append(TERMINATOR)
    return "\n".join(lines) + "\n"


def _default_spans(model: CadModel) -> tuple[tuple[int, int], ...]:
    from .segment import segment

    return tuple((c.start, c.stop) for c in segment(model))


def print_spcc(model: CadModel, annotations: DocumentAnnotations, mode: DocMode,
               spans: Sequence[tuple[int, int]] | None = None) -> str:
    """Render a model with its annotations embedded as comment lines.

    With `spans=None` the component partition comes from the segmenter and a
    single-component document collapses to the bare description-line form.
    Explicit spans force the verbose header layout, which text-editing
    pipelines rely on to keep header counts stable.
    """
    require_valid(model)
    if mode is DocMode.CODE_ONLY:
        if not annotations.empty:
            raise StructureError("code-only documents carry no annotations")
        return print_code(model)

    forced = spans is not None
    span_list = tuple(spans) if forced else _default_spans(model)
    expected = 0
    for start, stop in span_list:
        if start != expected or stop <= start:
            raise StructureError(f"component spans do not partition the pairs: {span_list}")
        expected = stop
    if expected != len(model.pairs):
        raise StructureError(f"component spans do not cover all pairs: {span_list}")
    comps = annotations.components
    if len(comps) != len(span_list):
        raise StructureError(
            f"annotation count {len(comps)} does not match component count {len(span_list)}")

    lines: list[str] = []
    if len(span_list) == 1 and not forced:
        # The fully annotated and abstract-only forms coincide here: the
        # component description alone prefixes the code.
        if annotations.overall is not None:
            raise StructureError(
                "single-component documents carry only the component description")
        if comps[0].name is not None:
            raise StructureError("single-component annotations carry no name")
        _check_text(comps[0].description, "component description")
        lines.append(GLOBAL_PREFIX + comps[0].description)
    else:
        overall = annotations.overall
        if overall is None:
            raise StructureError("multi-component documents need a document description")
        _check_text(overall.abstract, "abstract description")
        lines.append(GLOBAL_PREFIX + overall.abstract)
        if mode is DocMode.TILDE:
            _check_text(overall.detailed, "detailed description")
            lines.append(DETAILS_PREFIX + overall.detailed)
        elif overall.detailed is not None:
            raise StructureError("abstract-only documents carry no detailed description")

    counters = _Counters()
    for idx, ((start, stop), comp) in enumerate(zip(span_list, comps), 1):
        if len(span_list) > 1 or forced:
            _check_text(comp.name, "component name")
            _check_text(comp.description, "component description")
            if "): " in comp.name:
                raise StructureError(f"component name {comp.name!r} contains '): '")
            lines.append(f"{COMPONENT_PREFIX}{idx} ({comp.name}): {comp.description}")
        for pair in model.pairs[start:stop]:
            lines.extend(_pair_lines(pair, counters))
    lines.append(TERMINATOR)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parser

_SKETCH_RE = re.compile(r"sketch_(\d+)\s*=\s*Sketch\(\s*\)$")
_LOOP_RE = re.compile(r"loop(\d+)\s*=\s*Loop\(\s*\)$")
_LINE_RE = re.compile(
    r"loop(\d+)\.Line\(\s*endpoint\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*\)$")
_ARC_RE = re.compile(
    r"loop(\d+)\.Arc\(\s*endpoint\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*,"
    r"\s*degrees\s*=\s*(-?\d+)\s*,\s*counterclockwise\s*=\s*(True|False)\s*\)$")
_CIRCLE_RE = re.compile(
    r"loop(\d+)\.Circle\(\s*center\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*,"
    r"\s*radius\s*=\s*(-?\d+)\s*\)$")
_APPEND_RE = re.compile(r"sketch_(\d+)\.append\(\s*loop(\d+)\s*\)$")
_EXTRUDE_RE = re.compile(
    r"extrude(\d+)\s*=\s*Extrude\(\s*sketch_(\d+)\s*,"
    r"\s*origin\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*,"
    r"\s*angles\s*=\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*,"
    r"\s*scale\s*=\s*(-?\d+(?:\.\d+)?)\s*,"
    r"\s*dist1\s*=\s*(-?\d+)\s*,\s*dist2\s*=\s*(-?\d+)\s*,"
    r"\s*op\s*=\s*(\w+)\s*,\s*extent\s*=\s*(\w+)\s*\)$")
_HEADER_RE = re.compile(r"# Component (\d+) \((.*?)\): (.*)$")


class _ParseState:
    def __init__(self):
        self.abstract: str | None = None
        self.detailed: str | None = None
        self.headers: list[tuple[str, str]] = []
        self.header_marks: list[int] = []
        self.pairs: list[SketchExtrudePair] = []
        self.sketch_count = 0
        self.loop_count = 0
        self.extrude_count = 0
        self.open_sketch: int | None = None
        self.open_loop: int | None = None
        self.loops: dict[int, list] = {}
        self.loop_order: list[int] = []
        self.appended: list[int] = []
        self.terminated = False


def _ranged(lineno: int, fn, *args) -> None:
    try:
        fn(*args)
    except RangeError as exc:
        raise RangeError(f"line {lineno}: {exc}") from None


def _finish_pair(st: _ParseState, lineno: int, sketch_no: int, groups) -> None:
    if st.open_sketch is None or st.open_sketch != sketch_no:
        raise StructureError(
            f"line {lineno}: extrusion references sketch_{sketch_no}, "
            f"which is not the open sketch")
    if len(st.appended) != len(st.loop_order) or not st.appended:
        raise StructureError(
            f"line {lineno}: sketch_{sketch_no} extruded before all loops were appended")
    ox, oy, oz, ax, ay, az = (int(g) for g in groups[2:8])
    scale = float(groups[8])
    d1, d2 = int(groups[9]), int(groups[10])
    _ranged(lineno, check_coord, ox, "origin.x")
    _ranged(lineno, check_coord, oy, "origin.y")
    _ranged(lineno, check_coord, oz, "origin.z")
    _ranged(lineno, check_angle, ax, "angle.x")
    _ranged(lineno, check_angle, ay, "angle.y")
    _ranged(lineno, check_angle, az, "angle.z")
    _ranged(lineno, check_scale, scale)
    _ranged(lineno, check_length, d1, "dist1")
    _ranged(lineno, check_length, d2, "dist2")
    try:
        op = BooleanOp(groups[11])
    except ValueError:
        raise SpccParseError(lineno, f"unknown boolean op {groups[11]!r}") from None
    try:
        extent = ExtentKind(groups[12])
    except ValueError:
        raise SpccParseError(lineno, f"unknown extent {groups[12]!r}") from None
    loops = tuple(Loop(tuple(st.loops[no])) for no in st.appended)
    st.pairs.append(SketchExtrudePair(
        sketch=Sketch(loops),
        extrude=ExtrudeCmd(orient=(ax, ay, az), origin=(ox, oy, oz), scale=scale,
                           dist1=d1, dist2=d2, boolean_op=op, extent=extent),
    ))
    st.open_sketch = None
    st.open_loop = None
    st.loops = {}
    st.loop_order = []
    st.appended = []


def _parse_statement(st: _ParseState, lineno: int, line: str) -> None:
    m = _SKETCH_RE.match(line)
    if m:
        if st.open_sketch is not None:
            raise StructureError(f"line {lineno}: sketch definition inside an open sketch")
        no = int(m.group(1))
        if no != st.sketch_count + 1:
            raise StructureError(
                f"line {lineno}: expected sketch_{st.sketch_count + 1}, got sketch_{no}")
        st.sketch_count = no
        st.open_sketch = no
        return
    m = _LOOP_RE.match(line)
    if m:
        if st.open_sketch is None:
            raise StructureError(f"line {lineno}: loop defined outside a sketch")
        if st.appended:
            raise StructureError(f"line {lineno}: loop defined after append statements")
        no = int(m.group(1))
        if no != st.loop_count + 1:
            raise StructureError(
                f"line {lineno}: expected loop{st.loop_count + 1}, got loop{no}")
        st.loop_count = no
        st.open_loop = no
        st.loops[no] = []
        st.loop_order.append(no)
        return
    for regex, kind in ((_LINE_RE, "line"), (_ARC_RE, "arc"), (_CIRCLE_RE, "circle")):
        m = regex.match(line)
        if not m:
            continue
        no = int(m.group(1))
        if st.open_loop is None or no != st.open_loop:
            raise StructureError(f"line {lineno}: curve added to loop{no}, "
                                 f"which is not the open loop")
        x, y = int(m.group(2)), int(m.group(3))
        if kind == "line":
            _ranged(lineno, check_coord, x, "x")
            _ranged(lineno, check_coord, y, "y")
            st.loops[no].append(Line(end=(x, y)))
        elif kind == "arc":
            sweep = int(m.group(4))
            _ranged(lineno, check_coord, x, "x")
            _ranged(lineno, check_coord, y, "y")
            _ranged(lineno, check_sweep, sweep)
            st.loops[no].append(Arc(end=(x, y), sweep=sweep, ccw=m.group(4 + 1) == "True"))
        else:
            r = int(m.group(4))
            _ranged(lineno, check_coord, x, "x")
            _ranged(lineno, check_coord, y, "y")
            _ranged(lineno, check_length, r, "radius")
            st.loops[no].append(Circle(center=(x, y), radius=r))
        return
    m = _APPEND_RE.match(line)
    if m:
        sk, lp = int(m.group(1)), int(m.group(2))
        if st.open_sketch is None or sk != st.open_sketch:
            raise StructureError(f"line {lineno}: append to sketch_{sk}, "
                                 f"which is not the open sketch")
        if lp not in st.loops:
            raise StructureError(f"line {lineno}: append references undefined loop{lp}")
        if lp in st.appended:
            raise StructureError(f"line {lineno}: loop{lp} appended twice")
        expected = st.loop_order[len(st.appended)]
        if lp != expected:
            raise StructureError(
                f"line {lineno}: loops must be appended in definition order "
                f"(expected loop{expected})")
        if not st.loops[lp]:
            raise StructureError(f"line {lineno}: loop{lp} has no curves")
        st.appended.append(lp)
        st.open_loop = None
        return
    m = _EXTRUDE_RE.match(line)
    if m:
        no = int(m.group(1))
        if no != st.extrude_count + 1:
            raise StructureError(
                f"line {lineno}: expected extrude{st.extrude_count + 1}, got extrude{no}")
        st.extrude_count = no
        _finish_pair(st, lineno, int(m.group(2)), m.groups())
        return
    token = line.split()[0] if line.split() else line
    raise SpccParseError(lineno, f"unrecognized statement {token!r}")


def _parse_comment(st: _ParseState, lineno: int, line: str) -> None:
    if line == TERMINATOR:
        if st.open_sketch is not None:
            raise StructureError(f"line {lineno}: document ends inside an open sketch")
        st.terminated = True
        return
    if line.startswith(GLOBAL_PREFIX):
        if st.abstract is not None:
            raise StructureError(f"line {lineno}: duplicate document description")
        if st.pairs or st.headers or st.open_sketch is not None:
            raise StructureError(f"line {lineno}: document description must come first")
        st.abstract = line[len(GLOBAL_PREFIX):]
        if not st.abstract.strip():
            raise StructureError(f"line {lineno}: empty document description")
        return
    if line.startswith(DETAILS_PREFIX):
        if st.abstract is None:
            raise StructureError(f"line {lineno}: details before the document description")
        if st.detailed is not None:
            raise StructureError(f"line {lineno}: duplicate details line")
        if st.pairs or st.headers or st.open_sketch is not None:
            raise StructureError(f"line {lineno}: details line must precede the code")
        st.detailed = line[len(DETAILS_PREFIX):]
        if not st.detailed.strip():
            raise StructureError(f"line {lineno}: empty details line")
        return
    m = _HEADER_RE.match(line)
    if m:
        if st.open_sketch is not None:
            raise StructureError(f"line {lineno}: component header inside an open sketch")
        no, name, desc = int(m.group(1)), m.group(2), m.group(3)
        if no != len(st.headers) + 1:
            raise StructureError(
                f"line {lineno}: expected component {len(st.headers) + 1}, got {no}")
        if not st.headers and st.pairs:
            raise StructureError(
                f"line {lineno}: component header after unannotated pairs")
        if not name.strip():
            raise StructureError(f"line {lineno}: empty component name")
        if not desc.strip():
            raise StructureError(f"line {lineno}: empty component description")
        st.headers.append((name, desc))
        st.header_marks.append(len(st.pairs))
        return
    raise SpccParseError(lineno, f"unrecognized comment {line!r}")


def parse(text: str, *, model_id: str = "") -> SpccDocument:
    """Parse a document; the inverse of the printers.

    The text carries no model id, so the caller supplies one. Raises
    SpccParseError (lexical), StructureError (statements do not fit),
    RangeError (parameter out of range) or ValidationError (the recovered
    model fails static validation). Never anything else, whatever the input.
    """
    if not isinstance(text, str):
        raise SpccParseError(0, "input is not text")
    st = _ParseState()
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r").rstrip()
        if not line.strip():
            continue
        if st.terminated:
            raise SpccParseError(lineno, "content after the terminator")
        if line.startswith("#"):
            _parse_comment(st, lineno, line)
        else:
            _parse_statement(st, lineno, line)
    if not st.terminated:
        raise StructureError(f"missing terminator {TERMINATOR!r}")
    if not st.pairs:
        raise StructureError("document contains no sketch-extrude pairs")

    if st.headers:
        if st.abstract is None:
            raise StructureError("component headers without a document description")
        marks = st.header_marks + [len(st.pairs)]
        spans = tuple((marks[i], marks[i + 1]) for i in range(len(st.headers)))
        for (start, stop), _ in zip(spans, st.headers):
            if stop <= start:
                raise StructureError("component header with no pairs")
        annotations = DocumentAnnotations(
            overall=GlobalAnnotation(st.abstract, st.detailed),
            components=tuple(ComponentAnnotation(description=d, name=n)
                             for n, d in st.headers),
        )
        mode = DocMode.TILDE if st.detailed is not None else DocMode.DOT
    elif st.abstract is not None:
        if st.detailed is not None:
            raise StructureError("details line without component headers")
        annotations = DocumentAnnotations(
            components=(ComponentAnnotation(description=st.abstract, name=None),))
        mode = DocMode.TILDE
        spans = ((0, len(st.pairs)),)
    else:
        annotations = DocumentAnnotations()
        mode = DocMode.CODE_ONLY
        spans = ()

    model = CadModel(pairs=tuple(st.pairs), id=model_id)
    violations = validate_static(model)
    if violations:
        raise ValidationError(violations)
    return SpccDocument(model=model, annotations=annotations, mode=mode, spans=spans)


def parse_model(text: str, *, model_id: str = "") -> CadModel:
    return parse(text, model_id=model_id).model


def strip_annotations(text: str) -> str:
    """Drop every annotation comment, keeping statements and the terminator."""
    kept = [ln for ln in text.split("\n")
            if not ln.startswith("#") or ln.rstrip() == TERMINATOR]
    while kept and not kept[-1].strip():
        kept.pop()
    return "\n".join(kept) + "\n"
