"""Deterministic fixture builders and seeded random model generators.

Used by the test suite, the `fixtures` CLI subcommand and offline pipeline
smoke runs. Random models are always statically valid; with `buildable=True`
the parameters are additionally kept in ranges that realize a non-empty
solid at modest voxel resolutions.
"""

from __future__ import annotations

import numpy as np

from .codec import ComponentAnnotation, DocMode, DocumentAnnotations, GlobalAnnotation
from .model import (
    Arc,
    BooleanOp,
    CadModel,
    Circle,
    ExtentKind,
    ExtrudeCmd,
    Line,
    Loop,
    Sketch,
    SketchExtrudePair,
)

_WORDS = (
    "flat", "round", "slotted", "stepped", "hollow", "tapered", "wide", "thin",
    "bracket", "flange", "boss", "plate", "ring", "housing", "spacer", "cap",
    "with", "a", "central", "bore", "raised", "rim", "beveled", "edge",
)


def rect_loop(w: int, h: int) -> Loop:
    return Loop((Line(end=(w, 0)), Line(end=(w, h)), Line(end=(0, h)), Line(end=(0, 0))))


def triangle_loop(a: int, bx: int, by: int) -> Loop:
    return Loop((Line(end=(a, 0)), Line(end=(bx, by)), Line(end=(0, 0))))


def circle_loop(cx: int, cy: int, r: int) -> Loop:
    return Loop((Circle(center=(cx, cy), radius=r),))


def arc_rect_loop(w: int, h: int, sweep: int = 90) -> Loop:
    """Rectangle whose top edge is replaced by an outward arc."""
    return Loop((Line(end=(w, 0)), Line(end=(w, h)),
                 Arc(end=(0, h), sweep=sweep, ccw=True), Line(end=(0, 0))))


def box_pair(w: int = 96, h: int = 96, depth: int = 64, *,
             origin: tuple[int, int, int] = (0, 0, 0),
             orient: tuple[int, int, int] = (0, 0, 0),
             scale: float = 1.0,
             op: BooleanOp = BooleanOp.NEW_BODY,
             extent: ExtentKind = ExtentKind.ONE_SIDED,
             dist2: int = 0,
             hole: Loop | None = None) -> SketchExtrudePair:
    loops = (rect_loop(w, h),) if hole is None else (rect_loop(w, h), hole)
    return SketchExtrudePair(
        sketch=Sketch(loops),
        extrude=ExtrudeCmd(orient=orient, origin=origin, scale=scale,
                           dist1=depth, dist2=dist2, boolean_op=op, extent=extent))


def cylinder_pair(r: int = 40, depth: int = 64, center: tuple[int, int] = (0, 0), *,
                  origin: tuple[int, int, int] = (0, 0, 0),
                  orient: tuple[int, int, int] = (0, 0, 0),
                  scale: float = 1.0,
                  op: BooleanOp = BooleanOp.NEW_BODY,
                  extent: ExtentKind = ExtentKind.ONE_SIDED,
                  dist2: int = 0) -> SketchExtrudePair:
    return SketchExtrudePair(
        sketch=Sketch((circle_loop(center[0], center[1], r),)),
        extrude=ExtrudeCmd(orient=orient, origin=origin, scale=scale,
                           dist1=depth, dist2=dist2, boolean_op=op, extent=extent))


def cube_model(model_id: str = "cube", size: int = 96, depth: int = 96) -> CadModel:
    return CadModel((box_pair(size, size, depth),), id=model_id)


def cube_with_hole(model_id: str = "cube-hole", size: int = 96, depth: int = 96,
                   hole_r: int = 20) -> CadModel:
    body = box_pair(size, size, depth)
    hole = cylinder_pair(hole_r, depth, center=(size // 2, size // 2),
                         op=BooleanOp.CUT)
    return CadModel((body, hole), id=model_id)


def repeated_pairs_model(count: int, model_id: str = "repeat") -> CadModel:
    """`count` identical cylinders differing only in plane origin.

    Every pair uses NewBody so the run is origin-equivalent end to end
    (later NewBody operations fold as unions).
    """
    pairs = [cylinder_pair(24, 48, origin=(10 * i, 0, 0), op=BooleanOp.NEW_BODY)
             for i in range(count)]
    return CadModel(tuple(pairs), id=model_id)


def _random_chain_loop(rng: np.random.Generator) -> Loop:
    kind = rng.integers(0, 3)
    w = int(rng.integers(24, 110))
    h = int(rng.integers(24, 110))
    if kind == 0:
        return rect_loop(w, h)
    if kind == 1:
        return triangle_loop(w, int(rng.integers(8, w)), h)
    return arc_rect_loop(w, h, sweep=int(rng.integers(30, 160)))


def _random_sketch(rng: np.random.Generator) -> Sketch:
    if rng.random() < 0.3:
        r = int(rng.integers(20, 90))
        return Sketch((circle_loop(int(rng.integers(-20, 21)),
                                   int(rng.integers(-20, 21)), r),))
    outer = _random_chain_loop(rng)
    loops = [outer]
    if rng.random() < 0.4:
        xs = [0] + [c.end[0] for c in outer.curves]
        ys = [0] + [c.end[1] for c in outer.curves]
        w, h = max(xs), max(ys)
        r = int(rng.integers(4, max(5, min(w, h) // 4)))
        cx = int(rng.integers(r + 2, max(r + 3, w - r - 1)))
        cy = int(rng.integers(r + 2, max(r + 3, h - r - 1)))
        loops.append(circle_loop(cx, cy, r))
    return Sketch(tuple(loops))


def _random_extrude(rng: np.random.Generator, first: bool, buildable: bool) -> ExtrudeCmd:
    if first:
        op = BooleanOp.NEW_BODY
    elif buildable:
        op = BooleanOp.JOIN if rng.random() < 0.8 else BooleanOp.CUT
    else:
        op = list(BooleanOp)[int(rng.integers(0, 4))]
    roll = rng.random()
    if roll < 0.7:
        extent, dist2 = ExtentKind.ONE_SIDED, 0
    elif roll < 0.85:
        extent, dist2 = ExtentKind.SYMMETRIC, 0
    else:
        extent, dist2 = ExtentKind.TWO_SIDED, int(rng.integers(16, 64))
    if buildable:
        orient = tuple(int(rng.choice((-90, 0, 90, 180))) for _ in range(3))
        origin = tuple(int(rng.integers(-30, 31)) for _ in range(3))
        dist1 = int(rng.integers(24, 96))
        scale = round(float(rng.uniform(0.5, 1.4)), 6)
    else:
        orient = tuple(int(rng.integers(-180, 181)) for _ in range(3))
        origin = tuple(int(rng.integers(-128, 128)) for _ in range(3))
        dist1 = int(rng.integers(1, 256))
        scale = round(float(rng.uniform(0.05, 2.0)), 6)
    return ExtrudeCmd(orient=orient, origin=origin, scale=scale, dist1=dist1,
                      dist2=dist2, boolean_op=op, extent=extent)


def random_model(rng: np.random.Generator, *, max_pairs: int = 5,
                 buildable: bool = False, model_id: str | None = None) -> CadModel:
    """A statically valid random model; scale values are 6-decimal exact so
    the text round trip is lossless."""
    n = int(rng.integers(1, max_pairs + 1))
    pairs = []
    for i in range(n):
        sketch = _random_sketch(rng)
        extrude = _random_extrude(rng, first=(i == 0), buildable=buildable)
        if buildable and extrude.boolean_op is BooleanOp.CUT:
            # keep cuts small so the fold stays non-empty
            r = int(rng.integers(8, 20))
            sketch = Sketch((circle_loop(int(rng.integers(-10, 11)),
                                         int(rng.integers(-10, 11)), r),))
        pairs.append(SketchExtrudePair(sketch=sketch, extrude=extrude))
    if model_id is None:
        model_id = f"rand-{rng.integers(0, 10 ** 9)}"
    return CadModel(tuple(pairs), id=model_id)


def random_editable_model(rng: np.random.Generator,
                          model_id: str | None = None) -> CadModel:
    """A buildable multi-component model whose trailing components can be
    removed while the remainder still builds."""
    base = box_pair(int(rng.integers(64, 110)), int(rng.integers(64, 110)),
                    int(rng.integers(48, 96)))
    pairs = [base]
    for _ in range(int(rng.integers(1, 4))):
        off = tuple(int(rng.integers(-40, 41)) for _ in range(3))
        if rng.random() < 0.3:
            pairs.append(cylinder_pair(int(rng.integers(8, 18)),
                                       int(rng.integers(32, 96)),
                                       center=(int(rng.integers(16, 48)),
                                               int(rng.integers(16, 48))),
                                       origin=off, op=BooleanOp.CUT))
        else:
            pairs.append(box_pair(int(rng.integers(24, 64)), int(rng.integers(24, 64)),
                                  int(rng.integers(24, 80)),
                                  origin=off, op=BooleanOp.JOIN))
    if model_id is None:
        model_id = f"edit-{rng.integers(0, 10 ** 9)}"
    return CadModel(tuple(pairs), id=model_id)


def _sentence(rng: np.random.Generator, lo: int = 4, hi: int = 9) -> str:
    k = int(rng.integers(lo, hi))
    words = [str(rng.choice(_WORDS)) for _ in range(k)]
    return " ".join(words)


def random_annotations(rng: np.random.Generator, n_components: int) -> DocumentAnnotations:
    """Annotations shaped like the real pipeline's output for a model with
    `n_components` components, with the detailed line present (tilde shape)."""
    if n_components == 1:
        return DocumentAnnotations(
            components=(ComponentAnnotation(description=_sentence(rng)),))
    comps = tuple(
        ComponentAnnotation(description=_sentence(rng),
                            name=f"{rng.choice(_WORDS)} {i + 1}")
        for i in range(n_components))
    return DocumentAnnotations(
        overall=GlobalAnnotation(abstract=_sentence(rng), detailed=_sentence(rng, 6, 14)),
        components=comps)


def annotations_for_mode(ann: DocumentAnnotations, mode: DocMode) -> DocumentAnnotations:
    """Reshape tilde-shaped annotations to match a target document mode."""
    if mode is DocMode.CODE_ONLY:
        return DocumentAnnotations()
    if mode is DocMode.DOT and ann.overall is not None:
        return DocumentAnnotations(
            overall=GlobalAnnotation(ann.overall.abstract, None),
            components=ann.components)
    return ann
