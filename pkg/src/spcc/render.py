"""Deterministic raster views of models and sketches.

Two renderers feed the annotation pipeline:

* `render_views`: orthographic projection of each component's surface voxels
  from a fixed isometric viewpoint, painted back to front. When one
  component is highlighted the others are pre-blended toward the white
  background (`alpha_others`) and the highlighted one is painted last; a
  highlighted cutting component is drawn in pure blue.
* `render_sketch`: the 2D stroke drawing of a sketch, auto-fitted with a 5%
  margin.

Output buffers are RGBA uint8 and byte-for-byte reproducible.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (
    EmptySolidError,
    arc_geometry,
    boundary_mask,
    evaluate_components,
)
from .model import BooleanOp, CadModel, Circle, Line, Sketch
from .segment import Component, segment

PALETTE: tuple[tuple[int, int, int], ...] = (
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
    (188, 189, 34), (23, 190, 207),
)
CUT_BLUE = (0, 0, 255)

_SQ3 = math.sqrt(3.0)
VIEW_DIR = (1.0 / _SQ3, 1.0 / _SQ3, 1.0 / _SQ3)
_SQ2 = math.sqrt(2.0)
_RIGHT = (-1.0 / _SQ2, 1.0 / _SQ2, 0.0)          # world up x view dir, normalized
_SQ6 = math.sqrt(6.0)
_UP = (-1.0 / _SQ6, -1.0 / _SQ6, 2.0 / _SQ6)     # view dir x right


@dataclass(frozen=True, eq=False)
class RasterImage:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 4) uint8

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def png_bytes(self) -> bytes:
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(self.pixels, "RGBA").save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.png_bytes())


def _blank(size: int) -> np.ndarray:
    img = np.empty((size, size, 4), dtype=np.uint8)
    img[:] = 255
    return img


def _paint_square(img: np.ndarray, cx: int, cy: int, half: int,
                  color: tuple[int, int, int], opacity: float) -> None:
    size = img.shape[0]
    x0, x1 = max(cx - half, 0), min(cx + half + 1, size)
    y0, y1 = max(cy - half, 0), min(cy + half + 1, size)
    if x0 >= x1 or y0 >= y1:
        return
    if opacity >= 1.0:
        img[y0:y1, x0:x1, 0] = color[0]
        img[y0:y1, x0:x1, 1] = color[1]
        img[y0:y1, x0:x1, 2] = color[2]
    else:
        region = img[y0:y1, x0:x1, :3].astype(np.float64)
        src = np.array(color, dtype=np.float64)
        img[y0:y1, x0:x1, :3] = np.rint(opacity * src + (1.0 - opacity) * region).astype(np.uint8)


def _project(centers: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    px = centers @ np.array(_RIGHT)
    py = centers @ np.array(_UP)
    depth = centers @ np.array(VIEW_DIR)
    return px, py, depth


def render_views(model: CadModel, highlight: int | None = None,
                 alpha_others: float = 0.85, resolution: int = 64,
                 size: int = 448,
                 components: Sequence[Component] | None = None) -> RasterImage:
    """Isometric component view; see the module docstring for the rules."""
    comps = list(components) if components is not None else segment(model)
    if highlight is not None and not 0 <= highlight < len(comps):
        raise ValueError(f"highlight {highlight} outside 0..{len(comps) - 1}")
    solid, comp_occ = evaluate_components(model, [c.span for c in comps], resolution)
    if solid.is_empty:
        raise EmptySolidError("model realizes an empty solid; nothing to render")

    lo = np.array(solid.bounds[0])
    vox = np.array(solid.voxel_size)
    voxels = []  # (depth, comp, px, py)
    for ci, occ in enumerate(comp_occ):
        idx = np.argwhere(boundary_mask(occ))
        if len(idx) == 0:
            continue
        centers = lo + (idx + 0.5) * vox
        px, py, depth = _project(centers)
        voxels.append((ci, px, py, depth))
    if not voxels:
        raise EmptySolidError("no surface voxels to render")

    all_px = np.concatenate([v[1] for v in voxels])
    all_py = np.concatenate([v[2] for v in voxels])
    span = max(float(all_px.max() - all_px.min()), float(all_py.max() - all_py.min()), 1e-9)
    scale = (size * 0.9) / span
    ox = (all_px.max() + all_px.min()) / 2.0
    oy = (all_py.max() + all_py.min()) / 2.0
    half = max(1, int(math.ceil(
        scale * float(np.abs(np.array(_RIGHT)).dot(vox) + np.abs(np.array(_UP)).dot(vox)) / 4.0)))

    img = _blank(size)
    center = size / 2.0

    def draw_pass(entries, opacity_of, color_of) -> None:
        # one global back-to-front pass across all listed components
        ci_arr = np.concatenate([np.full(len(v[1]), v[0]) for v in entries])
        px = np.concatenate([v[1] for v in entries])
        py = np.concatenate([v[2] for v in entries])
        depth = np.concatenate([v[3] for v in entries])
        xs = np.rint(center + (px - ox) * scale).astype(int)
        ys = np.rint(center - (py - oy) * scale).astype(int)
        order = np.lexsort((np.arange(len(depth)), ci_arr, depth))
        for k in order:
            ci = int(ci_arr[k])
            _paint_square(img, int(xs[k]), int(ys[k]), half, color_of(ci), opacity_of(ci))

    others = [v for v in voxels if highlight is None or v[0] != highlight]
    if others:
        opacity = 1.0 if highlight is None else 1.0 - alpha_others
        draw_pass(others, lambda ci: opacity, lambda ci: PALETTE[ci % len(PALETTE)])
    if highlight is not None:
        target = [v for v in voxels if v[0] == highlight]
        if target:
            is_cut = comps[highlight].representative.extrude.boolean_op is BooleanOp.CUT
            color = CUT_BLUE if is_cut else PALETTE[highlight % len(PALETTE)]
            draw_pass(target, lambda ci: 1.0, lambda ci: color)
    return RasterImage(width=size, height=size, pixels=img)


def _sketch_polylines(sketch: Sketch) -> list[np.ndarray]:
    """Dense point chains along each curve, in quantized units."""
    chains: list[np.ndarray] = []
    for loop in sketch.loops:
        first = loop.curves[0]
        if isinstance(first, Circle):
            cx, cy, r = first.center[0], first.center[1], first.radius
            ang = np.linspace(0.0, 2.0 * math.pi, max(64, int(4 * r)))
            chains.append(np.stack([cx + r * np.cos(ang), cy + r * np.sin(ang)], axis=1))
            continue
        pos = (0.0, 0.0)
        for curve in loop.curves:
            end = (float(curve.end[0]), float(curve.end[1]))
            if isinstance(curve, Line):
                t = np.linspace(0.0, 1.0, 32)[:, None]
                chains.append(np.array(pos) * (1 - t) + np.array(end) * t)
            else:
                cx, cy, r, a0, ss = arc_geometry(pos, end, curve.sweep, curve.ccw)
                steps = max(32, int(abs(ss) * r * 2))
                ang = a0 + ss * np.linspace(0.0, 1.0, steps)
                chains.append(np.stack([cx + r * np.cos(ang), cy + r * np.sin(ang)], axis=1))
            pos = end
    return chains


def render_sketch(sketch: Sketch, size: int = 448) -> RasterImage:
    """Black stroke drawing of the sketch curves on white, 5% margin."""
    chains = _sketch_polylines(sketch)
    pts = np.concatenate(chains)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = max(float((hi - lo).max()), 1e-9)
    scale = (size * 0.9) / span
    mid = (hi + lo) / 2.0
    img = _blank(size)
    center = size / 2.0
    for chain in chains:
        xs = np.rint(center + (chain[:, 0] - mid[0]) * scale).astype(int)
        ys = np.rint(center - (chain[:, 1] - mid[1]) * scale).astype(int)
        for x, y in zip(xs, ys):
            _paint_square(img, int(x), int(y), 1, (0, 0, 0), 1.0)
    return RasterImage(width=size, height=size, pixels=img)
