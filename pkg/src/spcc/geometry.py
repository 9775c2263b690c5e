"""Voxel realization of sketch-extrude sequences.

Continuous-space conventions, frozen so that independent reimplementations
can reproduce occupancies bit for bit:

* One quantization unit is 1/255 of model length. Plane origins dequantize
  to (q + 128) / 255; sketch coordinates stay relative to the recentered
  origin, i.e. a stored coordinate q sits at q / 255 in the sketch plane
  before the profile scale is applied.
* The plane frame comes from intrinsic Z(theta).Y(phi).X(gamma) rotations of
  the identity frame u=+X, v=+Y, n=+Z.
* A point is inside a pair's solid when its frame-local normal coordinate is
  within the extent interval (one-sided [0, e1], symmetric [-e1/2, +e1/2],
  two-sided [-e2, +e1], closed on both ends) and (x / s) * 255 lands inside
  the sketch region, evaluated in quantized units.
* Region membership is even-odd over the loops: circle loops by a strict
  distance test, chains by horizontal ray crossing with half-open vertical
  spans, arcs split into y-monotone pieces first.
* Boolean folding in sequence order: NewBody and Join are union, Cut is
  difference, Intersect is intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

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
    dequantize,
    require_valid,
    validate_static,
)

STEP = 1.0 / 255.0


class EmptySolidError(ValueError):
    """An operation needed occupied voxels and found none."""


@dataclass(frozen=True)
class PlaneFrame:
    origin: tuple[float, float, float]
    u: tuple[float, float, float]
    v: tuple[float, float, float]
    n: tuple[float, float, float]


def plane_frame(extrude: ExtrudeCmd) -> PlaneFrame:
    """Sketch plane frame from the Euler angles and quantized origin."""
    th = math.radians(extrude.orient[0])
    ph = math.radians(extrude.orient[1])
    ga = math.radians(extrude.orient[2])
    cz, sz = math.cos(th), math.sin(th)
    cy, sy = math.cos(ph), math.sin(ph)
    cx, sx = math.cos(ga), math.sin(ga)
    u = (cz * cy, sz * cy, -sy)
    v = (cz * sy * sx - sz * cx, sz * sy * sx + cz * cx, cy * sx)
    n = (cz * sy * cx + sz * sx, sz * sy * cx - cz * sx, cy * cx)
    origin = (dequantize(extrude.origin[0], recenter=True, name="origin.x"),
              dequantize(extrude.origin[1], recenter=True, name="origin.y"),
              dequantize(extrude.origin[2], recenter=True, name="origin.z"))
    return PlaneFrame(origin=origin, u=u, v=v, n=n)


def extent_interval(extrude: ExtrudeCmd) -> tuple[float, float]:
    """Continuous extent interval along the plane normal."""
    e1 = extrude.dist1 / 255.0
    e2 = extrude.dist2 / 255.0
    if extrude.extent is ExtentKind.ONE_SIDED:
        return (0.0, e1)
    if extrude.extent is ExtentKind.SYMMETRIC:
        half = e1 / 2.0
        return (-half, half)
    return (-e2, e1)


# ---------------------------------------------------------------------------
# Sketch regions (quantized units)

def arc_geometry(start: tuple[float, float], end: tuple[float, float],
                 sweep_deg: int, ccw: bool) -> tuple[float, float, float, float, float]:
    """Circle center, radius, start angle and signed sweep (radians) of an arc.

    The chord and the subtended angle fix the circle; the center sits on the
    chord bisector at a signed offset that flips side automatically when the
    sweep passes 180 degrees.
    """
    sx, sy = float(start[0]), float(start[1])
    ex, ey = float(end[0]), float(end[1])
    dx = ex - sx
    dy = ey - sy
    chord = math.sqrt(dx * dx + dy * dy)
    half = math.radians(sweep_deg) / 2.0
    r = chord / (2.0 * math.sin(half))
    h = chord / (2.0 * math.tan(half))
    mx = (sx + ex) / 2.0
    my = (sy + ey) / 2.0
    ux = -dy / chord
    uy = dx / chord
    if ccw:
        cx = mx + h * ux
        cy = my + h * uy
    else:
        cx = mx - h * ux
        cy = my - h * uy
    a0 = math.atan2(sy - cy, sx - cx)
    ss = math.radians(sweep_deg) if ccw else -math.radians(sweep_deg)
    return cx, cy, r, a0, ss


def arc_pieces(start: tuple[float, float], end: tuple[float, float],
               sweep_deg: int, ccw: bool) -> list[tuple[float, float, float, float, float, float]]:
    """Split an arc into y-monotone pieces (cx, cy, r, ya, yb, x_side).

    Pieces are cut at the circle's vertical extremes so each lies entirely in
    one horizontal half of its circle; the true quantized endpoints are kept
    exact at the arc ends so ray-crossing parity matches adjacent segments.
    """
    cx, cy, r, a0, ss = arc_geometry(start, end, sweep_deg, ccw)
    ts = [0.0, 1.0]
    for base in (math.pi / 2.0, -math.pi / 2.0):
        for k in range(-2, 3):
            t = (base + 2.0 * math.pi * k - a0) / ss
            if 0.0 < t < 1.0:
                ts.append(t)
    ts = sorted(set(ts))
    pts = []
    for t in ts:
        if t == 0.0:
            pts.append((float(start[0]), float(start[1])))
        elif t == 1.0:
            pts.append((float(end[0]), float(end[1])))
        else:
            ang = a0 + ss * t
            pts.append((cx + r * math.cos(ang), cy + r * math.sin(ang)))
    pieces = []
    for i in range(len(ts) - 1):
        mid = a0 + ss * ((ts[i] + ts[i + 1]) / 2.0)
        side = 1.0 if math.cos(mid) >= 0.0 else -1.0
        pieces.append((cx, cy, r, pts[i][1], pts[i + 1][1], side))
    return pieces


def _loop_pieces(loop: Loop):
    """Precompute the crossing primitives of one loop."""
    first = loop.curves[0]
    if isinstance(first, Circle):
        return ("circle", (float(first.center[0]), float(first.center[1]),
                           float(first.radius)))
    lines: list[tuple[float, float, float, float]] = []
    arcs: list[tuple[float, float, float, float, float, float]] = []
    pos = (0.0, 0.0)
    for curve in loop.curves:
        end = (float(curve.end[0]), float(curve.end[1]))
        if isinstance(curve, Line):
            lines.append((pos[0], pos[1], end[0], end[1]))
        else:
            arcs.extend(arc_pieces(pos, end, curve.sweep, curve.ccw))
        pos = end
    return ("chain", (lines, arcs))


def _loop_inside(pieces, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    kind, payload = pieces
    if kind == "circle":
        cx, cy, r = payload
        dx = xs - cx
        dy = ys - cy
        return dx * dx + dy * dy < r * r
    lines, arcs = payload
    crossings = np.zeros(xs.shape, dtype=np.int64)
    for x1, y1, x2, y2 in lines:
        if y1 == y2:
            continue
        span = ((y1 <= ys) & (ys < y2)) | ((y2 <= ys) & (ys < y1))
        xi = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
        crossings += (span & (xi > xs)).astype(np.int64)
    for cx, cy, r, ya, yb, side in arcs:
        span = ((ya <= ys) & (ys < yb)) | ((yb <= ys) & (ys < ya))
        t = r * r - (ys - cy) * (ys - cy)
        xi = cx + side * np.sqrt(np.maximum(t, 0.0))
        crossings += (span & (xi > xs)).astype(np.int64)
    return (crossings & 1).astype(bool)


def points_in_sketch(sketch: Sketch, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Even-odd membership for arrays of points in quantized units."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = np.zeros(xs.shape, dtype=bool)
    for loop in sketch.loops:
        inside ^= _loop_inside(_loop_pieces(loop), xs, ys)
    return inside


def point_in_sketch(sketch: Sketch, p: tuple[float, float]) -> bool:
    """Scalar convenience wrapper over `points_in_sketch`."""
    return bool(points_in_sketch(sketch, np.array([p[0]], dtype=np.float64),
                                 np.array([p[1]], dtype=np.float64))[0])


def sketch_bbox(sketch: Sketch) -> tuple[float, float, float, float]:
    """Conservative bounding box of the sketch in quantized units."""
    xs: list[float] = []
    ys: list[float] = []
    for loop in sketch.loops:
        first = loop.curves[0]
        if isinstance(first, Circle):
            cx, cy, r = float(first.center[0]), float(first.center[1]), float(first.radius)
            xs.extend((cx - r, cx + r))
            ys.extend((cy - r, cy + r))
            continue
        pos = (0.0, 0.0)
        xs.append(0.0)
        ys.append(0.0)
        for curve in loop.curves:
            end = (float(curve.end[0]), float(curve.end[1]))
            if isinstance(curve, Arc):
                cx, cy, r, _, _ = arc_geometry(pos, end, curve.sweep, curve.ccw)
                xs.extend((cx - r, cx + r))
                ys.extend((cy - r, cy + r))
            xs.append(end[0])
            ys.append(end[1])
            pos = end
    return (min(xs), min(ys), max(xs), max(ys))


def sketch_region_empty(sketch: Sketch, resolution: int = 64) -> bool:
    """True when a resolution^2 probe grid over the bounding box finds no
    interior point."""
    x0, y0, x1, y1 = sketch_bbox(sketch)
    x0 -= 1.0
    y0 -= 1.0
    x1 += 1.0
    y1 += 1.0
    xs = x0 + (np.arange(resolution) + 0.5) * ((x1 - x0) / resolution)
    ys = y0 + (np.arange(resolution) + 0.5) * ((y1 - y0) / resolution)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return not points_in_sketch(sketch, gx.ravel(), gy.ravel()).any()


# ---------------------------------------------------------------------------
# Voxel evaluation

@dataclass(frozen=True, eq=False)
class VoxelSolid:
    resolution: int
    bounds: tuple[tuple[float, float, float], tuple[float, float, float]]
    occupancy: np.ndarray  # (res, res, res) bool

    @property
    def voxel_size(self) -> tuple[float, float, float]:
        lo, hi = self.bounds
        r = self.resolution
        return ((hi[0] - lo[0]) / r, (hi[1] - lo[1]) / r, (hi[2] - lo[2]) / r)

    @property
    def is_empty(self) -> bool:
        return not bool(self.occupancy.any())

    def occupied_count(self) -> int:
        return int(self.occupancy.sum())


def model_bounds(model: CadModel,
                 frames: Sequence[PlaneFrame] | None = None) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Padded axis-aligned box covering every pair's swept profile."""
    if frames is None:
        frames = [plane_frame(p.extrude) for p in model.pairs]
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    for pair, frame in zip(model.pairs, frames):
        bx0, by0, bx1, by1 = sketch_bbox(pair.sketch)
        s = pair.extrude.scale
        ax = (bx0 * s / 255.0, bx1 * s / 255.0)
        ay = (by0 * s / 255.0, by1 * s / 255.0)
        az = extent_interval(pair.extrude)
        o = np.array(frame.origin)
        u = np.array(frame.u)
        v = np.array(frame.v)
        n = np.array(frame.n)
        for a in ax:
            for b in ay:
                for c in az:
                    p = o + u * a + v * b + n * c
                    lo = np.minimum(lo, p)
                    hi = np.maximum(hi, p)
    pad = 0.02 * max(float((hi - lo).max()), 1e-3)
    lo -= pad
    hi += pad
    return (tuple(float(x) for x in lo), tuple(float(x) for x in hi))


def voxel_centers(bounds, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened center coordinates of a resolution^3 grid over `bounds`."""
    lo, hi = bounds
    axes = []
    for a in range(3):
        step = (hi[a] - lo[a]) / resolution
        axes.append(lo[a] + (np.arange(resolution) + 0.5) * step)
    gx, gy, gz = np.meshgrid(axes[0], axes[1], axes[2], indexing="ij")
    return gx.ravel(), gy.ravel(), gz.ravel()


def pair_mask(pair: SketchExtrudePair, frame: PlaneFrame,
              xs: np.ndarray, ys: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Membership of world points in one pair's extruded solid."""
    ox, oy, oz = frame.origin
    dx = xs - ox
    dy = ys - oy
    dz = zs - oz
    ux, uy, uz = frame.u
    vx, vy, vz = frame.v
    nx, ny, nz = frame.n
    lx = dx * ux + dy * uy + dz * uz
    ly = dx * vx + dy * vy + dz * vz
    ln = dx * nx + dy * ny + dz * nz
    lo, hi = extent_interval(pair.extrude)
    mask = (lo <= ln) & (ln <= hi)
    s = pair.extrude.scale
    qx = (lx / s) * 255.0
    qy = (ly / s) * 255.0
    return mask & points_in_sketch(pair.sketch, qx, qy)


def _fold(occ: np.ndarray, inside: np.ndarray, op: BooleanOp) -> np.ndarray:
    if op in (BooleanOp.NEW_BODY, BooleanOp.JOIN):
        return occ | inside
    if op is BooleanOp.CUT:
        return occ & ~inside
    return occ & inside


def evaluate_model(model: CadModel, resolution: int = 64,
                   bounds=None) -> VoxelSolid:
    """Fold the pairs' solids over a shared voxel grid in sequence order."""
    require_valid(model)
    frames = [plane_frame(p.extrude) for p in model.pairs]
    if bounds is None:
        bounds = model_bounds(model, frames)
    xs, ys, zs = voxel_centers(bounds, resolution)
    occ = np.zeros(xs.shape, dtype=bool)
    for pair, frame in zip(model.pairs, frames):
        occ = _fold(occ, pair_mask(pair, frame, xs, ys, zs), pair.extrude.boolean_op)
    return VoxelSolid(resolution=resolution, bounds=bounds,
                      occupancy=occ.reshape(resolution, resolution, resolution))


def evaluate_components(model: CadModel, spans: Sequence[tuple[int, int]],
                        resolution: int = 64, bounds=None
                        ) -> tuple[VoxelSolid, list[np.ndarray]]:
    """Folded solid plus each component's own (union) occupancy on one grid."""
    require_valid(model)
    frames = [plane_frame(p.extrude) for p in model.pairs]
    if bounds is None:
        bounds = model_bounds(model, frames)
    xs, ys, zs = voxel_centers(bounds, resolution)
    occ = np.zeros(xs.shape, dtype=bool)
    comp_occ = [np.zeros(xs.shape, dtype=bool) for _ in spans]
    comp_of_pair = {}
    for ci, (start, stop) in enumerate(spans):
        for k in range(start, stop):
            comp_of_pair[k] = ci
    for k, (pair, frame) in enumerate(zip(model.pairs, frames)):
        inside = pair_mask(pair, frame, xs, ys, zs)
        occ = _fold(occ, inside, pair.extrude.boolean_op)
        comp_occ[comp_of_pair[k]] |= inside
    shape = (resolution, resolution, resolution)
    solid = VoxelSolid(resolution=resolution, bounds=bounds, occupancy=occ.reshape(shape))
    return solid, [m.reshape(shape) for m in comp_occ]


def boundary_mask(occupancy: np.ndarray) -> np.ndarray:
    """Occupied voxels with at least one empty 6-neighbor (grid edges count
    as empty)."""
    padded = np.pad(occupancy, 1, constant_values=False)
    full = (padded[2:, 1:-1, 1:-1] & padded[:-2, 1:-1, 1:-1]
            & padded[1:-1, 2:, 1:-1] & padded[1:-1, :-2, 1:-1]
            & padded[1:-1, 1:-1, 2:] & padded[1:-1, 1:-1, :-2])
    return occupancy & ~full


def sample_surface_points(solid: VoxelSolid, n: int = 2000, seed: int = 0) -> np.ndarray:
    """Uniform seeded draw of n points from boundary voxels, jittered within
    half a voxel per axis."""
    if solid.is_empty:
        raise EmptySolidError("cannot sample points from an empty solid")
    idx = np.argwhere(boundary_mask(solid.occupancy))
    rng = np.random.default_rng(seed)
    pick = idx[rng.integers(0, len(idx), size=n)]
    lo = np.array(solid.bounds[0])
    size = np.array(solid.voxel_size)
    centers = lo + (pick + 0.5) * size
    jitter = rng.uniform(-0.5, 0.5, size=(n, 3)) * size
    return centers + jitter


class BuildCheck(NamedTuple):
    ok: bool
    reason: str


def check_buildable(model: CadModel, resolution: int = 64) -> BuildCheck:
    """Static validity, non-empty sketch regions, and a non-empty folded
    solid; failures come back as reasons, never exceptions."""
    violations = validate_static(model)
    if violations:
        v = violations[0]
        return BuildCheck(False, f"invalid: {v.where}: {v.message}")
    for i, pair in enumerate(model.pairs):
        if sketch_region_empty(pair.sketch, resolution):
            return BuildCheck(False, f"empty sketch region in pair {i}")
    if evaluate_model(model, resolution).is_empty:
        return BuildCheck(False, "empty solid")
    return BuildCheck(True, "")
