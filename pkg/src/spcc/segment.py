"""Partition a model into components.

A component is normally a single sketch-extrude pair. A maximal run of
consecutive pairs that are equivalent up to the sketch plane origin collapses
into one component when the run is strictly longer than the threshold
(default 3), e.g. bolt circles made of many identical cylinders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import CadModel, SketchExtrudePair, pairs_equivalent_mod_origin


@dataclass(frozen=True)
class Component:
    start: int
    stop: int  # exclusive
    multiplicity: int
    representative: SketchExtrudePair

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.stop)


def segment(model: CadModel, threshold: int = 3) -> list[Component]:
    """Ordered, lossless partition of the model's pair indices."""
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    pairs = model.pairs
    out: list[Component] = []
    i = 0
    while i < len(pairs):
        j = i + 1
        while j < len(pairs) and pairs_equivalent_mod_origin(pairs[i], pairs[j]):
            j += 1
        run = j - i
        if run > threshold:
            out.append(Component(i, j, run, pairs[i]))
        else:
            out.extend(Component(k, k + 1, 1, pairs[k]) for k in range(i, j))
        i = j
    return out


# World axis per label: +Z up, -Z down, +X right, -X left, +Y back, -Y front.
DIRECTION_AXES: tuple[tuple[str, tuple[float, float, float]], ...] = (
    ("up", (0.0, 0.0, 1.0)),
    ("down", (0.0, 0.0, -1.0)),
    ("right", (1.0, 0.0, 0.0)),
    ("left", (-1.0, 0.0, 0.0)),
    ("back", (0.0, 1.0, 0.0)),
    ("front", (0.0, -1.0, 0.0)),
)


def extrusion_direction_label(pair: SketchExtrudePair,
                              tolerance_deg: float = 5.0) -> str | None:
    """Name of the world axis the extrusion normal points along, if any."""
    from .geometry import plane_frame

    nx, ny, nz = plane_frame(pair.extrude).n
    cos_tol = math.cos(math.radians(tolerance_deg))
    for label, (ax, ay, az) in DIRECTION_AXES:
        if nx * ax + ny * ay + nz * az >= cos_tol:
            return label
    return None
