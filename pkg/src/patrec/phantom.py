"""Initial-pressure generators and raster import.

Everything returns an :class:`~patrec.core.ImageGrid` with values in [0, 1]
and support kept inside the inscribed circle of the ROI, so any ROI that
fits inside the sensor array keeps its phantom inside the array too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ImageGrid

# generated phantoms stay inside this fraction of the ROI half-side
SUPPORT_MARGIN = 0.92
VASCULAR_FILL_LO = 0.005
VASCULAR_FILL_HI = 0.05
_VASCULAR_FILL_TARGET = 0.02


@dataclass
class PhantomSpec:
    """Declarative phantom description used by scenario files."""

    kind: str  # point | disc | vascular | raster
    params: dict = field(default_factory=dict)
    amplitude: float = 1.0

    def build(self, roi: ImageGrid) -> ImageGrid:
        p = self.params
        if self.kind == "point":
            grid = make_point((p["x"], p["y"]), roi)
        elif self.kind == "disc":
            grid = make_disc((p["x"], p["y"]), p["radius"], roi)
        elif self.kind == "vascular":
            grid = make_vascular(int(p.get("seed", 0)), roi, int(p.get("branches", 12)))
        elif self.kind == "raster":
            grid = load_raster(p["path"], roi)
        else:
            raise ValueError(f"unknown phantom kind {self.kind!r}")
        if self.amplitude != 1.0:
            grid = grid.with_values(grid.values * self.amplitude)
        return grid


def make_point(a, roi: ImageGrid) -> ImageGrid:
    """Single unit pixel at the grid point nearest to a; errors outside the ROI."""
    grid = roi.blank_like()
    iy, ix = grid.nearest_index(a)
    grid.values[iy, ix] = 1.0
    return grid


def make_disc(center, radius: float, roi: ImageGrid) -> ImageGrid:
    """Filled unit disc; at least the nearest pixel is set even if radius < pitch."""
    if radius <= 0:
        raise ValueError("disc radius must be positive")
    grid = roi.blank_like()
    x, y = grid.pixel_centers()
    mask = np.hypot(x - center[0], y - center[1]) <= radius
    if not mask.any():
        iy, ix = grid.nearest_index(center)
        mask[iy, ix] = True
    grid.values[mask] = 1.0
    return grid


def make_vascular(seed: int, roi: ImageGrid, branches: int = 12) -> ImageGrid:
    """Seeded random-walk vessel tree, values in {0, 1}.

    A binary tree of jittered segments is stamped with 1-3 pixel wide discs;
    segment budgets adapt so the nonzero fraction lands in
    [VASCULAR_FILL_LO, VASCULAR_FILL_HI] regardless of seed. Deterministic
    in (seed, roi spec, branches).
    """
    if branches < 1:
        raise ValueError("need at least one branch")
    rng = np.random.default_rng(seed)
    m = roi.m
    grid = roi.blank_like()
    ink = grid.values  # stamped in place
    r_max = SUPPORT_MARGIN * (m / 2.0 - 2.0)
    target_px = _VASCULAR_FILL_TARGET * m * m
    center = (m - 1) / 2.0

    def stamp(cy, cx, width):
        rad = max(0.5, width / 2.0)
        lo_y, hi_y = int(np.floor(cy - rad)), int(np.ceil(cy + rad)) + 1
        lo_x, hi_x = int(np.floor(cx - rad)), int(np.ceil(cx + rad)) + 1
        for yy in range(max(0, lo_y), min(m, hi_y)):
            for xx in range(max(0, lo_x), min(m, hi_x)):
                if (yy - cy) ** 2 + (xx - cx) ** 2 <= rad * rad:
                    ink[yy, xx] = 1.0

    # root starts near the center, heading in a random direction
    start = center + rng.uniform(-0.15, 0.15, size=2) * m
    queue = [(start[1], start[0], rng.uniform(0, 2 * np.pi), 0)]
    segments_done = 0
    mean_width = 2.0
    steps_per_segment = max(8, int(target_px / (branches * mean_width)))
    while queue and segments_done < branches:
        cy, cx, direction, depth = queue.pop(0)
        width = max(1.0, 3.0 - depth)
        for _ in range(steps_per_segment):
            stamp(cy, cx, width)
            direction += rng.normal(0.0, 0.18)
            # steer back toward the center near the support boundary
            off_y, off_x = cy - center, cx - center
            if np.hypot(off_y, off_x) > r_max:
                direction = np.arctan2(-off_y, -off_x) + rng.normal(0.0, 0.3)
            cy += np.sin(direction)
            cx += np.cos(direction)
            if ink.sum() >= VASCULAR_FILL_HI * 0.8 * m * m:
                break
        segments_done += 1
        if ink.sum() >= VASCULAR_FILL_HI * 0.8 * m * m:
            break
        split = rng.uniform(0.35, 0.8)
        queue.append((cy, cx, direction + split, depth + 1))
        queue.append((cy, cx, direction - split, depth + 1))
    # top up tiny trees so the fill-fraction invariant holds for any seed
    while ink.sum() < VASCULAR_FILL_LO * 1.2 * m * m:
        cy, cx = center + rng.uniform(-0.6, 0.6, 2) * r_max
        direction = rng.uniform(0, 2 * np.pi)
        for _ in range(steps_per_segment):
            stamp(cy, cx, 1.0)
            direction += rng.normal(0.0, 0.18)
            off_y, off_x = cy - center, cx - center
            if np.hypot(off_y, off_x) > r_max:
                direction = np.arctan2(-off_y, -off_x)
            cy += np.sin(direction)
            cx += np.cos(direction)
    return grid


def load_raster(path, roi: ImageGrid) -> ImageGrid:
    """Grayscale 8/16-bit PGM or PNG mapped to [0, 1] and bilinearly resampled."""
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            src = np.asarray(img, dtype=np.float64) / 255.0
        elif img.mode in ("I", "I;16", "I;16B"):
            src = np.asarray(img, dtype=np.float64) / 65535.0
        else:
            raise ValueError(f"raster must be grayscale, got mode {img.mode!r}")
    src = np.clip(src, 0.0, 1.0)
    h, w = src.shape
    m = roi.m
    # align pixel centers of both rasters over the same square
    fy = (np.arange(m) + 0.5) * h / m - 0.5
    fx = (np.arange(m) + 0.5) * w / m - 0.5
    y0 = np.clip(np.floor(fy).astype(int), 0, h - 2)
    x0 = np.clip(np.floor(fx).astype(int), 0, w - 2)
    ty = np.clip(fy - y0, 0.0, 1.0)[:, None]
    tx = np.clip(fx - x0, 0.0, 1.0)[None, :]
    out = (
        src[np.ix_(y0, x0)] * (1 - ty) * (1 - tx)
        + src[np.ix_(y0, x0 + 1)] * (1 - ty) * tx
        + src[np.ix_(y0 + 1, x0)] * ty * (1 - tx)
        + src[np.ix_(y0 + 1, x0 + 1)] * ty * tx
    )
    return roi.with_values(out)
