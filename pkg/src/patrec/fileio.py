"""File emitters shared by the CLI and the demos.

All writers are deterministic byte for byte for identical inputs: JSON keys
are sorted, floats use repr, and no timestamps appear in any data file.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import ImageGrid


def write_pgm(path, values: np.ndarray, lo: float | None = None, hi: float | None = None):
    """16-bit binary PGM (big-endian samples per the format spec).

    Values are linearly mapped from [lo, hi] (defaults: array min/max) to
    [0, 65535]. Returns the (lo, hi) mapping actually used so callers can
    record it in a sidecar.
    """
    v = np.asarray(values, dtype=np.float64)
    lo = float(v.min()) if lo is None else lo
    hi = float(v.max()) if hi is None else hi
    span = hi - lo
    if span <= 0:
        scaled = np.zeros_like(v, dtype=np.uint16)
    else:
        scaled = np.clip((v - lo) / span * 65535.0, 0, 65535).astype(np.uint16)
    with open(path, "wb") as f:
        f.write(f"P5\n{v.shape[1]} {v.shape[0]}\n65535\n".encode())
        f.write(scaled.astype(">u2").tobytes())
    return lo, hi


def write_image_csv(path, image: ImageGrid) -> None:
    """Raw pixel values, one grid row per line, with a small geometry header."""
    with open(path, "w") as f:
        f.write(f"# patrec image side={image.side!r} m={image.m}"
                f" origin={image.origin[0]!r},{image.origin[1]!r}\n")
        for row in image.values:
            f.write(",".join(repr(float(v)) for v in row))
            f.write("\n")


def read_image_csv(path) -> ImageGrid:
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f]
    header = next(ln for ln in lines if ln.startswith("# patrec image"))
    fields = dict(tok.split("=", 1) for tok in header[2:].split() if "=" in tok)
    ox, oy = (float(t) for t in fields["origin"].split(","))
    rows = [
        np.fromiter((float(v) for v in ln.split(",")), dtype=np.float64)
        for ln in lines
        if ln and not ln.startswith("#")
    ]
    values = np.vstack(rows)
    return ImageGrid(float(fields["side"]), int(fields["m"]), values, (ox, oy))


def write_json(path, payload: dict) -> None:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_profile_csv(path, offsets: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w") as f:
        f.write("offset_m,value\n")
        for o, v in zip(offsets, values):
            f.write(f"{float(o)!r},{float(v)!r}\n")


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
