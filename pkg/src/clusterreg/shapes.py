"""Built-in synthetic shapes used as registration fixtures.

All shapes are centered at the origin with unit RMS radius, so distances on
them read directly as normalized units.
"""

from __future__ import annotations

import numpy as np

from .core import PointSet

RING = "ring"
GRID = "grid"
SPHERE = "sphere"

BUILTIN = (RING, GRID, SPHERE)


def ring(count: int = 500) -> PointSet:
    """Evenly spaced points on the unit circle (2-D)."""
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    return PointSet(np.stack([np.cos(theta), np.sin(theta)], axis=1))


def grid(count: int = 500) -> PointSet:
    """Roughly square 2-D lattice, rescaled to unit RMS radius."""
    side = max(2, round(np.sqrt(count)))
    axis = np.linspace(-1.0, 1.0, side)
    xx, yy = np.meshgrid(axis, axis)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)[:count]
    pts = pts - pts.mean(axis=0)
    rms = np.sqrt(np.mean(np.sum(pts * pts, axis=1)))
    return PointSet(pts / rms)


def sphere(count: int = 1000) -> PointSet:
    """Fibonacci sampling of the unit sphere (3-D)."""
    i = np.arange(count, dtype=np.float64)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    z = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return PointSet(np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1))


def make_shape(name: str, count: int) -> PointSet:
    if name == RING:
        return ring(count)
    if name == GRID:
        return grid(count)
    if name == SPHERE:
        return sphere(count)
    raise ValueError(f"unknown builtin shape {name!r}; choose from {BUILTIN}")
