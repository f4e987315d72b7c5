"""Boundary levels to closed contours, kernel smoothing, and rasterization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .geometry import Point2, RayFan
from .imaging import BinaryMask

SMOOTHING_KERNEL = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class RadialProfile:
    """One boundary radius per ray, anchored at the seed."""

    radii: np.ndarray       # (R,) positive
    seed: Point2
    directions: np.ndarray  # (R, 2) unit vectors


@dataclass(frozen=True)
class Contour:
    """Closed polygon through one boundary point per ray, in ray order."""

    points: np.ndarray  # (R, 2)

    def to_csv(self) -> str:
        lines = [f"{float(x)!r},{float(y)!r}" for x, y in self.points]
        return "\n".join(lines) + "\n"


def boundary_to_profile(fan: RayFan, boundary: np.ndarray) -> RadialProfile:
    """radii[r] = (b(r)+1) * intersect_dist[r] / Z."""
    if fan.nodes_per_ray < 1:
        raise ValueError("ray fan has no sampled nodes")
    b = np.asarray(boundary, dtype=np.int64)
    if b.shape != (fan.ray_count,):
        raise ValueError("boundary length must equal the ray count")
    if b.min() < 0 or b.max() >= fan.nodes_per_ray:
        raise ValueError("boundary level out of range")
    radii = (b + 1) * fan.intersect_dist / fan.nodes_per_ray
    return RadialProfile(radii, fan.seed, fan.directions)


def smooth_profile(profile: RadialProfile, iterations: int) -> RadialProfile:
    """Circularly convolve the radii with the [0.25 0.5 0.25] kernel."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    left, center, right = SMOOTHING_KERNEL
    radii = profile.radii
    for _ in range(iterations):
        radii = left * np.roll(radii, 1) + center * radii + right * np.roll(radii, -1)
    return RadialProfile(radii, profile.seed, profile.directions)


def profile_to_contour(profile: RadialProfile) -> Contour:
    pts = np.array([profile.seed.x, profile.seed.y]) + profile.radii[:, None] * profile.directions
    return Contour(pts)


def rasterize_polygon(
    points: np.ndarray,
    width: int,
    height: int,
    spacing: Tuple[float, float] = (1.0, 1.0),
    slice_thickness: float = 1.0,
) -> BinaryMask:
    """Even-odd scanline fill at pixel centers with a half-open convention:
    centers exactly on a left or top boundary are in, right or bottom out."""
    if width <= 0 or height <= 0:
        raise ValueError("mask dimensions must be positive")
    pts = np.asarray(points, dtype=np.float64)
    bits = np.zeros((height, width), dtype=bool)
    if pts.ndim != 2 or pts.shape[0] < 3:
        return BinaryMask(bits, spacing, slice_thickness)

    x0 = pts[:, 0]
    y0 = pts[:, 1]
    x1 = np.roll(x0, -1)
    y1 = np.roll(y0, -1)
    keep = y0 != y1  # horizontal edges never cross a scanline
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    if x0.size == 0:
        return BinaryMask(bits, spacing, slice_thickness)

    ymin = max(0, int(math.ceil(min(y0.min(), y1.min()))))
    ymax = min(height - 1, int(math.floor(max(y0.max(), y1.max()))))
    for row in range(ymin, ymax + 1):
        # half-open in y: the min-y endpoint of an edge counts, the max-y doesn't
        crossing = ((y0 <= row) & (row < y1)) | ((y1 <= row) & (row < y0))
        if not crossing.any():
            continue
        xs = x0[crossing] + (row - y0[crossing]) * (x1[crossing] - x0[crossing]) / (
            y1[crossing] - y0[crossing]
        )
        xs.sort()
        for k in range(0, xs.size - 1, 2):
            lo = int(math.ceil(xs[k]))
            hi = int(math.ceil(xs[k + 1]))  # exclusive
            if hi > 0 and lo < width:
                bits[row, max(lo, 0) : min(hi, width)] = True
    return BinaryMask(bits, spacing, slice_thickness)


def profile_to_mask(
    profile: RadialProfile,
    width: int,
    height: int,
    spacing: Tuple[float, float] = (1.0, 1.0),
    slice_thickness: float = 1.0,
) -> BinaryMask:
    """Rasterize the closed contour polygon traced by the profile."""
    contour = profile_to_contour(profile)
    return rasterize_polygon(contour.points, width, height, spacing, slice_thickness)
