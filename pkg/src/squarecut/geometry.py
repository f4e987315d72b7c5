"""Template polygons and radial ray casting.

The segmentation grid is built from rays fanned out of a seed point through
a normalized template polygon. Each ray keeps the same number of nodes, but
node spacing follows the template contour distance, so sampling is
non-uniform across rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateRay, DegenerateTemplate, NoIntersection

_PARALLEL_EPS = 1e-12
_FORWARD_EPS = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class TemplatePolygon:
    """Closed polygon given by clockwise corners (image convention, y down).

    The last corner implicitly connects back to the first.
    """

    corners: np.ndarray  # (n, 2) float64

    def __post_init__(self):
        corners = np.asarray(self.corners, dtype=np.float64)
        if corners.ndim != 2 or corners.shape[1] != 2:
            raise ValueError("corners must be an (n, 2) array")
        if corners.shape[0] < 3:
            raise ValueError("template needs at least 3 corners")
        if not np.all(np.isfinite(corners)):
            raise ValueError("template corners must be finite")
        nxt = np.roll(corners, -1, axis=0)
        if np.any(np.all(corners == nxt, axis=1)):
            raise ValueError("consecutive template corners must be distinct")
        # Standard shoelace sum is >= 0 exactly for clockwise order when the
        # y axis points down; the y-down signed area is its negation.
        shoelace = np.sum(corners[:, 0] * nxt[:, 1] - nxt[:, 0] * corners[:, 1])
        if shoelace < 0:
            raise ValueError("template corners must be ordered clockwise (y-down)")
        object.__setattr__(self, "corners", corners)

    @property
    def corner_count(self) -> int:
        return self.corners.shape[0]

    def signed_area(self) -> float:
        """Signed area under the y-down image convention (<= 0 for clockwise)."""
        nxt = np.roll(self.corners, -1, axis=0)
        shoelace = np.sum(self.corners[:, 0] * nxt[:, 1] - nxt[:, 0] * self.corners[:, 1])
        return -0.5 * float(shoelace)


def square_template(half_side: float = 1.0) -> TemplatePolygon:
    h = float(half_side)
    return TemplatePolygon(np.array([[-h, -h], [h, -h], [h, h], [-h, h]]))


def rectangle_template(half_width: float, half_height: float) -> TemplatePolygon:
    w, h = float(half_width), float(half_height)
    return TemplatePolygon(np.array([[-w, -h], [w, -h], [w, h], [-w, h]]))


def regular_polygon_template(sides: int, radius: float = 1.0) -> TemplatePolygon:
    # Clockwise under y-down means increasing angle with y pointing down.
    ang = 2.0 * np.pi * np.arange(sides) / sides
    pts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return TemplatePolygon(pts)


def parse_template(text: str) -> TemplatePolygon:
    """Parse the plain-text template format: one "x y" pair per line,
    clockwise order, '#' starts a comment."""
    pts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"template line {lineno}: expected 'x y', got {raw!r}")
        pts.append([float(parts[0]), float(parts[1])])
    if len(pts) < 3:
        raise ValueError("template file must list at least 3 corners")
    return TemplatePolygon(np.array(pts, dtype=np.float64))


def template_to_text(poly: TemplatePolygon) -> str:
    lines = [f"{float(x)!r} {float(y)!r}" for x, y in poly.corners]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RayFan:
    """Equally spaced rays from a seed with per-ray contour distances.

    node_positions is filled by sample_nodes and has shape
    (ray_count, nodes_per_ray, 2); node z of ray r sits at distance
    (z+1)/Z * intersect_dist[r] from the seed.
    """

    seed: Point2
    ray_count: int
    angle_offset: float
    directions: np.ndarray      # (R, 2) unit vectors
    intersect_dist: np.ndarray  # (R,) distances seed -> scaled contour
    nodes_per_ray: int = 0
    node_positions: Optional[np.ndarray] = None


def centroid(poly: TemplatePolygon) -> Point2:
    """Vertex mean of the corners (the template's center of gravity)."""
    cx, cy = poly.corners.mean(axis=0)
    return Point2(float(cx), float(cy))


def normalize_template(poly: TemplatePolygon) -> TemplatePolygon:
    """Translate the centroid to the origin and scale the farthest corner to
    distance exactly 1."""
    c = centroid(poly)
    shifted = poly.corners - np.array([c.x, c.y])
    rmax = float(np.max(np.hypot(shifted[:, 0], shifted[:, 1])))
    if rmax <= 0.0:
        raise DegenerateTemplate("all corners coincide with the centroid")
    return TemplatePolygon(shifted / rmax)


def ray_segment_intersection(
    origin: Point2,
    direction: Sequence[float],
    a: Point2,
    b: Point2,
) -> Optional[float]:
    """Smallest t > 0 with origin + t*direction on segment [a, b], or None.

    direction must be unit length so t is a distance.
    """
    ox, oy = origin
    dx, dy = float(direction[0]), float(direction[1])
    ex, ey = b[0] - a[0], b[1] - a[1]
    rx, ry = a[0] - ox, a[1] - oy
    denom = dx * ey - dy * ex
    if abs(denom) < _PARALLEL_EPS:
        # Parallel. On the collinear sub-case the segment endpoints project
        # onto the ray directly; otherwise there is no hit.
        if abs(rx * dy - ry * dx) >= _PARALLEL_EPS:
            return None
        ta = rx * dx + ry * dy
        tb = (b[0] - ox) * dx + (b[1] - oy) * dy
        hits = [t for t in (ta, tb) if t > _FORWARD_EPS]
        return min(hits) if hits else None
    t = (rx * ey - ry * ex) / denom
    u = (rx * dy - ry * dx) / denom
    if t > _FORWARD_EPS and -1e-12 <= u <= 1.0 + 1e-12:
        return float(t)
    return None


def cast_rays(
    poly_normalized: TemplatePolygon,
    seed: Point2,
    radius_scale: float,
    ray_count: int,
    angle_offset: float = 0.0,
) -> RayFan:
    """Send rays radially from the seed through the scaled template contour.

    intersect_dist[r] is radius_scale times the smallest positive
    intersection parameter of ray r with any template edge.
    """
    if ray_count < 3:
        raise ValueError("need at least 3 rays")
    if radius_scale <= 0:
        raise ValueError("radius_scale must be positive")
    angles = angle_offset + 2.0 * np.pi * np.arange(ray_count) / ray_count
    directions = np.column_stack([np.cos(angles), np.sin(angles)])

    corners = poly_normalized.corners
    nxt = np.roll(corners, -1, axis=0)
    origin = Point2(0.0, 0.0)
    dists = np.empty(ray_count, dtype=np.float64)
    for r in range(ray_count):
        best = math.inf
        for k in range(corners.shape[0]):
            t = ray_segment_intersection(
                origin, directions[r], Point2(*corners[k]), Point2(*nxt[k])
            )
            if t is not None and t < best:
                best = t
        if not math.isfinite(best):
            raise NoIntersection(f"ray {r} does not hit the template contour")
        dists[r] = radius_scale * best
    return RayFan(
        seed=Point2(float(seed[0]), float(seed[1])),
        ray_count=ray_count,
        angle_offset=float(angle_offset),
        directions=directions,
        intersect_dist=dists,
    )


def sample_nodes(fan: RayFan, nodes_per_ray: int) -> RayFan:
    """Place nodes_per_ray nodes on every ray; the outermost node falls
    exactly on the scaled template contour, the seed itself gets no node."""
    if nodes_per_ray < 1:
        raise ValueError("need at least 1 node per ray")
    if np.any(fan.intersect_dist <= 0):
        bad = int(np.argmax(fan.intersect_dist <= 0))
        raise DegenerateRay(f"ray {bad} has zero contour distance")
    fractions = np.arange(1, nodes_per_ray + 1, dtype=np.float64) / nodes_per_ray
    radii = fan.intersect_dist[:, None] * fractions[None, :]        # (R, Z)
    offsets = radii[:, :, None] * fan.directions[:, None, :]        # (R, Z, 2)
    positions = np.array([fan.seed.x, fan.seed.y]) + offsets
    return replace(fan, nodes_per_ray=nodes_per_ray, node_positions=positions)
