"""Cost and weight grids over the (ray, level) lattice, and the capacitated
flow network that encodes boundary contiguity and inter-ray stiffness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Point2, RayFan, TemplatePolygon, square_template
from .imaging import GrayImage, sample_intensities
from .maxflow import INF, FlowNetwork


@dataclass(frozen=True)
class SegParams:
    """Knobs of one segmentation run.

    delta bounds the per-step level change of the boundary between circularly
    adjacent rays (0 forces the exact template shape). radius_scale is the
    distance from seed to the scaled template's farthest corner, in pixels;
    pick it so the template encloses the target object.
    """

    rays: int = 30
    nodes_per_ray: int = 30
    delta: int = 4
    radius_scale: float = 35.0
    patch_size: int = 5
    sampling: str = "nearest"
    smoothing_iterations: int = 1
    template: TemplatePolygon = field(default_factory=square_template)
    angle_offset: float = 0.0

    def __post_init__(self):
        if self.rays < 3:
            raise ValueError("rays must be >= 3")
        if self.nodes_per_ray < 2:
            raise ValueError("nodes_per_ray must be >= 2")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.radius_scale <= 0:
            raise ValueError("radius_scale must be positive")
        if self.patch_size < 1 or self.patch_size % 2 == 0:
            raise ValueError("patch_size must be odd and >= 1")
        if self.sampling not in ("nearest", "bilinear"):
            raise ValueError("sampling must be 'nearest' or 'bilinear'")
        if self.smoothing_iterations < 0:
            raise ValueError("smoothing_iterations must be >= 0")


@dataclass(frozen=True)
class CostGrid:
    """Per-node deviation from the seed-patch mean, |mean - intensity|."""

    values: np.ndarray  # (R, Z) float64
    mean_intensity: float


@dataclass(frozen=True)
class WeightGrid:
    """Along-ray forward differences of a cost grid.

    w[r][0] = c[r][0] and w[r][z] = c[r][z] - c[r][z-1] for z > 0, so column
    prefix sums recover the costs.
    """

    values: np.ndarray  # (R, Z) float64


def estimate_mean(img: GrayImage, seed: Point2, patch_size: int) -> float:
    """Mean intensity of the patch_size x patch_size window centered on the
    pixel nearest the seed, replicating the border at image edges."""
    if patch_size < 1 or patch_size % 2 == 0:
        raise ValueError("patch_size must be odd and >= 1")
    h, w = img.pixels.shape
    cx = int(np.clip(math.floor(seed[0] + 0.5), 0, w - 1))
    cy = int(np.clip(math.floor(seed[1] + 0.5), 0, h - 1))
    half = patch_size // 2
    xs = np.clip(np.arange(cx - half, cx + half + 1), 0, w - 1)
    ys = np.clip(np.arange(cy - half, cy + half + 1), 0, h - 1)
    return float(img.pixels[np.ix_(ys, xs)].mean())


def compute_costs(img: GrayImage, fan: RayFan, mean: float, mode: str = "nearest") -> CostGrid:
    if fan.node_positions is None:
        raise ValueError("ray fan has no sampled nodes")
    sampled = sample_intensities(img, fan.node_positions, mode)
    return CostGrid(np.abs(mean - sampled), float(mean))


def compute_weights(costs: CostGrid) -> WeightGrid:
    c = costs.values
    w = np.empty_like(c)
    w[:, 0] = c[:, 0]
    if c.shape[1] > 1:
        w[:, 1:] = np.diff(c, axis=1)
    return WeightGrid(w)


def boundary_seeking_costs(costs: CostGrid) -> CostGrid:
    """Negate deviation costs for network construction.

    The min-cut machinery minimizes the summed cost of the per-ray boundary
    nodes; the segmentation boundary has to sit where the deviation from the
    object mean is largest (the first background-like sample along each ray).
    Feeding the negated grid turns that into the minimized objective while
    leaving the solver untouched.
    """
    return CostGrid(-costs.values, costs.mean_intensity)


def grid_node_id(ray: int, level: int, nodes_per_ray: int) -> int:
    """Flat node index of grid node (ray, level) inside the flow network."""
    return ray * nodes_per_ray + level


def build_network(weights: WeightGrid, delta: int) -> FlowNetwork:
    """Translate a weight grid into the s-t network.

    Arcs:
      * infinite z-arcs (r,z) -> (r,z-1) keep each ray's source side a prefix;
      * infinite r-arcs (r,z) -> (r+-1 mod R, max(0, z-delta)) cap the level
        stagger between circularly adjacent rays at delta;
      * one terminal arc per grid node: s -> node with capacity -w when the
        weight is negative, node -> t with capacity w otherwise;
      * a single infinite forcing arc s -> (0,0). Base nodes are strongly
        connected through base-level r-arcs, so this one arc keeps every ray's
        base node on the source side and the closed set non-empty.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    w = weights.values
    rays, levels = w.shape
    if rays < 3:
        raise ValueError("need at least 3 rays")
    net = FlowNetwork(rays * levels)

    ids = np.arange(rays * levels, dtype=np.int64).reshape(rays, levels)
    zz = np.broadcast_to(np.arange(levels, dtype=np.int64), (rays, levels))

    if levels > 1:
        net.add_arcs(ids[:, 1:].ravel(), ids[:, :-1].ravel(), INF)

    target_level = np.maximum(0, zz - delta)
    for step in (1, -1):
        neighbor = (np.arange(rays, dtype=np.int64) + step) % rays
        dst = neighbor[:, None] * levels + target_level
        net.add_arcs(ids.ravel(), dst.ravel(), INF)

    flat_w = w.ravel()
    neg = flat_w < 0
    if np.any(neg):
        node = np.flatnonzero(neg)
        net.add_arcs(np.full(node.size, net.source, dtype=np.int64), node, -flat_w[neg])
    if np.any(~neg):
        node = np.flatnonzero(~neg)
        net.add_arcs(node, np.full(node.size, net.sink, dtype=np.int64), flat_w[~neg])

    net.add_arc(net.source, grid_node_id(0, 0, levels), INF)
    return net
