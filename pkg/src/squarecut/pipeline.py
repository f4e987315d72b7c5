"""End-to-end segmentation: rays, costs, cut, contour, mask."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence

import numpy as np

from . import contour as contour_mod
from . import geometry, maxflow, segcore
from .errors import SeedOutOfImage
from .geometry import Point2
from .imaging import BinaryMask, GrayImage
from .maxflow import CutResult
from .segcore import SegParams


@dataclass(frozen=True)
class SegResult:
    params: SegParams
    seed: Point2
    mean_intensity: float
    boundary: np.ndarray
    contour_raw: contour_mod.Contour
    contour_smoothed: contour_mod.Contour
    mask: BinaryMask
    cut_cost: float
    timings_ms: Dict[str, float]


def network_cost_grid(img: GrayImage, seed: Point2, params: SegParams) -> segcore.CostGrid:
    """The cost grid the flow network is actually built from.

    The solver returns the closed set minimizing the summed cost of the
    per-ray boundary nodes, so the deviation grid goes in negated: the
    boundary then settles on the nodes deviating most from the seed-patch
    mean (the first background-like samples), which is the object border.
    """
    fan = _sampled_fan(img, seed, params)
    mean = segcore.estimate_mean(img, seed, params.patch_size)
    deviation = segcore.compute_costs(img, fan, mean, params.sampling)
    return segcore.boundary_seeking_costs(deviation)


def _sampled_fan(img: GrayImage, seed: Point2, params: SegParams) -> geometry.RayFan:
    normalized = geometry.normalize_template(params.template)
    fan = geometry.cast_rays(
        normalized, seed, params.radius_scale, params.rays, params.angle_offset
    )
    return geometry.sample_nodes(fan, params.nodes_per_ray)


def _check_seed(img: GrayImage, seed: Point2) -> Point2:
    x, y = float(seed[0]), float(seed[1])
    if not (0.0 <= x <= img.width - 1 and 0.0 <= y <= img.height - 1):
        raise SeedOutOfImage(f"seed ({x}, {y}) outside {img.width}x{img.height} image")
    return Point2(x, y)


def segment(img: GrayImage, seed: Point2, params: SegParams) -> SegResult:
    """Run one full segmentation; deterministic for fixed inputs."""
    seed = _check_seed(img, seed)

    t0 = time.perf_counter()
    fan = _sampled_fan(img, seed, params)
    mean = segcore.estimate_mean(img, seed, params.patch_size)
    deviation = segcore.compute_costs(img, fan, mean, params.sampling)
    net_costs = segcore.boundary_seeking_costs(deviation)
    weights = segcore.compute_weights(net_costs)
    net = segcore.build_network(weights, params.delta)
    t1 = time.perf_counter()

    flow = net.max_flow()
    source_set = net.min_cut_source_set()
    boundary = maxflow.extract_boundary(source_set, params.rays, params.nodes_per_ray)
    cut = CutResult(
        flow_value=flow,
        source_set=source_set[: params.rays * params.nodes_per_ray],
        boundary=boundary,
        cut_cost=float(
            net_costs.values[np.arange(params.rays), boundary].sum()
        ),
    )
    t2 = time.perf_counter()

    profile = contour_mod.boundary_to_profile(fan, cut.boundary)
    raw = contour_mod.profile_to_contour(profile)
    smoothed_profile = contour_mod.smooth_profile(profile, params.smoothing_iterations)
    smoothed = contour_mod.profile_to_contour(smoothed_profile)
    mask = contour_mod.profile_to_mask(
        smoothed_profile, img.width, img.height, img.spacing, img.slice_thickness
    )
    t3 = time.perf_counter()

    return SegResult(
        params=params,
        seed=seed,
        mean_intensity=mean,
        boundary=cut.boundary,
        contour_raw=raw,
        contour_smoothed=smoothed,
        mask=mask,
        cut_cost=cut.cut_cost,
        timings_ms={
            "graph_build_ms": 1e3 * (t1 - t0),
            "solve_ms": 1e3 * (t2 - t1),
            "rasterize_ms": 1e3 * (t3 - t2),
        },
    )


def mask_centroid(mask: BinaryMask) -> Point2:
    """Mean (x, y) of the set pixels."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise ValueError("mask is empty")
    return Point2(float(xs.mean()), float(ys.mean()))


def segment_iterative(
    img: GrayImage, seed: Point2, params: SegParams, max_iters: int
) -> SegResult:
    """Re-seed at the mask centroid until the seed settles (< 0.5 px move)."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    current = _check_seed(img, seed)
    result = None
    for _ in range(max_iters):
        result = segment(img, current, params)
        if result.mask.count == 0:
            break
        new_seed = mask_centroid(result.mask)
        if np.hypot(new_seed.x - current.x, new_seed.y - current.y) < 0.5:
            break
        current = new_seed
    return result


def delta_sweep(
    img: GrayImage, seed: Point2, params: SegParams, deltas: Sequence[int]
) -> List[SegResult]:
    """Segment once per stiffness value, all other parameters fixed."""
    if len(deltas) == 0:
        raise ValueError("deltas must be non-empty")
    return [segment(img, seed, replace(params, delta=int(d))) for d in deltas]
