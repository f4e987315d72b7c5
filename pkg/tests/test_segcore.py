import math

import numpy as np
import pytest

from squarecut.geometry import Point2, cast_rays, normalize_template, sample_nodes, square_template
from squarecut.imaging import GrayImage
from squarecut.maxflow import INF
from squarecut.segcore import (
    CostGrid,
    SegParams,
    boundary_seeking_costs,
    build_network,
    compute_costs,
    compute_weights,
    estimate_mean,
    grid_node_id,
)


def test_estimate_mean_uniform():
    img = GrayImage(np.full((9, 9), 7, dtype=np.uint16))
    assert estimate_mean(img, Point2(4, 4), 5) == 7.0


def test_estimate_mean_single_pixel():
    img = GrayImage(np.arange(25, dtype=np.uint16).reshape(5, 5))
    assert estimate_mean(img, Point2(2.2, 3.4), 1) == float(3 * 5 + 2)


def test_estimate_mean_window():
    img = GrayImage(np.arange(9, dtype=np.uint16).reshape(3, 3))
    assert estimate_mean(img, Point2(1, 1), 3) == 4.0


def test_estimate_mean_border_replicate():
    img = GrayImage(np.array([[1, 2], [3, 4]], dtype=np.uint16))
    # at the corner the window replicates pixel rows/columns
    assert estimate_mean(img, Point2(0, 0), 3) == pytest.approx((4 * 1 + 2 * 2 + 2 * 3 + 4) / 9)


def test_compute_costs_examples():
    img = GrayImage(np.full((20, 20), 120, dtype=np.uint16))
    fan = sample_nodes(cast_rays(normalize_template(square_template()), Point2(10, 10), 5.0, 4), 3)
    grid = compute_costs(img, fan, 100.0)
    assert np.allclose(grid.values, 20.0)
    grid2 = compute_costs(img, fan, 120.0)
    assert np.allclose(grid2.values, 0.0)
    grid3 = compute_costs(img, fan, 160.0)
    assert np.allclose(grid3.values, 40.0)


def test_compute_weights_differencing():
    costs = CostGrid(np.array([[5.0, 2.0, 7.0]]), 0.0)
    assert compute_weights(costs).values.tolist() == [[5.0, -3.0, 5.0]]


def test_compute_weights_constant_column():
    costs = CostGrid(np.array([[4.0, 4.0, 4.0]]), 0.0)
    assert compute_weights(costs).values.tolist() == [[4.0, 0.0, 0.0]]


def test_compute_weights_single_level():
    costs = CostGrid(np.array([[9.0]]), 0.0)
    assert compute_weights(costs).values.tolist() == [[9.0]]


def test_prefix_sums_recover_costs():
    rng = np.random.default_rng(42)
    for _ in range(20):
        c = rng.integers(0, 21, size=(rng.integers(3, 8), rng.integers(1, 9))).astype(float)
        w = compute_weights(CostGrid(c, 0.0)).values
        assert np.allclose(np.cumsum(w, axis=1), c)


def test_boundary_cost_identity():
    # sum of w over {(r,z): z <= b(r)} telescopes to sum_r c[r][b(r)]
    rng = np.random.default_rng(7)
    c = rng.integers(0, 21, size=(5, 6)).astype(float)
    w = compute_weights(CostGrid(c, 0.0)).values
    for _ in range(50):
        b = rng.integers(0, 6, size=5)
        total = sum(w[r, : b[r] + 1].sum() for r in range(5))
        assert total == pytest.approx(c[np.arange(5), b].sum())


def test_boundary_seeking_costs_negates():
    grid = CostGrid(np.array([[1.0, 2.0]]), 5.0)
    flipped = boundary_seeking_costs(grid)
    assert flipped.values.tolist() == [[-1.0, -2.0]]
    assert flipped.mean_intensity == 5.0


def test_build_network_arc_counts():
    rays, levels = 4, 3
    w = compute_weights(CostGrid(np.arange(12, dtype=float).reshape(rays, levels), 0.0))
    net = build_network(w, 1)
    z_arcs = rays * (levels - 1)
    r_arcs = 2 * rays * levels
    terminal = rays * levels
    assert net.arc_count == z_arcs + r_arcs + terminal + 1


def test_build_network_terminal_rule():
    w_values = np.array([[-3.0, 5.0], [0.0, -2.0], [1.0, 4.0]])
    from squarecut.segcore import WeightGrid

    net = build_network(WeightGrid(w_values), 0)
    arcs = list(net.arcs())
    s, t = net.source, net.sink
    assert (s, grid_node_id(0, 0, 2), 3.0) in arcs
    assert (grid_node_id(0, 1, 2), t, 5.0) in arcs
    assert (grid_node_id(1, 0, 2), t, 0.0) in arcs
    assert (s, grid_node_id(1, 1, 2), 2.0) in arcs
    # one infinite forcing arc into the base of ray 0
    assert (s, grid_node_id(0, 0, 2), INF) in arcs


def test_build_network_delta_clamps_to_base():
    rays, levels = 5, 3
    w = compute_weights(CostGrid(np.zeros((rays, levels)), 0.0))
    net = build_network(w, levels + 2)
    base_targets = [
        (u, v) for u, v, c in net.arcs()
        if c == INF and u < rays * levels and v < rays * levels and u % levels > 0 and u // levels != v // levels
    ]
    # every inter-ray arc lands on the neighbor's base node when delta >= Z
    assert base_targets and all(v % levels == 0 for _, v in base_targets)


def test_seg_params_validation():
    with pytest.raises(ValueError):
        SegParams(rays=2)
    with pytest.raises(ValueError):
        SegParams(nodes_per_ray=1)
    with pytest.raises(ValueError):
        SegParams(delta=-1)
    with pytest.raises(ValueError):
        SegParams(patch_size=4)
    with pytest.raises(ValueError):
        SegParams(sampling="cubic")
    with pytest.raises(ValueError):
        SegParams(radius_scale=0.0)
    SegParams()  # defaults are valid


def test_estimate_mean_rejects_even_patch():
    img = GrayImage(np.zeros((5, 5), dtype=np.uint16))
    with pytest.raises(ValueError):
        estimate_mean(img, Point2(2, 2), 2)
