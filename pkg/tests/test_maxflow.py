import numpy as np
import pytest

from oracles import min_boundary_cost
from squarecut.errors import EmptyRay, Unbounded
from squarecut.maxflow import INF, FlowNetwork, extract_boundary
from squarecut.segcore import CostGrid, build_network, compute_weights


def test_bottleneck():
    net = FlowNetwork(1)
    net.add_arc(net.source, 0, 3.0)
    net.add_arc(0, net.sink, 1.0)
    assert net.max_flow() == pytest.approx(1.0)
    cut = net.min_cut_source_set()
    assert cut[net.source] and cut[0] and not cut[net.sink]


def test_disconnected_flow_zero():
    net = FlowNetwork(2)
    net.add_arc(net.source, 0, 5.0)
    net.add_arc(1, net.sink, 5.0)
    assert net.max_flow() == 0.0
    cut = net.min_cut_source_set()
    # source side: s plus whatever positive-capacity arcs reach
    assert cut[net.source] and cut[0]
    assert not cut[1] and not cut[net.sink]


def test_diamond():
    net = FlowNetwork(2)
    net.add_arc(net.source, 0, 1.0)
    net.add_arc(net.source, 1, 1.0)
    net.add_arc(0, net.sink, 1.0)
    net.add_arc(1, net.sink, 1.0)
    assert net.max_flow() == pytest.approx(2.0)


def test_unbounded_detected():
    net = FlowNetwork(1)
    net.add_arc(net.source, 0, INF)
    net.add_arc(0, net.sink, INF)
    with pytest.raises(Unbounded):
        net.max_flow()


def test_classic_network():
    # CLRS-style example with a known max flow of 23
    net = FlowNetwork(4)
    s, t = net.source, net.sink
    for u, v, c in [(s, 0, 16), (s, 1, 13), (0, 1, 10), (1, 0, 4), (0, 2, 12),
                    (2, 1, 9), (1, 3, 14), (3, 2, 7), (2, t, 20), (3, t, 4)]:
        net.add_arc(u, v, float(c))
    assert net.max_flow() == pytest.approx(23.0)


def test_duality_on_random_networks():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(3, 9))
        net = FlowNetwork(n)
        for _ in range(int(rng.integers(5, 25))):
            u = int(rng.integers(0, n + 1))  # may pick the source id
            v = int(rng.integers(0, n + 2))
            u = net.source if u == n else u
            v = net.sink if v >= n else v
            if v == net.source or u == net.sink or u == v:
                continue
            net.add_arc(u, v, float(rng.integers(0, 12)))
        flow = net.max_flow()
        cut = net.min_cut_source_set()
        assert flow == pytest.approx(net.cut_capacity(cut))


def test_network_frozen_after_solve():
    net = FlowNetwork(1)
    net.add_arc(net.source, 0, 1.0)
    net.add_arc(0, net.sink, 1.0)
    net.max_flow()
    with pytest.raises(RuntimeError):
        net.add_arc(net.source, 0, 1.0)


def test_cut_query_requires_solve():
    net = FlowNetwork(1)
    with pytest.raises(RuntimeError):
        net.min_cut_source_set()


def test_extract_boundary_example():
    rays, levels = 3, 3
    source = np.zeros(9, dtype=bool)
    for r, z in [(0, 0), (0, 1), (1, 0), (2, 0), (2, 1), (2, 2)]:
        source[r * levels + z] = True
    assert extract_boundary(source, rays, levels).tolist() == [1, 0, 2]


def test_extract_boundary_base_only():
    source = np.zeros(6, dtype=bool)
    source[[0, 3]] = True  # (0,0) and (1,0) with Z=3... ids 0 and 3
    assert extract_boundary(source, 2, 3).tolist() == [0, 0]


def test_extract_boundary_empty_ray():
    source = np.zeros(6, dtype=bool)
    source[0] = True
    with pytest.raises(EmptyRay):
        extract_boundary(source, 2, 3)


def test_extract_boundary_contiguity_check():
    source = np.zeros(4, dtype=bool)
    source[[0, 1, 3]] = True  # ray 1 has level 1 without level 0
    with pytest.raises(RuntimeError):
        extract_boundary(source, 2, 2)


def _solve_grid(costs: np.ndarray, delta: int):
    rays, levels = costs.shape
    net = build_network(compute_weights(CostGrid(costs.astype(float), 0.0)), delta)
    net.max_flow()
    cut = net.min_cut_source_set()
    b = extract_boundary(cut, rays, levels)
    return b, float(costs[np.arange(rays), b].sum()), net, cut


def test_delta_zero_boundary_is_constant_ring_argmin():
    rng = np.random.default_rng(5)
    for _ in range(30):
        costs = rng.integers(0, 21, size=(3, 5))
        b, cost, _, _ = _solve_grid(costs, 0)
        assert len(set(b.tolist())) == 1
        ring_sums = costs.sum(axis=0)
        assert cost == ring_sums.min()


def test_boundary_cost_matches_exhaustive_oracle():
    rng = np.random.default_rng(99)
    for _ in range(40):
        rays = int(rng.integers(3, 7))
        levels = int(rng.integers(2, 6))
        delta = int(rng.integers(0, 3))
        costs = rng.integers(0, 21, size=(rays, levels))
        b, cost, net, cut = _solve_grid(costs, delta)
        expected, _ = min_boundary_cost(costs, delta)
        assert cost == expected
        # the boundary is delta-Lipschitz on the ray circle
        steps = np.abs(b - np.roll(b, -1))
        assert steps.max() <= delta
        # no infinite arc crosses the cut
        for u, v, cap in net.arcs():
            if cap == INF:
                assert not (cut[u] and not cut[v])


def test_cut_cost_non_increasing_in_delta():
    rng = np.random.default_rng(21)
    for _ in range(10):
        costs = rng.integers(0, 21, size=(5, 4))
        values = [_solve_grid(costs, d)[1] for d in range(4)]
        assert all(values[i + 1] <= values[i] for i in range(3))


def test_all_base_nodes_in_source_set():
    rng = np.random.default_rng(3)
    costs = rng.integers(0, 21, size=(6, 4))
    _, _, net, cut = _solve_grid(costs, 1)
    base_ids = np.arange(6) * 4
    assert cut[base_ids].all()
