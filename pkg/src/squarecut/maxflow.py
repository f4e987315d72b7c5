"""Exact s-t max-flow / min-cut and boundary extraction from the source set.

The solver is Dinic's algorithm (exact for real capacities) over a CSR arc
layout; the hot loops live in _flowkernels and are JIT compiled on first use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from ._flowkernels import bfs_levels, blocking_flow
from .errors import EmptyRay, Unbounded

INF = math.inf

# Absolute residual tolerance: anything at or below counts as saturated.
TOLERANCE = 1e-9

ArrayLike = Union[np.ndarray, float, int]


class FlowNetwork:
    """Directed flow network with implicit source and sink handles.

    Grid/user nodes are 0..num_nodes-1; `source` and `sink` are two extra
    ids. Arcs carry non-negative float capacities, math.inf included. The
    network freezes once max_flow runs.
    """

    def __init__(self, num_nodes: int):
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        self.num_nodes = int(num_nodes)
        self.source = self.num_nodes
        self.sink = self.num_nodes + 1
        self._srcs: list[np.ndarray] = []
        self._dsts: list[np.ndarray] = []
        self._caps: list[np.ndarray] = []
        self._arc_count = 0
        self._solved = False
        self._flow_value: Optional[float] = None
        self._reach: Optional[np.ndarray] = None
        self._csr = None

    @property
    def arc_count(self) -> int:
        return self._arc_count

    @property
    def node_count(self) -> int:
        """All node handles including source and sink."""
        return self.num_nodes + 2

    def add_arc(self, u: int, v: int, capacity: float) -> None:
        self.add_arcs(np.array([u]), np.array([v]), np.array([float(capacity)]))

    def add_arcs(self, us: ArrayLike, vs: ArrayLike, capacities: ArrayLike) -> None:
        if self._solved:
            raise RuntimeError("network is frozen after max_flow")
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        caps = np.asarray(capacities, dtype=np.float64).ravel()
        if caps.size == 1 and us.size > 1:
            caps = np.full(us.size, caps[0])
        if not (us.size == vs.size == caps.size):
            raise ValueError("us, vs, capacities must have matching lengths")
        if us.size == 0:
            return
        if us.min() < 0 or us.max() > self.sink or vs.min() < 0 or vs.max() > self.sink:
            raise ValueError("arc endpoint out of range")
        if np.any(vs == self.source) or np.any(us == self.sink):
            raise ValueError("arcs may not enter the source or leave the sink")
        if np.any(np.isnan(caps)) or np.any(caps < 0):
            raise ValueError("capacities must be non-negative")
        self._srcs.append(us)
        self._dsts.append(vs)
        self._caps.append(caps)
        self._arc_count += us.size

    def arcs(self) -> Iterator[Tuple[int, int, float]]:
        """Iterate the forward arcs as (u, v, capacity)."""
        for us, vs, caps in zip(self._srcs, self._dsts, self._caps):
            for u, v, c in zip(us, vs, caps):
                yield int(u), int(v), float(c)

    def _finalize(self):
        if self._csr is not None:
            return self._csr
        m = self._arc_count
        fsrc = np.concatenate(self._srcs) if m else np.empty(0, np.int64)
        fdst = np.concatenate(self._dsts) if m else np.empty(0, np.int64)
        fcap = np.concatenate(self._caps) if m else np.empty(0, np.float64)
        # forward arc i pairs with reverse arc i+m
        src = np.concatenate([fsrc, fdst])
        dst = np.concatenate([fdst, fsrc])
        res = np.concatenate([fcap, np.zeros(m)])
        pair = np.concatenate([np.arange(m, 2 * m), np.arange(m)])

        order = np.argsort(src, kind="stable")
        position = np.empty(2 * m, dtype=np.int64)
        position[order] = np.arange(2 * m)
        counts = np.bincount(src, minlength=self.node_count)
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self._csr = (indptr, dst[order], position[pair[order]], res[order])
        self._forward_uv = (fsrc, fdst, fcap)
        return self._csr

    def max_flow(self) -> float:
        """Exact maximum flow; freezes the network and caches the result."""
        if self._solved:
            return self._flow_value
        indptr, arc_to, arc_pair, res = self._finalize()
        n = self.node_count
        level = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        arc_iter = np.empty(n, dtype=np.int64)
        path_nodes = np.empty(n + 1, dtype=np.int64)
        path_arcs = np.empty(n, dtype=np.int64)
        total = 0.0
        while bfs_levels(indptr, arc_to, res, self.source, self.sink, level, queue, TOLERANCE):
            arc_iter[:] = indptr[:-1]
            pushed = blocking_flow(
                indptr, arc_to, arc_pair, res, self.source, self.sink,
                level, arc_iter, path_nodes, path_arcs, TOLERANCE,
            )
            if math.isinf(pushed):
                raise Unbounded("no finite cut separates source from sink")
            total += pushed
        # the failed BFS leaves the residual-reachability marking behind
        self._reach = level >= 0
        self._residual = res
        self._solved = True
        self._flow_value = float(total)
        return self._flow_value

    def min_cut_source_set(self) -> np.ndarray:
        """Nodes reachable from the source in the residual network (the
        canonical minimal min cut), as a bool array over all node handles."""
        if not self._solved:
            raise RuntimeError("call max_flow before querying the cut")
        return self._reach.copy()

    def cut_capacity(self, source_set: np.ndarray) -> float:
        """Total capacity of forward arcs leaving source_set (duality check)."""
        fsrc, fdst, fcap = self._forward_uv
        crossing = source_set[fsrc] & ~source_set[fdst]
        return float(fcap[crossing].sum())


@dataclass(frozen=True)
class CutResult:
    """Minimal min-cut of one segmentation network in grid terms."""

    flow_value: float
    source_set: np.ndarray      # bool per grid node
    boundary: np.ndarray        # per-ray level b(r)
    cut_cost: float             # sum of the network cost grid at the boundary


def extract_boundary(source_set: np.ndarray, rays: int, nodes_per_ray: int) -> np.ndarray:
    """Per-ray boundary level b(r) = highest source-side level on ray r."""
    grid = np.asarray(source_set[: rays * nodes_per_ray], dtype=bool).reshape(
        rays, nodes_per_ray
    )
    counts = grid.sum(axis=1)
    if np.any(counts == 0):
        bad = int(np.argmax(counts == 0))
        raise EmptyRay(f"ray {bad} has no node in the source set")
    boundary = nodes_per_ray - 1 - np.argmax(grid[:, ::-1], axis=1)
    if np.any(counts != boundary + 1):
        raise RuntimeError("closed-set contiguity violated (solver bug)")
    return boundary.astype(np.int64)


def warmup() -> None:
    """Force JIT compilation of the solver kernels on a toy network."""
    net = FlowNetwork(2)
    net.add_arc(net.source, 0, 2.0)
    net.add_arc(0, 1, 1.0)
    net.add_arc(1, net.sink, 2.0)
    net.max_flow()
    net.min_cut_source_set()
