"""JIT-compiled inner loops of the augmenting-path solver.

Capacities are float64 with math.inf as the distinguished unbounded value;
float arithmetic saturates naturally (inf - finite == inf), so no large-
constant tuning is needed. Residuals below tol count as saturated.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bfs_levels(indptr, arc_to, res, source, sink, level, queue, tol):
    """Breadth-first levels over residual arcs; returns True if sink reached.

    After a False return, level >= 0 marks exactly the residual-reachable
    nodes, i.e. the canonical minimal min-cut source side.
    """
    level[:] = -1
    level[source] = 0
    queue[0] = source
    qhead = 0
    qtail = 1
    while qhead < qtail:
        u = queue[qhead]
        qhead += 1
        for a in range(indptr[u], indptr[u + 1]):
            v = arc_to[a]
            if level[v] < 0 and res[a] > tol:
                level[v] = level[u] + 1
                queue[qtail] = v
                qtail += 1
    return level[sink] >= 0


@njit(cache=True)
def blocking_flow(
    indptr, arc_to, arc_pair, res, source, sink, level, arc_iter, path_nodes, path_arcs, tol
):
    """Saturate the level graph (Dinic phase) with current-arc bookkeeping.

    Returns the flow pushed in this phase, or inf when an augmenting path of
    only infinite residuals exists (the unbounded case; residuals are left
    untouched for that path).
    """
    total = 0.0
    depth = 0
    path_nodes[0] = source
    while True:
        u = path_nodes[depth]
        if u == sink:
            bottleneck = np.inf
            for k in range(depth):
                r = res[path_arcs[k]]
                if r < bottleneck:
                    bottleneck = r
            if bottleneck == np.inf:
                return np.inf
            for k in range(depth):
                a = path_arcs[k]
                res[a] -= bottleneck
                res[arc_pair[a]] += bottleneck
            total += bottleneck
            # retreat to the first saturated arc and resume from there
            new_depth = depth
            for k in range(depth):
                if res[path_arcs[k]] <= tol:
                    new_depth = k
                    break
            depth = new_depth
            continue
        advanced = False
        a = arc_iter[u]
        end = indptr[u + 1]
        while a < end:
            v = arc_to[a]
            if res[a] > tol and level[v] == level[u] + 1:
                path_arcs[depth] = a
                depth += 1
                path_nodes[depth] = v
                advanced = True
                break
            a += 1
            arc_iter[u] = a
        if not advanced:
            level[u] = -1  # dead end for the rest of this phase
            if depth == 0:
                return total
            depth -= 1
            arc_iter[path_nodes[depth]] += 1
