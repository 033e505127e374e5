"""Hierarchical density-based clustering with membership probabilities.

The pipeline is the standard one:

1. core distances: distance to the ``min_samples``-th nearest neighbor,
   each point counting itself as its own first neighbor;
2. minimum spanning tree of the complete graph under mutual-reachability
   distance max(core(i), core(j), d(i, j)) via dense Prim, O(n) extra memory;
3. single-linkage merge tree from the weight-sorted MST edges;
4. condensed tree: walking the hierarchy top-down, sides of a split smaller
   than ``min_cluster_size`` fall out as points at lambda = 1/distance, a
   new pair of clusters appears only when both sides are large enough;
5. cluster selection by maximum stability (excess of mass), the root is
   excluded unless ``allow_single_cluster`` is set;
6. per-point probability = lambda_point / lambda_max within its cluster,
   0 for noise.

Two deliberate deviations from the widespread reference behavior:

* splits at distance zero never create new clusters (duplicate points
  cannot carve a cluster into pieces), and
* a dataset whose condensed tree is only the root *and* whose points never
  leave it at any finite lambda (a zero-diameter dataset) is one cluster,
  not noise.
"""

from __future__ import annotations

import numpy as np

from ..model import ContractError
from .distance import DistanceSource
from .result import ClusterResult

INF = np.inf


def core_distances(data, k: int, *, precomputed: bool = False) -> np.ndarray:
    """Distance to each point's k-th nearest neighbor (itself counted first)."""
    return DistanceSource(data, precomputed).kth_smallest(k)


def mutual_reachability_mst(
    data, core: np.ndarray, *, precomputed: bool = False
) -> list[tuple[int, int, float]]:
    """Minimum spanning tree under mutual-reachability distance.

    Returns exactly n-1 edges as (i, j, weight) with i the tree-side
    endpoint; ties are broken toward the lowest point index.
    """
    dist = DistanceSource(data, precomputed)
    core = np.asarray(core, dtype=np.float64)
    n = len(dist)
    if core.shape != (n,):
        raise ContractError(f"core distances have shape {core.shape}, expected ({n},)")
    if n < 2:
        return []

    visited = np.zeros(n, dtype=bool)
    best = np.full(n, INF)
    parent = np.full(n, -1, dtype=np.int64)
    visited[0] = True
    current = 0
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        reach = np.maximum(dist.row(current), np.maximum(core, core[current]))
        improve = ~visited & (reach < best)
        best[improve] = reach[improve]
        parent[improve] = current
        nxt = int(np.argmin(np.where(visited, INF, best)))
        edges.append((int(parent[nxt]), nxt, float(best[nxt])))
        visited[nxt] = True
        current = nxt
    return edges


def hdbscan(
    data,
    min_cluster_size: int = 5,
    min_samples: int = 5,
    *,
    precomputed: bool = False,
    allow_single_cluster: bool = False,
) -> ClusterResult:
    """Cluster vectors or a precomputed distance matrix; may return all noise."""
    if min_cluster_size < 2:
        raise ContractError("min_cluster_size must be at least 2")
    if min_samples < 1:
        raise ContractError("min_samples must be at least 1")

    dist = DistanceSource(data, precomputed)
    n = len(dist)
    if n == 0:
        return ClusterResult.empty()
    if n == 1:
        return ClusterResult(
            labels=np.array([-1], dtype=np.int64),
            probabilities=np.zeros(1),
            stabilities=np.empty(0),
        )

    k = min(min_samples, n)
    core = dist.kth_smallest(k)
    edges = mutual_reachability_mst(data, core, precomputed=precomputed)
    merges = _single_linkage(edges, n)
    tree = _condense(merges, n, min_cluster_size)
    return _extract(tree, n, min_cluster_size, allow_single_cluster)


# -- single linkage -----------------------------------------------------------


def _single_linkage(edges: list[tuple[int, int, float]], n: int) -> np.ndarray:
    """Merge MST edges by ascending weight into a dendrogram.

    Row t holds (left root, right root, distance, merged size); the merge
    node formed by row t has id n + t, the overall root is 2n - 2.
    """
    order = sorted(edges, key=lambda e: (e[2], min(e[0], e[1]), max(e[0], e[1])))
    uf_parent = np.arange(2 * n - 1, dtype=np.int64)
    sizes = np.ones(2 * n - 1, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while uf_parent[root] != root:
            root = uf_parent[root]
        while uf_parent[x] != root:
            uf_parent[x], x = root, uf_parent[x]
        return root

    merges = np.empty((n - 1, 4))
    for t, (a, b, w) in enumerate(order):
        ra, rb = find(a), find(b)
        node = n + t
        merges[t] = (ra, rb, w, sizes[ra] + sizes[rb])
        uf_parent[ra] = uf_parent[rb] = node
        sizes[node] = sizes[ra] + sizes[rb]
    return merges


# -- condensed tree -----------------------------------------------------------


class _CondensedTree:
    __slots__ = ("parent", "child", "lam", "size", "root")

    def __init__(self, parent, child, lam, size, root):
        self.parent = np.asarray(parent, dtype=np.int64)
        self.child = np.asarray(child, dtype=np.int64)
        self.lam = np.asarray(lam, dtype=np.float64)
        self.size = np.asarray(size, dtype=np.int64)
        self.root = root


def _condense(merges: np.ndarray, n: int, min_cluster_size: int) -> _CondensedTree:
    root = 2 * n - 2
    relabel = {root: n}
    next_label = n + 1
    parent_col: list[int] = []
    child_col: list[int] = []
    lam_col: list[float] = []
    size_col: list[int] = []

    def node_size(v: int) -> int:
        return 1 if v < n else int(merges[v - n, 3])

    def leaves(v: int) -> list[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            if u < n:
                out.append(u)
            else:
                stack.append(int(merges[u - n, 0]))
                stack.append(int(merges[u - n, 1]))
        return out

    stack = [root]
    while stack:
        node = stack.pop()
        left, right = int(merges[node - n, 0]), int(merges[node - n, 1])
        distance = merges[node - n, 2]
        lam = 1.0 / distance if distance > 0 else INF
        label = relabel[node]
        big_left = node_size(left) >= min_cluster_size
        big_right = node_size(right) >= min_cluster_size

        if big_left and big_right:
            if distance <= 0:
                # Zero-diameter split: both sides continue as the same cluster.
                for side in (left, right):
                    if side >= n:
                        relabel[side] = label
                        stack.append(side)
            else:
                for side in (left, right):
                    relabel[side] = next_label
                    parent_col.append(label)
                    child_col.append(next_label)
                    lam_col.append(lam)
                    size_col.append(node_size(side))
                    next_label += 1
                    stack.append(side)
        elif big_left or big_right:
            big, small = (left, right) if big_left else (right, left)
            relabel[big] = label
            if big >= n:
                stack.append(big)
            for p in leaves(small):
                parent_col.append(label)
                child_col.append(p)
                lam_col.append(lam)
                size_col.append(1)
        else:
            for p in leaves(left) + leaves(right):
                parent_col.append(label)
                child_col.append(p)
                lam_col.append(lam)
                size_col.append(1)

    return _CondensedTree(parent_col, child_col, lam_col, size_col, n)


# -- stability, selection, labelling -------------------------------------------


def _extract(
    tree: _CondensedTree, n: int, min_cluster_size: int, allow_single_cluster: bool
) -> ClusterResult:
    cluster_rows = tree.child >= n
    births = {tree.root: 0.0}
    children_of: dict[int, list[int]] = {}
    for parent, child, lam in zip(
        tree.parent[cluster_rows], tree.child[cluster_rows], tree.lam[cluster_rows]
    ):
        births[int(child)] = float(lam)
        children_of.setdefault(int(parent), []).append(int(child))

    stability: dict[int, float] = {c: 0.0 for c in births}
    for parent, lam, size in zip(tree.parent, tree.lam, tree.size):
        birth = births[int(parent)]
        if np.isinf(lam) and np.isinf(birth):
            continue
        stability[int(parent)] += (lam - birth) * size

    # Excess of mass, deepest clusters first (child labels exceed parents').
    winner: dict[int, bool] = {}
    subtree: dict[int, float] = {}
    for c in sorted(births, reverse=True):
        child_sum = sum(subtree[k] for k in children_of.get(c, ()))
        if c == tree.root and not allow_single_cluster:
            winner[c] = False
            subtree[c] = child_sum
        elif stability[c] >= child_sum:
            winner[c] = True
            subtree[c] = stability[c]
        else:
            winner[c] = False
            subtree[c] = child_sum

    selected: list[int] = []
    stack = [tree.root]
    while stack:
        c = stack.pop()
        if winner[c]:
            selected.append(c)
        else:
            stack.extend(children_of.get(c, ()))

    point_rows = ~cluster_rows
    exit_parent = np.full(n, tree.root, dtype=np.int64)
    exit_lam = np.full(n, INF)
    pts = tree.child[point_rows]
    exit_parent[pts] = tree.parent[point_rows]
    exit_lam[pts] = tree.lam[point_rows]

    if not selected and len(births) == 1 and n >= min_cluster_size and np.all(
        np.isinf(exit_lam)
    ):
        # Zero-diameter dataset: a single infinitely dense cluster.
        selected = [tree.root]

    labels = np.full(n, -1, dtype=np.int64)
    probabilities = np.zeros(n)
    if not selected:
        return ClusterResult(labels=labels, probabilities=probabilities,
                             stabilities=np.empty(0))

    selected.sort()
    label_of = {c: i for i, c in enumerate(selected)}
    parent_of = {
        int(child): int(parent)
        for parent, child in zip(tree.parent[cluster_rows], tree.child[cluster_rows])
    }
    chosen = set(selected)

    deaths: dict[int, float] = {c: 0.0 for c in births}
    for parent, lam in zip(tree.parent, tree.lam):
        p = int(parent)
        if lam > deaths[p]:
            deaths[p] = float(lam)

    for point in range(n):
        c = int(exit_parent[point])
        while True:
            if c in chosen:
                labels[point] = label_of[c]
                death = deaths[c]
                if not np.isfinite(death) or death == 0.0:
                    probabilities[point] = 1.0
                else:
                    probabilities[point] = min(exit_lam[point], death) / death
                break
            if c == tree.root:
                break
            c = parent_of[c]

    stabilities = np.array([stability[c] for c in selected])
    return ClusterResult(labels=labels, probabilities=probabilities, stabilities=stabilities)
