"""Classic density-reachability clustering (DBSCAN).

A point is a core point when at least ``min_pts`` points (itself included)
lie within ``eps``. Clusters are grown breadth-first from the lowest-index
unassigned core point, so the result is deterministic for a fixed input
ordering; border points are claimed by the first cluster that reaches them.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .distance import DistanceSource, _CHUNK
from .result import ClusterResult


def dbscan(data, eps: float, min_pts: int, *, precomputed: bool = False) -> ClusterResult:
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be positive, got {min_pts}")

    dist = DistanceSource(data, precomputed)
    n = len(dist)
    if n == 0:
        return ClusterResult.empty()

    neighbors: list[np.ndarray] = []
    for lo in range(0, n, _CHUNK):
        block = dist.rows(lo, min(lo + _CHUNK, n))
        for row in block:
            neighbors.append(np.flatnonzero(row <= eps))
    is_core = np.array([len(nb) >= min_pts for nb in neighbors])

    labels = np.full(n, -1, dtype=np.int64)
    assigned = np.zeros(n, dtype=bool)
    cluster = -1
    for seed in range(n):
        if assigned[seed] or not is_core[seed]:
            continue
        cluster += 1
        labels[seed] = cluster
        assigned[seed] = True
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            for q in neighbors[p]:
                if not assigned[q]:
                    assigned[q] = True
                    labels[q] = cluster
                    if is_core[q]:
                        queue.append(q)

    probabilities = (labels >= 0).astype(np.float64)
    stabilities = np.ones(cluster + 1)
    return ClusterResult(labels=labels, probabilities=probabilities, stabilities=stabilities)
