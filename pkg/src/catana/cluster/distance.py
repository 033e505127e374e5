"""Distance access for the clustering kernels.

Both kernels accept either raw vectors or a precomputed distance matrix.
Vector inputs are never expanded into a full matrix: rows are computed on
demand so memory stays O(n) even for frame counts in the thousands.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ..model import ContractError

_CHUNK = 512


class DistanceSource:
    """Uniform row-wise access to pairwise Euclidean distances."""

    def __init__(self, data: np.ndarray, precomputed: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if precomputed:
            validate_distance_matrix(arr)
            self.matrix: np.ndarray | None = arr
            self.points: np.ndarray | None = None
            self._n = arr.shape[0]
        else:
            if arr.size == 0:
                arr = arr.reshape(0, 1)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.ndim != 2:
                raise ContractError(f"expected 2-d point array, got shape {arr.shape}")
            self.matrix = None
            self.points = arr
            self._n = arr.shape[0]

    def __len__(self) -> int:
        return self._n

    def row(self, i: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[i]
        return cdist(self.points[i : i + 1], self.points)[0]

    def rows(self, lo: int, hi: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[lo:hi]
        return cdist(self.points[lo:hi], self.points)

    def kth_smallest(self, k: int) -> np.ndarray:
        """Per-row k-th smallest distance, each point counting itself first."""
        if not 1 <= k <= self._n:
            raise ContractError(
                f"k must be between 1 and the point count ({self._n}), got {k}"
            )
        out = np.empty(self._n)
        for lo in range(0, self._n, _CHUNK):
            hi = min(lo + _CHUNK, self._n)
            block = self.rows(lo, hi)
            out[lo:hi] = np.partition(block, k - 1, axis=1)[:, k - 1]
        return out


def validate_distance_matrix(matrix: np.ndarray) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractError(f"distance matrix must be square, got shape {matrix.shape}")
    if matrix.size == 0:
        return
    if not np.allclose(matrix, matrix.T, rtol=1e-10, atol=1e-12):
        raise ContractError("distance matrix is not symmetric")
    if not np.allclose(np.diagonal(matrix), 0.0, atol=1e-12):
        raise ContractError("distance matrix has a non-zero diagonal")
    if np.any(matrix < 0):
        raise ContractError("distance matrix has negative entries")
