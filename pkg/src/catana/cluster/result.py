"""Shared result and parameter types for the clustering kernels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import ContractError


@dataclass
class ClusterParams:
    """Full parameter surface for both density-based kernels."""

    eps: float = 0.5
    min_pts: int = 5
    min_cluster_size: int = 5
    min_samples: int = 5

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise ContractError("eps must be non-negative")
        if self.min_pts < 1:
            raise ContractError("min_pts must be positive")
        if self.min_cluster_size < 2:
            raise ContractError("min_cluster_size must be at least 2")
        if self.min_samples < 1:
            raise ContractError("min_samples must be at least 1")


@dataclass
class ClusterResult:
    """Per-point labels (-1 for noise), membership probabilities in [0, 1],
    and one stability score per cluster. Labels are consecutive from 0."""

    labels: np.ndarray
    probabilities: np.ndarray
    stabilities: np.ndarray = field(default_factory=lambda: np.empty(0))

    @classmethod
    def empty(cls) -> "ClusterResult":
        return cls(
            labels=np.empty(0, dtype=np.int64),
            probabilities=np.empty(0),
            stabilities=np.empty(0),
        )

    @property
    def n_clusters(self) -> int:
        return len(self.stabilities)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)
