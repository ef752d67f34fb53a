"""Closed-form adjacency recovery from a log-form proximity matrix.

The pipeline inverts the chain proximity -> infinite-horizon limit ->
normalized Laplacian -> adjacency, then binarizes to the original edge
count. The input matrix follows the unclamped log convention of
``proximity.deepwalk_log_proximity`` (entries may be negative). Each step
is the exact algebraic inverse of the forward construction, so a connected
graph whose walk sum has fully decayed at the horizon is recovered exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .linalg import pseudoinverse


@dataclass(frozen=True)
class AnalyticalInputs:
    """Inputs to the closed-form recovery.

    m_k is the finite-horizon log-form proximity; degrees/volume describe
    the original graph (only its topology is treated as unknown); m_edges
    sets the binarization budget.
    """

    m_k: np.ndarray
    degrees: np.ndarray
    volume: float
    alpha: float
    k_horizon: int
    m_edges: int

    def __post_init__(self) -> None:
        deg = np.asarray(self.degrees)
        if np.any(deg < 1):
            raise ValueError("all degrees must be >= 1")
        if abs(float(deg.sum()) - self.volume) > 1e-9:
            raise ValueError("volume must equal the degree sum")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def estimate_m_infinity(m_k: np.ndarray, k_horizon: int) -> np.ndarray:
    """Infinite-horizon proximity limit from the finite-K matrix.

    Elementwise K * exp(M_K) - 1: the finite-K matrix satisfies
    M_K = log((J + M_inf)/K) once the dropped geometric tail has decayed,
    so exponentiating and rescaling recovers M_inf directly.
    """
    if k_horizon < 1:
        raise ValueError("k_horizon must be >= 1")
    return k_horizon * np.exp(np.asarray(m_k, dtype=np.float64)) - 1.0


def recover_laplacian(
    m_inf: np.ndarray, degrees: np.ndarray, volume: float, alpha: float
) -> np.ndarray:
    """Normalized Laplacian implied by the infinite-horizon proximity.

    Inverts m_inf = (alpha*vol/(1-alpha)) D^{-1/2} (Z - I) D^{-1/2} - J with
    Z = ((1-alpha) L + alpha I)^+ : rebuild Z, pseudoinvert, and peel off the
    alpha shift. The result is symmetrized to absorb floating-point
    asymmetry from the eigendecomposition.
    """
    m_inf = np.asarray(m_inf, dtype=np.float64)
    deg = np.asarray(degrees, dtype=np.float64)
    n = deg.size
    if m_inf.shape != (n, n):
        raise ValueError("proximity shape does not match degree vector")
    root = np.sqrt(deg)
    z = ((1.0 - alpha) / (alpha * volume)) * (
        root[:, None] * (m_inf + 1.0) * root[None, :]
    ) + np.eye(n)
    lap = pseudoinverse((z + z.T) / 2.0) / (1.0 - alpha) - (
        alpha / (1.0 - alpha)
    ) * np.eye(n)
    return (lap + lap.T) / 2.0


def recover_adjacency(lap: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Soft adjacency scores A = D^{1/2} (I - L) D^{1/2}."""
    lap = np.asarray(lap, dtype=np.float64)
    deg = np.asarray(degrees, dtype=np.float64)
    root = np.sqrt(deg)
    return root[:, None] * (np.eye(deg.size) - lap) * root[None, :]


def binarize(soft_a: np.ndarray, m_edges: int) -> Graph:
    """Keep the m largest strictly-above-diagonal scores as edges.

    Ties break toward lexicographically smaller (row, col). The diagonal is
    ignored; the result has exactly m_edges undirected edges.
    """
    soft_a = np.asarray(soft_a, dtype=np.float64)
    n = soft_a.shape[0]
    if soft_a.shape != (n, n):
        raise ValueError("soft adjacency must be square")
    max_edges = n * (n - 1) // 2
    if not 0 <= m_edges <= max_edges:
        raise ValueError(f"m_edges={m_edges} exceeds the {max_edges} node pairs")
    rows, cols = np.triu_indices(n, k=1)
    values = soft_a[rows, cols]
    order = np.lexsort((cols, rows, -values))[:m_edges]
    return Graph.from_edges(n, zip(rows[order], cols[order]))


def invert_analytical(inputs: AnalyticalInputs) -> Graph:
    """Full closed-form pipeline: estimate limit, recover Laplacian and
    adjacency, binarize to the original edge count."""
    m_inf = estimate_m_infinity(inputs.m_k, inputs.k_horizon)
    lap = recover_laplacian(m_inf, inputs.degrees, inputs.volume, inputs.alpha)
    soft = recover_adjacency(lap, inputs.degrees)
    return binarize(soft, inputs.m_edges)
