"""Factorize proximity matrices into embedding pairs and back.

An embedding pair (X, Y) satisfies X @ Y.T ~ M for the proximity matrix M it
was built from. Embeddings persist as a directory holding X.mat / Y.mat in
the PPREIM1 binary format plus a meta.json with the build parameters, so an
inversion run can recover alpha, epsilon, and the horizon without
re-specification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import load_matrix, randomized_svd, save_matrix

META_KEYS = (
    "preset",
    "alpha",
    "epsilon",
    "k_horizon",
    "dim",
    "seed",
    "graph_n",
    "graph_volume",
)


@dataclass(frozen=True)
class EmbeddingPair:
    x: np.ndarray
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.x.shape[1]


def factorize(m: np.ndarray, d: int, seed: int, meta: dict | None = None) -> EmbeddingPair:
    """Split m into X = U sqrt(S), Y = V sqrt(S) from a rank-d randomized SVD."""
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    if not 1 <= d <= n:
        raise ValueError(f"embedding dimension {d} out of range for n={n}")
    svd = randomized_svd(m, d, seed)
    root = np.sqrt(svd.sigma)
    full_meta = {"dim": d, "seed": seed}
    if meta:
        full_meta.update(meta)
    return EmbeddingPair(x=svd.u * root, y=svd.v * root, meta=full_meta)


def reconstruct_proximity(pair: EmbeddingPair) -> np.ndarray:
    """Truncated proximity matrix X @ Y.T implied by the embeddings."""
    return pair.x @ pair.y.T


def save_embedding(directory, pair: EmbeddingPair) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_matrix(directory / "X.mat", pair.x)
    save_matrix(directory / "Y.mat", pair.y)
    meta = {key: pair.meta.get(key) for key in META_KEYS}
    meta.update(pair.meta)
    with open(directory / "meta.json", "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_embedding(directory) -> EmbeddingPair:
    directory = Path(directory)
    x = load_matrix(directory / "X.mat")
    y = load_matrix(directory / "Y.mat")
    if x.shape != y.shape:
        raise ValueError(f"X {x.shape} and Y {y.shape} shapes differ")
    with open(directory / "meta.json") as fh:
        meta = json.load(fh)
    return EmbeddingPair(x=x, y=y, meta=meta)
