"""Dense-matrix kernels: multiply, randomized truncated SVD, symmetric
pseudoinverse, and the binary/CSV matrix file formats.

Everything works on float64 numpy arrays. The randomized SVD follows the
standard Gaussian range-finder recipe (oversampling 10, two QR-stabilized
power iterations) and is deterministic for a fixed seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MATRIX_MAGIC = b"PPREIM1\x00"

_DEFAULT_OVERSAMPLE = 10
_DEFAULT_POWER_ITERS = 2


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD factors with m ~ u @ diag(sigma) @ v.T."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul expects 2-D matrices")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def randomized_svd(
    m: np.ndarray,
    d: int,
    seed: int,
    oversample: int = _DEFAULT_OVERSAMPLE,
    power_iters: int = _DEFAULT_POWER_ITERS,
) -> SvdResult:
    """Rank-d approximation via a Gaussian range finder.

    Oversamples the sketch by ``oversample`` columns and applies
    ``power_iters`` QR-stabilized passes of m @ m.T to sharpen the spectrum
    before projecting.
    """
    m = np.asarray(m, dtype=np.float64)
    rows, cols = m.shape
    if not 1 <= d <= min(rows, cols):
        raise ValueError(f"rank d={d} out of range for a {rows}x{cols} matrix")
    rng = np.random.default_rng(seed)
    k = min(d + oversample, min(rows, cols))
    y = m @ rng.standard_normal((cols, k))
    for _ in range(power_iters):
        q, _ = np.linalg.qr(y)
        y = m @ (m.T @ q)
    q, _ = np.linalg.qr(y)
    u_small, sigma, vt = np.linalg.svd(q.T @ m, full_matrices=False)
    u = q @ u_small
    return SvdResult(u=u[:, :d], sigma=sigma[:d], v=vt[:d].T)


def pseudoinverse(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition.

    Eigenvalues with |lambda| <= tol * |lambda|_max are treated as zero.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("pseudoinverse expects a square matrix")
    if m.size and np.max(np.abs(m - m.T)) > 1e-10:
        raise ValueError("matrix is not symmetric within 1e-10")
    w, vecs = np.linalg.eigh((m + m.T) / 2.0)
    cutoff = tol * np.max(np.abs(w), initial=0.0)
    keep = np.abs(w) > cutoff
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (vecs * inv_w) @ vecs.T


def _check_finite(m: np.ndarray, source: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{source}: matrix contains non-finite values")
    return m


def save_matrix(path, m: np.ndarray) -> None:
    """Write a matrix in the PPREIM1 binary format (little-endian float64)."""
    m = np.ascontiguousarray(np.asarray(m, dtype="<f8"))
    if m.ndim != 2:
        raise ValueError("save_matrix expects a 2-D matrix")
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<QQ", m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if raw[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise ValueError(f"{path}: bad magic, not a PPREIM1 matrix file")
    rows, cols = struct.unpack_from("<QQ", raw, len(MATRIX_MAGIC))
    body = raw[len(MATRIX_MAGIC) + 16 :]
    expected = rows * cols * 8
    if len(body) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, got {len(body)}")
    m = np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)
    return _check_finite(m, str(path))


def save_matrix_csv(path, m: np.ndarray) -> None:
    np.savetxt(path, np.asarray(m, dtype=np.float64), delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return _check_finite(m, str(path))
