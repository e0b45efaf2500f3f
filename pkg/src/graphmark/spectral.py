"""2-D Fourier machinery for adjacency matrices.

Forward transforms are unnormalized; the inverse carries the ``1/N^2``
factor, so ``idft2(x) == z @ x @ z`` with ``z[k, l] = exp(2j*pi*k*l/N)/N``.
Transforms run on scipy's pocketfft, which handles any N (Bluestein for
awkward primes) in O(N^2 log N).
"""

from __future__ import annotations

import numpy as np
import scipy.fft

from . import kernels

# pocketfft splits work per row/column, so results do not depend on this
WORKERS = 1


def dft2(m: np.ndarray) -> np.ndarray:
    return scipy.fft.fft2(np.asarray(m, dtype=np.float64 if np.isrealobj(m) else np.complex128), workers=WORKERS)


def idft2(m: np.ndarray) -> np.ndarray:
    return scipy.fft.ifft2(m, workers=WORKERS)


def lowest_magnitude_indices(f: np.ndarray, m: int) -> np.ndarray:
    """Positions of the ``m`` smallest ``|f|`` in ascending order.

    Equal magnitudes keep row-major order, matching a stable argsort of the
    flattened matrix, but only the candidates are fully sorted.
    Returns an ``(m, 2)`` array of ``(row, col)``.
    """
    n_rows, n_cols = f.shape
    size = f.size
    if not 1 <= m <= size:
        raise ValueError(f"m must lie in [1, {size}], got {m}")
    mags = np.abs(f).ravel()
    if m == size:
        flat = np.argsort(mags, kind="stable")
    else:
        kth = mags[np.argpartition(mags, m - 1)[m - 1]]
        below = np.flatnonzero(mags < kth)
        ties = np.flatnonzero(mags == kth)[: m - below.size]
        cand = np.concatenate([below, ties])
        flat = cand[np.lexsort((cand, mags[cand]))]
    return np.column_stack(np.divmod(flat, n_cols)).astype(np.int64)


def place_key(values, positions: np.ndarray, n: int) -> np.ndarray:
    """Spectral matrix holding ``values[k]`` at ``positions[k]``, zero elsewhere."""
    values = np.asarray(values, dtype=np.float64)
    positions = np.asarray(positions, dtype=np.int64).reshape(-1, 2)
    if values.size != positions.shape[0]:
        raise ValueError(f"{values.size} key values for {positions.shape[0]} positions")
    flat = positions[:, 0] * n + positions[:, 1]
    if np.unique(flat).size != flat.size:
        raise ValueError("duplicate key positions")
    out = np.zeros(n * n, dtype=np.complex128)
    out[flat] = values
    return out.reshape(n, n)


def binarize(a_prime: np.ndarray, threshold: float) -> np.ndarray:
    """0/1 matrix of entries whose modulus strictly exceeds ``threshold``.

    The result is OR-symmetrized (an edge survives if either triangle keeps
    it) and its diagonal is cleared.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return kernels.binarize_symmetric(a_prime, threshold)


def two_norm(m: np.ndarray) -> float:
    """Entrywise 2-norm (Frobenius norm) of a complex matrix."""
    flat = np.asarray(m).ravel()
    return float(np.sqrt(np.vdot(flat, flat).real))
