"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Both implementations compare squared moduli against the squared threshold
with the same floating-point operations, so they agree bit for bit.
"""

import numpy as np


def binarize_symmetric(a: np.ndarray, threshold: float) -> np.ndarray:
    hot = (a.real * a.real + a.imag * a.imag) > threshold * threshold
    hot |= hot.T
    np.fill_diagonal(hot, False)
    return hot.view(np.uint8)


def upper_pairs(b: np.ndarray) -> np.ndarray:
    return np.argwhere(np.triu(b, 1)).astype(np.int64)
