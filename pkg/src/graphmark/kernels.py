"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``GRAPHMARK_PURE=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("GRAPHMARK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass


def binarize_symmetric(a: np.ndarray, threshold: float) -> np.ndarray:
    return _impl.binarize_symmetric(np.ascontiguousarray(a, dtype=np.complex128), float(threshold))


def upper_pairs(b: np.ndarray) -> np.ndarray:
    return _impl.upper_pairs(np.ascontiguousarray(b, dtype=np.uint8))
