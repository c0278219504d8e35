"""Order-insensitive accumulation helpers.

``math.fsum`` returns the correctly rounded sum, so results do not depend on
the order in which terms arrive.  That is what makes the parallel reductions
in this package reproducible bit-for-bit.
"""
import math
import os

import numpy as np


def csum(values):
    """Correctly rounded sum of complex (or real) values."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if arr.size == 0:
        return 0j
    arr = arr.astype(complex, copy=False).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def rsum(values):
    arr = np.asarray(values, dtype=float).ravel()
    return math.fsum(arr)


def worker_count():
    """Parallelism cap taken from PNF_THREADS (default 1)."""
    try:
        n = int(os.environ.get("PNF_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)
