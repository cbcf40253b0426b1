"""Grid sweeps split into point chunks, optionally across a thread pool.

Results are reassembled in input order, so output never depends on the
number of threads.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

import numpy as np

logger = logging.getLogger(__name__)

MIN_CHUNK = 16


def map_points(fn: Callable[[np.ndarray], np.ndarray], points: np.ndarray, threads: int = 1) -> np.ndarray:
    """Apply a vectorised ``fn`` to (N, D) points; leading axis of the result is N."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if threads <= 1 or n < 2 * MIN_CHUNK:
        return np.asarray(fn(points))
    n_chunks = min(threads, max(1, n // MIN_CHUNK))
    chunks: List[np.ndarray] = np.array_split(points, n_chunks)
    logger.debug("sweeping %d points in %d chunks on %d threads", n, n_chunks, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate([np.asarray(p) for p in parts], axis=0)
