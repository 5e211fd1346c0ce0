"""
Замер времени построения графа соседей.
"""
import logging
import time

import numpy as np

from .knn import KNN_METHODS

logger = logging.getLogger(__name__)

BENCH_FIELDS = ('method', 'n', 'k', 'millis')


def bench_knn(n, k, method, seed=0, repeat=1):
    """
    Строит граф на n случайных точках в единичном кубе и возвращает
    лучшее время из ``repeat`` запусков.

    Returns:
        dict: method, n, k, millis
    """
    search = KNN_METHODS[method]
    points = np.random.default_rng(seed).random((n, 3))
    best = None
    for _ in range(max(1, repeat)):
        started = time.perf_counter()
        search(points, k)
        elapsed = (time.perf_counter() - started) * 1000.0
        best = elapsed if best is None else min(best, elapsed)
    logger.info('kNN %s: n=%d k=%d %.1f мс', method, n, k, best)
    return {'method': method, 'n': n, 'k': k, 'millis': best}
