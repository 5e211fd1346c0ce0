"""
Поиск k ближайших соседей.

Расстоянием служит квадрат евклидова. Сама точка всегда первый сосед,
равные расстояния упорядочиваются по возрастанию индекса точки.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from pointgr.conf import pointgr_setting
from pointgr.exceptions import DimensionError, GraphError

logger = logging.getLogger(__name__)

METRIC = 'sqeuclidean'
BRUTE = 'brute'
INDEXED = 'indexed'


@dataclass(eq=False)
class NeighborGraph:
    """
    Граф соседей.

    Атрибуты:
        indices (ndarray): Таблица N×k индексов, indices[i][0] == i
        k (int): Число соседей
        metric (str): Метрика сравнения
    """
    indices: np.ndarray
    k: int
    metric: str = METRIC

    @property
    def num_points(self):
        return self.indices.shape[0]

    def __eq__(self, other):
        if not isinstance(other, NeighborGraph):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.indices, other.indices)


def _validate(x, k):
    x = np.asarray(x)
    if x.ndim != 2:
        raise DimensionError('kNN: ожидается массив N×C', x.shape)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise GraphError(f'kNN: k={k} вне диапазона [1, {n}]')
    return x.astype(np.float64, copy=False)


def _rank_rows(dist, rows, k):
    """Первые k столбцов по (расстояние, индекс); своя точка помечена -1 и идёт первой."""
    dist[np.arange(len(rows)), rows] = -1.0
    order = np.argsort(dist, axis=1, kind='stable')
    return order[:, :k]


def knn_bruteforce(x, k):
    """
    Точный kNN полным перебором расстояний.

    Матрица расстояний считается порциями строк (настройка KNN_CHUNK_ROWS),
    в том числе в пространстве признаков любой размерности.
    """
    x = _validate(x, k)
    n = x.shape[0]
    chunk = pointgr_setting('KNN_CHUNK_ROWS')
    indices = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        dist = cdist(x[rows], x, metric=METRIC)
        indices[rows] = _rank_rows(dist, rows, k)
    return NeighborGraph(indices=indices, k=k)


def knn_indexed(x, k):
    """
    Тот же результат, что у knn_bruteforce, через kd-дерево по xyz.

    Дерево даёт радиус k-го соседа; все точки в этом радиусе (с запасом на
    округление) пересчитываются точно и ранжируются по (расстояние, индекс),
    поэтому равные расстояния разрешаются так же, как в переборе.
    """
    x = _validate(x, k)
    if x.shape[1] != 3:
        raise DimensionError('knn_indexed: поддерживаются только координаты xyz', x.shape)
    tree = cKDTree(x)
    radius = tree.query(x, k=[k])[0][:, 0]
    candidates = tree.query_ball_point(x, r=radius * (1 + 1e-7) + 1e-12)

    indices = np.empty((x.shape[0], k), dtype=np.int64)
    for i, near in enumerate(candidates):
        near = np.asarray(near, dtype=np.int64)
        dist = cdist(x[i:i + 1], x[near], metric=METRIC)[0]
        dist[near == i] = -1.0
        order = np.lexsort((near, dist))
        indices[i] = near[order[:k]]
    return NeighborGraph(indices=indices, k=k)


KNN_METHODS = {
    BRUTE: knn_bruteforce,
    INDEXED: knn_indexed,
}


def knn_batch(x, k, method=BRUTE):
    """
    kNN для каждого примера пакета [B, N, C].

    Returns:
        ndarray: индексы [B, N, k]
    """
    x = np.asarray(x)
    if x.ndim != 3:
        raise DimensionError('knn_batch: ожидается массив [B, N, C]', x.shape)
    try:
        search = KNN_METHODS[method]
    except KeyError:
        raise GraphError(f'Неизвестный метод kNN {method!r}, допустимо: {", ".join(KNN_METHODS)}') from None
    return np.stack([search(item, k).indices for item in x])
