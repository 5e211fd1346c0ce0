"""
Признаки рёбер [x_i, x_i − x_j] по графу соседей.
"""
from dataclasses import dataclass

import numpy as np

from pointgr.exceptions import DimensionError, GraphError

from .knn import knn_bruteforce


@dataclass(eq=False)
class EdgeFeatureBlock:
    """
    Признаки рёбер одного облака.

    Атрибуты:
        features (ndarray): N×k×2C: первые C каналов содержат признак точки d_p,
            последние C содержат разность d_e = x_i − x_j
    """
    features: np.ndarray

    @property
    def channels(self):
        return self.features.shape[-1] // 2

    @property
    def point_part(self):
        return self.features[..., :self.channels]

    @property
    def edge_part(self):
        return self.features[..., self.channels:]


def _check_indices(indices, n):
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise GraphError(f'Индекс соседа вне диапазона [0, {n})')


def assemble_edge_features(x, indices):
    """
    Пакетная сборка признаков рёбер.

    Args:
        x (ndarray): [B, N, C]
        indices (ndarray): [B, N, k]

    Returns:
        ndarray: [B, N, k, 2C]
    """
    if x.ndim != 3 or indices.ndim != 3 or indices.shape[:2] != x.shape[:2]:
        raise DimensionError('Граф соседей не соответствует признакам', x.shape, indices.shape)
    _check_indices(indices, x.shape[1])
    batch = np.arange(x.shape[0])[:, None, None]
    neighbors = x[batch, indices]
    center = np.broadcast_to(x[:, :, None, :], neighbors.shape)
    return np.concatenate([center, center - neighbors], axis=-1)


def build_edge_features(x, graph):
    """features[i][j] = [x_i, x_i − x_{graph[i][j]}]."""
    x = np.asarray(x)
    if x.ndim != 2 or graph.num_points != x.shape[0]:
        raise DimensionError('build_edge_features: граф построен не над этим массивом', x.shape, graph.indices.shape)
    return EdgeFeatureBlock(features=assemble_edge_features(x[None], graph.indices[None])[0])


def multiscale_graph(x, k):
    """Граф в текущем пространстве признаков и его признаки рёбер."""
    return build_edge_features(x, knn_bruteforce(x, k))
