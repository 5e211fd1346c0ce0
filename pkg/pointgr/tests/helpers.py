"""
Общие помощники тестов.
"""
import numpy as np

from pointgr.autodiff import DiffNode, linear_per_point, reshape


def project(node, weights):
    """Скаляр sum(node * weights), собранный из дифференцируемых операций."""
    w = DiffNode(np.asarray(weights, dtype=node.dtype).reshape(-1, 1), requires_grad=False, name='weights')
    flat = reshape(node, (1, node.value.size))
    return reshape(linear_per_point(flat, w), ())


def knn_oracle(x, k):
    """Независимый O(N²) оракул: сортировка пар (расстояние, индекс), своя точка первая."""
    x = np.asarray(x, dtype=np.float64)
    rows = []
    for i in range(len(x)):
        pairs = []
        for j in range(len(x)):
            d = float(np.sum((x[i] - x[j]) ** 2))
            pairs.append((-1.0 if i == j else d, j))
        pairs.sort()
        rows.append([j for _, j in pairs[:k]])
    return np.asarray(rows, dtype=np.int64)
