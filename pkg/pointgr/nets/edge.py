"""
Дифференцируемая сборка признаков рёбер.
"""
import numpy as np

from pointgr.autodiff.ops import make_node
from pointgr.graph.edges import assemble_edge_features


def edge_features(x, indices):
    """
    [B, N, C] и таблица соседей [B, N, k] -> [B, N, k, 2C].

    Градиент части d_p и части d_e уходит в центральную точку, градиент
    d_e со знаком минус уходит в соседнюю. Выбор соседей не дифференцируется.
    """
    out = assemble_edge_features(x.value, indices)
    channels = x.shape[-1]
    batch = np.arange(x.shape[0])[:, None, None]

    def backward(grad):
        g_point = grad[..., :channels]
        g_edge = grad[..., channels:]
        dx = (g_point + g_edge).sum(axis=2)
        np.add.at(dx, (batch, indices), -g_edge)
        x.accumulate(dx)

    return make_node(out, (x,), backward, 'edge_features')
