"""
Минимальное обратное автоматическое дифференцирование над плотными массивами.

Пакет содержит ровно те операции, которые нужны прямому проходу сети:
поточечное линейное отображение, пакетную нормализацию, активации,
редукции по оси, конкатенацию и кросс-энтропию.
"""
from .node import DiffNode, Engine, EVAL, TRAIN, resolve_dtype, topological_order
from .ops import (
    BatchNormState,
    add,
    batch_norm,
    concat,
    dropout,
    expand_points,
    leaky_relu,
    linear_per_point,
    make_node,
    max_over_axis,
    mean_over_axis,
    relu,
    reshape,
    softmax_cross_entropy,
)
from .params import ParamStore

__all__ = [
    'BatchNormState',
    'DiffNode',
    'EVAL',
    'Engine',
    'ParamStore',
    'TRAIN',
    'add',
    'batch_norm',
    'concat',
    'dropout',
    'expand_points',
    'leaky_relu',
    'linear_per_point',
    'make_node',
    'max_over_axis',
    'mean_over_axis',
    'relu',
    'reshape',
    'resolve_dtype',
    'softmax_cross_entropy',
    'topological_order',
]
