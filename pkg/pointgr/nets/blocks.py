"""
Блоки сети: остаточное вложение точек (PRE) и блок обучения признаков (FLN).
"""
from dataclasses import dataclass

from pointgr.autodiff import add, batch_norm, leaky_relu, linear_per_point, max_over_axis, relu
from pointgr.exceptions import DimensionError
from pointgr.graph.knn import BRUTE, knn_batch

from .edge import edge_features

COORD_CHANNELS = 3


@dataclass(frozen=True)
class PREConfig:
    """
    Конфигурация блока остаточного вложения.

    Атрибуты:
        in_channels (int): C, 3 для xyz и 9 для блоков сцены
        k (int): Число соседей в пространстве координат
        hidden (int): Ширина скрытого слоя ветви (64)
        out (int): Ширина выхода; по умолчанию 2C, т.е. 6 для xyz
        knn_method (str): brute или indexed
    """
    in_channels: int
    k: int
    hidden: int = 64
    out: int = 0
    knn_method: str = BRUTE

    def __post_init__(self):
        if not self.out:
            object.__setattr__(self, 'out', 2 * self.in_channels)
        if self.in_channels < COORD_CHANNELS:
            raise DimensionError(f'PRE: нужно минимум {COORD_CHANNELS} канала, получено {self.in_channels}')
        if not self.hidden >= self.out >= 1:
            raise DimensionError(f'PRE: нарушено hidden >= out >= 1 (hidden={self.hidden}, out={self.out})')

    @property
    def edge_width(self):
        return 2 * self.in_channels


@dataclass(frozen=True)
class FLNConfig:
    """
    Конфигурация блока обучения признаков.

    Атрибуты:
        in_channels (int): Ширина входа
        out_channels (int): Ширина выхода
        k (int): Число соседей в пространстве признаков
    """
    in_channels: int
    out_channels: int
    k: int


def add_pre_params(params, prefix, cfg, rng, zero_branch=False):
    width = cfg.edge_width
    params.linear(f'{prefix}.conv1', width, cfg.hidden, rng, bias=False)
    params.batch_norm(f'{prefix}.bn1', cfg.hidden)
    params.linear(f'{prefix}.conv2', cfg.hidden, width, rng, bias=False, zero=zero_branch)
    params.batch_norm(f'{prefix}.bn2', width)
    params.linear(f'{prefix}.point', width, cfg.out, rng)


def add_fln_params(params, prefix, cfg, rng):
    params.linear(f'{prefix}.conv', 2 * cfg.in_channels, cfg.out_channels, rng, bias=False)
    params.batch_norm(f'{prefix}.bn', cfg.out_channels)


def _check_input(x, channels, block):
    if x.value.ndim != 3 or x.shape[-1] != channels:
        raise DimensionError(f'{block}: ожидается вход [B, N, {channels}]', x.shape)


def pre_forward(x, cfg, params, mode, prefix='pre'):
    """
    Остаточное вложение точек.

    Граф строится по первым трём (координатным) каналам. Ветвь
    conv→BN→ReLU→conv→BN складывается с исходными признаками рёбер,
    затем ReLU, максимум по соседям и поточечное отображение 2C→out.

    Returns:
        DiffNode: [B, N, out]
    """
    _check_input(x, cfg.in_channels, 'PRE')
    indices = knn_batch(x.value[..., :COORD_CHANNELS], cfg.k, method=cfg.knn_method)
    edges = edge_features(x, indices)

    branch = linear_per_point(edges, params[f'{prefix}.conv1.weight'])
    branch = relu(batch_norm(branch, params.bn_state(f'{prefix}.bn1'), mode))
    branch = linear_per_point(branch, params[f'{prefix}.conv2.weight'])
    branch = batch_norm(branch, params.bn_state(f'{prefix}.bn2'), mode)

    pooled = max_over_axis(relu(add(branch, edges)), axis=2)
    return linear_per_point(pooled, params[f'{prefix}.point.weight'], params[f'{prefix}.point.bias'])


def fln_forward(x, cfg, params, mode, prefix):
    """
    Блок обучения признаков: граф заново строится в текущем пространстве
    признаков, далее conv→BN→LeakyReLU и максимум по соседям. Без skip-связи.

    Returns:
        DiffNode: [B, N, out_channels]
    """
    _check_input(x, cfg.in_channels, 'FLN')
    indices = knn_batch(x.value, cfg.k)
    edges = edge_features(x, indices)
    h = linear_per_point(edges, params[f'{prefix}.conv.weight'])
    h = leaky_relu(batch_norm(h, params.bn_state(f'{prefix}.bn'), mode))
    return max_over_axis(h, axis=2)
