"""
SGD с моментом и косинусное расписание скорости обучения.
"""
import logging
import math

import numpy as np

from pointgr.exceptions import DimensionError, NonFiniteError

logger = logging.getLogger(__name__)

VELOCITY_PREFIX = 'optim.velocity.'


def sgd_step(params, grads, lr, momentum, velocity):
    """
    Один шаг SGD: v ← μ·v + g; p ← p − lr·v.

    Все словари имя -> массив; ``params`` и ``velocity`` меняются на месте.
    Если хоть один градиент содержит NaN/Inf, шаг не выполняется вовсе.
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            bad = int(np.size(grad) - np.count_nonzero(np.isfinite(grad)))
            logger.error('Градиент %s содержит %d нечисловых значений, шаг отменён', name, bad)
            raise NonFiniteError(f'sgd_step: градиент {name} содержит {bad} значений NaN/Inf')
        if grad.shape != params[name].shape or velocity[name].shape != params[name].shape:
            raise DimensionError(f'sgd_step: формы {name} не совпадают', params[name].shape, grad.shape, velocity[name].shape)
    for name, grad in grads.items():
        v = velocity[name]
        v *= momentum
        v += grad
        params[name] -= (lr * v).astype(params[name].dtype, copy=False)
    return params


def cosine_lr(t, T, lr_max, lr_min):
    """lr_min + ½(lr_max − lr_min)(1 + cos(π t / T)); при T = 0 возвращает lr_max."""
    if T <= 0:
        return lr_max
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + math.cos(math.pi * t / T))


class SGD:
    """
    Оптимизатор над обучаемыми параметрами ParamStore.

    Скорости хранятся по имени параметра и сериализуются как
    ``optim.velocity.<имя>`` в тот же контейнер PGRW, что и веса.
    """

    def __init__(self, params, lr, momentum=0.9):
        self.params = params
        self.lr = lr
        self.momentum = momentum
        self.velocity = {entry.name: np.zeros_like(entry.node.value) for entry in params.trainable()}

    def step(self, lr=None):
        lr = self.lr if lr is None else lr
        entries = self.params.trainable()
        values = {entry.name: entry.node.value for entry in entries}
        grads = {entry.name: entry.node.grad for entry in entries}
        sgd_step(values, grads, lr, self.momentum, self.velocity)

    def zero_grad(self):
        self.params.zero_grad()

    def state_arrays(self):
        return {f'{VELOCITY_PREFIX}{name}': value for name, value in self.velocity.items()}

    def load_state(self, arrays):
        for key, value in arrays.items():
            if not key.startswith(VELOCITY_PREFIX):
                continue
            name = key[len(VELOCITY_PREFIX):]
            if name not in self.velocity:
                logger.warning('Скорость для неизвестного параметра %s пропущена', name)
                continue
            self.velocity[name][...] = value
