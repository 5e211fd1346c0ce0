"""
Хранилище обучаемых параметров и статистик нормализации.
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError

from .node import DiffNode, Engine
from .ops import BatchNormState

logger = logging.getLogger(__name__)


@dataclass
class ParamEntry:
    """
    Запись хранилища.

    Атрибуты:
        name (str): Путь параметра, например ``fln1.conv.weight``
        node (DiffNode): Значение и градиент
        trainable (bool): False для скользящих статистик BN
    """
    name: str
    node: DiffNode
    trainable: bool

    @property
    def size(self):
        return int(self.node.value.size)


class ParamStore:
    """
    Именованные параметры сети.

    Имена уникальны, обход всегда идёт в лексикографическом порядке имён,
    поэтому сериализация и подсчёт параметров детерминированы.
    """

    def __init__(self, engine=None):
        self.engine = engine or Engine()
        self._entries = {}

    def add(self, name, value, trainable=True):
        if name in self._entries:
            raise ValueError(f'Параметр {name!r} уже существует')
        if trainable:
            node = self.engine.variable(value, name=name)
        else:
            node = self.engine.constant(value, name=name)
        self._entries[name] = ParamEntry(name=name, node=node, trainable=trainable)
        return node

    def linear(self, name, c_in, c_out, rng, bias=True, zero=False):
        """
        Создаёт ``name.weight`` [c_in, c_out] и, при необходимости, ``name.bias``.

        Веса равномерны в ±1/sqrt(c_in); при ``zero=True`` слой обнуляется.
        """
        bound = 1.0 / np.sqrt(c_in)
        if zero:
            weight = np.zeros((c_in, c_out))
        else:
            weight = rng.uniform(-bound, bound, size=(c_in, c_out))
        self.add(f'{name}.weight', weight)
        if bias:
            if zero:
                self.add(f'{name}.bias', np.zeros(c_out))
            else:
                self.add(f'{name}.bias', rng.uniform(-bound, bound, size=c_out))

    def batch_norm(self, name, channels):
        self.add(f'{name}.gamma', np.ones(channels))
        self.add(f'{name}.beta', np.zeros(channels))
        self.add(f'{name}.running_mean', np.zeros(channels), trainable=False)
        self.add(f'{name}.running_var', np.ones(channels), trainable=False)

    def bn_state(self, name):
        return BatchNormState(
            gamma=self[f'{name}.gamma'],
            beta=self[f'{name}.beta'],
            running_mean=self[f'{name}.running_mean'],
            running_var=self[f'{name}.running_var'],
        )

    def get(self, name, default=None):
        entry = self._entries.get(name)
        return entry.node if entry else default

    def __getitem__(self, name):
        try:
            return self._entries[name].node
        except KeyError:
            raise KeyError(f'Параметр {name!r} не найден') from None

    def __contains__(self, name):
        return name in self._entries

    def __iter__(self):
        for name in sorted(self._entries):
            yield self._entries[name]

    def __len__(self):
        return len(self._entries)

    def names(self):
        return sorted(self._entries)

    def trainable(self):
        return [entry for entry in self if entry.trainable]

    def count_trainable(self):
        """Число обучаемых скаляров (скользящие статистики BN не входят)."""
        return sum(entry.size for entry in self.trainable())

    def zero_grad(self):
        for entry in self:
            entry.node.zero_grad()

    def arrays(self):
        """Значения всех параметров по имени в лексикографическом порядке."""
        return {entry.name: entry.node.value for entry in self}

    def load_arrays(self, arrays, strict=True):
        """
        Копирует значения из словаря имя -> массив.

        Формы обязаны совпадать; при ``strict`` набор имён тоже.
        """
        missing = sorted(set(self._entries) - set(arrays))
        unexpected = sorted(set(arrays) - set(self._entries))
        if strict and (missing or unexpected):
            raise ValidationError(
                f'Веса не соответствуют модели: нет {missing[:5]}, лишние {unexpected[:5]}'
            )
        for name, array in arrays.items():
            if name not in self._entries:
                continue
            node = self._entries[name].node
            if tuple(array.shape) != node.shape:
                raise ValidationError(
                    f'Параметр {name}: форма {tuple(array.shape)} не совпадает с {node.shape}'
                )
            node.value[...] = np.asarray(array, dtype=node.dtype)
        logger.debug('Загружено %d массивов параметров', len(arrays))
