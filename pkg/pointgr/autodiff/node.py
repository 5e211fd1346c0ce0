"""
Узлы вычислительного графа и выбор точности движка.
"""
import logging

import numpy as np

from pointgr.conf import pointgr_setting
from pointgr.exceptions import DimensionError, NonFiniteError

logger = logging.getLogger(__name__)

TRAIN = 'train'
EVAL = 'eval'

DTYPES = {
    'f32': np.float32,
    'f64': np.float64,
}


def resolve_dtype(precision=None):
    """
    Возвращает numpy-тип для точности 'f32' или 'f64'.

    Без аргумента используется настройка PRECISION (переменная PGR_PRECISION).
    """
    precision = precision or pointgr_setting('PRECISION')
    try:
        return np.dtype(DTYPES[precision])
    except KeyError:
        raise ValueError(f'Неизвестная точность {precision!r}, допустимо: f32, f64') from None


def check_finite(array, where):
    """Проверяет, что в массиве нет NaN/Inf; иначе NonFiniteError с именем операции."""
    if pointgr_setting('CHECK_FINITE') and not np.all(np.isfinite(array)):
        raise NonFiniteError(f'{where}: результат содержит NaN или Inf')
    return array


class DiffNode:
    """
    Узел графа обратного дифференцирования.

    Атрибуты:
        value (ndarray): Значение узла
        grad (ndarray): Накопленный градиент той же формы (нули до backward)
        parents (tuple): Узлы, от которых зависит значение
        backward_fn (callable): Получает градиент узла и раздаёт его родителям
        requires_grad (bool): Нужно ли накапливать градиент
    """

    __slots__ = ('value', '_grad', 'parents', 'backward_fn', 'requires_grad', 'name')

    def __init__(self, value, parents=(), backward_fn=None, requires_grad=None, name=''):
        self.value = value
        self._grad = None
        self.parents = tuple(parents)
        self.backward_fn = backward_fn
        if requires_grad is None:
            requires_grad = any(parent.requires_grad for parent in self.parents)
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    @property
    def grad(self):
        if self._grad is None:
            self._grad = np.zeros_like(self.value)
        return self._grad

    def accumulate(self, grad):
        """Прибавляет градиент к узлу; форма обязана совпадать со значением."""
        if not self.requires_grad:
            return
        if grad.shape != self.value.shape:
            raise DimensionError(f'Градиент узла {self.name or "?"} не совпадает по форме', grad.shape, self.value.shape)
        if self._grad is None:
            self._grad = np.array(grad, dtype=self.value.dtype, copy=True)
        else:
            self._grad += grad

    def zero_grad(self):
        self._grad = None

    def backward(self, seed=None):
        """
        Обратный проход от этого узла.

        Каждый узел посещается ровно один раз в обратном топологическом порядке.
        Для скалярного узла начальный градиент равен 1.
        """
        order = topological_order(self)
        if seed is None:
            seed = np.ones_like(self.value)
        self.accumulate(np.asarray(seed, dtype=self.value.dtype))
        for node in reversed(order):
            if node.backward_fn is None or node._grad is None or not node.requires_grad:
                continue
            node.backward_fn(node._grad)

    def __repr__(self):
        return f'DiffNode(name={self.name!r}, shape={self.shape}, dtype={self.dtype})'


def topological_order(root):
    """Родители раньше потомков; обход итеративный, без рекурсии."""
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


class Engine:
    """
    Фабрика листовых узлов фиксированной точности.

    Точность выбирается при создании движка; операции сохраняют тип
    своих входов, поэтому весь граф работает в одной точности.
    """

    def __init__(self, precision=None):
        self.dtype = resolve_dtype(precision)
        self.precision = 'f64' if self.dtype == np.float64 else 'f32'

    def array(self, data):
        array = np.array(data, dtype=self.dtype, copy=True, order='C')
        return check_finite(array, 'Engine.array')

    def constant(self, data, name=''):
        return DiffNode(self.array(data), requires_grad=False, name=name)

    def variable(self, data, name=''):
        return DiffNode(self.array(data), requires_grad=True, name=name)

    def __repr__(self):
        return f'Engine(precision={self.precision!r})'
