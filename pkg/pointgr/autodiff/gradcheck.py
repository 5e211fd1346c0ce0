"""
Проверка аналитических градиентов центральными конечными разностями.
"""
import numpy as np


def relative_error(analytic, numeric, floor=1e-6):
    """|a - n| / max(|a|, |n|, floor): пол защищает почти нулевые градиенты."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def numeric_gradient(fn, node, index, h=1e-5):
    """Центральная разность d fn / d node.value[index]; значение узла восстанавливается."""
    original = node.value[index].copy()
    node.value[index] = original + h
    plus = float(fn().value)
    node.value[index] = original - h
    minus = float(fn().value)
    node.value[index] = original
    return (plus - minus) / (2.0 * h)


def gradcheck(fn, nodes, h=1e-5, samples=None, rng=None):
    """
    Сравнивает backward с конечными разностями.

    ``fn`` строит скалярный DiffNode из текущих значений ``nodes``. Если
    задано ``samples``, проверяется столько случайных элементов каждого
    узла, иначе все. Возвращает наибольшую относительную ошибку.
    """
    rng = rng or np.random.default_rng(0)
    for node in nodes:
        node.zero_grad()
    fn().backward()
    analytic = [node.grad.copy() for node in nodes]

    worst = 0.0
    for node, grad in zip(nodes, analytic):
        flat = np.arange(node.value.size)
        if samples is not None and samples < flat.size:
            flat = rng.choice(flat, size=samples, replace=False)
        for position in flat:
            index = np.unravel_index(position, node.shape)
            numeric = numeric_gradient(fn, node, index, h)
            worst = max(worst, relative_error(float(grad[index]), numeric))
    return worst
