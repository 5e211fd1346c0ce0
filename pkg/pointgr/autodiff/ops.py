"""
Дифференцируемые операции над DiffNode.

Каждая операция вычисляет значение, проверяет его на NaN/Inf и
регистрирует локальную функцию обратного прохода.
"""
from dataclasses import dataclass

import numpy as np

from pointgr.conf import pointgr_setting
from pointgr.exceptions import DimensionError, LabelError

from .node import EVAL, TRAIN, DiffNode, check_finite


def make_node(value, parents, backward_fn, op):
    """Создаёт узел результата операции ``op`` с проверкой конечности значения."""
    check_finite(value, op)
    return DiffNode(value, parents=parents, backward_fn=backward_fn, name=op)


def _axis(axis, ndim):
    if not -ndim <= axis < ndim:
        raise DimensionError(f'Ось {axis} вне диапазона для массива размерности {ndim}')
    return axis % ndim


def linear_per_point(x, w, b=None):
    """
    Общее для всех точек линейное отображение по последней оси.

    y[..., j] = sum_i x[..., i] * w[i, j] + b[j]
    """
    if w.value.ndim != 2 or x.shape[-1] != w.shape[0]:
        raise DimensionError('linear_per_point: последняя ось x не совпадает с C_in весов', x.shape, w.shape)
    c_in, c_out = w.shape
    if b is not None and b.shape != (c_out,):
        raise DimensionError('linear_per_point: смещение не совпадает с C_out', b.shape, (c_out,))

    x_flat = x.value.reshape(-1, c_in)
    out = x_flat @ w.value
    if b is not None:
        out = out + b.value
    out = out.reshape(x.shape[:-1] + (c_out,))

    def backward(grad):
        g = grad.reshape(-1, c_out)
        if x.requires_grad:
            x.accumulate((g @ w.value.T).reshape(x.shape))
        if w.requires_grad:
            w.accumulate(x_flat.T @ g)
        if b is not None and b.requires_grad:
            b.accumulate(g.sum(axis=0))

    parents = (x, w) if b is None else (x, w, b)
    return make_node(out, parents, backward, 'linear_per_point')


@dataclass
class BatchNormState:
    """
    Параметры и статистики одного слоя пакетной нормализации.

    Атрибуты:
        gamma (DiffNode): Обучаемый масштаб
        beta (DiffNode): Обучаемый сдвиг
        running_mean (DiffNode): Скользящее среднее (не обучается)
        running_var (DiffNode): Скользящая дисперсия (не обучается)
    """
    gamma: DiffNode
    beta: DiffNode
    running_mean: DiffNode
    running_var: DiffNode

    @property
    def channels(self):
        return self.gamma.shape[0]


def batch_norm(x, state, mode=TRAIN, momentum=None, eps=None):
    """
    Пакетная нормализация по всем осям, кроме последней (каналы).

    В режиме train используются статистики пакета и обновляются скользящие
    средние; в режиме eval используются скользящие статистики (до первого
    шага обучения это 0 и 1).
    """
    momentum = pointgr_setting('BN_MOMENTUM') if momentum is None else momentum
    eps = pointgr_setting('BN_EPS') if eps is None else eps
    channels = x.shape[-1]
    if state.channels != channels:
        raise DimensionError('batch_norm: число каналов не совпадает', x.shape, state.gamma.shape)

    axes = tuple(range(x.value.ndim - 1))
    count = x.value.size // channels
    if mode == TRAIN:
        if count == 0:
            raise DimensionError('batch_norm: пустой пакет', x.shape)
        mean = x.value.mean(axis=axes)
        var = x.value.var(axis=axes)
        state.running_mean.value[...] = momentum * state.running_mean.value + (1.0 - momentum) * mean
        state.running_var.value[...] = momentum * state.running_var.value + (1.0 - momentum) * var
    elif mode == EVAL:
        mean = state.running_mean.value.copy()
        var = state.running_var.value.copy()
    else:
        raise ValueError(f'Неизвестный режим {mode!r}, допустимо: {TRAIN}, {EVAL}')

    gamma, beta = state.gamma, state.beta
    inv_std = (1.0 / np.sqrt(var + eps)).astype(x.dtype)
    x_hat = (x.value - mean) * inv_std
    out = x_hat * gamma.value + beta.value

    def backward(grad):
        if gamma.requires_grad:
            gamma.accumulate((grad * x_hat).sum(axis=axes))
        if beta.requires_grad:
            beta.accumulate(grad.sum(axis=axes))
        if x.requires_grad:
            g_hat = grad * gamma.value
            if mode == TRAIN:
                dx = (inv_std / count) * (
                    count * g_hat
                    - g_hat.sum(axis=axes)
                    - x_hat * (g_hat * x_hat).sum(axis=axes)
                )
            else:
                dx = g_hat * inv_std
            x.accumulate(dx)

    return make_node(out, (x, gamma, beta), backward, 'batch_norm')


def relu(x):
    mask = x.value > 0
    out = np.where(mask, x.value, 0).astype(x.dtype)

    def backward(grad):
        x.accumulate(grad * mask)

    return make_node(out, (x,), backward, 'relu')


def leaky_relu(x, slope=None):
    slope = pointgr_setting('LEAKY_SLOPE') if slope is None else slope
    scale = np.where(x.value > 0, 1.0, slope).astype(x.dtype)
    out = x.value * scale

    def backward(grad):
        x.accumulate(grad * scale)

    return make_node(out, (x,), backward, 'leaky_relu')


def max_over_axis(x, axis, keepdims=False):
    """
    Максимум по оси. Градиент уходит только в элемент-максимум
    (при равенстве значений в элемент с наименьшим индексом).
    """
    axis = _axis(axis, x.value.ndim)
    if x.shape[axis] == 0:
        raise DimensionError(f'max_over_axis: пустая ось {axis}', x.shape)
    index = np.expand_dims(np.argmax(x.value, axis=axis), axis)
    out = np.take_along_axis(x.value, index, axis=axis)
    if not keepdims:
        out = np.squeeze(out, axis=axis)

    def backward(grad):
        if not keepdims:
            grad = np.expand_dims(grad, axis)
        full = np.zeros_like(x.value)
        np.put_along_axis(full, index, grad, axis=axis)
        x.accumulate(full)

    return make_node(out, (x,), backward, 'max_over_axis')


def mean_over_axis(x, axis, keepdims=False):
    axis = _axis(axis, x.value.ndim)
    size = x.shape[axis]
    if size == 0:
        raise DimensionError(f'mean_over_axis: пустая ось {axis}', x.shape)
    out = x.value.mean(axis=axis, keepdims=keepdims)

    def backward(grad):
        if not keepdims:
            grad = np.expand_dims(grad, axis)
        x.accumulate(np.broadcast_to(grad / size, x.shape).astype(x.dtype))

    return make_node(out, (x,), backward, 'mean_over_axis')


def concat(xs, axis):
    xs = list(xs)
    if not xs:
        raise DimensionError('concat: пустой список входов')
    ndim = xs[0].value.ndim
    axis = _axis(axis, ndim)
    first = tuple(s for i, s in enumerate(xs[0].shape) if i != axis)
    for node in xs[1:]:
        other = tuple(s for i, s in enumerate(node.shape) if i != axis)
        if node.value.ndim != ndim or other != first:
            raise DimensionError('concat: формы несовместимы', xs[0].shape, node.shape)
    out = np.concatenate([node.value for node in xs], axis=axis)
    offsets = np.cumsum([node.shape[axis] for node in xs])[:-1]

    def backward(grad):
        for node, part in zip(xs, np.split(grad, offsets, axis=axis)):
            if node.requires_grad:
                node.accumulate(np.ascontiguousarray(part))

    return make_node(out, tuple(xs), backward, 'concat')


def add(a, b):
    if a.shape != b.shape:
        raise DimensionError('add: формы не совпадают', a.shape, b.shape)
    out = a.value + b.value

    def backward(grad):
        a.accumulate(grad)
        b.accumulate(grad)

    return make_node(out, (a, b), backward, 'add')


def reshape(x, shape):
    out = x.value.reshape(shape)

    def backward(grad):
        x.accumulate(grad.reshape(x.shape))

    return make_node(out, (x,), backward, 'reshape')


def expand_points(x, n):
    """Повторяет вектор каждого примера [B, D] для всех n точек: [B, n, D]."""
    if x.value.ndim != 2:
        raise DimensionError('expand_points: ожидается массив [B, D]', x.shape)
    out = np.repeat(x.value[:, None, :], n, axis=1)

    def backward(grad):
        x.accumulate(grad.sum(axis=1))

    return make_node(out, (x,), backward, 'expand_points')


def dropout(x, rate, rng, mode=TRAIN):
    """Обратный dropout: в режиме train зануляет долю ``rate`` и масштабирует остаток."""
    if mode != TRAIN or rate <= 0.0:
        return x
    if not 0.0 <= rate < 1.0:
        raise ValueError(f'dropout: доля {rate} вне диапазона [0, 1)')
    mask = ((rng.random(x.shape) >= rate) / (1.0 - rate)).astype(x.dtype)
    out = x.value * mask

    def backward(grad):
        x.accumulate(grad * mask)

    return make_node(out, (x,), backward, 'dropout')


def softmax_cross_entropy(logits, labels, label_smoothing=0.0):
    """
    Средняя кросс-энтропия softmax по всем примерам.

    logits имеет форму [..., m], labels содержит целые метки формы [...] в [0, m).
    """
    m = logits.shape[-1]
    labels = np.asarray(labels)
    if labels.shape != logits.shape[:-1]:
        raise DimensionError('softmax_cross_entropy: форма меток не совпадает с логитами', labels.shape, logits.shape)
    if labels.size == 0 or m == 0:
        raise DimensionError('softmax_cross_entropy: пустой пакет', logits.shape)
    if labels.min() < 0 or labels.max() >= m:
        raise LabelError(f'softmax_cross_entropy: метка вне диапазона [0, {m})')

    flat_labels = labels.reshape(-1).astype(np.int64)
    z = logits.value.reshape(-1, m)
    shifted = z - z.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    target = np.full(z.shape, label_smoothing / m, dtype=logits.dtype)
    target[np.arange(z.shape[0]), flat_labels] += 1.0 - label_smoothing
    count = z.shape[0]
    loss = np.asarray(-(target * log_probs).sum() / count, dtype=logits.dtype)

    def backward(grad):
        probs = np.exp(log_probs)
        logits.accumulate((grad * (probs - target) / count).reshape(logits.shape).astype(logits.dtype))

    return make_node(loss, (logits,), backward, 'softmax_cross_entropy')
