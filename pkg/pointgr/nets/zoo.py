"""
Сети для трёх задач: классификация, сегментация частей и сегментация сцен.

Общий остов: PRE, три блока FLN, конкатенация выходов всех блоков
(6 + 64 + 128 + 256 = 454 для xyz) и поточечное отображение 454→1024.
"""
import logging
from dataclasses import dataclass, field, fields, replace
from typing import ClassVar

import numpy as np

from pointgr.autodiff import (
    DiffNode,
    Engine,
    ParamStore,
    batch_norm,
    concat,
    dropout,
    expand_points,
    leaky_relu,
    linear_per_point,
    max_over_axis,
    mean_over_axis,
)
from pointgr.exceptions import DimensionError, LabelError

from .blocks import FLNConfig, PREConfig, add_fln_params, add_pre_params, fln_forward, pre_forward

logger = logging.getLogger(__name__)

CLASSIFICATION = 'classification'
PARTSEG = 'partseg'
SCENESEG = 'sceneseg'


@dataclass
class BackboneSpec:
    """
    Общая часть спецификаций.

    Атрибуты:
        classes (int): Число выходов m (классы, части или семантические классы)
        n_points (int): Число точек во входном облаке
        k (int): Число соседей во всех графах
        channels (int): Каналы входа
        pre_hidden (int): Скрытая ширина ветви PRE
        pre_out (int): Ширина выхода PRE, при 0 берётся удвоенное число каналов
        fln_widths (tuple): Выходные ширины блоков FLN
        aggregate_width (int): Ширина поточечного отображения перед пулингом
        dropout (float): Доля dropout в полносвязной части
    """
    task: ClassVar[str] = ''

    classes: int
    n_points: int = 1024
    k: int = 20
    channels: int = 3
    pre_hidden: int = 64
    pre_out: int = 0
    fln_widths: tuple = (64, 128, 256)
    aggregate_width: int = 1024
    dropout: float = 0.5

    def __post_init__(self):
        self.fln_widths = tuple(self.fln_widths)
        if self.classes < 2:
            raise DimensionError(f'Число классов должно быть >= 2, получено {self.classes}')
        if not 1 <= self.k <= self.n_points:
            raise DimensionError(f'k={self.k} вне диапазона [1, n_points={self.n_points}]')

    @property
    def pre_config(self):
        return PREConfig(in_channels=self.channels, k=self.k, hidden=self.pre_hidden, out=self.pre_out)

    @property
    def fln_configs(self):
        widths = (self.pre_config.out,) + self.fln_widths
        return [FLNConfig(in_channels=c_in, out_channels=c_out, k=self.k) for c_in, c_out in zip(widths, widths[1:])]

    @property
    def concat_width(self):
        return self.pre_config.out + sum(self.fln_widths)

    def with_overrides(self, **overrides):
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **overrides)


@dataclass
class ClassifierSpec(BackboneSpec):
    """
    Классификация: глобальный пулинг и полносвязная часть (512, 256, m).

    ``global_pool``: max_mean (максимум ‖ среднее, ширина 2·1024) или max.
    """
    task: ClassVar[str] = CLASSIFICATION

    classes: int = 40
    fc: tuple = (512, 256)
    global_pool: str = 'max_mean'

    @property
    def pooled_width(self):
        return self.aggregate_width * (2 if self.global_pool == 'max_mean' else 1)


@dataclass
class PartSegSpec(BackboneSpec):
    """Сегментация частей с кодированием категории объекта."""
    task: ClassVar[str] = PARTSEG

    classes: int = 50
    n_points: int = 2048
    k: int = 40
    categories: int = 16
    label_width: int = 64
    head: tuple = (256, 128)
    dropout: float = 0.0


@dataclass
class SceneSegSpec(BackboneSpec):
    """Сегментация сцен: 9 каналов, без кодирования категории."""
    task: ClassVar[str] = SCENESEG

    classes: int = 13
    n_points: int = 4096
    channels: int = 9
    head: tuple = (256, 128)
    dropout: float = 0.0


SPEC_CLASSES = {
    CLASSIFICATION: ClassifierSpec,
    PARTSEG: PartSegSpec,
    SCENESEG: SceneSegSpec,
}

# Узкие сети для обучения на синтетике за минуты на CPU.
DESK_BACKBONE = dict(pre_hidden=32, fln_widths=(32, 32, 64), aggregate_width=128)
PRESETS = {
    'full': {CLASSIFICATION: {}, PARTSEG: {}, SCENESEG: {}},
    'desk': {
        CLASSIFICATION: dict(DESK_BACKBONE, fc=(64,), dropout=0.2),
        PARTSEG: dict(DESK_BACKBONE, label_width=16, head=(64,)),
        SCENESEG: dict(DESK_BACKBONE, head=(64,)),
    },
}


def spec_for_task(task, classes=None, preset='full', **overrides):
    """
    Спецификация задачи со значениями по умолчанию и переопределениями.

    ``preset`` выбирает набор ширин: full (полная сеть) или desk;
    явные переопределения применяются поверх него.
    """
    try:
        spec_class = SPEC_CLASSES[task]
    except KeyError:
        raise ValueError(f'Неизвестная задача {task!r}, допустимо: {", ".join(SPEC_CLASSES)}') from None
    if preset not in PRESETS:
        raise ValueError(f'Неизвестный набор ширин {preset!r}, допустимо: {", ".join(PRESETS)}')
    names = {item.name for item in fields(spec_class)}
    unknown = sorted(set(overrides) - names)
    if unknown:
        raise ValueError(f'Спецификация {task}: неизвестные поля {", ".join(unknown)}')
    values = dict(PRESETS[preset][task])
    values.update({key: value for key, value in overrides.items() if value is not None})
    if classes is not None:
        values['classes'] = classes
    return spec_class(**values)


def build_params(spec, seed=0, precision=None):
    """
    Создаёт параметры сети по спецификации.

    Последний слой инициализируется нулями, так что необученная сеть
    выдаёт равные логиты.
    """
    params = ParamStore(Engine(precision))
    rng = np.random.default_rng(seed)
    add_pre_params(params, 'pre', spec.pre_config, rng)
    for index, cfg in enumerate(spec.fln_configs, start=1):
        add_fln_params(params, f'fln{index}', cfg, rng)
    params.linear('agg.conv', spec.concat_width, spec.aggregate_width, rng, bias=False)
    params.batch_norm('agg.bn', spec.aggregate_width)

    if spec.task == CLASSIFICATION:
        width = spec.pooled_width
        for index, fc_width in enumerate(spec.fc, start=1):
            params.linear(f'fc{index}', width, fc_width, rng, bias=False)
            params.batch_norm(f'fc{index}_bn', fc_width)
            width = fc_width
        params.linear('fc_out', width, spec.classes, rng, zero=True)
    else:
        width = spec.aggregate_width + spec.concat_width
        if spec.task == PARTSEG:
            params.linear('label', spec.categories, spec.label_width, rng)
            width += spec.label_width
        for index, head_width in enumerate(spec.head, start=1):
            params.linear(f'seg{index}', width, head_width, rng, bias=False)
            params.batch_norm(f'seg{index}_bn', head_width)
            width = head_width
        params.linear('seg_out', width, spec.classes, rng, zero=True)

    logger.debug('Сеть %s: %d обучаемых параметров', spec.task, params.count_trainable())
    return params


def count_trainable(params):
    return params.count_trainable()


def _as_node(data, params):
    if isinstance(data, DiffNode):
        return data
    return params.engine.constant(data, name='input')


def backbone(x, spec, params, mode):
    """PRE → FLN×3 и конкатенация их выходов: [B, N, concat_width]."""
    if x.value.ndim != 3 or x.shape[1] != spec.n_points or x.shape[2] != spec.channels:
        raise DimensionError(
            f'Ожидается вход [B, {spec.n_points}, {spec.channels}]', x.shape
        )
    h = pre_forward(x, spec.pre_config, params, mode)
    features = [h]
    for index, cfg in enumerate(spec.fln_configs, start=1):
        h = fln_forward(h, cfg, params, mode, prefix=f'fln{index}')
        features.append(h)
    return concat(features, axis=2)


def _aggregate(features, params, mode):
    h = linear_per_point(features, params['agg.conv.weight'])
    return leaky_relu(batch_norm(h, params.bn_state('agg.bn'), mode))


def _dense(h, params, name, mode, rate, rng):
    h = linear_per_point(h, params[f'{name}.weight'])
    h = leaky_relu(batch_norm(h, params.bn_state(f'{name}_bn'), mode))
    return dropout(h, rate, rng, mode)


def classify(points, params, mode, spec, rng=None):
    """
    Логиты классов [B, m] для облаков [B, N, 3].
    """
    rng = rng or np.random.default_rng(0)
    aggregated = _aggregate(backbone(_as_node(points, params), spec, params, mode), params, mode)
    pooled = max_over_axis(aggregated, axis=1)
    if spec.global_pool == 'max_mean':
        pooled = concat([pooled, mean_over_axis(aggregated, axis=1)], axis=1)
    h = pooled
    for index in range(1, len(spec.fc) + 1):
        h = _dense(h, params, f'fc{index}', mode, spec.dropout, rng)
    return linear_per_point(h, params['fc_out.weight'], params['fc_out.bias'])


def _segmentation_head(features, global_vector, params, spec, mode, rng):
    n = features.shape[1]
    h = concat([expand_points(global_vector, n), features], axis=2)
    for index in range(1, len(spec.head) + 1):
        h = _dense(h, params, f'seg{index}', mode, spec.dropout, rng)
    return linear_per_point(h, params['seg_out.weight'], params['seg_out.bias'])


def category_one_hot(categories, num_categories, batch):
    """Целые индексы категорий [B] или готовый one-hot [B, categories] -> one-hot."""
    categories = np.asarray(categories)
    if categories.ndim == 2:
        if categories.shape != (batch, num_categories):
            raise DimensionError('Неверная форма one-hot категорий', categories.shape, (batch, num_categories))
        return categories
    if categories.shape != (batch,):
        raise DimensionError('Неверная форма индексов категорий', categories.shape, (batch,))
    if categories.min() < 0 or categories.max() >= num_categories:
        raise LabelError(f'Индекс категории вне диапазона [0, {num_categories})')
    return np.eye(num_categories)[categories]


def part_segment(points, categories, params, mode, spec, rng=None):
    """
    Логиты частей [B, N, parts].

    Глобальный вектор (максимум по точкам) и вложение категории
    транслируются на все точки и объединяются с поточечными признаками остова.
    """
    rng = rng or np.random.default_rng(0)
    x = _as_node(points, params)
    features = backbone(x, spec, params, mode)
    pooled = max_over_axis(_aggregate(features, params, mode), axis=1)
    one_hot = params.engine.constant(category_one_hot(categories, spec.categories, x.shape[0]), name='category')
    label = leaky_relu(linear_per_point(one_hot, params['label.weight'], params['label.bias']))
    return _segmentation_head(features, concat([pooled, label], axis=1), params, spec, mode, rng)


def scene_segment(block, params, mode, spec, rng=None):
    """Логиты семантических классов [B, N, 13] для блоков [B, N, 9]."""
    rng = rng or np.random.default_rng(0)
    features = backbone(_as_node(block, params), spec, params, mode)
    pooled = max_over_axis(_aggregate(features, params, mode), axis=1)
    return _segmentation_head(features, pooled, params, spec, mode, rng)


def masked_part_predictions(logits, categories, category_parts):
    """
    argmax по частям, допустимым для категории каждого образца.

    Категории без записи в ``category_parts`` используют все части.
    """
    logits = np.asarray(logits)
    predictions = np.empty(logits.shape[:-1], dtype=np.int64)
    for index, category in enumerate(np.asarray(categories).reshape(-1)):
        allowed = category_parts.get(int(category)) if category_parts else None
        if not allowed:
            predictions[index] = logits[index].argmax(axis=-1)
            continue
        allowed = np.asarray(sorted(allowed), dtype=np.int64)
        predictions[index] = allowed[logits[index][..., allowed].argmax(axis=-1)]
    return predictions


@dataclass
class PointGRModel:
    """
    Спецификация и параметры сети вместе.

    Атрибуты:
        spec (BackboneSpec): Спецификация задачи
        params (ParamStore): Параметры
        category_parts (dict): Части по категориям (для маскирования в partseg)
    """
    spec: BackboneSpec
    params: ParamStore
    category_parts: dict = field(default_factory=dict)

    @classmethod
    def build(cls, spec, seed=0, precision=None, category_parts=None):
        return cls(spec=spec, params=build_params(spec, seed, precision), category_parts=category_parts or {})

    @property
    def task(self):
        return self.spec.task

    def forward(self, points, mode, rng=None, categories=None):
        if self.task == CLASSIFICATION:
            return classify(points, self.params, mode, self.spec, rng)
        if self.task == PARTSEG:
            if categories is None:
                raise LabelError('Для сегментации частей нужны категории образцов')
            return part_segment(points, categories, self.params, mode, self.spec, rng)
        return scene_segment(points, self.params, mode, self.spec, rng)

    def predict(self, logits, categories=None):
        """Метки из логитов; в partseg argmax ограничен частями категории."""
        if self.task == PARTSEG and categories is not None:
            return masked_part_predictions(logits, categories, self.category_parts)
        return np.asarray(logits).argmax(axis=-1)
