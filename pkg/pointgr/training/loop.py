"""
Циклы обучения и оценки.
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from django.core.exceptions import ValidationError

from pointgr.autodiff import EVAL, TRAIN, softmax_cross_entropy
from pointgr.data.sampling import uniform_sample
from pointgr.exceptions import NonFiniteError, TrainingDiverged
from pointgr.nets.zoo import CLASSIFICATION, PARTSEG, PointGRModel

from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig
from .metrics import compute_metrics
from .optim import SGD

logger = logging.getLogger(__name__)

METRICS_FILE = 'metrics.csv'
CHECKPOINT_DIR = 'checkpoint'
CSV_HEADER = ('epoch', 'split', 'loss', 'overall_acc', 'mean_acc', 'mean_iou')


@dataclass
class SplitArrays:
    """
    Образцы одной части набора, приведённые к n точек.

    Атрибуты:
        points (ndarray): [S, n, C]
        labels (ndarray): [S] для классификации, [S, n] для сегментации
        categories (ndarray): [S] категорий (partseg) или None
    """
    points: np.ndarray
    labels: np.ndarray
    categories: Optional[np.ndarray] = None

    def __len__(self):
        return self.points.shape[0]

    def batch(self, indices):
        categories = None if self.categories is None else self.categories[indices]
        return self.points[indices], self.labels[indices], categories


@dataclass
class TrainResult:
    """
    Итог обучения.

    Атрибуты:
        checkpoint (Path): Каталог лучшей контрольной точки
        metrics_path (Path): CSV с метриками по эпохам
        best_epoch (int): Эпоха лучшей контрольной точки (0 для начальных весов)
        history (list): Строки CSV без заголовка
        final_report (MetricReport): Отчёт последней эпохи на проверочной части
    """
    checkpoint: Path
    metrics_path: Path
    best_epoch: int = 0
    history: list = field(default_factory=list)
    final_report: Optional[object] = None


def load_split(manifest, records, n_points, rng):
    """Читает образцы и выбирает из каждого ровно n_points точек."""
    points, labels, categories = [], [], []
    for record in records:
        cloud = manifest.load_cloud(record)
        manifest.validate_cloud(record, cloud)
        cloud = uniform_sample(cloud, n_points, rng)
        points.append(cloud.points)
        if manifest.task == CLASSIFICATION:
            labels.append(cloud.class_label)
        else:
            labels.append(cloud.part_labels)
        categories.append(cloud.category if cloud.category is not None else 0)
    return SplitArrays(
        points=np.stack(points),
        labels=np.asarray(np.stack(labels) if manifest.task != CLASSIFICATION else labels, dtype=np.int64),
        categories=np.asarray(categories, dtype=np.int64) if manifest.task == PARTSEG else None,
    )


def _check_compatible(manifest, spec):
    if manifest.task != spec.task:
        raise ValidationError(f'Задача модели {spec.task} не совпадает с задачей набора {manifest.task}')
    if spec.classes != manifest.num_classes:
        raise ValidationError(f'Модель на {spec.classes} классов, в наборе {manifest.num_classes}')
    if spec.channels != manifest.channels:
        raise ValidationError(f'Модель на {spec.channels} каналов, в наборе {manifest.channels}')
    if spec.task == PARTSEG and spec.categories < manifest.num_categories:
        raise ValidationError(f'Модель на {spec.categories} категорий, в наборе {manifest.num_categories}')


def _batches(count, batch, rng=None):
    order = np.arange(count) if rng is None else rng.permutation(count)
    chunks = [order[start:start + batch] for start in range(0, count, batch)]
    # пакетная нормализация в режиме train требует хотя бы двух образцов
    if rng is not None and len(chunks) > 1 and len(chunks[-1]) < 2:
        chunks.pop()
    return chunks


def run_epoch(model, data, config, mode, optimizer=None, lr=None, rng=None):
    """
    Один проход по данным.

    В режиме train выполняется шаг оптимизатора на каждом пакете.

    Returns:
        MetricReport
    """
    total_loss = 0.0
    seen = 0
    predictions = np.empty_like(data.labels)
    chunks = _batches(len(data), config.batch, rng if mode == TRAIN else None)
    for indices in chunks:
        points, labels, categories = data.batch(indices)
        if mode == TRAIN:
            optimizer.zero_grad()
        try:
            logits = model.forward(points, mode, rng=rng, categories=categories)
            loss = softmax_cross_entropy(logits, labels, config.label_smoothing)
            if mode == TRAIN:
                loss.backward()
                optimizer.step(lr)
        except NonFiniteError as exc:
            logger.error('Обучение разошлось: %s', exc)
            raise TrainingDiverged(f'Функция потерь или градиент стали NaN/Inf: {exc}') from exc
        value = float(loss.value)
        if not np.isfinite(value):
            raise TrainingDiverged(f'Функция потерь стала {value}')
        total_loss += value * len(indices)
        seen += len(indices)
        predictions[indices] = model.predict(logits.value, categories)

    used = np.concatenate(chunks) if chunks else np.arange(0)
    return compute_metrics(
        predictions[used],
        data.labels[used],
        model.task,
        model.spec.classes,
        categories=None if data.categories is None else data.categories[used],
        category_parts=model.category_parts,
        loss=total_loss / max(seen, 1),
    )


def _score(report, task):
    return report.overall_accuracy if task == CLASSIFICATION else report.mean_iou


def _csv_row(epoch, split, report):
    return [
        str(epoch),
        split,
        f'{report.loss:.6f}',
        f'{report.overall_accuracy:.6f}',
        f'{report.mean_class_accuracy:.6f}',
        f'{report.mean_iou:.6f}',
    ]


def train(manifest, spec, config, out_dir, holdout_group=None):
    """
    Обучает модель и пишет ``metrics.csv`` и лучшую контрольную точку.

    Лучшая эпоха выбирается по проверочной части (test или отложенная
    группа), а если её нет, по обучающей: точность для классификации,
    mIoU для сегментации. При epochs = 0 сохраняются начальные веса и
    CSV из одного заголовка.

    Returns:
        TrainResult
    """
    spec = spec.with_overrides(n_points=config.n_points, k=config.k)
    _check_compatible(manifest, spec)
    if holdout_group:
        train_records, eval_records = manifest.fold(holdout_group)
    else:
        train_records, eval_records = manifest.split('train'), manifest.split('test')
    if not train_records:
        raise ValidationError('В наборе нет образцов для обучения.')

    rng = np.random.default_rng(config.seed)
    train_data = load_split(manifest, train_records, spec.n_points, rng)
    eval_data = load_split(manifest, eval_records, spec.n_points, rng) if eval_records else None

    model = PointGRModel.build(
        spec, seed=config.seed, precision=config.precision, category_parts=manifest.category_parts,
    )
    optimizer = SGD(model.params, lr=config.lr, momentum=config.momentum)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_dir = out_dir / CHECKPOINT_DIR
    metrics_path = out_dir / METRICS_FILE
    logger.info(
        'Обучение %s: %d обучающих, %d проверочных образцов, %d параметров',
        spec.task, len(train_data), len(eval_data) if eval_data else 0, model.params.count_trainable(),
    )

    result = TrainResult(checkpoint=checkpoint_dir, metrics_path=metrics_path)
    save_checkpoint(checkpoint_dir, model, optimizer, meta={'task': spec.task, 'epoch': 0, 'score': None})
    best_score = None
    with open(metrics_path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for epoch in range(1, config.epochs + 1):
            lr = config.lr_at(epoch - 1)
            train_report = run_epoch(model, train_data, config, TRAIN, optimizer, lr, rng)
            rows = [_csv_row(epoch, 'train', train_report)]
            selected = train_report
            if eval_data is not None:
                selected = run_epoch(model, eval_data, config, EVAL)
                rows.append(_csv_row(epoch, 'test', selected))
            writer.writerows(rows)
            result.history.extend(rows)
            result.final_report = selected

            score = _score(selected, spec.task)
            logger.info(
                'Эпоха %d/%d: lr=%.5f loss=%.4f acc=%.4f mIoU=%.4f',
                epoch, config.epochs, lr, train_report.loss, train_report.overall_accuracy, selected.mean_iou,
            )
            if best_score is None or score > best_score:
                best_score = score
                result.best_epoch = epoch
                save_checkpoint(checkpoint_dir, model, optimizer, meta={'task': spec.task, 'epoch': epoch, 'score': score})
    return result


def evaluate(checkpoint, manifest, split='test', batch=32, seed=0, precision=None):
    """
    Оценивает контрольную точку на части набора.

    Если запрошенной части нет, используется обучающая.

    Returns:
        tuple: (MetricReport, фактически использованная часть)
    """
    model, _ = load_checkpoint(checkpoint, precision=precision, category_parts=manifest.category_parts)
    _check_compatible(manifest, model.spec)
    records = manifest.split(split)
    if not records and split == 'test':
        logger.warning('В наборе нет части test, оценка на train')
        split, records = 'train', manifest.split('train')
    if not records:
        raise ValidationError(f'В наборе нет образцов части {split}.')
    data = load_split(manifest, records, model.spec.n_points, np.random.default_rng(seed))
    report = run_epoch(model, data, TrainConfig(batch=batch), EVAL)
    return report, split
