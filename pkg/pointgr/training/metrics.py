"""
Метрики качества: точность, средняя точность по классам, IoU.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pointgr.exceptions import DimensionError, LabelError


@dataclass
class MetricReport:
    """
    Отчёт о качестве предсказаний.

    Атрибуты:
        task (str): Задача
        overall_accuracy (float): Доля верных меток
        mean_class_accuracy (float): Средняя полнота по классам, у которых есть примеры
        per_class_iou (list): IoU по классам; None, если класс не встречается ни в
            предсказаниях, ни в разметке
        mean_iou (float): Для partseg среднее по образцам IoU частей их
            категории, иначе среднее IoU классов по всей части набора;
            класс, которого нет ни в предсказаниях, ни в разметке, в
            среднее не входит (для сцен из 13 классов делитель меньше 13)
        overall_iou (float): Микро-IoU: ΣTP / Σ(TP + FP + FN)
        confusion (ndarray): Матрица m×m, строки соответствуют истинным классам
        per_category_iou (dict): Категория -> средний IoU образцов (partseg)
        shape_count (int): Число образцов
        loss (float): Средняя функция потерь, если посчитана
    """
    task: str
    overall_accuracy: float
    mean_class_accuracy: float
    per_class_iou: list
    mean_iou: float
    overall_iou: float
    confusion: np.ndarray
    per_category_iou: dict = field(default_factory=dict)
    shape_count: int = 0
    loss: Optional[float] = None


def confusion_matrix(pred, true, num_classes):
    pred = np.asarray(pred, dtype=np.int64).reshape(-1)
    true = np.asarray(true, dtype=np.int64).reshape(-1)
    for name, labels in (('pred', pred), ('true', true)):
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise LabelError(f'Метки {name} вне диапазона [0, {num_classes})')
    return np.bincount(true * num_classes + pred, minlength=num_classes ** 2).reshape(num_classes, num_classes)


def shape_part_iou(pred, true, parts):
    """Средний IoU частей одного образца; часть, которой нет ни в pred, ни в true, даёт 1."""
    scores = []
    for part in parts:
        p = pred == part
        t = true == part
        union = np.count_nonzero(p | t)
        scores.append(1.0 if union == 0 else np.count_nonzero(p & t) / union)
    return float(np.mean(scores))


def compute_metrics(pred, true, task, num_classes, categories=None, category_parts=None, loss=None):
    """
    Считает MetricReport.

    Args:
        pred, true: метки [S] (классификация) или [S, N] (сегментация)
        task (str): classification, partseg или sceneseg
        num_classes (int): m
        categories: категории образцов [S] (partseg)
        category_parts (dict): категория -> список частей (partseg)
    """
    pred = np.asarray(pred, dtype=np.int64)
    true = np.asarray(true, dtype=np.int64)
    if pred.shape != true.shape:
        raise DimensionError('compute_metrics: длины предсказаний и разметки различаются', pred.shape, true.shape)
    if pred.size == 0:
        raise DimensionError('compute_metrics: пустой набор предсказаний', pred.shape)

    confusion = confusion_matrix(pred, true, num_classes)
    tp = np.diag(confusion).astype(np.float64)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    denominators = support + predicted - tp

    overall_accuracy = float(tp.sum() / confusion.sum())
    has_support = support > 0
    mean_class_accuracy = float(np.mean(tp[has_support] / support[has_support]))
    per_class_iou = [float(tp[c] / denominators[c]) if denominators[c] > 0 else None for c in range(num_classes)]
    defined = [value for value in per_class_iou if value is not None]
    mean_iou = float(np.mean(defined))
    overall_iou = float(tp.sum() / denominators.sum())

    per_category_iou = {}
    shape_count = pred.shape[0]
    if task == 'partseg':
        if categories is None:
            raise DimensionError('compute_metrics: для partseg нужны категории образцов')
        categories = np.asarray(categories).reshape(-1)
        if categories.shape[0] != shape_count:
            raise DimensionError('compute_metrics: число категорий не совпадает с числом образцов', categories.shape, pred.shape)
        all_parts = list(range(num_classes))
        shape_scores = []
        by_category = {}
        for index in range(shape_count):
            category = int(categories[index])
            parts = (category_parts or {}).get(category) or all_parts
            score = shape_part_iou(pred[index], true[index], parts)
            shape_scores.append(score)
            by_category.setdefault(category, []).append(score)
        mean_iou = float(np.mean(shape_scores))
        per_category_iou = {category: float(np.mean(scores)) for category, scores in sorted(by_category.items())}

    return MetricReport(
        task=task,
        overall_accuracy=overall_accuracy,
        mean_class_accuracy=mean_class_accuracy,
        per_class_iou=per_class_iou,
        mean_iou=mean_iou,
        overall_iou=overall_iou,
        confusion=confusion,
        per_category_iou=per_category_iou,
        shape_count=shape_count,
        loss=loss,
    )
