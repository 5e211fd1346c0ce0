"""
Облако точек и его валидация.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.core.exceptions import ValidationError

MAX_U16 = 0xFFFF
NUM_CATEGORIES = 16


@dataclass(eq=False)
class PointCloud:
    """
    Облако из N точек с C атрибутами.

    Атрибуты:
        points (ndarray): Массив N×C float32, столбцы 0–2 содержат x, y, z
        class_label (int): Метка класса всего облака (необязательно)
        part_labels (ndarray): N целых меток точек: части объекта или
            семантические классы сцены (необязательно)
        category (int): Категория объекта для сегментации частей, [0, 16)
    """
    points: np.ndarray
    class_label: Optional[int] = None
    part_labels: Optional[np.ndarray] = None
    category: Optional[int] = None

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float32)
        if self.part_labels is not None:
            self.part_labels = np.ascontiguousarray(self.part_labels, dtype=np.int64)
        if self.class_label is not None:
            self.class_label = int(self.class_label)
        if self.category is not None:
            self.category = int(self.category)
        self.validate()

    def validate(self):
        """Проверяет инварианты облака; при нарушении ValidationError."""
        if self.points.ndim != 2:
            raise ValidationError(f'Облако должно быть массивом N×C, получено {self.points.shape}')
        n, c = self.points.shape
        if n < 1:
            raise ValidationError('Облако должно содержать хотя бы одну точку.')
        if c < 3:
            raise ValidationError(f'Нужно минимум 3 канала (x, y, z), получено {c}.')
        if not np.all(np.isfinite(self.points)):
            raise ValidationError('Координаты и атрибуты точек должны быть конечными.')
        if self.part_labels is not None:
            if self.part_labels.shape != (n,):
                raise ValidationError(
                    f'Число меток точек ({self.part_labels.shape[0] if self.part_labels.ndim else 0}) '
                    f'не совпадает с числом точек ({n}).'
                )
            if self.part_labels.size and (self.part_labels.min() < 0 or self.part_labels.max() > MAX_U16):
                raise ValidationError('Метки точек должны лежать в [0, 65535].')
        if self.class_label is not None and not 0 <= self.class_label <= MAX_U16:
            raise ValidationError(f'Метка класса {self.class_label} вне [0, 65535].')
        if self.category is not None and not 0 <= self.category < NUM_CATEGORIES:
            raise ValidationError(f'Категория {self.category} вне [0, {NUM_CATEGORIES}).')

    @property
    def num_points(self):
        return self.points.shape[0]

    @property
    def channels(self):
        return self.points.shape[1]

    @property
    def xyz(self):
        return self.points[:, :3]

    def take(self, indices):
        """Новое облако из точек с заданными индексами; метки точек переносятся."""
        indices = np.asarray(indices, dtype=np.int64)
        return PointCloud(
            points=self.points[indices],
            class_label=self.class_label,
            part_labels=None if self.part_labels is None else self.part_labels[indices],
            category=self.category,
        )

    def __repr__(self):
        return (
            f'PointCloud(N={self.num_points}, C={self.channels}, class_label={self.class_label}, '
            f'category={self.category}, part_labels={"yes" if self.part_labels is not None else "no"})'
        )
