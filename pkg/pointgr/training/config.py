"""
Гиперпараметры обучения.
"""
from dataclasses import asdict, dataclass
from typing import Optional

from django.core.exceptions import ValidationError

from pointgr.forms import TrainConfigForm, load_config

from .optim import cosine_lr

TASK_LR = {
    'classification': 0.1,
    'partseg': 0.01,
    'sceneseg': 0.01,
}


@dataclass
class TrainConfig:
    """
    Конфигурация обучения.

    Атрибуты:
        lr (float): Начальная скорость обучения
        lr_min (float): Нижняя граница расписания, по умолчанию lr / 100
        momentum (float): Момент SGD
        scheduler (str): cosine или constant
        batch (int): Размер пакета
        epochs (int): Число эпох (T косинусного расписания)
        seed (int): Зерно всех генераторов
        precision (str): f32 или f64, по умолчанию настройка PRECISION
        label_smoothing (float): Сглаживание меток, при 0 обычная кросс-энтропия
        n_points (int): Переопределение числа точек модели
        k (int): Переопределение числа соседей модели
    """
    lr: float = 0.1
    lr_min: Optional[float] = None
    momentum: float = 0.9
    scheduler: str = 'cosine'
    batch: int = 32
    epochs: int = 100
    seed: int = 0
    precision: Optional[str] = None
    label_smoothing: float = 0.0
    n_points: Optional[int] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.lr_min is None:
            self.lr_min = self.lr / 100.0
        if not self.lr > self.lr_min >= 0:
            raise ValidationError(f'Нарушено lr > lr_min >= 0 (lr={self.lr}, lr_min={self.lr_min})')
        if self.batch < 1:
            raise ValidationError(f'Размер пакета должен быть >= 1, получено {self.batch}')
        if self.epochs < 0:
            raise ValidationError(f'Число эпох должно быть >= 0, получено {self.epochs}')

    @classmethod
    def for_task(cls, task, **overrides):
        values = {'lr': TASK_LR.get(task, 0.1)}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @classmethod
    def from_file(cls, path, task):
        """Читает конфигурацию ``ключ = значение``, незаданные ключи берутся по умолчанию задачи."""
        return cls.for_task(task, **load_config(TrainConfigForm, path))

    def lr_at(self, epoch):
        if self.scheduler == 'constant':
            return self.lr
        return cosine_lr(epoch, self.epochs, self.lr, self.lr_min)

    def to_dict(self):
        return asdict(self)
