"""
Равномерная выборка точек из облака.
"""
import numpy as np
from django.core.exceptions import ValidationError


def uniform_indices(count, n, rng):
    """
    Индексы n точек из count.

    При n <= count точки выбираются равномерно без возвращения. При n > count
    берутся все точки и добираются равномерной выборкой с возвращением,
    после чего порядок перемешивается.
    """
    if n < 1:
        raise ValidationError(f'Число точек выборки должно быть >= 1, получено {n}.')
    if n <= count:
        return rng.choice(count, size=n, replace=False)
    extra = rng.choice(count, size=n - count, replace=True)
    return rng.permutation(np.concatenate([np.arange(count), extra]))


def uniform_sample(cloud, n, seed):
    """Выборка n точек облака; ``seed``: целое число или numpy Generator."""
    rng = np.random.default_rng(seed)
    return cloud.take(uniform_indices(cloud.num_points, n, rng))
