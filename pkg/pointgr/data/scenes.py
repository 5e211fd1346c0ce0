"""
Разбиение комнаты на блоки 1×1 м в плоскости xy.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError

from pointgr.conf import pointgr_setting
from pointgr.exceptions import EmptyResultError

from .pointcloud import PointCloud

logger = logging.getLogger(__name__)

SCENE_CHANNELS = 9


@dataclass(eq=False)
class SceneBlock:
    """
    Блок сцены.

    Атрибуты:
        points (ndarray): n×9: x, y, z относительно начала блока, r, g, b в [0, 1],
            нормированные координаты комнаты в [0, 1]
        labels (ndarray): n меток семантических классов
        origin (tuple): (x0, y0) начала блока в координатах комнаты
        indices (ndarray): индексы точек комнаты, из которых собран блок
    """
    points: np.ndarray
    labels: np.ndarray
    origin: tuple
    indices: np.ndarray

    def to_cloud(self):
        return PointCloud(points=self.points, part_labels=self.labels)


def _grid_count(extent, block, stride):
    return max(1, math.ceil((extent - block) / stride) + 1)


def split_room_into_blocks(room, block=1.0, n=4096, seed=0, stride=None, min_points=None):
    """
    Режет комнату на блоки ``block``×``block`` с шагом ``stride``.

    Блоки полуоткрыты, последний блок по каждой оси включает правую границу.
    Блоки, где меньше ``min_points`` точек, отбрасываются. Точки блока
    перемешиваются и режутся на порции по n; последняя порция добирается
    выборкой с возвращением, так что покрыта каждая точка уцелевших блоков.

    Args:
        room (PointCloud): Комната N×(≥6): xyz и rgb (0–1 или 0–255) с метками точек
        block (float): Сторона блока в метрах
        n (int): Число точек в блоке
        seed: Зерно или numpy Generator
        stride (float): Шаг сетки, по умолчанию равен ``block``
        min_points (int): Порог населённости блока (настройка BLOCK_MIN_POINTS)

    Returns:
        list[SceneBlock]
    """
    if room.channels < 6:
        raise ValidationError(f'Комнате нужны xyz и rgb (6 каналов), получено {room.channels}.')
    if room.part_labels is None:
        raise ValidationError('Комнате нужны семантические метки точек.')
    stride = block if stride is None else stride
    if not 0 < stride <= block:
        raise ValidationError(f'Шаг сетки должен лежать в (0, {block}], получено {stride}.')
    if n < 1:
        raise ValidationError(f'Число точек блока должно быть >= 1, получено {n}.')
    if min_points is None:
        min_points = pointgr_setting('BLOCK_MIN_POINTS')

    rng = np.random.default_rng(seed)
    xyz = room.points[:, :3].astype(np.float64)
    rgb = room.points[:, 3:6].astype(np.float64)
    if rgb.max() > 1.0:
        rgb = rgb / 255.0
    low = xyz.min(axis=0)
    extent = xyz.max(axis=0) - low
    normalized = (xyz - low) / np.where(extent > 0, extent, 1.0)

    nx = _grid_count(extent[0], block, stride)
    ny = _grid_count(extent[1], block, stride)
    blocks = []
    discarded = 0
    for ix in range(nx):
        x0 = low[0] + ix * stride
        in_x = (xyz[:, 0] >= x0) & ((xyz[:, 0] <= x0 + block) if ix == nx - 1 else (xyz[:, 0] < x0 + block))
        for iy in range(ny):
            y0 = low[1] + iy * stride
            in_y = (xyz[:, 1] >= y0) & ((xyz[:, 1] <= y0 + block) if iy == ny - 1 else (xyz[:, 1] < y0 + block))
            members = np.flatnonzero(in_x & in_y)
            if len(members) < min_points:
                discarded += 1
                continue
            shuffled = rng.permutation(members)
            for start in range(0, len(shuffled), n):
                chunk = shuffled[start:start + n]
                if len(chunk) < n:
                    chunk = np.concatenate([chunk, rng.choice(members, size=n - len(chunk), replace=True)])
                local = xyz[chunk] - np.array([x0, y0, low[2]])
                blocks.append(SceneBlock(
                    points=np.column_stack([local, rgb[chunk], normalized[chunk]]).astype(np.float32),
                    labels=room.part_labels[chunk].copy(),
                    origin=(float(x0), float(y0)),
                    indices=chunk,
                ))

    if discarded:
        logger.debug('Отброшено %d блоков с числом точек < %d', discarded, min_points)
    if not blocks:
        logger.warning('В комнате из %d точек не осталось ни одного блока', room.num_points)
        raise EmptyResultError(
            f'Ни один блок не набрал {min_points} точек (комната из {room.num_points} точек).'
        )
    logger.info('Комната %d точек -> %d блоков %d×%d', room.num_points, len(blocks), n, SCENE_CHANNELS)
    return blocks
