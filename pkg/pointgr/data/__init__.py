"""
Ввод-вывод облаков точек: формат PGRC, манифесты наборов данных,
синтетические генераторы, равномерная выборка и разбиение комнат на блоки.
"""
from .manifest import DatasetManifest, SampleRecord
from .pgrc import read_header, read_sample, write_sample
from .pointcloud import PointCloud
from .sampling import uniform_sample
from .scenes import SceneBlock, split_room_into_blocks
from .synthetic import (
    make_synthetic_classification,
    make_synthetic_partseg,
    make_synthetic_rooms,
    make_synthetic_sceneseg,
)

__all__ = [
    'DatasetManifest',
    'PointCloud',
    'SampleRecord',
    'SceneBlock',
    'make_synthetic_classification',
    'make_synthetic_partseg',
    'make_synthetic_rooms',
    'make_synthetic_sceneseg',
    'read_header',
    'read_sample',
    'split_room_into_blocks',
    'uniform_sample',
    'write_sample',
]
