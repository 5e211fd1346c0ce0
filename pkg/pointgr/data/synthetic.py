"""
Синтетические наборы данных настольного масштаба.

Заменяют эталонные наборы в приёмочных тестах: три аналитические формы
для классификации, две игрушечные категории для сегментации частей и
комнаты с 13 семантическими классами для сегментации сцен. Все генераторы
являются чистыми функциями параметров и seed.
"""
import logging

import numpy as np
from scipy.spatial.transform import Rotation

from .manifest import DatasetManifest, SampleRecord
from .pointcloud import PointCloud
from .scenes import split_room_into_blocks

logger = logging.getLogger(__name__)

SHAPE_CLASSES = ('sphere', 'cube', 'cylinder')
PART_CATEGORIES = ('hammer', 'lollipop')
CATEGORY_PARTS = {0: [0, 1], 1: [2, 3]}
SCENE_CLASSES = (
    'ceiling', 'floor', 'wall', 'beam', 'column', 'window', 'door',
    'table', 'chair', 'sofa', 'bookcase', 'board', 'clutter',
)
NOISE_SIGMA = 0.01
SCALE_RANGE = (0.8, 1.2)
TEST_FRACTION = 0.2


def sphere_surface(n, rng, radius=1.0, center=(0.0, 0.0, 0.0)):
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return np.asarray(center) + radius * directions


def box_surface(n, rng, low=(-1.0, -1.0, -1.0), high=(1.0, 1.0, 1.0)):
    """Точки на поверхности параллелепипеда, грани выбираются пропорционально площади."""
    low = np.asarray(low, dtype=np.float64)
    high = np.asarray(high, dtype=np.float64)
    size = high - low
    areas = np.array([size[1] * size[2], size[0] * size[2], size[0] * size[1]])
    axis = rng.choice(3, size=n, p=areas / areas.sum())
    points = low + rng.random((n, 3)) * size
    side = rng.integers(0, 2, size=n)
    rows = np.arange(n)
    points[rows, axis] = np.where(side == 1, high[axis], low[axis])
    return points


def cylinder_surface(n, rng, radius=1.0, z_low=-1.0, z_high=1.0, caps=True):
    """Боковая поверхность цилиндра вдоль оси z и (по желанию) торцы."""
    height = z_high - z_low
    lateral = 2 * np.pi * radius * height
    cap = np.pi * radius ** 2 if caps else 0.0
    kind = rng.choice(3, size=n, p=np.array([lateral, cap, cap]) / (lateral + 2 * cap))
    theta = rng.uniform(0.0, 2 * np.pi, size=n)
    # на торцах радиус распределён как sqrt(U) для равномерной плотности
    r = np.where(kind == 0, radius, radius * np.sqrt(rng.random(n)))
    z = np.select([kind == 0, kind == 1], [rng.uniform(z_low, z_high, size=n), np.full(n, z_low)], z_high)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def sample_shape(name, n, rng):
    """Точки аналитической формы до поворота, масштаба и шума."""
    if name == 'sphere':
        return sphere_surface(n, rng)
    if name == 'cube':
        return box_surface(n, rng)
    if name == 'cylinder':
        return cylinder_surface(n, rng)
    raise ValueError(f'Неизвестная форма: {name}')


def jitter(points, rng):
    """Случайный поворот, масштаб из [0.8, 1.2] и гауссов шум σ=0.01."""
    rotation = Rotation.random(random_state=rng)
    scale = rng.uniform(*SCALE_RANGE)
    points = rotation.apply(points) * scale
    return points + rng.normal(scale=NOISE_SIGMA, size=points.shape)


def _split_tags(count, test_fraction):
    n_test = int(round(count * test_fraction))
    return ['train'] * (count - n_test) + ['test'] * n_test


def make_synthetic_classification(num_per_class, n_points, seed, test_fraction=TEST_FRACTION):
    """
    Набор «сфера / куб / цилиндр».

    Args:
        num_per_class (int): Число образцов каждого класса
        n_points (int): Число точек в облаке
        seed (int): Зерно генератора
        test_fraction (float): Доля тестовых образцов каждого класса

    Returns:
        DatasetManifest: манифест с облаками в памяти (сохраняется через save)
    """
    rng = np.random.default_rng(seed)
    records = []
    for label, name in enumerate(SHAPE_CLASSES):
        for index, split in enumerate(_split_tags(num_per_class, test_fraction)):
            points = jitter(sample_shape(name, n_points, rng), rng)
            cloud = PointCloud(points=points, class_label=label)
            records.append(SampleRecord(path=f'{split}/{name}_{index:04d}.pgrc', split=split, cloud=cloud))
    logger.info('Синтетическая классификация: %d образцов, %d точек', len(records), n_points)
    return DatasetManifest(task='classification', num_classes=len(SHAPE_CLASSES), channels=3, records=records)


def hammer(n, rng):
    """Рукоять-цилиндр (часть 0) и боёк-параллелепипед (часть 1)."""
    n_handle = int(round(n * 0.6))
    handle = cylinder_surface(n_handle, rng, radius=0.1, z_low=-1.0, z_high=0.6)
    head = box_surface(n - n_handle, rng, low=(-0.5, -0.15, 0.6), high=(0.5, 0.15, 0.9))
    labels = np.concatenate([np.zeros(n_handle, dtype=np.int64), np.ones(n - n_handle, dtype=np.int64)])
    return np.concatenate([handle, head]), labels


def lollipop(n, rng):
    """Палочка-цилиндр (часть 2) и шар-конфета (часть 3)."""
    n_stick = int(round(n * 0.4))
    stick = cylinder_surface(n_stick, rng, radius=0.05, z_low=-1.0, z_high=0.4)
    candy = sphere_surface(n - n_stick, rng, radius=0.3, center=(0.0, 0.0, 0.7))
    labels = np.concatenate([np.full(n_stick, 2, dtype=np.int64), np.full(n - n_stick, 3, dtype=np.int64)])
    return np.concatenate([stick, candy]), labels


def make_synthetic_partseg(num_per_category, n_points, seed, test_fraction=TEST_FRACTION):
    """
    Набор «молоток / леденец» по две части на категорию; метки частей
    назначаются аналитически по примитиву, из которого взята точка.
    """
    rng = np.random.default_rng(seed)
    builders = (hammer, lollipop)
    records = []
    for category, name in enumerate(PART_CATEGORIES):
        for index, split in enumerate(_split_tags(num_per_category, test_fraction)):
            points, labels = builders[category](n_points, rng)
            order = rng.permutation(n_points)
            cloud = PointCloud(points=jitter(points[order], rng), part_labels=labels[order], category=category)
            records.append(SampleRecord(path=f'{split}/{name}_{index:04d}.pgrc', split=split, cloud=cloud))
    logger.info('Синтетическая сегментация частей: %d образцов, %d точек', len(records), n_points)
    return DatasetManifest(
        task='partseg',
        num_classes=sum(len(parts) for parts in CATEGORY_PARTS.values()),
        channels=3,
        records=records,
        num_categories=len(PART_CATEGORIES),
        category_parts={category: list(parts) for category, parts in CATEGORY_PARTS.items()},
    )


_PALETTE = {
    'ceiling': (230, 230, 230), 'floor': (120, 90, 60), 'wall': (200, 190, 170),
    'window': (150, 200, 230), 'door': (140, 70, 30), 'table': (170, 110, 50),
    'chair': (40, 40, 120), 'bookcase': (100, 60, 30), 'board': (250, 250, 250),
    'clutter': (90, 140, 60),
}


def _plane(rng, density, low, high):
    """Равномерные точки на осевом прямоугольнике (одна из координат постоянна)."""
    low = np.asarray(low, dtype=np.float64)
    high = np.asarray(high, dtype=np.float64)
    size = high - low
    area = np.prod(size[size > 0])
    n = max(1, int(round(area * density)))
    return low + rng.random((n, 3)) * size


def _box(rng, density, low, high):
    low = np.asarray(low, dtype=np.float64)
    high = np.asarray(high, dtype=np.float64)
    size = high - low
    area = 2 * (size[0] * size[1] + size[0] * size[2] + size[1] * size[2])
    return box_surface(max(1, int(round(area * density))), rng, low, high)


def synthetic_room(rng, width, depth, height=2.5, density=400.0):
    """
    Одна комната: пол, потолок, стены с дверью, окном и доской, стол,
    стулья, книжный шкаф и мелкие предметы.

    Returns:
        PointCloud: N×6 (xyz в метрах, rgb в 0–255) с метками 13 классов
    """
    parts = []

    def put(name, points):
        parts.append((SCENE_CLASSES.index(name), name, points))

    put('floor', _plane(rng, density, (0, 0, 0), (width, depth, 0)))
    put('ceiling', _plane(rng, density, (0, 0, height), (width, depth, height)))
    put('wall', _plane(rng, density, (0, 0, 0), (width, 0, height)))
    put('wall', _plane(rng, density, (0, depth, 0), (width, depth, height)))
    put('wall', _plane(rng, density, (0, 0, 0), (0, depth, height)))
    put('wall', _plane(rng, density, (width, 0, 0), (width, depth, height)))
    door_x = rng.uniform(0.2, width - 1.2)
    put('door', _plane(rng, density, (door_x, 0.01, 0), (door_x + 0.9, 0.01, 2.0)))
    window_y = rng.uniform(0.2, depth - 1.2)
    put('window', _plane(rng, density, (width - 0.01, window_y, 1.0), (width - 0.01, window_y + 1.0, 2.0)))
    put('board', _plane(rng, density, (0.5, depth - 0.01, 1.0), (width - 0.5, depth - 0.01, 1.8)))
    put('bookcase', _box(rng, density, (0.01, 0.3, 0), (0.4, 1.3, 1.8)))

    cx, cy = width / 2, depth / 2
    put('table', _box(rng, density, (cx - 0.6, cy - 0.4, 0.7), (cx + 0.6, cy + 0.4, 0.75)))
    for sx in (-1, 1):
        x0 = cx + sx * 0.9 - 0.2
        put('chair', _box(rng, density, (x0, cy - 0.2, 0.0), (x0 + 0.4, cy + 0.2, 0.45)))
    for _ in range(3):
        x0, y0 = rng.uniform(0.6, width - 0.8), rng.uniform(0.6, depth - 0.8)
        put('clutter', _box(rng, density, (x0, y0, 0.0), (x0 + 0.2, y0 + 0.2, 0.2)))

    points, colors, labels = [], [], []
    for label, name, xyz in parts:
        base = np.asarray(_PALETTE[name], dtype=np.float64)
        rgb = np.clip(base + rng.normal(scale=8.0, size=xyz.shape), 0, 255)
        points.append(xyz + rng.normal(scale=NOISE_SIGMA / 2, size=xyz.shape))
        colors.append(np.round(rgb))
        labels.append(np.full(len(xyz), label, dtype=np.int64))
    return PointCloud(
        points=np.column_stack([np.concatenate(points), np.concatenate(colors)]),
        part_labels=np.concatenate(labels),
    )


def make_synthetic_rooms(num_rooms, seed, density=400.0):
    """Список комнат со случайными размерами от 2×2 до 4×4 м."""
    rng = np.random.default_rng(seed)
    rooms = []
    for _ in range(num_rooms):
        width, depth = rng.uniform(2.0, 4.0, size=2)
        rooms.append(synthetic_room(rng, width, depth, density=density))
    return rooms


def make_synthetic_sceneseg(num_rooms, n_points, seed, block=1.0, density=400.0):
    """
    Комнаты, разбитые на блоки по 9 каналов; группой записи служит номер комнаты.

    Последние ``num_rooms // 5`` комнат (не меньше одной при двух и более
    комнатах) уходят в тест.
    """
    rng = np.random.default_rng(seed)
    rooms = make_synthetic_rooms(num_rooms, rng, density=density)
    n_test = max(1, num_rooms // 5) if num_rooms >= 2 else 0
    records = []
    for room_index, room in enumerate(rooms):
        split = 'test' if room_index >= num_rooms - n_test else 'train'
        group = f'room_{room_index:02d}'
        for block_index, scene_block in enumerate(split_room_into_blocks(room, block=block, n=n_points, seed=rng)):
            records.append(SampleRecord(
                path=f'{group}/block_{block_index:04d}.pgrc',
                split=split,
                group=group,
                cloud=scene_block.to_cloud(),
            ))
    logger.info('Синтетические сцены: %d комнат, %d блоков', num_rooms, len(records))
    return DatasetManifest(task='sceneseg', num_classes=len(SCENE_CLASSES), channels=9, records=records)
