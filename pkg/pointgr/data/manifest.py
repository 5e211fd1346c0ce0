"""
Манифест набора данных.

Текстовый UTF-8 файл: блок заголовка ``ключ=значение`` (task, classes,
channels, для сегментации частей ещё categories и category_parts), пустая
строка, затем по строке на образец: ``путь<TAB>split[<TAB>группа]``.
Пути указываются относительно каталога манифеста.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from django.core.exceptions import ValidationError

from .pgrc import read_sample, write_sample
from .pointcloud import PointCloud

logger = logging.getLogger(__name__)

TASKS = ('classification', 'partseg', 'sceneseg')
SPLITS = ('train', 'test')
MANIFEST_NAME = 'manifest.txt'


@dataclass(eq=False)
class SampleRecord:
    """
    Запись манифеста.

    Атрибуты:
        path (str): Путь к PGRC-файлу относительно каталога манифеста
        split (str): train или test
        group (str): Идентификатор комнаты/области для перекрёстной проверки
        cloud (PointCloud): Облако в памяти (у только что сгенерированных данных)
    """
    path: str
    split: str
    group: str = ''
    cloud: Optional[PointCloud] = None


def _format_category_parts(category_parts):
    return ';'.join(
        f'{category}:{",".join(str(p) for p in parts)}'
        for category, parts in sorted(category_parts.items())
    )


def _parse_category_parts(text):
    result = {}
    for chunk in filter(None, text.split(';')):
        category, _, parts = chunk.partition(':')
        result[int(category)] = [int(p) for p in parts.split(',') if p]
    return result


@dataclass(eq=False)
class DatasetManifest:
    """
    Описание набора данных.

    Атрибуты:
        task (str): classification, partseg или sceneseg
        num_classes (int): Число выходных классов m (для partseg число частей)
        channels (int): Число каналов C точек
        records (list): Записи образцов
        root (Path): Каталог манифеста (None, пока набор не сохранён)
        num_categories (int): Число категорий объектов (partseg)
        category_parts (dict): Категория -> список её частей (partseg)
    """
    task: str
    num_classes: int
    channels: int
    records: list = field(default_factory=list)
    root: Optional[Path] = None
    num_categories: int = 0
    category_parts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValidationError(f'Неизвестная задача {self.task!r}, допустимо: {", ".join(TASKS)}')
        if self.num_classes < 2:
            raise ValidationError(f'Число классов должно быть >= 2, получено {self.num_classes}.')
        if self.channels < 3:
            raise ValidationError(f'Число каналов должно быть >= 3, получено {self.channels}.')
        for record in self.records:
            if record.split not in SPLITS:
                raise ValidationError(f'{record.path}: неизвестный split {record.split!r}')

    def split(self, name):
        return [record for record in self.records if record.split == name]

    def groups(self):
        return sorted({record.group for record in self.records if record.group})

    def fold(self, group):
        """
        Разбиение «одна группа на проверку»: записи группы идут в тест, остальные в обучение.
        """
        if group not in self.groups():
            raise ValidationError(f'Группа {group!r} отсутствует в манифесте.')
        train = [record for record in self.records if record.group != group]
        test = [record for record in self.records if record.group == group]
        return train, test

    def resolve(self, record):
        path = Path(record.path)
        if not path.is_absolute() and self.root is not None:
            path = self.root / path
        return path

    def load_cloud(self, record):
        if record.cloud is not None:
            return record.cloud
        return read_sample(self.resolve(record))

    def validate_cloud(self, record, cloud):
        """Согласованность облака с заголовком манифеста."""
        if cloud.channels != self.channels:
            raise ValidationError(f'{record.path}: {cloud.channels} каналов вместо {self.channels}')
        if self.task == 'classification':
            if cloud.class_label is None or cloud.class_label >= self.num_classes:
                raise ValidationError(f'{record.path}: метка класса вне [0, {self.num_classes})')
        else:
            if cloud.part_labels is None or cloud.part_labels.max() >= self.num_classes:
                raise ValidationError(f'{record.path}: метки точек вне [0, {self.num_classes})')
        if self.task == 'partseg' and (cloud.category is None or cloud.category >= self.num_categories):
            raise ValidationError(f'{record.path}: категория вне [0, {self.num_categories})')

    def validate(self):
        """Каждый файл существует, читается и согласован с заголовком."""
        for record in self.records:
            path = self.resolve(record)
            if record.cloud is None and not path.exists():
                raise ValidationError(f'Файл образца не найден: {path}')
            self.validate_cloud(record, self.load_cloud(record))

    def header_lines(self):
        lines = [
            f'task={self.task}',
            f'classes={self.num_classes}',
            f'channels={self.channels}',
        ]
        if self.task == 'partseg':
            lines.append(f'categories={self.num_categories}')
            lines.append(f'category_parts={_format_category_parts(self.category_parts)}')
        return lines

    def to_text(self):
        lines = self.header_lines() + ['']
        for record in self.records:
            fields = [record.path, record.split] + ([record.group] if record.group else [])
            lines.append('\t'.join(fields))
        return '\n'.join(lines) + '\n'

    def save(self, out_dir):
        """
        Записывает облака из памяти в PGRC-файлы и манифест в ``out_dir``.

        Returns:
            Path: путь к файлу манифеста
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for record in self.records:
            if record.cloud is None:
                continue
            path = out_dir / record.path
            path.parent.mkdir(parents=True, exist_ok=True)
            write_sample(record.cloud, path)
        manifest_path = out_dir / MANIFEST_NAME
        manifest_path.write_text(self.to_text(), encoding='utf-8')
        self.root = out_dir
        logger.info('Набор %s сохранён: %d образцов в %s', self.task, len(self.records), out_dir)
        return manifest_path

    @classmethod
    def load(cls, path):
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise ValidationError(f'Не удалось прочитать манифест {path}: {exc}') from exc

        header = {}
        records = []
        in_header = True
        for number, line in enumerate(text.splitlines(), start=1):
            if in_header:
                if not line.strip():
                    in_header = False
                    continue
                key, sep, value = line.partition('=')
                if not sep:
                    raise ValidationError(f'{path}:{number}: ожидается строка ключ=значение')
                header[key.strip()] = value.strip()
                continue
            if not line.strip():
                continue
            fields = line.split('\t')
            if len(fields) not in (2, 3):
                raise ValidationError(f'{path}:{number}: ожидается путь<TAB>split[<TAB>группа]')
            records.append(SampleRecord(path=fields[0], split=fields[1], group=fields[2] if len(fields) == 3 else ''))

        try:
            manifest = cls(
                task=header['task'],
                num_classes=int(header['classes']),
                channels=int(header['channels']),
                records=records,
                root=path.parent,
                num_categories=int(header.get('categories', 0)),
                category_parts=_parse_category_parts(header.get('category_parts', '')),
            )
        except KeyError as exc:
            raise ValidationError(f'{path}: в заголовке нет ключа {exc.args[0]}') from exc
        except ValueError as exc:
            raise ValidationError(f'{path}: некорректное значение в заголовке: {exc}') from exc
        logger.debug('Манифест %s: %d записей', path, len(records))
        return manifest
