"""
Management команда для просмотра заголовка PGRC-файла.

Использование:
    python manage.py inspect --sample data/shapes/train/sphere_0000.pgrc
"""
from pointgr.data.pgrc import FLAG_CATEGORY, FLAG_CLASS, FLAG_PARTS, read_header
from pointgr.management.base import PointGRCommand

FLAG_NAMES = (
    (FLAG_CLASS, 'class_label'),
    (FLAG_PARTS, 'part_labels'),
    (FLAG_CATEGORY, 'category'),
)


class Command(PointGRCommand):
    help = 'Печатает заголовок PGRC-файла образца'

    def add_arguments(self, parser):
        parser.add_argument('--sample', required=True, help='Путь к PGRC-файлу')

    def execute_command(self, **options):
        header = read_header(options['sample'])
        flags = [name for bit, name in FLAG_NAMES if header['flags'] & bit]
        rows = [
            ('magic', header['magic']),
            ('version', header['version']),
            ('flags', ','.join(flags) or '-'),
            ('N', header['N']),
            ('C', header['C']),
        ]
        if header['class_label'] is not None:
            rows.append(('class_label', header['class_label']))
        if header['category'] is not None:
            rows.append(('category', header['category']))
        for name, value in rows:
            self.stdout.write(f'{name}: {value}')
