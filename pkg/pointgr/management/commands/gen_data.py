"""
Management команда для генерации синтетического набора данных.

Использование:
    python manage.py gen-data --task classification --out data/shapes --seed 0
"""
from pointgr.data.manifest import TASKS
from pointgr.data.synthetic import (
    make_synthetic_classification,
    make_synthetic_partseg,
    make_synthetic_sceneseg,
)
from pointgr.management.base import PointGRCommand

DEFAULT_POINTS = {
    'classification': 256,
    'partseg': 512,
    'sceneseg': 4096,
}


class Command(PointGRCommand):
    help = 'Генерирует синтетический набор данных: PGRC-файлы и манифест'

    def add_arguments(self, parser):
        parser.add_argument('--task', required=True, choices=TASKS, help='Задача набора')
        parser.add_argument('--out', required=True, help='Каталог для файлов набора')
        parser.add_argument('--seed', type=int, default=0, help='Зерно генератора')
        parser.add_argument('--num-per-class', type=int, default=50,
                            help='Образцов на класс (категорию для partseg)')
        parser.add_argument('--points', type=int, default=None,
                            help='Точек в образце (по умолчанию 256 / 512 / 4096)')
        parser.add_argument('--rooms', type=int, default=5, help='Число комнат для sceneseg')

    def execute_command(self, **options):
        task = options['task']
        points = options['points'] or DEFAULT_POINTS[task]
        if task == 'classification':
            manifest = make_synthetic_classification(options['num_per_class'], points, options['seed'])
        elif task == 'partseg':
            manifest = make_synthetic_partseg(options['num_per_class'], points, options['seed'])
        else:
            manifest = make_synthetic_sceneseg(options['rooms'], points, options['seed'])
        path = manifest.save(options['out'])
        self.stdout.write(self.style.SUCCESS(
            f'[OK] {task}: {len(manifest.records)} образцов '
            f'(train {len(manifest.split("train"))}, test {len(manifest.split("test"))}) -> {path}'
        ))
