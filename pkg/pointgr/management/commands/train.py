"""
Management команда для обучения сети.

Использование:
    python manage.py train --manifest data/shapes --task classification --config train.cfg --out runs/shapes
    python manage.py train --manifest data/shapes --task classification --preset desk --out runs/desk
"""
from django.core.exceptions import ValidationError

from pointgr.data.manifest import TASKS, DatasetManifest
from pointgr.management.base import PointGRCommand
from pointgr.nets.specfile import read_spec
from pointgr.nets.zoo import PARTSEG, PRESETS, spec_for_task
from pointgr.training.config import TrainConfig
from pointgr.training.loop import train


class Command(PointGRCommand):
    help = 'Обучает сеть на наборе из манифеста и сохраняет лучшую контрольную точку'

    def add_arguments(self, parser):
        parser.add_argument('--manifest', required=True, help='Файл манифеста или каталог набора')
        parser.add_argument('--task', required=True, choices=TASKS, help='Задача')
        parser.add_argument('--config', help='Файл "ключ = значение" с гиперпараметрами')
        parser.add_argument('--out', required=True, help='Каталог результатов')
        parser.add_argument('--spec', help='Файл спецификации модели (по умолчанию спецификация задачи)')
        parser.add_argument('--holdout-group', help='Группа, отложенная для проверки')
        parser.add_argument('--preset', choices=PRESETS, default='full', help='Набор ширин сети без --spec')

    def execute_command(self, **options):
        task = options['task']
        manifest = DatasetManifest.load(options['manifest'])
        if manifest.task != task:
            raise ValidationError(f'{options["manifest"]}: набор для задачи {manifest.task}, запрошена {task}')
        if options['config']:
            config = TrainConfig.from_file(options['config'], task)
        else:
            config = TrainConfig.for_task(task)

        if options['spec']:
            spec = read_spec(options['spec'])
        elif task == PARTSEG:
            spec = spec_for_task(
                task, manifest.num_classes, preset=options['preset'], categories=manifest.num_categories,
            )
        else:
            spec = spec_for_task(task, manifest.num_classes, preset=options['preset'])

        result = train(manifest, spec, config, options['out'], holdout_group=options['holdout_group'])
        self.stdout.write(f'Эпох: {config.epochs}, лучшая эпоха: {result.best_epoch}')
        self.stdout.write(f'Метрики: {result.metrics_path}')
        self.stdout.write(self.style.SUCCESS(f'[OK] Контрольная точка: {result.checkpoint}'))
