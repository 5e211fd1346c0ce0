"""
Management команда для оценки контрольной точки.

Использование:
    python manage.py eval --checkpoint runs/shapes/checkpoint --manifest data/shapes
"""
from pathlib import Path

from rest_framework.renderers import JSONRenderer

from pointgr.data.manifest import DatasetManifest
from pointgr.management.base import PointGRCommand
from pointgr.serializers import MetricReportSerializer
from pointgr.training.loop import evaluate


class Command(PointGRCommand):
    help = 'Оценивает контрольную точку: таблица метрик на stdout и JSON-отчёт'

    def add_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True, help='Каталог контрольной точки')
        parser.add_argument('--manifest', required=True, help='Файл манифеста или каталог набора')
        parser.add_argument('--split', default='test', choices=['train', 'test'], help='Часть набора')
        parser.add_argument('--json', help='Путь JSON-отчёта (по умолчанию <checkpoint>/eval.json)')
        parser.add_argument('--batch', type=int, default=32, help='Размер пакета')
        parser.add_argument('--seed', type=int, default=0, help='Зерно выборки точек')

    def execute_command(self, **options):
        manifest = DatasetManifest.load(options['manifest'])
        report, split = evaluate(
            options['checkpoint'], manifest, split=options['split'], batch=options['batch'], seed=options['seed'],
        )
        data = MetricReportSerializer(report, context={'split': split}).data
        json_path = Path(options['json'] or Path(options['checkpoint']) / 'eval.json')
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_bytes(JSONRenderer().render(data, renderer_context={'indent': 2}))

        rows = [
            ('split', split),
            ('samples', str(report.shape_count)),
            ('loss', f'{report.loss:.6f}'),
            ('overall_accuracy', f'{report.overall_accuracy:.6f}'),
            ('mean_class_accuracy', f'{report.mean_class_accuracy:.6f}'),
            ('mean_iou', f'{report.mean_iou:.6f}'),
            ('overall_iou', f'{report.overall_iou:.6f}'),
        ]
        rows += [
            (f'iou[{index}]', '-' if value is None else f'{value:.6f}')
            for index, value in enumerate(report.per_class_iou)
        ]
        rows += [(f'category_iou[{category}]', f'{value:.6f}') for category, value in report.per_category_iou.items()]
        width = max(len(name) for name, _ in rows)
        for name, value in rows:
            self.stdout.write(f'{name:<{width}}  {value:>10}')
        self.stdout.write(self.style.SUCCESS(f'[OK] JSON: {json_path}'))
