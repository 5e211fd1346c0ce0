"""
Management команда для подсчёта обучаемых параметров.

Использование:
    python manage.py params --task classification --classes 40
    python manage.py params --task classification --classes 3 --preset desk
"""
from django.core.management.base import CommandError

from pointgr.data.manifest import TASKS
from pointgr.management.base import PointGRCommand
from pointgr.nets.specfile import read_spec
from pointgr.nets.zoo import PRESETS, build_params, count_trainable, spec_for_task


class Command(PointGRCommand):
    help = 'Печатает число обучаемых параметров сети'

    def add_arguments(self, parser):
        parser.add_argument('--task', choices=TASKS, help='Задача (обязательна без --spec)')
        parser.add_argument('--classes', type=int, help='Число классов или частей')
        parser.add_argument('--spec', help='Файл спецификации модели')
        parser.add_argument('--preset', choices=PRESETS, default='full', help='Набор ширин сети без --spec')

    def execute_command(self, **options):
        if options['spec']:
            spec = read_spec(options['spec'])
        elif options['task']:
            spec = spec_for_task(options['task'], options['classes'], preset=options['preset'])
        else:
            raise CommandError('Укажите --task или --spec.', returncode=2)
        self.stdout.write(str(count_trainable(build_params(spec))))
