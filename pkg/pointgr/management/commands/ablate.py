"""
Management команда для абляции по k или числу точек.

Использование:
    python manage.py ablate --axis k --values 5,20 --out runs/ablate-k --epochs 30
"""
from pointgr.management.base import PointGRCommand, int_list
from pointgr.training.ablation import AXES, ablate
from pointgr.training.config import TrainConfig


class Command(PointGRCommand):
    help = 'Обучает классификатор на синтетических формах для каждого значения оси и пишет CSV'

    def add_arguments(self, parser):
        parser.add_argument('--axis', required=True, choices=AXES, help='Ось абляции')
        parser.add_argument('--values', type=int_list, help='Значения через запятую (по умолчанию табличные)')
        parser.add_argument('--out', required=True, help='Каталог результатов')
        parser.add_argument('--config', help='Файл "ключ = значение" с гиперпараметрами')
        parser.add_argument('--epochs', type=int, help='Число эпох (переопределяет конфигурацию)')
        parser.add_argument('--num-per-class', type=int, default=20, help='Образцов на класс')
        parser.add_argument('--points', type=int, default=1024, help='Число точек для оси k')
        parser.add_argument('--seed', type=int, help='Зерно (переопределяет конфигурацию)')

    def execute_command(self, **options):
        overrides = {'epochs': options['epochs'], 'seed': options['seed']}
        if options['config']:
            config = TrainConfig.from_file(options['config'], 'classification')
            config = TrainConfig.for_task('classification', **{**config.to_dict(), **overrides})
        else:
            config = TrainConfig.for_task('classification', **overrides)
        rows = ablate(
            options['axis'], options['values'], config, options['out'],
            num_per_class=options['num_per_class'], base_points=options['points'],
        )
        self.stdout.write('axis,value,overall_acc,mean_acc')
        for row in rows:
            self.stdout.write(','.join(row))
