"""
Абляция по числу соседей k и числу точек на синтетической классификации.
"""
import csv
import logging
from pathlib import Path

from pointgr.data.synthetic import make_synthetic_classification
from pointgr.nets.zoo import spec_for_task

from .loop import train

logger = logging.getLogger(__name__)

AXES = ('k', 'points')
DEFAULT_VALUES = {
    'k': (5, 10, 15, 20, 30, 40),
    'points': (2048, 1024, 921, 819, 716, 614, 512, 204),
}
ABLATION_HEADER = ('axis', 'value', 'overall_acc', 'mean_acc')


def ablate(axis, values, config, out_dir, num_per_class=20, base_points=1024, base_k=20, spec_overrides=None):
    """
    Обучает и оценивает классификатор для каждого значения оси.

    Набор генерируется один раз с числом точек не меньше наибольшего
    значения оси; модель берёт из каждого облака нужное число точек.
    Результат пишется в ``ablation.csv`` со строками ``axis,value,overall_acc,mean_acc``
    по отчёту последней эпохи на тестовой части.

    Returns:
        list: строки CSV без заголовка
    """
    if axis not in AXES:
        raise ValueError(f'Неизвестная ось абляции {axis!r}, допустимо: {", ".join(AXES)}')
    values = list(values or DEFAULT_VALUES[axis])
    out_dir = Path(out_dir)
    dataset_points = max(values) if axis == 'points' else base_points
    manifest = make_synthetic_classification(num_per_class, dataset_points, config.seed)

    rows = []
    for value in values:
        n_points = value if axis == 'points' else base_points
        k = value if axis == 'k' else min(base_k, n_points)
        spec = spec_for_task('classification', manifest.num_classes, n_points=n_points, k=k, **(spec_overrides or {}))
        result = train(manifest, spec, config, out_dir / f'{axis}_{value}')
        report = result.final_report
        overall, mean = (report.overall_accuracy, report.mean_class_accuracy) if report else (0.0, 0.0)
        rows.append([axis, str(value), f'{overall:.6f}', f'{mean:.6f}'])
        logger.info('Абляция %s=%s: OA=%.4f mAcc=%.4f', axis, value, overall, mean)

    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / 'ablation.csv', 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(ABLATION_HEADER)
        writer.writerows(rows)
    return rows
