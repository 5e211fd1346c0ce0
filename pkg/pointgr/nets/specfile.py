"""
Файл спецификации модели (``ключ = значение``) и загрузка весов с проверкой форм.
"""
from dataclasses import fields

from pointgr.autodiff.weights_io import read_weights
from pointgr.forms import ModelSpecForm, load_config, validate_values, write_key_values

from .zoo import spec_for_task


def spec_to_values(spec):
    values = {'task': spec.task}
    for item in fields(spec):
        value = getattr(spec, item.name)
        if isinstance(value, tuple):
            value = ', '.join(str(v) for v in value)
        values[item.name] = str(value)
    return values


def spec_from_values(values):
    """Строит спецификацию из проверенных ModelSpecForm значений."""
    values = dict(values)
    task = values.pop('task')
    classes = values.pop('classes')
    return spec_for_task(task, classes, **values)


def write_spec(spec, path):
    write_key_values(spec_to_values(spec), path)


def read_spec(path):
    return spec_from_values(load_config(ModelSpecForm, path))


def parse_spec(values, source='spec'):
    return spec_from_values(validate_values(ModelSpecForm, values, source))


def load_weights(params, path, prefix_filter='optim.'):
    """
    Загружает веса PGRW в параметры модели.

    Записи состояния оптимизатора (``optim.*``) пропускаются и
    возвращаются отдельным словарём. При несовпадении имён или форм выбрасывается
    ValidationError.
    """
    arrays = read_weights(path)
    extra = {name: array for name, array in arrays.items() if name.startswith(prefix_filter)}
    params.load_arrays({name: array for name, array in arrays.items() if name not in extra})
    return extra
