"""
Формы проверки конфигурационных файлов.

Конфигурации обучения и спецификации моделей хранятся как UTF-8 строки
``ключ = значение``; строки, начинающиеся с ``#``, пропускаются. Значения
проверяются формами Django, ошибки называют файл и ключ.
"""
from pathlib import Path

from django import forms
from django.core.exceptions import ValidationError

from pointgr.autodiff.node import DTYPES
from pointgr.data.manifest import TASKS


def read_key_values(path):
    """Читает файл ``ключ = значение`` в словарь строк."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ValidationError(f'Не удалось прочитать {path}: {exc}') from exc
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        if not sep or not key.strip():
            raise ValidationError(f'{path}:{number}: ожидается строка "ключ = значение"')
        key = key.strip()
        if key in values:
            raise ValidationError(f'{path}:{number}: ключ {key} задан повторно')
        values[key] = value.strip()
    return values


def write_key_values(values, path):
    lines = [f'{key} = {value}' for key, value in values.items()]
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')


def validate_values(form_class, values, source='конфигурация'):
    """
    Проверяет словарь строк формой ``form_class``.

    Returns:
        dict: cleaned_data без незаданных необязательных ключей
    """
    unknown = sorted(set(values) - set(form_class.base_fields))
    if unknown:
        raise ValidationError(f'{source}: неизвестные ключи: {", ".join(unknown)}')
    form = form_class(data=values)
    if not form.is_valid():
        details = '; '.join(
            f'{key}: {" ".join(messages)}' for key, messages in form.errors.items()
        )
        raise ValidationError(f'{source}: {details}')
    return {key: form.cleaned_data[key] for key in values}


def load_config(form_class, path):
    return validate_values(form_class, read_key_values(path), source=str(path))


class IntListField(forms.CharField):
    """Список положительных целых через запятую: ``64, 128, 256``."""

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return None
        try:
            numbers = tuple(int(item) for item in value.split(',') if item.strip())
        except ValueError:
            raise ValidationError('Ожидается список целых чисел через запятую.') from None
        if not numbers or min(numbers) < 1:
            raise ValidationError('Все значения списка должны быть >= 1.')
        return numbers


class TrainConfigForm(forms.Form):
    """
    Гиперпараметры обучения.

    Поля:
        lr: Начальная скорость обучения
        lr_min: Нижняя граница косинусного расписания (по умолчанию lr/100)
        momentum: Момент SGD
        scheduler: cosine или constant
        batch: Размер пакета
        epochs: Число эпох
        seed: Зерно генераторов
        precision: f32 или f64
        label_smoothing: Сглаживание меток в кросс-энтропии
        n_points: Число точек в облаке (переопределяет спецификацию модели)
        k: Число соседей (переопределяет спецификацию модели)
    """
    lr = forms.FloatField(required=False, min_value=0.0, label='Скорость обучения')
    lr_min = forms.FloatField(required=False, min_value=0.0, label='Минимальная скорость обучения')
    momentum = forms.FloatField(required=False, min_value=0.0, max_value=1.0, label='Момент')
    scheduler = forms.ChoiceField(required=False, choices=[('cosine', 'cosine'), ('constant', 'constant')])
    batch = forms.IntegerField(required=False, min_value=1, label='Размер пакета')
    epochs = forms.IntegerField(required=False, min_value=0, label='Число эпох')
    seed = forms.IntegerField(required=False, min_value=0, label='Зерно')
    precision = forms.ChoiceField(required=False, choices=[(name, name) for name in DTYPES])
    label_smoothing = forms.FloatField(required=False, min_value=0.0, max_value=0.5)
    n_points = forms.IntegerField(required=False, min_value=1)
    k = forms.IntegerField(required=False, min_value=1)

    def clean_lr(self):
        lr = self.cleaned_data.get('lr')
        if lr is not None and lr <= 0:
            raise ValidationError('Скорость обучения должна быть > 0.')
        return lr

    def clean(self):
        """Проверка lr > lr_min."""
        cleaned_data = super().clean()
        lr = cleaned_data.get('lr')
        lr_min = cleaned_data.get('lr_min')
        if lr is not None and lr_min is not None and lr_min >= lr:
            raise ValidationError({'lr_min': 'Должно выполняться lr > lr_min >= 0.'})
        return cleaned_data


class ModelSpecForm(forms.Form):
    """
    Спецификация сети: задача, число классов и ширины слоёв.

    Поля, не заданные в файле, берутся из значений по умолчанию задачи.
    """
    task = forms.ChoiceField(choices=[(task, task) for task in TASKS])
    classes = forms.IntegerField(min_value=2, label='Число классов (частей)')
    categories = forms.IntegerField(required=False, min_value=1)
    channels = forms.IntegerField(required=False, min_value=3)
    n_points = forms.IntegerField(required=False, min_value=1)
    k = forms.IntegerField(required=False, min_value=1)
    pre_hidden = forms.IntegerField(required=False, min_value=1)
    pre_out = forms.IntegerField(required=False, min_value=0)
    fln_widths = IntListField(required=False)
    aggregate_width = forms.IntegerField(required=False, min_value=1)
    fc = IntListField(required=False)
    head = IntListField(required=False)
    label_width = forms.IntegerField(required=False, min_value=1)
    dropout = forms.FloatField(required=False, min_value=0.0, max_value=0.95)
    global_pool = forms.ChoiceField(required=False, choices=[('max_mean', 'max_mean'), ('max', 'max')])

    def clean(self):
        cleaned_data = super().clean()
        task = cleaned_data.get('task')
        if task != 'partseg' and cleaned_data.get('categories') is not None:
            raise ValidationError({'categories': 'Категории задаются только для partseg.'})
        if task == 'classification' and cleaned_data.get('head') is not None:
            raise ValidationError({'head': 'Для классификации используйте ключ fc.'})
        if task != 'classification' and cleaned_data.get('fc') is not None:
            raise ValidationError({'fc': 'Для сегментации используйте ключ head.'})
        return cleaned_data
