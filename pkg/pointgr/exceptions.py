"""
Исключения приложения pointgr.

Ошибки валидации доменных объектов (облака точек, манифесты, файлы
конфигурации) выбрасываются как ``django.core.exceptions.ValidationError``;
здесь собраны ошибки вычислений и форматов.
"""


class PointGRError(Exception):
    """Базовое исключение приложения."""


class DimensionError(PointGRError, ValueError):
    """Несовпадение размерностей массивов."""

    def __init__(self, message, *shapes):
        if shapes:
            message = f'{message}: ' + ' vs '.join(str(tuple(s)) for s in shapes)
        super().__init__(message)
        self.shapes = shapes


class NonFiniteError(PointGRError, ArithmeticError):
    """В результате операции или в градиенте появились NaN/Inf."""


class FormatError(PointGRError):
    """Ошибка разбора бинарного контейнера (PGRC, PGRW)."""


class GraphError(PointGRError, ValueError):
    """Некорректные параметры построения графа соседей."""


class EmptyResultError(PointGRError):
    """Операция не дала ни одного результата (например, в комнате нет блоков)."""


class TrainingDiverged(NonFiniteError):
    """Функция потерь стала NaN/Inf во время обучения."""


class LabelError(PointGRError, ValueError):
    """Метка класса вне допустимого диапазона."""
