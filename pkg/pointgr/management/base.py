"""
Базовый класс management-команд pointgr.
"""
import argparse
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from pointgr.exceptions import PointGRError

logger = logging.getLogger('pointgr.commands')


def int_list(text):
    """Аргумент вида ``5,10,20`` -> [5, 10, 20]."""
    try:
        values = [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'ожидается список целых через запятую: {text!r}') from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f'все значения должны быть >= 1: {text!r}')
    return values


def validation_message(exc):
    if isinstance(exc, ValidationError):
        return '; '.join(exc.messages)
    return str(exc)


class PointGRCommand(BaseCommand):
    """
    Команда, переводящая ошибки предметной области в CommandError (код 1).

    Подклассы реализуют ``execute_command(**options)``.
    """
    requires_system_checks = []

    def handle(self, *args, **options):
        try:
            return self.execute_command(**options)
        except (PointGRError, ValidationError, OSError) as exc:
            logger.error('%s: %s', self.__class__.__module__.rsplit('.', 1)[-1], validation_message(exc))
            raise CommandError(validation_message(exc)) from exc

    def execute_command(self, **options):
        raise NotImplementedError
