"""
Доступ к настройкам приложения pointgr.

Все настройки движка лежат в словаре ``settings.POINTGR``; значения по
умолчанию ниже используются, если ключ не задан в проекте.
"""
from django.conf import settings

DEFAULTS = {
    'PRECISION': 'f32',
    'CHECK_FINITE': True,
    'BN_MOMENTUM': 0.9,
    'BN_EPS': 1e-5,
    'LEAKY_SLOPE': 0.2,
    'BLOCK_MIN_POINTS': 100,
    'KNN_CHUNK_ROWS': 1024,
}


def pointgr_setting(name):
    """Возвращает значение настройки из ``settings.POINTGR`` или значение по умолчанию."""
    if name not in DEFAULTS:
        raise KeyError(f'Неизвестная настройка pointgr: {name}')
    user_settings = getattr(settings, 'POINTGR', {})
    return user_settings.get(name, DEFAULTS[name])
