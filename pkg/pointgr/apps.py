"""
Конфигурация приложения pointgr.
"""
from django.apps import AppConfig


class PointGRConfig(AppConfig):
    name = 'pointgr'
    verbose_name = 'Point-GR: облака точек'
