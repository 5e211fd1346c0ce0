"""
Сериализаторы машиночитаемых результатов.

Отчёт о метриках оценки и метаданные контрольной точки переводятся в JSON
через сериализаторы DRF и JSONRenderer.
"""
from rest_framework import serializers


class MetricReportSerializer(serializers.Serializer):
    """Сериализатор отчёта MetricReport."""

    task = serializers.CharField(help_text='Задача: classification, partseg или sceneseg')
    split = serializers.CharField(required=False, help_text='Часть набора, на которой шла оценка')
    shape_count = serializers.IntegerField(help_text='Число образцов')
    loss = serializers.FloatField(allow_null=True, help_text='Средняя кросс-энтропия')
    overall_accuracy = serializers.FloatField()
    mean_class_accuracy = serializers.FloatField()
    mean_iou = serializers.FloatField()
    overall_iou = serializers.FloatField()
    per_class_iou = serializers.ListField(
        child=serializers.FloatField(allow_null=True),
        help_text='IoU по классам; null, если класс не встречается',
    )
    per_category_iou = serializers.SerializerMethodField()
    confusion = serializers.SerializerMethodField()

    def get_per_category_iou(self, report):
        return {str(category): value for category, value in report.per_category_iou.items()}

    def get_confusion(self, report):
        return report.confusion.tolist()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if 'split' in self.context:
            data['split'] = self.context['split']
        return data


class CheckpointMetaSerializer(serializers.Serializer):
    """Метаданные контрольной точки (без отметок времени)."""

    task = serializers.CharField()
    epoch = serializers.IntegerField(min_value=0)
    score = serializers.FloatField(allow_null=True, help_text='Точность или mIoU проверочной части')
