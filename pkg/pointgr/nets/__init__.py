"""
Блоки PRE и FLN и собранные из них сети трёх задач.
"""
from .blocks import FLNConfig, PREConfig, fln_forward, pre_forward
from .edge import edge_features
from .specfile import load_weights, read_spec, write_spec
from .zoo import (
    ClassifierSpec,
    PartSegSpec,
    PointGRModel,
    SceneSegSpec,
    build_params,
    classify,
    count_trainable,
    masked_part_predictions,
    part_segment,
    scene_segment,
    spec_for_task,
)

__all__ = [
    'ClassifierSpec',
    'FLNConfig',
    'PREConfig',
    'PartSegSpec',
    'PointGRModel',
    'SceneSegSpec',
    'build_params',
    'classify',
    'count_trainable',
    'edge_features',
    'fln_forward',
    'load_weights',
    'masked_part_predictions',
    'part_segment',
    'pre_forward',
    'read_spec',
    'scene_segment',
    'spec_for_task',
    'write_spec',
]
