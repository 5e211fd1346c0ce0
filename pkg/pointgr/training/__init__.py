"""
Обучение, оценка, метрики и абляции.
"""
from .ablation import ablate
from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig
from .loop import evaluate, train
from .metrics import MetricReport, compute_metrics
from .optim import SGD, cosine_lr, sgd_step

__all__ = [
    'MetricReport',
    'SGD',
    'TrainConfig',
    'ablate',
    'compute_metrics',
    'cosine_lr',
    'evaluate',
    'load_checkpoint',
    'save_checkpoint',
    'sgd_step',
    'train',
]
