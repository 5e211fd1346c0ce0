"""
Контрольная точка: спецификация модели, веса и скорости оптимизатора.

Каталог содержит ``model.cfg`` (``ключ = значение``), ``weights.pgrw``
(параметры и ``optim.velocity.*`` в одном контейнере) и ``meta.json``.
"""
import logging
from pathlib import Path

from rest_framework.renderers import JSONRenderer

from pointgr.autodiff.weights_io import write_weights
from pointgr.nets.specfile import load_weights, read_spec, write_spec
from pointgr.nets.zoo import PointGRModel, build_params
from pointgr.serializers import CheckpointMetaSerializer

logger = logging.getLogger(__name__)

SPEC_FILE = 'model.cfg'
WEIGHTS_FILE = 'weights.pgrw'
META_FILE = 'meta.json'


def save_checkpoint(directory, model, optimizer=None, meta=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_spec(model.spec, directory / SPEC_FILE)
    arrays = dict(model.params.arrays())
    if optimizer is not None:
        arrays.update(optimizer.state_arrays())
    write_weights(arrays, directory / WEIGHTS_FILE)
    if meta is not None:
        payload = CheckpointMetaSerializer(meta).data
        (directory / META_FILE).write_bytes(JSONRenderer().render(payload, renderer_context={'indent': 2}))
    logger.debug('Контрольная точка записана в %s', directory)
    return directory


def load_checkpoint(directory, precision=None, category_parts=None):
    """
    Returns:
        tuple: (PointGRModel, словарь ``optim.*`` массивов)
    """
    directory = Path(directory)
    spec = read_spec(directory / SPEC_FILE)
    params = build_params(spec, seed=0, precision=precision)
    extra = load_weights(params, directory / WEIGHTS_FILE)
    model = PointGRModel(spec=spec, params=params, category_parts=category_parts or {})
    return model, extra
