"""
Формат файла образца PGRC.

Раскладка (little-endian):
    magic "PGRC", version u16 = 1, flags u8 (бит 0: class_label,
    бит 1: part_labels, бит 2: category), N u32, C u16,
    class_label u16 (если флаг), category u16 (если флаг),
    N·C значений f32 по строкам, N меток u16 (если флаг).
"""
import struct

import numpy as np

from pointgr.exceptions import FormatError

from .pointcloud import PointCloud

MAGIC = b'PGRC'
VERSION = 1

FLAG_CLASS = 0b001
FLAG_PARTS = 0b010
FLAG_CATEGORY = 0b100

_HEAD = struct.Struct('<4sHBIH')


def encode_sample(cloud):
    flags = 0
    if cloud.class_label is not None:
        flags |= FLAG_CLASS
    if cloud.part_labels is not None:
        flags |= FLAG_PARTS
    if cloud.category is not None:
        flags |= FLAG_CATEGORY

    n, c = cloud.points.shape
    chunks = [_HEAD.pack(MAGIC, VERSION, flags, n, c)]
    if flags & FLAG_CLASS:
        chunks.append(struct.pack('<H', cloud.class_label))
    if flags & FLAG_CATEGORY:
        chunks.append(struct.pack('<H', cloud.category))
    chunks.append(cloud.points.astype('<f4', copy=False).tobytes(order='C'))
    if flags & FLAG_PARTS:
        chunks.append(cloud.part_labels.astype('<u2').tobytes())
    return b''.join(chunks)


def decode_header(data):
    """
    Разбирает заголовок PGRC.

    Returns:
        dict: magic, version, flags, N, C, class_label, category,
        has_part_labels и смещение начала данных (payload_offset)
    """
    if len(data) < _HEAD.size:
        raise FormatError(f'PGRC: заголовок обрывается, не хватает {_HEAD.size - len(data)} байт')
    magic, version, flags, n, c = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f'PGRC: неверная сигнатура {magic!r}')
    if version != VERSION:
        raise FormatError(f'PGRC: неподдерживаемая версия {version}')
    offset = _HEAD.size
    header = {
        'magic': magic.decode('ascii'),
        'version': version,
        'flags': flags,
        'N': n,
        'C': c,
        'class_label': None,
        'category': None,
        'has_part_labels': bool(flags & FLAG_PARTS),
    }
    for flag, key in ((FLAG_CLASS, 'class_label'), (FLAG_CATEGORY, 'category')):
        if flags & flag:
            if len(data) < offset + 2:
                raise FormatError(f'PGRC: заголовок обрывается, не хватает {offset + 2 - len(data)} байт')
            (header[key],) = struct.unpack_from('<H', data, offset)
            offset += 2
    header['payload_offset'] = offset
    return header


def decode_sample(data):
    header = decode_header(data)
    n, c = header['N'], header['C']
    offset = header['payload_offset']
    expected = offset + n * c * 4 + (n * 2 if header['has_part_labels'] else 0)
    if len(data) < expected:
        raise FormatError(f'PGRC: данные обрываются, не хватает {expected - len(data)} байт')
    if len(data) > expected:
        raise FormatError(f'PGRC: лишние {len(data) - expected} байт после данных')

    points = np.frombuffer(data, dtype='<f4', count=n * c, offset=offset).reshape(n, c)
    offset += n * c * 4
    part_labels = None
    if header['has_part_labels']:
        part_labels = np.frombuffer(data, dtype='<u2', count=n, offset=offset).astype(np.int64)
    return PointCloud(
        points=points.astype(np.float32),
        class_label=header['class_label'],
        part_labels=part_labels,
        category=header['category'],
    )


def write_sample(cloud, path):
    with open(path, 'wb') as fp:
        fp.write(encode_sample(cloud))


def read_sample(path):
    with open(path, 'rb') as fp:
        data = fp.read()
    try:
        return decode_sample(data)
    except FormatError as error:
        raise FormatError(f'{path}: {error}') from error


def read_header(path):
    with open(path, 'rb') as fp:
        data = fp.read(_HEAD.size + 4)
    try:
        header = decode_header(data)
    except FormatError as error:
        raise FormatError(f'{path}: {error}') from error
    header.pop('payload_offset')
    return header
