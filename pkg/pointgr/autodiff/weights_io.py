"""
Бинарный контейнер весов PGRW.

Формат (little-endian):
    magic "PGRW", version u16, число записей u32, далее для каждой записи:
    длина имени u16 + имя UTF-8, dtype u8 (0=f32, 1=f64), rank u8,
    размеры u32 каждый, данные.
"""
import struct

import numpy as np

from pointgr.exceptions import FormatError

MAGIC = b'PGRW'
VERSION = 1

DTYPE_CODES = {
    np.dtype(np.float32): 0,
    np.dtype(np.float64): 1,
}
CODE_DTYPES = {
    0: np.dtype('<f4'),
    1: np.dtype('<f8'),
}


def encode_weights(arrays):
    """Кодирует словарь имя -> массив в байты PGRW (записи упорядочены по имени)."""
    chunks = [MAGIC, struct.pack('<HI', VERSION, len(arrays))]
    for name in sorted(arrays):
        array = np.asarray(arrays[name])
        try:
            code = DTYPE_CODES[array.dtype]
        except KeyError:
            raise FormatError(f'PGRW: неподдерживаемый тип {array.dtype} у {name}') from None
        raw_name = name.encode('utf-8')
        chunks.append(struct.pack('<H', len(raw_name)))
        chunks.append(raw_name)
        chunks.append(struct.pack('<BB', code, array.ndim))
        chunks.append(struct.pack(f'<{array.ndim}I', *array.shape))
        chunks.append(array.astype(CODE_DTYPES[code], copy=False).tobytes(order='C'))
    return b''.join(chunks)


class _Reader:
    """Последовательное чтение буфера с понятной ошибкой при обрыве."""

    def __init__(self, data, label):
        self.data = data
        self.offset = 0
        self.label = label

    def take(self, size, what):
        end = self.offset + size
        if end > len(self.data):
            missing = end - len(self.data)
            raise FormatError(f'{self.label}: данные обрываются в {what}, не хватает {missing} байт')
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_weights(data):
    reader = _Reader(data, 'PGRW')
    magic = reader.take(4, 'заголовке')
    if magic != MAGIC:
        raise FormatError(f'PGRW: неверная сигнатура {magic!r}')
    version, count = reader.unpack('<HI', 'заголовке')
    if version != VERSION:
        raise FormatError(f'PGRW: неподдерживаемая версия {version}')
    arrays = {}
    for _ in range(count):
        (name_len,) = reader.unpack('<H', 'имени записи')
        raw_name = reader.take(name_len, 'имени записи')
        try:
            name = raw_name.decode('utf-8')
        except UnicodeDecodeError:
            raise FormatError(f'PGRW: имя записи не в UTF-8: {raw_name!r}') from None
        code, rank = reader.unpack('<BB', f'записи {name}')
        if code not in CODE_DTYPES:
            raise FormatError(f'PGRW: неизвестный код типа {code} у {name}')
        dims = reader.unpack(f'<{rank}I', f'размерах {name}')
        dtype = CODE_DTYPES[code]
        size = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
        payload = reader.take(size, f'данных {name}')
        arrays[name] = np.frombuffer(payload, dtype=dtype).reshape(dims).astype(dtype.newbyteorder('='))
    if reader.offset != len(data):
        raise FormatError(f'PGRW: лишние {len(data) - reader.offset} байт после последней записи')
    return arrays


def write_weights(arrays, path):
    with open(path, 'wb') as fp:
        fp.write(encode_weights(arrays))


def read_weights(path):
    with open(path, 'rb') as fp:
        data = fp.read()
    try:
        return decode_weights(data)
    except FormatError as error:
        raise FormatError(f'{path}: {error}') from error
