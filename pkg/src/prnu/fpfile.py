"""
PRNUFP1 fingerprint file format.

Layout (little-endian)::

    8 bytes   magic  b'PRNUFP1\\0'
    u32       width
    u32       height
    u32       frames_used
    u8        postprocessed (0/1)
    3 bytes   reserved, zero
    f32 * W*H values, row-major
    u64       CRC-64/XZ of every preceding byte
"""

import os
import struct
import tempfile
from pathlib import Path
from typing import Union

import crcmod
import numpy as np

from src.errors import ChecksumError, FingerprintFileError
from src.prnu.fingerprint import Fingerprint

MAGIC = b'PRNUFP1\x00'
_HEADER = struct.Struct('<8sIIIB3s')
_TRAILER = struct.Struct('<Q')

crc64 = crcmod.mkCrcFun(0x142F0E1EBA9EA3693, initCrc=0, rev=True, xorOut=0xFFFFFFFFFFFFFFFF)


def encode_fingerprint(fp: Fingerprint) -> bytes:
    """Serialize a fingerprint; values are stored as float32."""
    header = _HEADER.pack(MAGIC, fp.width, fp.height, fp.frames_used, int(fp.postprocessed), b'\x00\x00\x00')
    body = header + fp.values.astype('<f4').tobytes(order='C')
    return body + _TRAILER.pack(crc64(body))


def decode_fingerprint(data: bytes, source_label: str = '') -> Fingerprint:
    """Parse a PRNUFP1 blob.

    Args:
        data: File contents
        source_label: Label to attach (the format itself does not carry one)

    Returns:
        The fingerprint, values widened to float64

    Raises:
        ChecksumError: If the trailing CRC does not match
        FingerprintFileError: If the blob is malformed
    """
    if len(data) < _HEADER.size + _TRAILER.size:
        raise FingerprintFileError(f"Fingerprint blob too short ({len(data)} bytes)")
    body, trailer = data[:-_TRAILER.size], data[-_TRAILER.size:]
    magic, width, height, frames_used, postprocessed, reserved = _HEADER.unpack_from(body)
    if magic != MAGIC:
        raise FingerprintFileError("Not a PRNUFP1 fingerprint (bad magic)")
    (stored_crc,) = _TRAILER.unpack(trailer)
    if crc64(body) != stored_crc:
        raise ChecksumError("Fingerprint CRC mismatch")
    if reserved != b'\x00\x00\x00' or postprocessed not in (0, 1):
        raise FingerprintFileError("Fingerprint header has non-zero reserved bytes")
    if width == 0 or height == 0 or frames_used == 0:
        raise FingerprintFileError(f"Fingerprint header declares {width}x{height} from {frames_used} frames")
    expected = _HEADER.size + 4 * width * height
    if len(body) != expected:
        raise FingerprintFileError(f"Fingerprint payload is {len(body)} bytes, expected {expected}")
    values = np.frombuffer(body, dtype='<f4', count=width * height, offset=_HEADER.size)
    return Fingerprint(
        values.reshape(height, width).astype(np.float64),
        frames_used=frames_used,
        source_label=source_label,
        postprocessed=bool(postprocessed),
    )


def atomic_write_bytes(path: Union[str, Path], data: bytes) -> Path:
    """Write to a temporary sibling and rename over the target."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix='.tmp', dir=path.parent)
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def save_fingerprint(fp: Fingerprint, path: Union[str, Path]) -> Path:
    return atomic_write_bytes(path, encode_fingerprint(fp))


def load_fingerprint(path: Union[str, Path]) -> Fingerprint:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FingerprintFileError(f"{path}: unreadable ({e.strerror})")
    return decode_fingerprint(data, source_label=str(path))
