"""
YUV4MPEG2 (Y4M) reader and writer.

Only the luminance plane is kept: chroma planes are skipped over on read and
written as neutral grey (or omitted for ``Cmono``) on write. Samples are 8-bit.
"""

import math
from pathlib import Path
from typing import BinaryIO, Dict, Optional, Tuple, Union

import numpy as np

from src.errors import EmptySequenceError, FrameFormatError
from src.frames.types import FrameSequence, LuminanceFrame
from src.utils.logging import get_logger

SIGNATURE = b'YUV4MPEG2'
FRAME_TAG = b'FRAME'

# Chroma tag → (horizontal subsampling, vertical subsampling); None means no chroma planes.
_CHROMA_LAYOUTS: Dict[str, Optional[Tuple[int, int]]] = {
    '420': (2, 2),
    '420jpeg': (2, 2),
    '420paldv': (2, 2),
    '420mpeg2': (2, 2),
    '422': (2, 1),
    '444': (1, 1),
    'mono': None,
}


def _chroma_bytes(width: int, height: int, chroma: str) -> int:
    layout = _CHROMA_LAYOUTS[chroma]
    if layout is None:
        return 0
    sub_x, sub_y = layout
    return 2 * math.ceil(width / sub_x) * math.ceil(height / sub_y)


def _parse_header(data: bytes) -> Tuple[Dict[str, str], int]:
    """Parse the stream header.

    Args:
        data: Whole stream

    Returns:
        Tuple of (tag letter → value, offset just past the header line)
    """
    if not data.startswith(SIGNATURE):
        raise FrameFormatError("Missing YUV4MPEG2 signature", offset=0)
    end = data.find(b'\n')
    if end == -1:
        raise FrameFormatError("Unterminated Y4M header", offset=len(data))
    tokens = data[len(SIGNATURE):end].split(b' ')
    tags: Dict[str, str] = {}
    for token in tokens:
        if not token:
            continue
        text = token.decode('ascii', errors='replace')
        tags[text[0]] = text[1:]
    return tags, end + 1


def _parse_dimension(tags: Dict[str, str], letter: str) -> int:
    raw = tags.get(letter)
    if raw is None:
        raise FrameFormatError(f"Y4M header is missing the {letter} (dimension) tag")
    try:
        value = int(raw)
    except ValueError:
        raise FrameFormatError(f"Y4M header has a non-numeric {letter} tag: {raw!r}")
    if value <= 0:
        raise FrameFormatError(f"Y4M header declares non-positive {letter}={value}")
    return value


def _parse_fps(raw: Optional[str]) -> Optional[float]:
    if not raw:
        return None
    try:
        num, den = raw.split(':', 1)
        if int(den) == 0:
            return None
        return int(num) / int(den)
    except ValueError:
        raise FrameFormatError(f"Y4M header has a malformed F tag: {raw!r}")


def parse_y4m(stream: Union[bytes, bytearray, BinaryIO], source_id: str = 'y4m') -> FrameSequence:
    """Parse a Y4M stream into luminance frames.

    Args:
        stream: Raw bytes or a binary file object positioned at the signature
        source_id: Label recorded on the sequence

    Returns:
        Sequence of Y planes as float64 frames, frame_kind Unknown

    Raises:
        FrameFormatError: Bad signature, bad dimensions, unsupported chroma or truncation
        EmptySequenceError: If the stream holds no FRAME records
    """
    data = bytes(stream) if isinstance(stream, (bytes, bytearray)) else stream.read()
    tags, offset = _parse_header(data)
    width = _parse_dimension(tags, 'W')
    height = _parse_dimension(tags, 'H')
    chroma = tags.get('C', '420jpeg')
    if chroma not in _CHROMA_LAYOUTS:
        raise FrameFormatError(f"Unsupported Y4M chroma tag C{chroma}")
    fps = _parse_fps(tags.get('F'))

    luma_size = width * height
    chroma_size = _chroma_bytes(width, height, chroma)
    frames = []
    while offset < len(data):
        if not data.startswith(FRAME_TAG, offset):
            raise FrameFormatError("Expected FRAME record", offset=offset)
        line_end = data.find(b'\n', offset)
        if line_end == -1:
            raise FrameFormatError("Unterminated FRAME header", offset=len(data))
        payload_start = line_end + 1
        if payload_start + luma_size > len(data):
            raise FrameFormatError(
                f"Truncated Y plane in frame {len(frames)}", offset=len(data)
            )
        luma = np.frombuffer(data, dtype=np.uint8, count=luma_size, offset=payload_start)
        frame_end = payload_start + luma_size + chroma_size
        if frame_end > len(data):
            raise FrameFormatError(
                f"Truncated chroma planes in frame {len(frames)}", offset=len(data)
            )
        frames.append(LuminanceFrame(
            luma.reshape(height, width).astype(np.float64),
            frame_index=len(frames),
        ))
        offset = frame_end

    if not frames:
        raise EmptySequenceError(f"Y4M stream {source_id!r} contains no frames")
    get_logger().debug(f"Parsed {len(frames)} Y4M frames of {width}x{height} (C{chroma}) from {source_id}")
    return FrameSequence(tuple(frames), source_id=source_id, declared_fps=fps)


def read_y4m(path: Union[str, Path]) -> FrameSequence:
    """Read a Y4M file from disk."""
    path = Path(path)
    with path.open('rb') as f:
        return parse_y4m(f, source_id=str(path))


def _fps_fraction(fps: Optional[float]) -> Tuple[int, int]:
    if fps is None or fps <= 0:
        return (30, 1)
    if float(fps).is_integer():
        return (int(fps), 1)
    return (int(round(fps * 1001)), 1001)


def frame_to_bytes(frame: LuminanceFrame) -> bytes:
    """Quantize a frame to 8-bit samples (round half to even, clip to [0, 255])."""
    return np.clip(np.rint(frame.samples), 0, 255).astype(np.uint8).tobytes()


def encode_y4m(seq: FrameSequence, chroma: str = 'mono', fps: Optional[float] = None) -> bytes:
    """Encode a sequence as a Y4M byte string.

    Args:
        seq: Frames to write
        chroma: Chroma tag to declare; chroma planes are filled with 128
        fps: Frame rate to declare, defaulting to the sequence's own (or 30)

    Returns:
        Complete Y4M stream
    """
    if chroma not in _CHROMA_LAYOUTS:
        raise FrameFormatError(f"Unsupported Y4M chroma tag C{chroma}")
    num, den = _fps_fraction(fps if fps is not None else seq.declared_fps)
    header = f"YUV4MPEG2 W{seq.width} H{seq.height} F{num}:{den} Ip A1:1 C{chroma}\n".encode('ascii')
    filler = b'\x80' * _chroma_bytes(seq.width, seq.height, chroma)
    parts = [header]
    for frame in seq.frames:
        parts.append(FRAME_TAG + b'\n')
        parts.append(frame_to_bytes(frame))
        parts.append(filler)
    return b''.join(parts)


def write_y4m(
    seq: FrameSequence,
    path: Union[str, Path],
    chroma: str = 'mono',
    fps: Optional[float] = None,
) -> Path:
    """Write a sequence to a Y4M file."""
    path = Path(path)
    path.write_bytes(encode_y4m(seq, chroma=chroma, fps=fps))
    return path
