"""
Resolve a frame reference to a sequence.

A reference is a path to a ``.y4m`` file, a path to a PGM frame directory, or
an inline base64-encoded Y4M stream (as carried in service request bodies).
"""

import base64
import binascii
from pathlib import Path
from typing import Union

from src.errors import FrameFormatError
from src.frames.pgm import load_frame_dir
from src.frames.types import FrameSequence
from src.frames.y4m import SIGNATURE, parse_y4m, read_y4m


def load_sequence(ref: Union[str, Path]) -> FrameSequence:
    """Load frames from a path or an inline base64 Y4M stream.

    Args:
        ref: Path-or-inline reference

    Returns:
        Parsed frame sequence

    Raises:
        FrameFormatError: If the reference is neither an existing path nor a valid inline stream
    """
    if isinstance(ref, Path) or len(ref) < 4096:
        path = Path(ref)
        if path.is_dir():
            return load_frame_dir(path)
        if path.is_file():
            return read_y4m(path)
    if isinstance(ref, Path):
        raise FrameFormatError(f"{ref}: no such file or directory")
    return decode_inline_y4m(ref)


def decode_inline_y4m(text: str) -> FrameSequence:
    try:
        data = base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError):
        raise FrameFormatError("frames_ref is neither an existing path nor base64 data")
    if not data.startswith(SIGNATURE):
        raise FrameFormatError("Inline frames are not a Y4M stream", offset=0)
    return parse_y4m(data, source_id='inline')


def encode_inline_y4m(data: bytes) -> str:
    return base64.b64encode(data).decode('ascii')
