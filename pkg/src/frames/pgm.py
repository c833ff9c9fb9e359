"""
Binary PGM (P5) frame files and frame directories with a sidecar manifest.

A frame directory holds ``*.pgm`` files, read in ascending filename order, and
optionally a UTF-8 manifest with one ``<filename> <I|P|B>`` line per frame.
"""

import io
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.errors import EmptySequenceError, FrameFormatError
from src.frames.types import FrameKind, FrameSequence, LuminanceFrame
from src.frames.y4m import frame_to_bytes
from src.utils.logging import get_logger

MANIFEST_NAME = 'manifest.txt'


def parse_pgm(data: bytes, name: str = 'pgm', frame_index: int = 0) -> LuminanceFrame:
    """Parse a binary (P5) 8-bit PGM image.

    Args:
        data: File contents
        name: Label used in error messages
        frame_index: Index to give the frame

    Returns:
        The image as a luminance frame
    """
    if not data.startswith(b'P5'):
        raise FrameFormatError(f"{name}: not a binary PGM (magic {data[:2]!r})", offset=0)
    problem = None
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.format != 'PPM' or im.mode != 'L':
                problem = f"unsupported PGM ({im.format}, mode {im.mode}); only 8-bit P5 is read"
            else:
                im.load()
                samples = np.asarray(im, dtype=np.float64)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        problem = f"unreadable PGM ({e})"
    if problem is not None:
        raise FrameFormatError(f"{name}: {problem}")
    return LuminanceFrame(samples, frame_index=frame_index)


def read_pgm(path: Union[str, Path], frame_index: int = 0) -> LuminanceFrame:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FrameFormatError(f"{path}: unreadable ({e.strerror})")
    return parse_pgm(data, name=str(path), frame_index=frame_index)


def encode_pgm(frame: LuminanceFrame) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode('ascii')
    return header + frame_to_bytes(frame)


def write_pgm(frame: LuminanceFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_bytes(encode_pgm(frame))
    return path


def read_manifest(path: Union[str, Path]) -> Dict[str, FrameKind]:
    """Read a sidecar manifest mapping filename to frame kind."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise FrameFormatError(f"{path}: unreadable manifest ({e.strerror})")
    kinds: Dict[str, FrameKind] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FrameFormatError(f"{path}:{lineno}: expected '<filename> <I|P|B>'")
        kind = FrameKind.parse(parts[1])
        if kind is FrameKind.UNKNOWN:
            raise FrameFormatError(f"{path}:{lineno}: frame kind must be I, P or B")
        kinds[parts[0]] = kind
    return kinds


def write_manifest(kinds: Mapping[str, FrameKind], path: Union[str, Path]) -> Path:
    path = Path(path)
    lines = [f"{name} {kind.value}\n" for name, kind in sorted(kinds.items())]
    path.write_text(''.join(lines), encoding='utf-8')
    return path


def load_frame_dir(
    path: Union[str, Path],
    manifest: Optional[Union[str, Path]] = None,
    declared_fps: Optional[float] = None,
) -> FrameSequence:
    """Load every PGM frame in a directory.

    Args:
        path: Directory of ``*.pgm`` files
        manifest: Sidecar manifest; defaults to ``manifest.txt`` inside the directory if present
        declared_fps: Frame rate to record on the sequence

    Returns:
        Frames in ascending filename order

    Raises:
        FrameFormatError: Unreadable or non-PGM file, or a manifest naming a missing file
        DimensionMismatchError: If the files do not share one size
        EmptySequenceError: If the directory holds no PGM files
    """
    directory = Path(path)
    if not directory.is_dir():
        raise FrameFormatError(f"{directory}: not a directory")
    names = sorted(p.name for p in directory.iterdir() if p.is_file() and p.suffix.lower() == '.pgm')
    if not names:
        raise EmptySequenceError(f"{directory}: no PGM frames found")

    manifest_path = Path(manifest) if manifest is not None else directory / MANIFEST_NAME
    kinds: Dict[str, FrameKind] = {}
    if manifest is not None or manifest_path.exists():
        kinds = read_manifest(manifest_path)
        missing = sorted(set(kinds) - set(names))
        if missing:
            raise FrameFormatError(f"{manifest_path}: names missing frame file(s) {', '.join(missing)}")

    frames = []
    for index, name in enumerate(names):
        frame = read_pgm(directory / name, frame_index=index)
        frames.append(LuminanceFrame(frame.samples, frame_index=index, frame_kind=kinds.get(name, FrameKind.UNKNOWN)))

    get_logger().debug(f"Loaded {len(frames)} PGM frames from {directory}")
    return FrameSequence(tuple(frames), source_id=str(directory), declared_fps=declared_fps)
