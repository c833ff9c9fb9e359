"""
Frame ingestion: Y4M streams, PGM frame directories and frame selection.
"""

from src.frames.loader import load_sequence
from src.frames.pgm import load_frame_dir
from src.frames.selection import select_query_frames, select_registration_frames
from src.frames.types import FrameKind, FrameSequence, LuminanceFrame
from src.frames.y4m import parse_y4m, read_y4m, write_y4m

__all__ = [
    'FrameKind',
    'FrameSequence',
    'LuminanceFrame',
    'load_frame_dir',
    'load_sequence',
    'parse_y4m',
    'read_y4m',
    'select_query_frames',
    'select_registration_frames',
    'write_y4m',
]
