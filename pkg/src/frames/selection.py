"""
Registration and query frame selection.

Registration prefers frames flagged as I-frames; without flags it takes one
frame per second of declared video. Query selection takes the opening frames.
"""

from src.errors import EmptySequenceError
from src.frames.types import FrameKind, FrameSequence

DEFAULT_STRIDE = 30


def _check(seq: FrameSequence, count: int) -> None:
    if count < 1:
        raise ValueError(f"Frame count must be >= 1, got {count}")
    if len(seq) == 0:
        raise EmptySequenceError("Cannot select frames from an empty sequence")


def registration_stride(seq: FrameSequence) -> int:
    """Frames per second of video, used as the sampling stride."""
    if seq.declared_fps is None or seq.declared_fps <= 0:
        return DEFAULT_STRIDE
    return max(1, int(round(seq.declared_fps)))


def select_registration_frames(seq: FrameSequence, count: int) -> FrameSequence:
    """Pick the frames a registration fingerprint is estimated from.

    Args:
        seq: Ingested registration video
        count: Number of frames wanted

    Returns:
        The first ``count`` I-frames if any frame is flagged I, otherwise frames
        at a stride of round(fps); ``short_supply`` is set when fewer are available
    """
    _check(seq, count)
    i_frames = [f for f in seq.frames if f.frame_kind is FrameKind.I]
    if i_frames:
        chosen = i_frames[:count]
    else:
        chosen = list(seq.frames[::registration_stride(seq)])[:count]
    return seq.subsequence(chosen, short_supply=len(chosen) < count)


def select_query_frames(seq: FrameSequence, count: int) -> FrameSequence:
    """Take the first ``count`` frames regardless of kind."""
    _check(seq, count)
    chosen = seq.frames[:count]
    return seq.subsequence(chosen, short_supply=len(chosen) < count)
