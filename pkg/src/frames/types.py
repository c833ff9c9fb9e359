"""
Frame value types shared by ingestion, the PRNU core and the simulator.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionMismatchError, EmptySequenceError, FrameFormatError


class FrameKind(str, Enum):
    I = 'I'
    P = 'P'
    B = 'B'
    UNKNOWN = 'Unknown'

    @classmethod
    def parse(cls, token: str) -> 'FrameKind':
        try:
            return cls(token)
        except ValueError:
            raise FrameFormatError(f"Unknown frame kind {token!r}; expected one of I, P, B")


@dataclass(frozen=True)
class LuminanceFrame:
    """One grayscale frame, samples stored as a read-only (height, width) float64 array."""

    samples: np.ndarray
    frame_index: int = 0
    frame_kind: FrameKind = FrameKind.UNKNOWN

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise FrameFormatError(f"Frame samples must be a non-empty 2-D array, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise FrameFormatError(f"Frame {self.frame_index} contains non-finite samples")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LuminanceFrame):
            return NotImplemented
        return (
            self.frame_index == other.frame_index
            and self.frame_kind == other.frame_kind
            and self.samples.shape == other.samples.shape
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def height(self) -> int:
        return int(self.samples.shape[0])

    @property
    def width(self) -> int:
        return int(self.samples.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    def with_samples(self, samples: np.ndarray) -> 'LuminanceFrame':
        """Same index and kind, new pixel values."""
        return replace(self, samples=samples)


@dataclass(frozen=True)
class FrameSequence:
    """An ordered, non-empty run of equally sized frames."""

    frames: Tuple[LuminanceFrame, ...]
    source_id: str = ''
    declared_fps: Optional[float] = None
    short_supply: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise EmptySequenceError(f"Frame sequence {self.source_id!r} is empty")
        expected = frames[0].shape
        previous_index = None
        for frame in frames:
            if frame.shape != expected:
                raise DimensionMismatchError(
                    f"Mixed frame dimensions in {self.source_id!r}",
                    expected=(expected[1], expected[0]),
                    actual=(frame.width, frame.height),
                )
            if previous_index is not None and frame.frame_index <= previous_index:
                raise FrameFormatError(
                    f"Frame indices must increase strictly ({previous_index} then {frame.frame_index})"
                )
            previous_index = frame.frame_index
        object.__setattr__(self, 'frames', frames)

    @classmethod
    def from_arrays(
        cls,
        arrays: Sequence[np.ndarray],
        source_id: str = '',
        declared_fps: Optional[float] = None,
        kinds: Optional[Sequence[FrameKind]] = None,
    ) -> 'FrameSequence':
        """Build a sequence from bare sample arrays, indexing frames from 0."""
        frames = []
        for index, array in enumerate(arrays):
            kind = kinds[index] if kinds is not None else FrameKind.UNKNOWN
            frames.append(LuminanceFrame(array, frame_index=index, frame_kind=kind))
        return cls(tuple(frames), source_id=source_id, declared_fps=declared_fps)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[LuminanceFrame]:
        return iter(self.frames)

    def __getitem__(self, index: int) -> LuminanceFrame:
        return self.frames[index]

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def subsequence(self, frames: Sequence[LuminanceFrame], short_supply: bool = False) -> 'FrameSequence':
        return FrameSequence(
            tuple(frames),
            source_id=self.source_id,
            declared_fps=self.declared_fps,
            short_supply=short_supply,
        )
