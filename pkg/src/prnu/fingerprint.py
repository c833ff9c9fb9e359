"""
Noise residuals and camera fingerprint estimation.

A residual is a frame minus its denoised version. A fingerprint is the average
of the residuals of many frames from one camera, optionally cleaned so that
every row and column has zero mean.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionMismatchError, EmptySequenceError, FrameFormatError
from src.frames.types import FrameSequence, LuminanceFrame
from src.prnu.denoise import noise_component
from src.utils.config import DenoiserConfig
from src.utils.logging import get_logger

EstimationMethod = Literal['average', 'ml']


def _frozen(values: np.ndarray, what: str) -> np.ndarray:
    values = np.array(values, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise FrameFormatError(f"{what} values must be a non-empty 2-D array, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise FrameFormatError(f"{what} contains non-finite values")
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Residual:
    values: np.ndarray
    frame_index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'values', _frozen(self.values, 'Residual'))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class Fingerprint:
    """Estimated PRNU pattern with provenance."""

    values: np.ndarray
    frames_used: int
    source_label: str = ''
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc), compare=False)
    postprocessed: bool = False

    def __post_init__(self) -> None:
        if self.frames_used < 1:
            raise ValueError(f"frames_used must be >= 1, got {self.frames_used}")
        object.__setattr__(self, 'values', _frozen(self.values, 'Fingerprint'))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return (
            self.frames_used == other.frames_used
            and self.postprocessed == other.postprocessed
            and self.source_label == other.source_label
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    def as_float32(self) -> 'Fingerprint':
        """Round values to the float32 precision of the PRNUFP1 file format."""
        return Fingerprint(
            self.values.astype(np.float32).astype(np.float64),
            frames_used=self.frames_used,
            source_label=self.source_label,
            created_at=self.created_at,
            postprocessed=self.postprocessed,
        )


@dataclass(frozen=True)
class FingerprintQuality:
    mean: float
    variance: float
    min: float
    max: float

    def to_dict(self) -> dict:
        return {'mean': self.mean, 'variance': self.variance, 'min': self.min, 'max': self.max}


def compute_residual(frame: LuminanceFrame, cfg: DenoiserConfig) -> Residual:
    """W = I - F(I).

    Args:
        frame: Input frame
        cfg: Denoiser settings

    Returns:
        Noise residual of the frame
    """
    denoised = frame.samples - noise_component(frame.samples, cfg)
    return Residual(frame.samples - denoised, frame_index=frame.frame_index)


def compute_residuals(
    frames: Sequence[LuminanceFrame],
    cfg: DenoiserConfig,
    threads: int = 1,
) -> List[Residual]:
    """Residuals for many frames, returned in input order."""
    if threads <= 1 or len(frames) <= 1:
        return [compute_residual(frame, cfg) for frame in frames]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda frame: compute_residual(frame, cfg), frames))


def zero_mean_rows_cols(values: np.ndarray) -> np.ndarray:
    """Subtract each row's mean, then each column's mean."""
    out = values - values.mean(axis=1, keepdims=True)
    return out - out.mean(axis=0, keepdims=True)


def _check_uniform(shapes: Iterable[Tuple[int, int]]) -> Tuple[int, int]:
    expected: Optional[Tuple[int, int]] = None
    for shape in shapes:
        if expected is None:
            expected = shape
        elif shape != expected:
            raise DimensionMismatchError(
                "Frames used for one fingerprint differ in size",
                expected=(expected[1], expected[0]),
                actual=(shape[1], shape[0]),
            )
    if expected is None:
        raise EmptySequenceError("Cannot estimate a fingerprint from zero frames")
    return expected


def fingerprint_from_residuals(
    residuals: Sequence[Residual],
    postprocess: bool = True,
    source_label: str = '',
    frames: Optional[Sequence[LuminanceFrame]] = None,
    method: EstimationMethod = 'average',
) -> Fingerprint:
    """Combine residuals into a fingerprint.

    Args:
        residuals: Residuals in frame order
        postprocess: Apply row/column zero-mean cleaning
        source_label: Provenance label
        frames: The frames the residuals came from; required for ``method='ml'``
        method: ``'average'`` (plain mean) or ``'ml'`` (sum W*I / sum I^2)

    Returns:
        The estimated fingerprint
    """
    _check_uniform(r.values.shape for r in residuals)
    if method == 'average':
        total = np.zeros_like(residuals[0].values)
        for residual in residuals:
            total += residual.values
        values = total / len(residuals)
    elif method == 'ml':
        if frames is None or len(frames) != len(residuals):
            raise ValueError("Maximum-likelihood estimation needs the frames matching each residual")
        numerator = np.zeros_like(residuals[0].values)
        denominator = np.zeros_like(residuals[0].values)
        for residual, frame in zip(residuals, frames):
            numerator += residual.values * frame.samples
            denominator += frame.samples * frame.samples
        values = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0)
    else:
        raise ValueError(f"Unknown estimation method {method!r}")

    if postprocess:
        values = zero_mean_rows_cols(values)
    return Fingerprint(values, frames_used=len(residuals), source_label=source_label, postprocessed=postprocess)


def estimate_fingerprint(
    seq: FrameSequence,
    cfg: DenoiserConfig,
    postprocess: bool = True,
    method: EstimationMethod = 'average',
    threads: int = 1,
) -> Fingerprint:
    """Estimate a camera fingerprint from a frame sequence.

    Args:
        seq: Frames from one camera
        cfg: Denoiser settings
        postprocess: Apply row/column zero-mean cleaning
        method: Estimator, see fingerprint_from_residuals
        threads: Worker threads for residual extraction

    Returns:
        Fingerprint with frames_used == len(seq)
    """
    _check_uniform(f.shape for f in seq.frames)
    residuals = compute_residuals(seq.frames, cfg, threads=threads)
    fp = fingerprint_from_residuals(
        residuals, postprocess=postprocess, source_label=seq.source_id, frames=seq.frames, method=method,
    )
    get_logger().debug(f"Estimated {fp.width}x{fp.height} fingerprint from {fp.frames_used} frames of {seq.source_id!r}")
    return fp


def fingerprint_quality(fp: Fingerprint) -> FingerprintQuality:
    """Sample statistics of the fingerprint values (population variance)."""
    values = fp.values
    return FingerprintQuality(
        mean=float(values.mean()),
        variance=float(values.var()),
        min=float(values.min()),
        max=float(values.max()),
    )


def correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation of two equally shaped arrays."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatchError("Cannot correlate arrays of different sizes")
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denom == 0:
        return 0.0
    return float(np.dot(a, b) / denom)
