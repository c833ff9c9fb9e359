"""
Fingerprint matching by normalized circular cross-correlation and
Peak-to-Correlation Energy (PCE).
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.fft import fft2, ifft2

from src.errors import DegenerateInputError, DimensionMismatchError
from src.prnu.fingerprint import Fingerprint, Residual, zero_mean_rows_cols
from src.utils.config import MatcherConfig

ArrayLike = Union[Fingerprint, np.ndarray]


@dataclass(frozen=True)
class PceReport:
    pce: float
    peak_row: int
    peak_col: int
    peak_corr: float
    accepted: bool
    threshold: float

    @classmethod
    def non_match(cls, threshold: float) -> 'PceReport':
        """Report for a query that could not be correlated at all (e.g. a size mismatch)."""
        return cls(pce=0.0, peak_row=0, peak_col=0, peak_corr=0.0, accepted=False, threshold=threshold)

    def to_dict(self) -> dict:
        return {
            'pce': self.pce,
            'peak_row': self.peak_row,
            'peak_col': self.peak_col,
            'peak_corr': self.peak_corr,
            'accepted': self.accepted,
            'threshold': self.threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'PceReport':
        return cls(
            pce=float(data['pce']),
            peak_row=int(data['peak_row']),
            peak_col=int(data['peak_col']),
            peak_corr=float(data['peak_corr']),
            accepted=bool(data['accepted']),
            threshold=float(data['threshold']),
        )


def _values(x: ArrayLike) -> np.ndarray:
    if isinstance(x, Fingerprint):
        return x.values
    return np.asarray(x, dtype=np.float64)


def cross_correlate(a: ArrayLike, b: ArrayLike) -> np.ndarray:
    """Normalized circular cross-correlation, computed with FFTs.

    surface[s] = sum_x a'(x) * b'(x + s) / (|a'| |b'|), with a', b' mean-subtracted.

    Args:
        a: Known fingerprint
        b: Query fingerprint

    Returns:
        Surface with the shape of the inputs; surface[0, 0] is the aligned correlation

    Raises:
        DimensionMismatchError: If the inputs differ in size
        DegenerateInputError: If either input has zero variance
    """
    va = _values(a)
    vb = _values(b)
    if va.shape != vb.shape:
        raise DimensionMismatchError(
            "Fingerprints differ in size",
            expected=(va.shape[1], va.shape[0]),
            actual=(vb.shape[1], vb.shape[0]),
        )
    va = va - va.mean()
    vb = vb - vb.mean()
    norm = np.sqrt(np.sum(va * va)) * np.sqrt(np.sum(vb * vb))
    if norm == 0:
        raise DegenerateInputError("Cannot correlate a zero-variance fingerprint")
    return np.real(ifft2(np.conj(fft2(va)) * fft2(vb))) / norm


def _neighbourhood(center: int, radius: int, size: int) -> np.ndarray:
    return np.unique((center + np.arange(-radius, radius + 1)) % size)


def pce(surface: np.ndarray, cfg: MatcherConfig) -> PceReport:
    """Peak-to-Correlation Energy of a correlation surface.

    The peak is the largest absolute value (over all shifts, or only (0, 0) in
    zero_shift_only mode); ties go to the smallest row, then column. The energy
    is the mean square of the surface outside a circular (2r+1)x(2r+1)
    neighbourhood of the peak.

    Args:
        surface: Output of cross_correlate
        cfg: Matcher settings

    Returns:
        PCE report with the accept decision

    Raises:
        DegenerateInputError: All-zero background, or a neighbourhood covering the surface
    """
    surface = np.asarray(surface, dtype=np.float64)
    height, width = surface.shape
    if cfg.search_mode == 'zero_shift_only':
        peak_row, peak_col = 0, 0
    else:
        peak_row, peak_col = (int(i) for i in np.unravel_index(np.argmax(np.abs(surface)), surface.shape))
    peak_corr = float(surface[peak_row, peak_col])

    rows = _neighbourhood(peak_row, cfg.peak_exclusion_radius, height)
    cols = _neighbourhood(peak_col, cfg.peak_exclusion_radius, width)
    excluded = len(rows) * len(cols)
    total = height * width
    if excluded >= total:
        raise DegenerateInputError(
            f"Exclusion neighbourhood of radius {cfg.peak_exclusion_radius} covers the whole {width}x{height} surface"
        )
    mask = np.ones(surface.shape, dtype=bool)
    mask[np.ix_(rows, cols)] = False
    energy = float(np.sum(surface[mask] ** 2)) / (total - excluded)
    if energy == 0.0:
        raise DegenerateInputError("Correlation background is all zero; PCE is undefined")

    value = float(np.sign(peak_corr)) * peak_corr * peak_corr / energy
    return PceReport(
        pce=value,
        peak_row=peak_row,
        peak_col=peak_col,
        peak_corr=peak_corr,
        accepted=value > cfg.pce_threshold,
        threshold=cfg.pce_threshold,
    )


def match_fingerprints(known: ArrayLike, query: ArrayLike, cfg: MatcherConfig) -> PceReport:
    """Decide whether two fingerprints come from the same camera."""
    return pce(cross_correlate(known, query), cfg)


def pce_progression(
    known: ArrayLike,
    residuals: Sequence[Residual],
    checkpoints: Sequence[int],
    cfg: MatcherConfig,
    postprocess: bool = True,
) -> List[Tuple[int, PceReport]]:
    """PCE of query fingerprints built from the first n residuals, for each n.

    Args:
        known: Registered fingerprint
        residuals: Query residuals in frame order
        checkpoints: Frame counts to evaluate; counts above len(residuals) are skipped
        cfg: Matcher settings
        postprocess: Clean each partial fingerprint like a full query fingerprint

    Returns:
        (n, report) pairs in ascending n
    """
    wanted = sorted({n for n in checkpoints if 1 <= n <= len(residuals)})
    results: List[Tuple[int, PceReport]] = []
    if not wanted:
        return results
    total = np.zeros_like(residuals[0].values)
    count = 0
    for n in wanted:
        while count < n:
            total += residuals[count].values
            count += 1
        partial = total / count
        if postprocess:
            partial = zero_mean_rows_cols(partial)
        results.append((n, match_fingerprints(known, partial, cfg)))
    return results
