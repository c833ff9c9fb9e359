"""
Wavelet-domain locally adaptive Wiener denoiser.

The frame is decomposed with an orthogonal Daubechies-8 transform. Every detail
coefficient is scaled by var / (var + sigma0^2), where var is the smallest local
signal-variance estimate over the configured square windows; the approximation
band is left alone. The filter is evaluated as "frame minus the removed noise
component", so frames without detail energy come back bit-for-bit.
"""

import warnings
from typing import List, Sequence, Tuple

import numpy as np
import pywt
from scipy.ndimage import uniform_filter

from src.errors import FrameTooSmallError
from src.frames.types import LuminanceFrame
from src.utils.config import DenoiserConfig

WAVELET = 'db8'
PYWT_MODE = {'symmetric': 'symmetric'}
NDIMAGE_MODE = {'symmetric': 'reflect'}

# Detail coefficients at or below this magnitude are rounding noise from smooth input.
COEFF_FLOOR = 1e-10


def check_frame_size(height: int, width: int, levels: int) -> None:
    minimum = 2 ** levels
    if height < minimum or width < minimum:
        raise FrameTooSmallError(
            f"Frame {width}x{height} is too small for {levels} wavelet levels (needs >= {minimum}x{minimum})"
        )


def wavelet_decompose(samples: np.ndarray, levels: int, boundary_mode: str = 'symmetric') -> List:
    """Forward 2-D transform, coarsest approximation first (pywt layout)."""
    with warnings.catch_warnings():
        # pywt warns when boundary effects reach every coefficient; still invertible.
        warnings.simplefilter('ignore', UserWarning)
        return pywt.wavedec2(samples, WAVELET, mode=PYWT_MODE[boundary_mode], level=levels)


def wavelet_reconstruct(coeffs: List, shape: Tuple[int, int], boundary_mode: str = 'symmetric') -> np.ndarray:
    """Inverse 2-D transform, cropped to the original frame shape."""
    out = pywt.waverec2(coeffs, WAVELET, mode=PYWT_MODE[boundary_mode])
    return np.ascontiguousarray(out[:shape[0], :shape[1]])


def wavelet_roundtrip(samples: np.ndarray, levels: int, boundary_mode: str = 'symmetric') -> np.ndarray:
    """Forward then inverse transform with no attenuation."""
    samples = np.asarray(samples, dtype=np.float64)
    check_frame_size(samples.shape[0], samples.shape[1], levels)
    return wavelet_reconstruct(wavelet_decompose(samples, levels, boundary_mode), samples.shape, boundary_mode)


def local_signal_variance(
    coeff: np.ndarray,
    sigma0_sq: float,
    window_sizes: Sequence[int],
    boundary_mode: str = 'symmetric',
) -> np.ndarray:
    """Minimum over windows of max(0, local mean of squares - sigma0^2)."""
    energy = coeff * coeff
    estimates = [
        np.maximum(uniform_filter(energy, size=size, mode=NDIMAGE_MODE[boundary_mode]) - sigma0_sq, 0.0)
        for size in window_sizes
    ]
    return np.minimum.reduce(estimates)


def noise_component(samples: np.ndarray, cfg: DenoiserConfig) -> np.ndarray:
    """The part of the frame the filter removes.

    Args:
        samples: (height, width) float64 array
        cfg: Denoiser settings

    Returns:
        Array of the same shape; zero wherever no detail energy was removed
    """
    samples = np.asarray(samples, dtype=np.float64)
    check_frame_size(samples.shape[0], samples.shape[1], cfg.wavelet_levels)
    coeffs = wavelet_decompose(samples, cfg.wavelet_levels, cfg.boundary_mode)

    sigma0_sq = cfg.noise_variance_sigma0_sq
    removed: List = [np.zeros_like(coeffs[0])]
    any_detail = False
    for level in coeffs[1:]:
        filtered = []
        for band in level:
            band = np.where(np.abs(band) <= COEFF_FLOOR, 0.0, band)
            if np.any(band):
                any_detail = True
            var = local_signal_variance(band, sigma0_sq, cfg.wiener_window_sizes, cfg.boundary_mode)
            filtered.append(band * (sigma0_sq / (var + sigma0_sq)))
        removed.append(tuple(filtered))

    if not any_detail:
        return np.zeros_like(samples)
    return wavelet_reconstruct(removed, samples.shape, cfg.boundary_mode)


def denoise_frame(frame: LuminanceFrame, cfg: DenoiserConfig) -> LuminanceFrame:
    """Estimate the noise-free frame.

    Args:
        frame: Input luminance frame
        cfg: Denoiser settings

    Returns:
        Denoised frame with the same dimensions, index and kind

    Raises:
        FrameTooSmallError: If either dimension is below 2**wavelet_levels
    """
    return frame.with_samples(frame.samples - noise_component(frame.samples, cfg))
