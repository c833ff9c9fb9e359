"""
Synthetic camera sensor.

A camera is a fixed multiplicative gain pattern K plus additive Gaussian noise:

    I = clamp(I0 + I0 * K + psi, 0, 255)

where I0 is the noise-free scene. Every random draw comes from a generator
seeded by (seed, camera_id, sequence role), so rendering order never changes
the output.
"""

import hashlib
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from src.errors import DimensionMismatchError
from src.frames.types import FrameKind, FrameSequence, LuminanceFrame

SceneKind = Literal['flat', 'ramp', 'smooth_random']
SequenceRole = Literal['registration', 'query']

_ROLE_CODES = {'registration': 1, 'query': 2}


@dataclass(frozen=True, eq=False)
class SensorModel:
    camera_id: str
    k: np.ndarray
    k_strength: float
    noise_sigma: float
    seed: int

    @property
    def height(self) -> int:
        return int(self.k.shape[0])

    @property
    def width(self) -> int:
        return int(self.k.shape[1])


@dataclass(frozen=True)
class SceneSpec:
    """Noise-free scene generator settings."""

    kind: SceneKind = 'flat'
    level: float = 128.0
    cutoff: float = 0.1
    seed: int = 0
    low: float = 16.0
    high: float = 240.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.low < self.high <= 255.0):
            raise ValueError(f"Scene brightness range [{self.low}, {self.high}] is invalid")
        if self.kind == 'flat' and not (0.0 <= self.level <= 255.0):
            raise ValueError(f"Flat scene level {self.level} is outside [0, 255]")
        if self.kind == 'smooth_random' and not (0.0 < self.cutoff <= 0.5):
            raise ValueError(f"Scene cutoff {self.cutoff} must be in (0, 0.5] cycles/pixel")


def _camera_key(camera_id: str) -> int:
    return int.from_bytes(hashlib.sha256(camera_id.encode('utf-8')).digest()[:8], 'little')


def sequence_rng(seed: int, camera_id: str, role: SequenceRole) -> np.random.Generator:
    """Random stream for one rendered sequence."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, _camera_key(camera_id), _ROLE_CODES[role]]))


def make_camera(
    camera_id: str,
    width: int,
    height: int,
    k_strength: float,
    noise_sigma: float,
    seed: int,
) -> SensorModel:
    """Create a synthetic camera.

    K is drawn i.i.d. from N(0, k_strength^2) by a generator seeded with ``seed``
    alone, so the same seed and size always give the same camera. A zero
    k_strength gives a sensor without PRNU.

    Raises:
        ValueError: Non-positive dimensions, negative strength or negative noise
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"Camera dimensions must be positive, got {width}x{height}")
    if k_strength < 0:
        raise ValueError(f"k_strength must be >= 0, got {k_strength}")
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    if k_strength == 0:
        k = np.zeros((height, width))
    else:
        k = np.random.default_rng(seed).normal(0.0, k_strength, size=(height, width))
    k.setflags(write=False)
    return SensorModel(camera_id=camera_id, k=k, k_strength=k_strength, noise_sigma=noise_sigma, seed=seed)


def generate_scene(spec: SceneSpec, width: int, height: int, frame_index: int = 0) -> LuminanceFrame:
    """Render a noise-free scene I0."""
    if spec.kind == 'flat':
        samples = np.full((height, width), float(spec.level))
    elif spec.kind == 'ramp':
        row = np.linspace(spec.low, spec.high, width) if width > 1 else np.array([spec.low])
        samples = np.tile(row, (height, 1))
    elif spec.kind == 'smooth_random':
        field = np.random.default_rng(spec.seed).standard_normal((height, width))
        field = gaussian_filter(field, sigma=1.0 / (2.0 * np.pi * spec.cutoff), mode='wrap')
        span = field.max() - field.min()
        if span == 0:
            samples = np.full((height, width), (spec.low + spec.high) / 2.0)
        else:
            samples = spec.low + (field - field.min()) * ((spec.high - spec.low) / span)
            samples = np.clip(samples, spec.low, spec.high)
    else:
        raise ValueError(f"Unknown scene kind {spec.kind!r}")
    return LuminanceFrame(samples, frame_index=frame_index)


def capture(
    cam: SensorModel,
    scene: LuminanceFrame,
    rng: np.random.Generator,
    quantize: bool = False,
) -> LuminanceFrame:
    """Expose the sensor to a scene.

    Args:
        cam: Camera
        scene: Noise-free frame I0 of the camera's size
        rng: Generator the additive noise is drawn from (advanced in place)
        quantize: Round the output to integers

    Returns:
        Captured frame with the scene's index and kind
    """
    if scene.shape != cam.k.shape:
        raise DimensionMismatchError(
            f"Scene does not fit camera {cam.camera_id!r}",
            expected=(cam.width, cam.height),
            actual=(scene.width, scene.height),
        )
    i0 = scene.samples
    out = i0 + i0 * cam.k
    if cam.noise_sigma > 0:
        out = out + rng.normal(0.0, cam.noise_sigma, size=i0.shape)
    out = np.clip(out, 0.0, 255.0)
    if quantize:
        out = np.rint(out)
    return scene.with_samples(out)


def capture_sequence(
    cam: SensorModel,
    count: int,
    role: SequenceRole,
    scene: SceneSpec,
    seed: int,
    quantize: bool = False,
    gop: int = 30,
) -> FrameSequence:
    """Render ``count`` frames of one camera, each of a fresh scene.

    Registration frames are all flagged I (one intra frame per second of video);
    query frames carry an I frame every ``gop`` frames and P frames between.
    """
    rng = sequence_rng(seed, cam.camera_id, role)
    frames = []
    for index in range(count):
        spec = SceneSpec(
            kind=scene.kind, level=scene.level, cutoff=scene.cutoff,
            seed=int(rng.integers(0, 2 ** 63 - 1)), low=scene.low, high=scene.high,
        )
        if role == 'registration' or index % gop == 0:
            kind = FrameKind.I
        else:
            kind = FrameKind.P
        base = generate_scene(spec, cam.width, cam.height, frame_index=index)
        frame = capture(cam, LuminanceFrame(base.samples, frame_index=index, frame_kind=kind), rng, quantize=quantize)
        frames.append(frame)
    fps: Optional[float] = 1.0 if role == 'registration' else float(gop)
    return FrameSequence(tuple(frames), source_id=f"{cam.camera_id}/{role}", declared_fps=fps)


def make_cameras(
    count: int,
    width: int,
    height: int,
    k_strength: float,
    noise_sigma: float,
    seed: int,
    prefix: str = 'cam',
) -> Sequence[SensorModel]:
    """A batch of independent cameras with seeds derived from one base seed."""
    seeds = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [
        make_camera(f"{prefix}{i:02d}", width, height, k_strength, noise_sigma, int(seeds[i]))
        for i in range(count)
    ]
