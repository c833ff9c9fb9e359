"""
Configuration models for prnu_gate.

All tunables live in one JSON document validated by pydantic. The document is
found through the ``PRNU_GATE_CONFIG`` environment variable, then ``--config``,
then built-in defaults.
"""

import json
import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigError

CONFIG_ENV_VAR = 'PRNU_GATE_CONFIG'


class DenoiserConfig(BaseModel):
    """Wavelet-domain locally adaptive Wiener denoiser settings."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    wavelet_levels: int = Field(default=4, ge=1)
    noise_variance_sigma0_sq: float = Field(default=9.0, gt=0)
    wiener_window_sizes: Tuple[int, ...] = (3, 5, 7, 9)
    boundary_mode: Literal['symmetric'] = 'symmetric'

    @field_validator('wiener_window_sizes')
    @classmethod
    def _odd_windows(cls, sizes: Tuple[int, ...]) -> Tuple[int, ...]:
        if not sizes:
            raise ValueError('at least one window size is required')
        for size in sizes:
            if size < 3 or size % 2 == 0:
                raise ValueError(f'window size {size} must be odd and >= 3')
        return tuple(sizes)


class MatcherConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    pce_threshold: float = Field(default=60.0, gt=0)
    peak_exclusion_radius: int = Field(default=5, ge=0)
    search_mode: Literal['peak_search', 'zero_shift_only'] = 'peak_search'


class MeetingPolicy(BaseModel):
    """Protocol constants for registration and admission."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    matcher: MatcherConfig = MatcherConfig()
    query_frame_count: int = Field(default=100, ge=1)
    registration_frame_count: int = Field(default=60, ge=1)
    registration_floor: int = Field(default=10, ge=1)
    password_attempt_limit: int = Field(default=3, ge=1)
    postprocess: bool = True


class SimulationParams(BaseModel):
    """Synthetic camera experiment parameters (acceptance defaults)."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    num_cameras: int = Field(default=10, ge=1)
    width: int = Field(default=128, gt=0)
    height: int = Field(default=128, gt=0)
    k_strength: float = Field(default=0.02, ge=0)
    noise_sigma: float = Field(default=2.0, ge=0)
    registration_frames: int = Field(default=60, ge=1)
    query_frames: int = Field(default=100, ge=1)
    scene_kind: Literal['flat', 'ramp', 'smooth_random'] = 'smooth_random'
    scene_cutoff: float = Field(default=0.1, gt=0, le=0.5)
    scene_level: float = Field(default=128.0, ge=0, le=255)
    brightness_range: Tuple[float, float] = (16.0, 240.0)
    quantize: bool = False
    dataset_format: Literal['y4m', 'pgm'] = 'y4m'
    seed: int = 2020
    progression_checkpoints: List[int] = [1, 5, 10, 20, 40, 60, 80, 100]

    @field_validator('brightness_range')
    @classmethod
    def _within_sensor_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        low, high = value
        if not (16.0 <= low < high <= 240.0):
            raise ValueError('brightness range must satisfy 16 <= low < high <= 240')
        return value


class AppConfig(BaseModel):
    """Top-level configuration document."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    policy: MeetingPolicy = MeetingPolicy()
    denoiser: DenoiserConfig = DenoiserConfig()
    simulation: SimulationParams = SimulationParams()
    store_path: str = 'prnu_store'
    host: str = '127.0.0.1'
    port: int = Field(default=8600, ge=1, le=65535)
    threads: int = Field(default=1, ge=1)
    challenge_ttl_seconds: float = Field(default=300.0, gt=0)

    @model_validator(mode='after')
    def _floor_below_count(self) -> 'AppConfig':
        if self.policy.registration_floor > self.policy.registration_frame_count:
            raise ValueError('policy.registration_floor exceeds policy.registration_frame_count')
        return self


def resolve_config_path(path: Optional[str]) -> Optional[str]:
    """Pick the config path: the environment variable wins when set.

    Args:
        path: Path given on the command line, if any

    Returns:
        Path to read, or None for built-in defaults
    """
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return env_path
    return path


def load_config(path: Optional[str] = None) -> AppConfig:
    """Load and validate the configuration document.

    Args:
        path: JSON file to read; None resolves through the environment

    Returns:
        Validated configuration

    Raises:
        ConfigError: If the file cannot be read or fails validation
    """
    resolved = resolve_config_path(path)
    if resolved is None:
        return AppConfig()
    try:
        raw = json.loads(Path(resolved).read_text(encoding='utf-8'))
    except OSError as e:
        raise ConfigError(f"Cannot read config file {resolved}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {resolved} is not valid JSON: {e.msg} (line {e.lineno})")
    try:
        return AppConfig.model_validate(raw)
    except ValidationError as e:
        problems = '; '.join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"Invalid config {resolved}: {problems}")
