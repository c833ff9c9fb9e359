"""Shared fixtures: tiny synthetic cameras and fast pipeline settings."""

import numpy as np
import pytest

from src.frames.types import FrameKind, FrameSequence
from src.sim.sensor import SceneSpec, capture_sequence, make_camera
from src.utils.config import AppConfig, DenoiserConfig, MatcherConfig, MeetingPolicy

SIZE = 64


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def denoiser():
    return DenoiserConfig()


@pytest.fixture
def matcher():
    return MatcherConfig()


@pytest.fixture
def policy():
    return MeetingPolicy(
        query_frame_count=20,
        registration_frame_count=20,
        registration_floor=5,
        password_attempt_limit=3,
    )


@pytest.fixture
def app_config(tmp_path, policy):
    return AppConfig(policy=policy, store_path=str(tmp_path / 'store'))


@pytest.fixture
def scene():
    return SceneSpec(kind='smooth_random', cutoff=0.1)


@pytest.fixture
def camera_a():
    return make_camera('alice-cam', SIZE, SIZE, k_strength=0.05, noise_sigma=1.0, seed=11)


@pytest.fixture
def camera_b():
    return make_camera('bob-cam', SIZE, SIZE, k_strength=0.05, noise_sigma=1.0, seed=22)


@pytest.fixture
def frames_of(scene):
    """Factory: capture_sequence with the fixture scene."""

    def _capture(cam, count, role='registration', seed=0):
        return capture_sequence(cam, count, role, scene, seed=seed)

    return _capture


def make_sequence(arrays, kinds=None, fps=None, source_id='test'):
    return FrameSequence.from_arrays(arrays, source_id=source_id, declared_fps=fps, kinds=kinds)


def kinds_every(total, every):
    return [FrameKind.I if i % every == 0 else FrameKind.P for i in range(total)]
