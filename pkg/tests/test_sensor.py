"""Tests for the synthetic camera sensor."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError
from src.frames.types import FrameKind, LuminanceFrame
from src.sim.sensor import SceneSpec, capture, capture_sequence, generate_scene, make_camera, make_cameras


def test_same_seed_same_camera():
    a = make_camera('c', 16, 8, 0.02, 1.0, seed=5)
    b = make_camera('c', 16, 8, 0.02, 1.0, seed=5)
    np.testing.assert_array_equal(a.k, b.k)
    assert a.k.shape == (8, 16)
    assert (a.width, a.height) == (16, 8)


def test_pattern_strength():
    cam = make_camera('c', 256, 256, 0.03, 1.0, seed=1)
    assert np.std(cam.k) == pytest.approx(0.03, rel=0.05)
    assert not cam.k.flags.writeable


def test_zero_strength_has_no_pattern():
    assert not np.any(make_camera('c', 8, 8, 0.0, 1.0, seed=1).k)


@pytest.mark.parametrize('args', [(0, 8, 0.01, 1.0), (8, 8, -0.01, 1.0), (8, 8, 0.01, -1.0)])
def test_invalid_camera(args):
    width, height, k_strength, noise = args
    with pytest.raises(ValueError):
        make_camera('c', width, height, k_strength, noise, seed=0)


def test_flat_scene_with_no_noise_shows_the_pattern():
    cam = make_camera('c', 8, 8, 0.02, 0.0, seed=3)
    frame = capture(cam, generate_scene(SceneSpec(kind='flat', level=100.0), 8, 8), np.random.default_rng(0))
    np.testing.assert_allclose(frame.samples, 100.0 * (1 + cam.k))


def test_capture_clips_and_quantizes():
    cam = make_camera('c', 8, 8, 0.5, 30.0, seed=3)
    scene = generate_scene(SceneSpec(kind='flat', level=250.0), 8, 8)
    frame = capture(cam, scene, np.random.default_rng(0), quantize=True)
    assert frame.samples.min() >= 0 and frame.samples.max() <= 255
    np.testing.assert_array_equal(frame.samples, np.rint(frame.samples))


def test_capture_size_mismatch():
    cam = make_camera('c', 8, 8, 0.02, 1.0, seed=3)
    with pytest.raises(DimensionMismatchError):
        capture(cam, LuminanceFrame(np.zeros((8, 9))), np.random.default_rng(0))


def test_ramp_scene():
    frame = generate_scene(SceneSpec(kind='ramp', low=20.0, high=220.0), 5, 2)
    np.testing.assert_allclose(frame.samples[0], [20, 70, 120, 170, 220])
    np.testing.assert_array_equal(frame.samples[0], frame.samples[1])


def test_smooth_random_scene_range():
    frame = generate_scene(SceneSpec(kind='smooth_random', seed=9), 32, 32)
    assert frame.samples.min() == pytest.approx(16.0)
    assert frame.samples.max() == pytest.approx(240.0)


def test_scene_validation():
    with pytest.raises(ValueError):
        SceneSpec(kind='flat', level=300.0)
    with pytest.raises(ValueError):
        SceneSpec(kind='smooth_random', cutoff=0.0)
    with pytest.raises(ValueError):
        SceneSpec(low=200.0, high=100.0)


def test_sequences_are_reproducible_and_role_specific(scene):
    cam = make_camera('c', 16, 16, 0.02, 1.0, seed=3)
    first = capture_sequence(cam, 3, 'registration', scene, seed=1)
    again = capture_sequence(cam, 3, 'registration', scene, seed=1)
    query = capture_sequence(cam, 3, 'query', scene, seed=1)
    assert first == again
    assert not np.array_equal(first[0].samples, query[0].samples)


def test_frame_kinds_and_rates(scene):
    cam = make_camera('c', 16, 16, 0.02, 1.0, seed=3)
    registration = capture_sequence(cam, 4, 'registration', scene, seed=1)
    query = capture_sequence(cam, 7, 'query', scene, seed=1, gop=3)
    assert all(f.frame_kind is FrameKind.I for f in registration)
    assert registration.declared_fps == 1.0
    assert [f.frame_kind.value for f in query] == ['I', 'P', 'P', 'I', 'P', 'P', 'I']
    assert query.source_id == 'c/query'


def test_make_cameras_are_distinct():
    cams = make_cameras(3, 8, 8, 0.02, 1.0, seed=4)
    assert [c.camera_id for c in cams] == ['cam00', 'cam01', 'cam02']
    assert len({c.seed for c in cams}) == 3
    assert not np.array_equal(cams[0].k, cams[1].k)


def test_independent_seeds_are_uncorrelated():
    a = make_camera('a', 128, 128, 0.02, 1.0, seed=1)
    b = make_camera('b', 128, 128, 0.02, 1.0, seed=2)
    assert abs(np.corrcoef(a.k.ravel(), b.k.ravel())[0, 1]) < 5 / 128
    assert 0.018 <= np.std(a.k) <= 0.022


def test_no_pattern_no_noise_is_the_scene():
    cam = make_camera('c', 8, 8, 0.0, 0.0, seed=1)
    scene = generate_scene(SceneSpec(kind='ramp'), 8, 8)
    np.testing.assert_array_equal(capture(cam, scene, np.random.default_rng(0)).samples, scene.samples)


def test_averaging_flat_captures_recovers_pattern():
    cam = make_camera('c', 64, 64, 0.02, 2.0, seed=5)
    scene = generate_scene(SceneSpec(kind='flat', level=128.0), 64, 64)
    rng = np.random.default_rng(0)
    mean = np.mean([capture(cam, scene, rng).samples for _ in range(200)], axis=0)
    estimate = (mean - 128.0) / 128.0
    assert np.corrcoef(estimate.ravel(), cam.k.ravel())[0, 1] > 0.9


def test_scene_examples():
    np.testing.assert_array_equal(generate_scene(SceneSpec(kind='flat', level=128.0), 4, 4).samples, np.full((4, 4), 128.0))
    ramp = generate_scene(SceneSpec(kind='ramp', low=16.0, high=240.0), 225, 2)
    assert ramp.samples[0, 0] == 16.0 and ramp.samples[0, -1] == 240.0
    spec = SceneSpec(kind='smooth_random', cutoff=0.1, seed=7)
    assert generate_scene(spec, 32, 32) == generate_scene(spec, 32, 32)
