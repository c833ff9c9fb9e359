"""Tests for PGM frame directories and sidecar manifests."""

import numpy as np
import pytest

from src.errors import DimensionMismatchError, EmptySequenceError, FrameFormatError
from src.frames.loader import decode_inline_y4m, encode_inline_y4m, load_sequence
from src.frames.pgm import encode_pgm, load_frame_dir, parse_pgm, write_manifest, write_pgm
from src.frames.types import FrameKind, LuminanceFrame
from src.frames.y4m import encode_y4m
from tests.conftest import make_sequence


def _write_dir(directory, arrays):
    directory.mkdir()
    for i, array in enumerate(arrays):
        write_pgm(LuminanceFrame(array, frame_index=i), directory / f"frame_{i:03d}.pgm")
    return directory


def test_parse_pgm_with_comment():
    data = b'P5\n# made by hand\n3 2\n255\n' + bytes([0, 1, 2, 3, 4, 5])
    frame = parse_pgm(data)
    assert frame.shape == (2, 3)
    assert frame.samples[1, 2] == 5


def test_parse_pgm_rejects_ascii_and_deep_maxval():
    with pytest.raises(FrameFormatError):
        parse_pgm(b'P2\n1 1\n255\n0\n')
    with pytest.raises(FrameFormatError):
        parse_pgm(b'P5\n1 1\n65535\n\x00\x00')


def test_parse_pgm_rejects_truncated_and_garbage():
    with pytest.raises(FrameFormatError):
        parse_pgm(b'P5\n4 4\n255\n' + bytes(10))
    with pytest.raises(FrameFormatError):
        parse_pgm(b'P5 not a header at all')


def test_written_frame_reads_back(tmp_path, rng):
    values = rng.integers(0, 256, size=(5, 7)).astype(np.float64)
    path = write_pgm(LuminanceFrame(values), tmp_path / 'f.pgm')
    assert np.array_equal(parse_pgm(path.read_bytes()).samples, values)


def test_encode_pgm_header():
    frame = LuminanceFrame(np.full((2, 3), 7.0))
    assert encode_pgm(frame).startswith(b'P5\n3 2\n255\n')


def test_directory_in_filename_order_with_manifest(tmp_path, rng):
    arrays = [np.full((4, 4), float(v)) for v in (10, 20, 30)]
    directory = _write_dir(tmp_path / 'frames', arrays)
    write_manifest({'frame_000.pgm': FrameKind.I, 'frame_001.pgm': FrameKind.P, 'frame_002.pgm': FrameKind.I},
                   directory / 'manifest.txt')

    seq = load_frame_dir(directory)
    assert [f.samples[0, 0] for f in seq] == [10, 20, 30]
    assert [f.frame_kind for f in seq] == [FrameKind.I, FrameKind.P, FrameKind.I]


def test_directory_without_manifest_is_unknown(tmp_path):
    directory = _write_dir(tmp_path / 'frames', [np.zeros((4, 4))] * 2)
    seq = load_frame_dir(directory)
    assert all(f.frame_kind is FrameKind.UNKNOWN for f in seq)


def test_manifest_naming_missing_file(tmp_path):
    directory = _write_dir(tmp_path / 'frames', [np.zeros((4, 4))])
    (directory / 'manifest.txt').write_text('frame_000.pgm I\nframe_009.pgm P\n', encoding='utf-8')
    with pytest.raises(FrameFormatError):
        load_frame_dir(directory)


def test_manifest_bad_kind(tmp_path):
    directory = _write_dir(tmp_path / 'frames', [np.zeros((4, 4))])
    (directory / 'manifest.txt').write_text('frame_000.pgm X\n', encoding='utf-8')
    with pytest.raises(FrameFormatError):
        load_frame_dir(directory)


def test_mixed_sizes(tmp_path):
    directory = _write_dir(tmp_path / 'frames', [np.zeros((4, 4)), np.zeros((4, 5))])
    with pytest.raises(DimensionMismatchError):
        load_frame_dir(directory)


def test_empty_directory(tmp_path):
    (tmp_path / 'empty').mkdir()
    with pytest.raises(EmptySequenceError):
        load_frame_dir(tmp_path / 'empty')


def test_load_sequence_dispatches(tmp_path):
    directory = _write_dir(tmp_path / 'frames', [np.zeros((4, 4))] * 2)
    assert len(load_sequence(directory)) == 2
    assert len(load_sequence(str(directory))) == 2

    inline = encode_inline_y4m(encode_y4m(make_sequence([np.ones((4, 4))] * 3)))
    assert len(decode_inline_y4m(inline)) == 3
    assert len(load_sequence(inline)) == 3


def test_load_sequence_rejects_nonsense():
    with pytest.raises(FrameFormatError):
        load_sequence('definitely not base64 !!')
