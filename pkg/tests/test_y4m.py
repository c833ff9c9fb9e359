"""Tests for the Y4M reader and writer."""

import io

import numpy as np
import pytest

from src.errors import EmptySequenceError, FrameFormatError
from src.frames.y4m import encode_y4m, parse_y4m, read_y4m, write_y4m
from src.sim.sensor import capture_sequence, make_camera
from tests.conftest import make_sequence


def _stream(width, height, frames, chroma='420jpeg', fps='30:1'):
    header = f"YUV4MPEG2 W{width} H{height} F{fps} Ip A1:1 C{chroma}\n".encode('ascii')
    chroma_size = 2 * ((width + 1) // 2) * ((height + 1) // 2) if chroma != 'mono' else 0
    body = b''
    for luma in frames:
        body += b'FRAME\n' + bytes(luma) + b'\x80' * chroma_size
    return header + body


def test_parses_luma_and_skips_chroma():
    luma0 = list(range(12))
    luma1 = [200] * 12
    seq = parse_y4m(_stream(4, 3, [luma0, luma1]))

    assert len(seq) == 2
    assert seq.width == 4 and seq.height == 3
    assert seq.declared_fps == 30.0
    np.testing.assert_array_equal(seq[0].samples, np.arange(12, dtype=float).reshape(3, 4))
    assert seq[1].samples.max() == 200
    assert seq[0].samples.dtype == np.float64


def test_odd_dimensions_round_chroma_up():
    luma = [10] * 15
    seq = parse_y4m(_stream(5, 3, [luma, luma], chroma='420'))
    assert len(seq) == 2


def test_mono_and_444_layouts():
    assert len(parse_y4m(_stream(2, 2, [[1, 2, 3, 4]], chroma='mono'))) == 1
    header = b"YUV4MPEG2 W2 H2 F25:1 C444\n"
    data = header + b'FRAME\n' + bytes(4) + bytes(8)
    assert len(parse_y4m(data)) == 1


def test_fractional_frame_rate():
    seq = parse_y4m(_stream(2, 2, [[0] * 4], fps='30000:1001'))
    assert seq.declared_fps == pytest.approx(29.97, abs=1e-3)


def test_file_object_input():
    seq = parse_y4m(io.BytesIO(_stream(2, 2, [[9] * 4])))
    assert seq[0].samples[0, 0] == 9


def test_bad_signature():
    with pytest.raises(FrameFormatError) as exc:
        parse_y4m(b'NOTAY4M W2 H2\n')
    assert exc.value.offset == 0


def test_missing_dimension():
    with pytest.raises(FrameFormatError):
        parse_y4m(b'YUV4MPEG2 W2 F30:1\nFRAME\n' + bytes(4))


def test_truncated_frame():
    data = _stream(4, 4, [[0] * 16])[:-5]
    with pytest.raises(FrameFormatError):
        parse_y4m(data)


def test_garbage_between_frames():
    data = _stream(2, 2, [[0] * 4]) + b'JUNK\n'
    with pytest.raises(FrameFormatError):
        parse_y4m(data)


def test_unsupported_chroma():
    with pytest.raises(FrameFormatError):
        parse_y4m(b'YUV4MPEG2 W2 H2 C411\n')


def test_no_frames():
    with pytest.raises(EmptySequenceError):
        parse_y4m(b'YUV4MPEG2 W2 H2 F30:1 Cmono\n')


def test_write_then_read_preserves_quantized_samples(tmp_path, rng):
    arrays = [rng.uniform(0, 255, size=(6, 8)) for _ in range(3)]
    seq = make_sequence(arrays, fps=1.0)
    path = write_y4m(seq, tmp_path / 'clip.y4m')

    back = read_y4m(path)
    assert back.declared_fps == 1.0
    for original, read in zip(seq, back):
        np.testing.assert_array_equal(read.samples, np.clip(np.rint(original.samples), 0, 255))


def test_encode_fills_chroma_with_grey():
    seq = make_sequence([np.zeros((2, 2))])
    data = encode_y4m(seq, chroma='420')
    assert data.endswith(b'\x80\x80')


def test_minimal_420mpeg2_stream():
    data = b'YUV4MPEG2 W2 H2 F30:1 C420mpeg2\nFRAME\n' + bytes(4) + bytes(2)
    seq = parse_y4m(data)
    assert len(seq) == 1
    np.testing.assert_array_equal(seq[0].samples, np.zeros((2, 2)))


def test_truncation_reports_offset():
    data = b'YUV4MPEG2 W2 H2 F30:1 C420mpeg2\nFRAME\n' + bytes(3)
    with pytest.raises(FrameFormatError) as exc:
        parse_y4m(data)
    assert exc.value.offset == len(data)


def test_simulated_clip_roundtrips_bit_for_bit(tmp_path, scene):
    cam = make_camera('c', 16, 16, 0.02, 2.0, seed=1)
    seq = capture_sequence(cam, 60, 'registration', scene, seed=0, quantize=True)
    back = read_y4m(write_y4m(seq, tmp_path / 'c.y4m'))
    assert len(back) == 60
    for a, b in zip(seq, back):
        np.testing.assert_array_equal(a.samples, b.samples)
