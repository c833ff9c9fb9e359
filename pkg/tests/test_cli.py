"""Tests for the prnu_gate command line."""

import asyncio
import base64
import json
import socket

import pytest
from click.testing import CliRunner

from src.cli import main as cli_main
from src.cli.main import cli
from src.errors import RemoteError
from src.frames.y4m import write_y4m
from src.sim.sensor import capture_sequence, make_camera
from src.utils.config import CONFIG_ENV_VAR


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    monkeypatch.delenv('PRNU_GATE_PASSWORD', raising=False)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def clips(tmp_path, camera_a, camera_b, frames_of):
    paths = {
        'a_reg': write_y4m(frames_of(camera_a, 20), tmp_path / 'a_reg.y4m'),
        'a_query': write_y4m(frames_of(camera_a, 20, role='query'), tmp_path / 'a_query.y4m'),
        'b_query': write_y4m(frames_of(camera_b, 20, role='query'), tmp_path / 'b_query.y4m'),
    }
    return {k: str(v) for k, v in paths.items()}


def _extract(runner, clip, out):
    result = runner.invoke(cli, ['--output', str(out), 'extract', clip])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_extract_writes_fingerprint(runner, tmp_path, clips):
    info = _extract(runner, clips['a_reg'], tmp_path / 'a.prnufp')
    assert info['frames_used'] == 20
    assert (info['width'], info['height']) == (64, 64)
    assert info['postprocessed']
    assert set(info['quality']) == {'mean', 'variance', 'min', 'max'}
    assert (tmp_path / 'a.prnufp').exists()


def test_extract_query_selection(runner, tmp_path, clips):
    result = runner.invoke(cli, ['--output', str(tmp_path / 'q.prnufp'), 'extract', clips['a_query'],
                                 '--select', 'query', '--no-postprocess', '--method', 'ml'])
    assert result.exit_code == 0, result.output
    info = json.loads(result.stdout)
    assert info['frames_used'] == 20
    assert not info['postprocessed']


def test_match_exit_codes(runner, tmp_path, clips):
    _extract(runner, clips['a_reg'], tmp_path / 'a.prnufp')
    _extract(runner, clips['a_query'], tmp_path / 'aq.prnufp')
    _extract(runner, clips['b_query'], tmp_path / 'bq.prnufp')

    same = runner.invoke(cli, ['match', str(tmp_path / 'a.prnufp'), str(tmp_path / 'aq.prnufp')])
    assert same.exit_code == 0
    assert json.loads(same.stdout)['accepted']

    other = runner.invoke(cli, ['match', str(tmp_path / 'a.prnufp'), str(tmp_path / 'bq.prnufp')])
    assert other.exit_code == 1
    assert not json.loads(other.stdout)['accepted']


def test_match_dimension_mismatch_exit_code(runner, tmp_path, clips, scene):
    small = make_camera('small', 32, 32, 0.05, 1.0, seed=3)
    small_clip = write_y4m(capture_sequence(small, 5, 'registration', scene, seed=0), tmp_path / 's.y4m')
    _extract(runner, clips['a_reg'], tmp_path / 'a.prnufp')
    _extract(runner, str(small_clip), tmp_path / 's.prnufp')

    result = runner.invoke(cli, ['match', str(tmp_path / 'a.prnufp'), str(tmp_path / 's.prnufp')])
    assert result.exit_code == 3
    assert json.loads(result.stderr)['error'] == 'dimension_mismatch'


def test_corrupt_fingerprint_is_an_error(runner, tmp_path, clips):
    _extract(runner, clips['a_reg'], tmp_path / 'a.prnufp')
    path = tmp_path / 'a.prnufp'
    data = bytearray(path.read_bytes())
    data[50] ^= 0xFF
    path.write_bytes(bytes(data))

    result = runner.invoke(cli, ['match', str(path), str(path)])
    assert result.exit_code == 2
    assert json.loads(result.stderr)['error'] == 'checksum'


def test_missing_input_is_an_error(runner, tmp_path):
    result = runner.invoke(cli, ['extract', str(tmp_path / 'missing.y4m')])
    assert result.exit_code == 2
    assert json.loads(result.stderr)['error'] == 'io'


def test_bad_config_is_an_error(runner, tmp_path, clips):
    bad = tmp_path / 'bad.json'
    bad.write_text('{"nope": 1}', encoding='utf-8')
    result = runner.invoke(cli, ['--config', str(bad), 'extract', clips['a_reg']])
    assert result.exit_code == 2
    assert json.loads(result.stderr)['error'] == 'config'


class FakeService:
    """Stands in for AuthdClient; records calls and replays canned answers."""

    calls: list = []
    answers: dict = {}

    def __init__(self, url, **kwargs):
        self.url = url

    async def _answer(self, name, **kwargs):
        FakeService.calls.append((name, self.url, kwargs))
        answer = FakeService.answers[name]
        if isinstance(answer, Exception):
            raise answer
        return answer

    async def register(self, user_id, password, frames_ref):
        return await self._answer('register', user_id=user_id, password=password, frames_ref=frames_ref)

    async def join(self, user_id, frames_ref=None, fingerprint_b64=None, session_id=None):
        return await self._answer('join', user_id=user_id, frames_ref=frames_ref,
                                  fingerprint_b64=fingerprint_b64, session_id=session_id)

    async def submit_password(self, challenge_token, password):
        return await self._answer('password', challenge_token=challenge_token, password=password)

    def run(self, coro):
        return asyncio.run(coro)


@pytest.fixture
def service(monkeypatch):
    FakeService.calls = []
    FakeService.answers = {}
    monkeypatch.setattr(cli_main, 'AuthdClient', FakeService)
    return FakeService


def test_register_sends_inline_y4m(runner, service, clips):
    service.answers['register'] = {'user_id': 'alice', 'frames_used': 20}
    result = runner.invoke(cli, ['register', 'alice', clips['a_reg'], '--password', 'pw',
                                 '--server', 'http://gate:9000'])
    assert result.exit_code == 0, result.output
    name, url, kwargs = service.calls[0]
    assert url == 'http://gate:9000'
    assert base64.b64decode(kwargs['frames_ref']).startswith(b'YUV4MPEG2')
    assert json.loads(result.stdout)['frames_used'] == 20


def test_register_defaults_to_configured_service(runner, service, clips):
    service.answers['register'] = {'user_id': 'alice'}
    result = runner.invoke(cli, ['register', 'alice', clips['a_reg']], input='pw\npw\n')
    assert result.exit_code == 0, result.output
    assert service.calls[0][1] == 'http://127.0.0.1:8600'
    assert service.calls[0][2]['password'] == 'pw'


def test_join_exit_codes(runner, service, clips):
    service.answers['join'] = {'decision': 'admitted_prnu', 'pce': 900.0}
    admitted = runner.invoke(cli, ['join', 'alice', clips['a_query'], '--session', 's1'])
    assert admitted.exit_code == 0
    assert service.calls[-1][2]['session_id'] == 's1'

    service.answers['join'] = {'decision': 'password_required', 'challenge_token': 'ab' * 16}
    challenged = runner.invoke(cli, ['join', 'alice', clips['b_query']])
    assert challenged.exit_code == 1
    assert json.loads(challenged.stdout)['challenge_token'] == 'ab' * 16


def test_join_with_fingerprint_file(runner, service, tmp_path, clips):
    _extract(runner, clips['a_query'], tmp_path / 'q.prnufp')
    service.answers['join'] = {'decision': 'admitted_prnu'}
    result = runner.invoke(cli, ['join', 'alice', '--fingerprint', str(tmp_path / 'q.prnufp')])
    assert result.exit_code == 0
    sent = service.calls[-1][2]
    assert sent['frames_ref'] is None
    assert base64.b64decode(sent['fingerprint_b64']).startswith(b'PRNUFP1')


def test_join_needs_one_query(runner, service, clips, tmp_path):
    result = runner.invoke(cli, ['join', 'alice'])
    assert result.exit_code == 2
    assert not service.calls


def test_password_exit_codes(runner, service):
    service.answers['password'] = {'decision': 'admitted_password'}
    assert runner.invoke(cli, ['password', 'tok', '--password', 'pw']).exit_code == 0

    service.answers['password'] = {'decision': 'password_required', 'attempts_remaining': 2}
    assert runner.invoke(cli, ['password', 'tok', '--password', 'bad']).exit_code == 1


def test_remote_error_is_reported(runner, service):
    service.answers['password'] = RemoteError('expired', status=404, remote_code='invalid_token')
    result = runner.invoke(cli, ['password', 'tok', '--password', 'pw'])
    assert result.exit_code == 2
    body = json.loads(result.stderr)
    assert body['error'] == 'remote'
    assert body['remote_error'] == 'invalid_token'


def test_simulate_small_run(runner, tmp_path):
    out = tmp_path / 'sim'
    result = runner.invoke(cli, [
        '--output', str(out), '--seed', '5', 'simulate', '--cameras', '2', '--width', '64', '--height', '64',
        '--registration-frames', '10', '--query-frames', '10', '--k-strength', '0.05', '--noise-sigma', '1',
        '--quiet',
    ])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report['camera_ids'] == ['cam00', 'cam01']
    assert report['params']['seed'] == 5
    assert report['tpr'] == 1.0
    assert (out / 'report.json').exists()
    assert (out / 'report.csv').read_text(encoding='utf-8').startswith('camera_id,pixels,')
    assert (out / 'dataset' / 'manifest.json').exists()


def test_simulate_pgm_dataset(runner, tmp_path):
    out = tmp_path / 'sim'
    result = runner.invoke(cli, [
        '--output', str(out), 'simulate', '--cameras', '1', '--width', '32', '--height', '32',
        '--registration-frames', '3', '--query-frames', '3', '--format', 'pgm', '--quiet',
    ])
    assert result.exit_code == 0, result.output
    assert (out / 'dataset' / 'cam00' / 'registration' / 'manifest.txt').exists()


def test_simulate_fp_study(runner, tmp_path):
    result = runner.invoke(cli, [
        '--output', str(tmp_path), 'simulate', '--fp-study', '--fp-cameras', '3', '--width', '32', '--height', '32',
    ])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)['matches'] == 6
    assert (tmp_path / 'fp_study.json').exists()


def test_simulate_benchmark(runner, tmp_path):
    result = runner.invoke(cli, [
        '--output', str(tmp_path), 'simulate', '--benchmark', '--width', '64', '--height', '48',
        '--registration-frames', '5', '--query-frames', '5',
    ])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)['pixels'] == '64x48'
    assert (tmp_path / 'benchmark.csv').exists()


def test_simulate_rejects_bad_parameters(runner, tmp_path):
    result = runner.invoke(cli, ['--output', str(tmp_path), 'simulate', '--k-strength', '-1'])
    assert result.exit_code == 2


def test_version(runner):
    result = runner.invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert 'prnu_gate' in result.output


def test_extract_is_deterministic(runner, tmp_path, clips):
    _extract(runner, clips['a_reg'], tmp_path / 'one.prnufp')
    _extract(runner, clips['a_reg'], tmp_path / 'two.prnufp')
    assert (tmp_path / 'one.prnufp').read_bytes() == (tmp_path / 'two.prnufp').read_bytes()


def test_match_file_against_itself(runner, tmp_path, clips):
    _extract(runner, clips['a_reg'], tmp_path / 'a.prnufp')
    result = runner.invoke(cli, ['match', str(tmp_path / 'a.prnufp'), str(tmp_path / 'a.prnufp')])
    assert result.exit_code == 0
    assert json.loads(result.stdout)['pce'] > 60


def test_serve_with_bad_config(runner, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'port': 'not-a-port'}), encoding='utf-8')
    result = runner.invoke(cli, ['--config', str(path), 'serve'])
    assert result.exit_code == 2
    error = json.loads(result.stderr.strip().splitlines()[-1])
    assert error['error'] == 'config'
    assert 'port' in error['message']


def test_serve_on_a_taken_port(runner, tmp_path):
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as blocker:
        blocker.bind(('127.0.0.1', 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        path = tmp_path / 'authd.json'
        path.write_text(json.dumps({'port': port, 'store_path': str(tmp_path / 'store')}), encoding='utf-8')
        result = runner.invoke(cli, ['--config', str(path), 'serve'])
    assert result.exit_code == 2
    assert json.loads(result.stderr.strip().splitlines()[-1])['error'] == 'service'
