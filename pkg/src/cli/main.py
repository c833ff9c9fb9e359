"""
Main CLI entry point for prnu_gate.

Machine-readable results go to stdout as JSON; logs, progress and error JSON
go to stderr. Exit codes: 0 success or accept, 1 clean non-accept, 2 error,
3 dimension mismatch.
"""

import base64
import functools
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Optional

import click
from rich.console import Console

from src import __version__
from src.clients.authd import AuthdClient
from src.errors import DimensionMismatchError, PrnuGateError
from src.frames.loader import encode_inline_y4m, load_sequence
from src.frames.selection import select_query_frames, select_registration_frames
from src.frames.y4m import SIGNATURE
from src.prnu.fingerprint import estimate_fingerprint, fingerprint_quality
from src.prnu.fpfile import load_fingerprint, save_fingerprint
from src.prnu.matcher import match_fingerprints
from src.sim import experiment
from src.utils.config import AppConfig, SimulationParams, load_config
from src.utils.logging import get_logger, log_sequence, setup_logging

console = Console(stderr=True)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2
EXIT_DIMENSION = 3


@dataclass
class CliState:
    config_path: Optional[str]
    seed: Optional[int]
    threads: Optional[int]
    output: Optional[str]

    def config(self) -> AppConfig:
        """Load the config and apply command-line overrides."""
        cfg = load_config(self.config_path)
        raw = cfg.model_dump()
        if self.seed is not None:
            raw['simulation']['seed'] = self.seed
        if self.threads is not None:
            raw['threads'] = self.threads
        return AppConfig.model_validate(raw)


def emit(payload: Any) -> None:
    click.echo(json.dumps(payload, indent=2))


def fail(error: Exception, code: int = EXIT_ERROR) -> None:
    if isinstance(error, PrnuGateError):
        body = error.to_dict()
    elif isinstance(error, OSError):
        body = {'error': 'io', 'message': f"{error.filename or ''}: {error.strerror or error}".lstrip(': ')}
    else:
        body = {'error': type(error).__name__.lower(), 'message': str(error)}
    click.echo(json.dumps(body), err=True)
    sys.exit(code)


def handle_errors(func: Callable) -> Callable:
    """Turn library errors into error JSON on stderr and the matching exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DimensionMismatchError as e:
            fail(e, EXIT_DIMENSION)
        except (PrnuGateError, OSError, ValueError, ConnectionError, TimeoutError) as e:
            get_logger().debug("Command failed", exc_info=True)
            fail(e, EXIT_ERROR)

    return wrapper


def _frames_ref(path: str) -> str:
    """Inline a local Y4M file as base64; pass anything else through as a path."""
    p = Path(path)
    if p.is_file():
        data = p.read_bytes()
        if data.startswith(SIGNATURE):
            return encode_inline_y4m(data)
    if p.exists():
        return str(p.resolve())
    raise FileNotFoundError(2, 'No such file or directory', path)


def _server_url(server: Optional[str], cfg: AppConfig) -> str:
    return server or f"http://{cfg.host}:{cfg.port}"


@click.group()
@click.version_option(version=__version__, prog_name='prnu_gate')
@click.option('--config', 'config_path', type=click.Path(), help='Config file (JSON); PRNU_GATE_CONFIG overrides it')
@click.option('--seed', type=int, help='Simulation seed')
@click.option('--threads', type=click.IntRange(min=1), help='Worker threads for residual extraction')
@click.option('--output', '-o', type=click.Path(), help='Output file or directory')
@click.option('--debug', is_flag=True, help='Enable debug logging')
@click.option('--log-file', help='Log file path')
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    seed: Optional[int],
    threads: Optional[int],
    output: Optional[str],
    debug: bool,
    log_file: Optional[str],
):
    """PRNU camera fingerprinting and meeting-admission gateway."""
    setup_logging(level=logging.DEBUG if debug else logging.INFO, log_file=log_file, verbose=debug)
    ctx.obj = CliState(config_path=config_path, seed=seed, threads=threads, output=output)


@cli.command()
@click.argument('input_path', type=click.Path())
@click.option('--select', type=click.Choice(['all', 'registration', 'query']), default='all',
              help='Use every frame, or the registration/query selection of the policy')
@click.option('--method', type=click.Choice(['average', 'ml']), default='average', help='Fingerprint estimator')
@click.option('--no-postprocess', is_flag=True, help='Skip row/column zero-mean cleaning')
@click.pass_obj
@handle_errors
def extract(state: CliState, input_path: str, select: str, method: str, no_postprocess: bool):
    """Estimate a fingerprint from a Y4M file or PGM frame directory and write it as PRNUFP1."""
    cfg = state.config()
    if not Path(input_path).exists():
        raise FileNotFoundError(2, 'No such file or directory', input_path)
    seq = load_sequence(Path(input_path))
    log_sequence(get_logger(), seq)
    if select == 'registration':
        seq = select_registration_frames(seq, cfg.policy.registration_frame_count)
    elif select == 'query':
        seq = select_query_frames(seq, cfg.policy.query_frame_count)

    fp = estimate_fingerprint(
        seq, cfg.denoiser, postprocess=not no_postprocess, method=method, threads=cfg.threads,
    )
    output = Path(state.output) if state.output else Path(input_path).with_suffix('.prnufp')
    save_fingerprint(fp, output)
    emit({
        'output': str(output),
        'width': fp.width,
        'height': fp.height,
        'frames_used': fp.frames_used,
        'postprocessed': fp.postprocessed,
        'quality': fingerprint_quality(fp).to_dict(),
    })


@cli.command()
@click.argument('fp_a', type=click.Path())
@click.argument('fp_b', type=click.Path())
@click.pass_obj
@handle_errors
def match(state: CliState, fp_a: str, fp_b: str):
    """Match two PRNUFP1 fingerprints; exit 0 on a match, 1 otherwise."""
    cfg = state.config()
    report = match_fingerprints(load_fingerprint(fp_a), load_fingerprint(fp_b), cfg.policy.matcher)
    emit(report.to_dict())
    if state.output:
        Path(state.output).write_text(json.dumps(report.to_dict(), indent=2) + '\n', encoding='utf-8')
    sys.exit(EXIT_OK if report.accepted else EXIT_REJECT)


@cli.command()
@click.argument('user_id')
@click.argument('frames', type=click.Path())
@click.option('--password', prompt=True, hide_input=True, confirmation_prompt=True,
              envvar='PRNU_GATE_PASSWORD', help='Fallback password')
@click.option('--server', help='Service URL (default: host/port from config)')
@click.pass_obj
@handle_errors
def register(state: CliState, user_id: str, frames: str, password: str, server: Optional[str]):
    """Register USER_ID's camera from a registration video."""
    client = AuthdClient(_server_url(server, state.config()))
    emit(client.run(client.register(user_id, password, _frames_ref(frames))))


@cli.command()
@click.argument('user_id')
@click.argument('frames', type=click.Path(), required=False)
@click.option('--fingerprint', 'fingerprint_path', type=click.Path(), help='Send a precomputed PRNUFP1 query fingerprint')
@click.option('--session', 'session_id', help='Join session id')
@click.option('--server', help='Service URL (default: host/port from config)')
@click.pass_obj
@handle_errors
def join(
    state: CliState,
    user_id: str,
    frames: Optional[str],
    fingerprint_path: Optional[str],
    session_id: Optional[str],
    server: Optional[str],
):
    """Ask to join as USER_ID; exit 0 when admitted by fingerprint, 1 otherwise."""
    if (frames is None) == (fingerprint_path is None):
        raise click.UsageError('Give either FRAMES or --fingerprint')
    client = AuthdClient(_server_url(server, state.config()))
    if fingerprint_path is not None:
        blob = base64.b64encode(Path(fingerprint_path).read_bytes()).decode('ascii')
        outcome = client.run(client.join(user_id, fingerprint_b64=blob, session_id=session_id))
    else:
        outcome = client.run(client.join(user_id, frames_ref=_frames_ref(frames), session_id=session_id))
    emit(outcome)
    sys.exit(EXIT_OK if outcome['decision'] == 'admitted_prnu' else EXIT_REJECT)


@cli.command()
@click.argument('challenge_token')
@click.option('--password', prompt=True, hide_input=True, envvar='PRNU_GATE_PASSWORD', help='Fallback password')
@click.option('--server', help='Service URL (default: host/port from config)')
@click.pass_obj
@handle_errors
def password(state: CliState, challenge_token: str, password: str, server: Optional[str]):
    """Answer a password challenge; exit 0 when admitted, 1 otherwise."""
    client = AuthdClient(_server_url(server, state.config()))
    outcome = client.run(client.submit_password(challenge_token, password))
    emit(outcome)
    sys.exit(EXIT_OK if outcome['decision'] == 'admitted_password' else EXIT_REJECT)


@cli.command()
@click.pass_obj
@handle_errors
def serve(state: CliState):
    """Run the admission service until interrupted."""
    from src.authd.server import run_server

    run_server(state.config())


@cli.command()
@click.option('--cameras', type=click.IntRange(min=1), help='Number of cameras')
@click.option('--width', type=click.IntRange(min=1), help='Frame width')
@click.option('--height', type=click.IntRange(min=1), help='Frame height')
@click.option('--k-strength', type=float, help='PRNU strength (std of K)')
@click.option('--noise-sigma', type=float, help='Additive noise std')
@click.option('--registration-frames', type=click.IntRange(min=1), help='Registration frames per camera')
@click.option('--query-frames', type=click.IntRange(min=1), help='Query frames per camera')
@click.option('--format', 'dataset_format', type=click.Choice(['y4m', 'pgm']), help='Dataset file format')
@click.option('--quantize', is_flag=True, help='Round captured frames to integers')
@click.option('--fp-study', is_flag=True, help='Run the cross-camera false-positive study instead')
@click.option('--fp-cameras', type=click.IntRange(min=2), default=33, show_default=True,
              help='Cameras in the false-positive study')
@click.option('--benchmark', is_flag=True, help='Time the verify pipeline at --width x --height instead')
@click.option('--quiet', is_flag=True, help='No progress lines or summary table')
@click.pass_obj
@handle_errors
def simulate(state: CliState, **options):
    """Run the synthetic camera experiment and write report.json / report.csv."""
    cfg = state.config()
    updates = {
        'num_cameras': options['cameras'],
        'width': options['width'],
        'height': options['height'],
        'k_strength': options['k_strength'],
        'noise_sigma': options['noise_sigma'],
        'registration_frames': options['registration_frames'],
        'query_frames': options['query_frames'],
        'dataset_format': options['dataset_format'],
        'quantize': options['quantize'] or None,
    }
    raw = cfg.simulation.model_dump()
    raw.update({k: v for k, v in updates.items() if v is not None})
    params = SimulationParams.model_validate(raw)
    out_dir = Path(state.output or 'simulate_out')
    out_dir.mkdir(parents=True, exist_ok=True)
    policy = cfg.policy.model_copy(update={
        'registration_frame_count': params.registration_frames,
        'query_frame_count': params.query_frames,
        'registration_floor': min(cfg.policy.registration_floor, params.registration_frames),
    })

    if options['fp_study']:
        fp_report = experiment.run_false_positive_study(
            params, cfg.denoiser, cfg.policy.matcher, num_cameras=options['fp_cameras'], threads=cfg.threads,
        )
        (out_dir / 'fp_study.json').write_text(json.dumps(fp_report.to_dict(), indent=2) + '\n', encoding='utf-8')
        emit(fp_report.to_dict())
        return

    if options['benchmark']:
        width = options['width'] or 1280
        height = options['height'] or 720
        row = experiment.benchmark_verify(
            params, cfg.denoiser, policy, width=width, height=height,
            registration_frames=options['registration_frames'] or 10, threads=cfg.threads,
        )
        (out_dir / 'benchmark.csv').write_text(experiment.rows_to_csv([row]), encoding='utf-8')
        emit(asdict(row))
        return

    report = experiment.run_experiment(
        params, cfg.denoiser, policy, out_dir, threads=cfg.threads, progress=not options['quiet'],
    )
    experiment.write_report(report, out_dir)
    if not options['quiet']:
        experiment.print_summary(report, console)
    emit(report.to_dict())


def main():
    """Main entry point for the CLI."""
    try:
        cli()
    except Exception as e:
        console.print(f"[bold red]Unexpected error:[/] {e}")
        get_logger().exception("Unhandled exception in main")
        sys.exit(EXIT_ERROR)


if __name__ == '__main__':
    main()
