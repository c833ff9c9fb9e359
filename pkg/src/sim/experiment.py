"""
Synthetic camera experiments.

The main experiment renders a dataset, registers every camera from its
registration sequence, verifies every camera's query sequence against every
registered fingerprint, and reports per-camera timing and PCE alongside the
cross-camera PCE matrix.
"""

import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from colorama import Fore, Style, init
from rich.console import Console
from rich.table import Table

from src.errors import OutputError
from src.frames.selection import select_query_frames, select_registration_frames
from src.frames.types import FrameSequence
from src.prnu.fingerprint import Fingerprint, compute_residuals, estimate_fingerprint, fingerprint_from_residuals
from src.prnu.matcher import match_fingerprints, pce_progression
from src.sim.dataset import load_dataset_sequences, render_dataset
from src.sim.sensor import SceneSpec, capture_sequence, make_camera, make_cameras
from src.utils.config import DenoiserConfig, MatcherConfig, MeetingPolicy, SimulationParams
from src.utils.logging import get_logger

init(autoreset=True)

CSV_COLUMNS = (
    'camera_id',
    'pixels',
    'register_seconds',
    'register_select_seconds',
    'register_fingerprint_seconds',
    'verify_seconds',
    'first_query_pce',
    'same_camera_pce',
    'accepted',
)


@dataclass
class ExperimentRow:
    camera_id: str
    pixels: str
    same_camera_pce: float
    accepted: bool
    register_seconds: float
    register_select_seconds: float
    register_fingerprint_seconds: float
    verify_seconds: float
    first_query_pce: Optional[float]
    pce_progression: List[Dict[str, float]] = field(default_factory=list)


@dataclass
class ExperimentReport:
    rows: List[ExperimentRow]
    camera_ids: List[str]
    pce_matrix: List[List[float]]
    tpr: float
    fpr: float
    threshold: float
    params: dict
    generated_at: str = ''

    def to_dict(self) -> dict:
        return {
            'generated_at': self.generated_at,
            'params': self.params,
            'threshold': self.threshold,
            'tpr': self.tpr,
            'fpr': self.fpr,
            'camera_ids': self.camera_ids,
            'pce_matrix': self.pce_matrix,
            'rows': [asdict(row) for row in self.rows],
        }

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


@dataclass(frozen=True)
class FalsePositiveReport:
    cameras: int
    matches: int
    false_positives: int
    fraction: float
    max_pce: float
    threshold: float

    def to_dict(self) -> dict:
        return asdict(self)


def rows_to_csv(rows: List[ExperimentRow]) -> str:
    """Per-camera timing and PCE rows as CSV text."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.camera_id,
            row.pixels,
            f"{row.register_seconds:.4f}",
            f"{row.register_select_seconds:.4f}",
            f"{row.register_fingerprint_seconds:.4f}",
            f"{row.verify_seconds:.4f}",
            '' if row.first_query_pce is None else f"{row.first_query_pce:.2f}",
            f"{row.same_camera_pce:.2f}",
            'true' if row.accepted else 'false',
        ])
    return out.getvalue()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _scene_from_params(params: SimulationParams) -> SceneSpec:
    low, high = params.brightness_range
    return SceneSpec(kind=params.scene_kind, level=params.scene_level, cutoff=params.scene_cutoff, low=low, high=high)


def _register(
    seq: FrameSequence,
    count: int,
    denoiser: DenoiserConfig,
    postprocess: bool,
    threads: int,
) -> Tuple[Fingerprint, float, float]:
    start = time.perf_counter()
    selected = select_registration_frames(seq, count)
    selected_at = time.perf_counter()
    fp = estimate_fingerprint(selected, denoiser, postprocess=postprocess, threads=threads)
    done = time.perf_counter()
    return fp, selected_at - start, done - selected_at


def run_experiment(
    params: SimulationParams,
    denoiser: DenoiserConfig,
    policy: MeetingPolicy,
    out_dir: Union[str, Path],
    threads: int = 1,
    progress: bool = True,
) -> ExperimentReport:
    """Run the same-camera / cross-camera experiment.

    Args:
        params: Simulation parameters (cameras, sizes, frame counts, seed)
        denoiser: Denoiser settings
        policy: Frame counts and matcher settings for registration and verification
        out_dir: Directory the dataset is rendered under (``<out_dir>/dataset``)
        threads: Worker threads for rendering and residual extraction
        progress: Print per-camera progress lines to stderr

    Returns:
        Report with one row per camera and the full PCE matrix
        (``pce_matrix[i][j]`` is registered camera i against query camera j)
    """
    logger = get_logger()
    matcher = policy.matcher
    cameras = make_cameras(
        params.num_cameras, params.width, params.height, params.k_strength, params.noise_sigma, params.seed,
    )
    dataset_root = Path(out_dir) / 'dataset'
    entries = render_dataset(
        cameras,
        params.registration_frames,
        params.query_frames,
        _scene_from_params(params),
        dataset_root,
        seed=params.seed,
        fmt=params.dataset_format,
        quantize=params.quantize,
        threads=threads,
    )

    registered: List[Fingerprint] = []
    queries: List[Fingerprint] = []
    rows: List[ExperimentRow] = []
    for i, entry in enumerate(entries):
        reg_seq, query_seq = load_dataset_sequences(dataset_root, entry)
        known, select_s, fp_s = _register(
            reg_seq, policy.registration_frame_count, denoiser, policy.postprocess, threads,
        )

        start = time.perf_counter()
        query_frames = select_query_frames(query_seq, policy.query_frame_count)
        residuals = compute_residuals(query_frames.frames, denoiser, threads=threads)
        query = fingerprint_from_residuals(residuals, postprocess=policy.postprocess, source_label=query_seq.source_id)
        report = match_fingerprints(known, query, matcher)
        verify_s = time.perf_counter() - start

        wanted = set(params.progression_checkpoints)
        progression = pce_progression(known, residuals, sorted(wanted | {1}), matcher, policy.postprocess)
        first = progression[0][1] if progression else None
        registered.append(known)
        queries.append(query)
        rows.append(ExperimentRow(
            camera_id=entry.camera_id,
            pixels=f"{entry.width}x{entry.height}",
            same_camera_pce=report.pce,
            accepted=report.accepted,
            register_seconds=select_s + fp_s,
            register_select_seconds=select_s,
            register_fingerprint_seconds=fp_s,
            verify_seconds=verify_s,
            first_query_pce=first.pce if first else None,
            pce_progression=[{'frames': n, 'pce': r.pce} for n, r in progression if n in wanted],
        ))
        if progress:
            verdict = f"{Fore.GREEN}ACCEPT" if report.accepted else f"{Fore.RED}REJECT"
            _progress(
                f"{Fore.CYAN}[{i + 1}/{len(entries)}]{Style.RESET_ALL} {entry.camera_id}: "
                f"pce={Fore.YELLOW}{report.pce:.2f}{Style.RESET_ALL} {verdict}{Style.RESET_ALL}"
            )

    n = len(entries)
    matrix: List[List[float]] = []
    cross_accepts = 0
    for i in range(n):
        line = []
        for j in range(n):
            if i == j:
                line.append(rows[i].same_camera_pce)
                continue
            report = match_fingerprints(registered[i], queries[j], matcher)
            cross_accepts += int(report.accepted)
            line.append(report.pce)
        matrix.append(line)

    tpr = sum(row.accepted for row in rows) / n
    fpr = cross_accepts / (n * (n - 1)) if n > 1 else 0.0
    logger.info(f"Experiment over {n} cameras: tpr={tpr:.3f} fpr={fpr:.3f}")
    return ExperimentReport(
        rows=rows,
        camera_ids=[entry.camera_id for entry in entries],
        pce_matrix=matrix,
        tpr=tpr,
        fpr=fpr,
        threshold=matcher.pce_threshold,
        params=params.model_dump(mode='json'),
        generated_at=_now(),
    )


def run_false_positive_study(
    params: SimulationParams,
    denoiser: DenoiserConfig,
    matcher: MatcherConfig,
    num_cameras: int = 33,
    frames_per_fingerprint: int = 20,
    threads: int = 1,
) -> FalsePositiveReport:
    """Match every ordered pair of distinct cameras.

    Each camera contributes one fingerprint from its registration stream and one
    from its query stream; pair (i, j) matches registration i against query j.
    With 33 cameras that is 1056 cross-camera matches.
    """
    if num_cameras < 2:
        raise ValueError("A false-positive study needs at least two cameras")
    scene = _scene_from_params(params)
    cameras = make_cameras(
        num_cameras, params.width, params.height, params.k_strength, params.noise_sigma, params.seed, prefix='fp',
    )
    known: List[Fingerprint] = []
    query: List[Fingerprint] = []
    for cam in cameras:
        for role, bucket in (('registration', known), ('query', query)):
            seq = capture_sequence(cam, frames_per_fingerprint, role, scene, params.seed, quantize=params.quantize)
            bucket.append(estimate_fingerprint(seq, denoiser, threads=threads))

    matches = 0
    false_positives = 0
    max_pce = float('-inf')
    for i in range(num_cameras):
        for j in range(num_cameras):
            if i == j:
                continue
            report = match_fingerprints(known[i], query[j], matcher)
            matches += 1
            false_positives += int(report.accepted)
            max_pce = max(max_pce, report.pce)

    get_logger().info(f"False-positive study: {false_positives}/{matches} cross-camera matches above threshold")
    return FalsePositiveReport(
        cameras=num_cameras,
        matches=matches,
        false_positives=false_positives,
        fraction=false_positives / matches,
        max_pce=max_pce,
        threshold=matcher.pce_threshold,
    )


def benchmark_verify(
    params: SimulationParams,
    denoiser: DenoiserConfig,
    policy: MeetingPolicy,
    width: int = 1280,
    height: int = 720,
    registration_frames: int = 10,
    threads: int = 1,
) -> ExperimentRow:
    """Time registration and the verify pipeline for one camera at a given resolution."""
    scene = _scene_from_params(params)
    cam = make_camera('bench', width, height, params.k_strength, params.noise_sigma, params.seed)
    reg_seq = capture_sequence(cam, registration_frames, 'registration', scene, params.seed)
    query_seq = capture_sequence(cam, policy.query_frame_count, 'query', scene, params.seed)

    known, select_s, fp_s = _register(reg_seq, registration_frames, denoiser, policy.postprocess, threads)
    start = time.perf_counter()
    frames = select_query_frames(query_seq, policy.query_frame_count)
    residuals = compute_residuals(frames.frames, denoiser, threads=threads)
    query = fingerprint_from_residuals(residuals, postprocess=policy.postprocess)
    report = match_fingerprints(known, query, policy.matcher)
    verify_s = time.perf_counter() - start
    first = pce_progression(known, residuals, [1], policy.matcher, policy.postprocess)

    get_logger().info(f"Verified {len(frames)} frames at {width}x{height} in {verify_s:.2f}s")
    return ExperimentRow(
        camera_id=cam.camera_id,
        pixels=f"{width}x{height}",
        same_camera_pce=report.pce,
        accepted=report.accepted,
        register_seconds=select_s + fp_s,
        register_select_seconds=select_s,
        register_fingerprint_seconds=fp_s,
        verify_seconds=verify_s,
        first_query_pce=first[0][1].pce,
    )


def write_report(report: ExperimentReport, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    """Write ``report.json`` and ``report.csv`` into ``out_dir``."""
    root = Path(out_dir)
    json_path = root / 'report.json'
    csv_path = root / 'report.csv'
    try:
        root.mkdir(parents=True, exist_ok=True)
        json_path.write_text(json.dumps(report.to_dict(), indent=2) + '\n', encoding='utf-8')
        csv_path.write_text(report.to_csv(), encoding='utf-8')
    except OSError as e:
        raise OutputError(f"Cannot write report to {root}: {e.strerror or e}")
    return json_path, csv_path


def print_summary(report: ExperimentReport, console: Optional[Console] = None) -> None:
    """Render the per-camera rows as a table on stderr."""
    console = console or Console(stderr=True)
    table = Table(title=f"PRNU verification (threshold {report.threshold:g})")
    table.add_column('Camera')
    table.add_column('Pixels')
    table.add_column('Register (s)', justify='right')
    table.add_column('Verify (s)', justify='right')
    table.add_column('First-frame PCE', justify='right')
    table.add_column('PCE', justify='right')
    table.add_column('Match')
    for row in report.rows:
        first = '-' if row.first_query_pce is None else f"{row.first_query_pce:.2f}"
        table.add_row(
            row.camera_id,
            row.pixels,
            f"{row.register_seconds:.2f}",
            f"{row.verify_seconds:.2f}",
            first,
            f"{row.same_camera_pce:.2f}",
            '[green]yes[/green]' if row.accepted else '[red]no[/red]',
        )
    console.print(table)
    console.print(f"TPR {report.tpr:.3f}  FPR {report.fpr:.3f}")

