"""
On-disk synthetic datasets.

Each camera gets a registration and a query sequence written as Y4M files or
PGM frame directories, plus one ``manifest.json`` at the dataset root listing
where they are. Paths in the manifest are relative to the dataset root.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Sequence, Tuple, Union

from src.errors import OutputError
from src.frames.loader import load_sequence
from src.frames.pgm import MANIFEST_NAME, write_manifest, write_pgm
from src.frames.types import FrameKind, FrameSequence
from src.frames.y4m import write_y4m
from src.sim.sensor import SceneSpec, SensorModel, capture_sequence
from src.utils.logging import get_logger

DATASET_MANIFEST = 'manifest.json'

DatasetFormat = Literal['y4m', 'pgm']


@dataclass(frozen=True)
class DatasetEntry:
    camera_id: str
    registration_path: str
    query_path: str
    width: int
    height: int
    k_strength: float
    noise_sigma: float
    seed: int

    def to_dict(self) -> dict:
        return {
            'camera_id': self.camera_id,
            'registration_path': self.registration_path,
            'query_path': self.query_path,
            'width': self.width,
            'height': self.height,
            'k_strength': self.k_strength,
            'noise_sigma': self.noise_sigma,
            'seed': self.seed,
        }


def write_pgm_dir(seq: FrameSequence, directory: Path) -> None:
    """Write numbered PGM frames plus a manifest of the known frame kinds."""
    directory.mkdir(parents=True, exist_ok=True)
    kinds: Dict[str, FrameKind] = {}
    for frame in seq.frames:
        name = f"frame_{frame.frame_index:05d}.pgm"
        write_pgm(frame, directory / name)
        if frame.frame_kind is not FrameKind.UNKNOWN:
            kinds[name] = frame.frame_kind
    write_manifest(kinds, directory / MANIFEST_NAME)


def _render_camera(
    cam: SensorModel,
    root: Path,
    counts: Tuple[int, int],
    scene: SceneSpec,
    seed: int,
    fmt: DatasetFormat,
    quantize: bool,
) -> DatasetEntry:
    reg_count, query_count = counts
    registration = capture_sequence(cam, reg_count, 'registration', scene, seed, quantize=quantize)
    query = capture_sequence(cam, query_count, 'query', scene, seed, quantize=quantize)

    camera_dir = root / cam.camera_id
    camera_dir.mkdir(parents=True, exist_ok=True)
    if fmt == 'y4m':
        reg_rel = f"{cam.camera_id}/registration.y4m"
        query_rel = f"{cam.camera_id}/query.y4m"
        # one frame per second of video, so stride selection takes every frame
        write_y4m(registration, root / reg_rel, fps=1.0)
        write_y4m(query, root / query_rel, fps=query.declared_fps)
    else:
        reg_rel = f"{cam.camera_id}/registration"
        query_rel = f"{cam.camera_id}/query"
        write_pgm_dir(registration, root / reg_rel)
        write_pgm_dir(query, root / query_rel)

    return DatasetEntry(
        camera_id=cam.camera_id,
        registration_path=reg_rel,
        query_path=query_rel,
        width=cam.width,
        height=cam.height,
        k_strength=cam.k_strength,
        noise_sigma=cam.noise_sigma,
        seed=cam.seed,
    )


def render_dataset(
    cameras: Sequence[SensorModel],
    reg_frames: int,
    query_frames: int,
    scene: SceneSpec,
    out_dir: Union[str, Path],
    seed: int = 0,
    fmt: DatasetFormat = 'y4m',
    quantize: bool = False,
    threads: int = 1,
) -> List[DatasetEntry]:
    """Render registration and query sequences for every camera.

    Registration and query sequences use different random streams, so they see
    different scenes and noise draws. Output depends only on the cameras, the
    counts, the scene settings and ``seed``.

    Args:
        cameras: Cameras to render (at least one)
        reg_frames: Registration frames per camera
        query_frames: Query frames per camera
        scene: Scene settings; the per-frame scene seed is drawn from the sequence stream
        out_dir: Dataset root, created if missing
        seed: Base seed for the sequence streams
        fmt: 'y4m' files or 'pgm' frame directories
        quantize: Round captured frames to integers
        threads: Cameras rendered concurrently

    Returns:
        Manifest entries in camera order

    Raises:
        ValueError: No cameras, or non-positive frame counts
        OutputError: The dataset cannot be written
    """
    if not cameras:
        raise ValueError("A dataset needs at least one camera")
    if reg_frames < 1 or query_frames < 1:
        raise ValueError(f"Frame counts must be >= 1, got {reg_frames} and {query_frames}")

    root = Path(out_dir)
    logger = get_logger()
    try:
        root.mkdir(parents=True, exist_ok=True)

        def render(cam: SensorModel) -> DatasetEntry:
            entry = _render_camera(cam, root, (reg_frames, query_frames), scene, seed, fmt, quantize)
            logger.debug(f"Rendered {cam.camera_id}: {reg_frames} registration + {query_frames} query frames")
            return entry

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                entries = list(executor.map(render, cameras))
        else:
            entries = [render(cam) for cam in cameras]

        manifest = {'cameras': [entry.to_dict() for entry in entries]}
        (root / DATASET_MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    except OSError as e:
        raise OutputError(f"Cannot write dataset to {root}: {e.strerror or e}")

    logger.info(f"Wrote dataset of {len(entries)} cameras to {root}")
    return entries


def load_dataset_manifest(root: Union[str, Path]) -> List[DatasetEntry]:
    """Read the manifest of a rendered dataset."""
    path = Path(root) / DATASET_MANIFEST
    try:
        raw = json.loads(path.read_text(encoding='utf-8'))
        return [DatasetEntry(**item) for item in raw['cameras']]
    except OSError as e:
        raise OutputError(f"Cannot read dataset manifest {path}: {e.strerror}")
    except (ValueError, KeyError, TypeError) as e:
        raise OutputError(f"Malformed dataset manifest {path}: {e}")


def load_dataset_sequences(root: Union[str, Path], entry: DatasetEntry) -> Tuple[FrameSequence, FrameSequence]:
    """Load one camera's (registration, query) sequences back from disk."""
    base = Path(root)
    return load_sequence(base / entry.registration_path), load_sequence(base / entry.query_path)
