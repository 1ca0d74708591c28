"""
Trajectory file I/O for camcurate.

Reads and writes TUM-style pose files, corpus manifests and the JSONL
record files produced by each pipeline stage.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np
from scipy.spatial.transform import Rotation

from .config import COMMENT_PREFIX, POSE_FIELDS, POSE_FLOAT_FORMAT, QUAT_NORM_EPS
from .errors import ConfigError, DuplicateFrameError, TrajectoryParseError, TrajectoryTooShortError
from .geometry import Trajectory

PathLike = Union[str, Path]


# =============================================================================
# POSE FILES
# =============================================================================

def load_trajectory(path: PathLike, traj_id: Optional[str] = None) -> Trajectory:
    """
    Load a trajectory from a pose file.

    Each non-empty, non-comment line holds 8 numbers:
    frame tx ty tz qx qy qz qw. Quaternions are renormalized; poses are
    returned sorted by frame index.

    Args:
        path: Pose file to read
        traj_id: Trajectory id (defaults to the file stem)

    Returns:
        Trajectory with N >= 2 poses

    Raises:
        TrajectoryParseError: Malformed line, non-finite value or zero quaternion
        DuplicateFrameError: Two lines share a frame index
        TrajectoryTooShortError: Fewer than two poses
        OSError: If the file cannot be read

    Example:
        >>> traj = load_trajectory("poses/c06_0001.txt")
        >>> len(traj)
        81
    """
    path = Path(path)
    traj_id = traj_id if traj_id is not None else path.stem

    frames, line_numbers, rows = [], [], []
    with open(path, "rb") as handle:
        for line_no, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8").strip()
            except UnicodeDecodeError:
                raise TrajectoryParseError(path, line_no, "invalid UTF-8") from None
            if not line or line.startswith(COMMENT_PREFIX):
                continue
            fields = line.split()
            if len(fields) != len(POSE_FIELDS):
                raise TrajectoryParseError(
                    path, line_no, f"expected {len(POSE_FIELDS)} fields, got {len(fields)}"
                )
            try:
                values = [float(v) for v in fields]
            except ValueError:
                raise TrajectoryParseError(path, line_no, f"non-numeric field in '{line}'") from None
            if not all(math.isfinite(v) for v in values):
                raise TrajectoryParseError(path, line_no, "non-finite value")
            frame = values[0]
            if frame < 0 or frame != int(frame):
                raise TrajectoryParseError(path, line_no, f"frame index {fields[0]} is not a non-negative integer")
            quat = np.array(values[4:8])
            if np.linalg.norm(quat) <= QUAT_NORM_EPS:
                raise TrajectoryParseError(path, line_no, "quaternion has zero norm")
            frames.append(int(frame))
            line_numbers.append(line_no)
            rows.append(values[1:8])

    if len(rows) < 2:
        raise TrajectoryTooShortError(f"{path}: {len(rows)} pose(s); at least 2 required")

    frames = np.array(frames, dtype=np.int64)
    order = np.argsort(frames, kind="stable")
    sorted_frames = frames[order]
    dup = np.flatnonzero(np.diff(sorted_frames) == 0)
    if dup.size:
        line_no = line_numbers[order[dup[0] + 1]]
        raise DuplicateFrameError(f"{path}:{line_no}: duplicate frame index {sorted_frames[dup[0]]}")

    table = np.array(rows, dtype=float)[order]
    rotations = Rotation.from_quat(table[:, 3:7]).as_matrix()
    return Trajectory(traj_id, sorted_frames, rotations, table[:, 0:3])


def write_trajectory(traj: Trajectory, path: PathLike) -> Path:
    """
    Write a trajectory as a pose file readable by load_trajectory.

    Floats use a fixed "%.12g" format; the frame index is written as an
    integer. Parent directories are created as needed.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    quats = Rotation.from_matrix(traj.rotations).as_quat()
    quats[quats[:, 3] < 0] *= -1.0

    lines = [f"{COMMENT_PREFIX} trajectory {traj.id}", f"{COMMENT_PREFIX} {' '.join(POSE_FIELDS)}"]
    for frame, center, quat in zip(traj.frame_indices, traj.centers, quats):
        numbers = " ".join(POSE_FLOAT_FORMAT % v for v in (*center, *quat))
        lines.append(f"{int(frame)} {numbers}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# =============================================================================
# MANIFESTS
# =============================================================================

@dataclass(frozen=True)
class ManifestEntry:
    """One corpus entry: trajectory id, pose file path and frame count."""

    id: str
    path: Path
    n_frames: int


def load_manifest(path: PathLike) -> List[ManifestEntry]:
    """
    Load a corpus manifest {"entries": [{id, path, n_frames}]}.

    Relative pose paths resolve against the manifest's directory.

    Raises:
        ConfigError: If the manifest is malformed or repeats an id
        OSError: If the file cannot be read
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: not valid UTF-8 JSON ({exc})") from exc

    if not isinstance(document, dict) or not isinstance(document.get("entries"), list):
        raise ConfigError(f"{path}: manifest must be an object with an 'entries' list")

    entries, seen = [], set()
    for i, item in enumerate(document["entries"]):
        try:
            entry_id = str(item["id"])
            entry_path = Path(item["path"])
            n_frames = int(item.get("n_frames", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: entry {i} is malformed ({exc})") from exc
        if entry_id in seen:
            raise ConfigError(f"{path}: duplicate entry id '{entry_id}'")
        seen.add(entry_id)
        if not entry_path.is_absolute():
            entry_path = path.parent / entry_path
        entries.append(ManifestEntry(entry_id, entry_path, n_frames))
    return entries


def write_manifest(path: PathLike, entries: Iterable[ManifestEntry]) -> Path:
    """Write a manifest, storing pose paths relative to its directory where possible."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    root = path.parent.resolve()
    items = []
    for entry in entries:
        entry_path = Path(entry.path)
        try:
            stored = entry_path.resolve().relative_to(root).as_posix()
        except ValueError:
            stored = str(entry_path)
        items.append({"id": entry.id, "path": stored, "n_frames": int(entry.n_frames)})
    path.write_text(json.dumps({"entries": items}, indent=2) + "\n", encoding="utf-8")
    return path


# =============================================================================
# JSONL RECORDS
# =============================================================================

def read_jsonl(path: PathLike) -> List[dict]:
    """Read one JSON object per non-empty line."""
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def write_jsonl(path: PathLike, records: Iterable[dict]) -> Path:
    """Write records one JSON object per line with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    return path
