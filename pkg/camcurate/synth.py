"""
Synthetic corpus generation.

Writes a desk-scale corpus of sampled trajectories (a fixed number per
motion class) plus planted defects, together with a manifest and a
ground-truth file recording what the filter should decide for each id.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation
from tqdm import tqdm

from .config import (
    DEFECT_KINDS,
    JITTER_DEFECT_RATIO,
    JUMP_DEFECT_RATIO,
    MANIFEST_FILE,
    POSE_FILE_SUFFIX,
    POSES_DIR,
    SAMPLE_FRAMES_RANGE,
    SAMPLE_SCALE_HIGH,
    SAMPLE_SCALE_LOW,
    TRUTH_FILE,
)
from .errors import ConfigError, ContractError
from .geometry import Trajectory
from .metrics import Decision
from .motion_library import (
    MOTION_TYPES,
    ROTATION_ONLY_CLASS_IDS,
    TRANSLATIONAL_CLASS_IDS,
    SampleRanges,
    motion_type,
    sample_trajectory,
)
from .settings import PipelineConfig
from .trajectory_io import ManifestEntry, write_jsonl, write_manifest, write_trajectory

# Seed-stream tags keep clean samples and each defect kind independent.
_CLEAN_STREAM = 0
_DEFECT_STREAMS = {kind: i + 1 for i, kind in enumerate(DEFECT_KINDS)}


@dataclass(frozen=True)
class CorpusSpec:
    """What to generate: samples per class, which classes, noise, ranges and defects."""

    per_class: int = 40
    classes: Tuple[int, ...] = tuple(mt.class_id for mt in MOTION_TYPES)
    noise: float = 0.0
    scale_low: float = SAMPLE_SCALE_LOW
    scale_high: float = SAMPLE_SCALE_HIGH
    n_frames: Tuple[int, int] = SAMPLE_FRAMES_RANGE
    defects: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.per_class < 0:
            raise ConfigError(f"per_class must be >= 0, got {self.per_class}")
        for class_id in self.classes:
            if not 0 <= class_id < len(MOTION_TYPES):
                raise ConfigError(f"unknown class id {class_id}")
        if self.noise < 0:
            raise ConfigError(f"noise must be >= 0, got {self.noise}")
        for kind, count in self.defects.items():
            if kind not in DEFECT_KINDS:
                raise ConfigError(f"unknown defect kind '{kind}' (expected one of {DEFECT_KINDS})")
            if count < 0:
                raise ConfigError(f"defect count for '{kind}' must be >= 0")

    @property
    def total(self) -> int:
        return self.per_class * len(self.classes) + sum(self.defects.values())


def load_corpus_spec(path: Union[str, Path]) -> CorpusSpec:
    """
    Read a corpus spec file.

    Format:
        {"per_class": 40, "classes": [0, 1, ...], "noise": 0.0,
         "ranges": {"low": 0.9, "high": 1.1, "n_frames": [49, 121]},
         "defects": {"jump": 50, "jitter": 50, "static": 50, "rotation_only": 50}}

    Raises:
        ConfigError: Missing file, invalid JSON or invalid values
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"corpus spec not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read corpus spec {path}: {exc}") from exc

    known = {"per_class", "classes", "noise", "ranges", "defects"}
    unknown = set(data) - known if isinstance(data, dict) else {"<root>"}
    if unknown:
        raise ConfigError(f"unknown corpus spec key(s): {sorted(unknown)}")
    ranges = data.get("ranges", {})
    if set(ranges) - {"low", "high", "n_frames"}:
        raise ConfigError(f"unknown ranges key(s): {sorted(set(ranges) - {'low', 'high', 'n_frames'})}")

    kwargs = {
        "per_class": int(data.get("per_class", 40)),
        "noise": float(data.get("noise", 0.0)),
        "scale_low": float(ranges.get("low", SAMPLE_SCALE_LOW)),
        "scale_high": float(ranges.get("high", SAMPLE_SCALE_HIGH)),
        "n_frames": tuple(int(v) for v in ranges.get("n_frames", SAMPLE_FRAMES_RANGE)),
        "defects": {str(k): int(v) for k, v in data.get("defects", {}).items()},
    }
    if "classes" in data:
        kwargs["classes"] = tuple(int(c) for c in data["classes"])
    return CorpusSpec(**kwargs)


# =============================================================================
# DEFECTS
# =============================================================================

def plant_jump(traj: Trajectory, ratio: float = JUMP_DEFECT_RATIO) -> Trajectory:
    """
    Stretch the largest step so that it becomes `ratio` x the mean step.

    Every center after that step moves along the step direction, which
    leaves the trajectory's shape otherwise intact.
    """
    steps = np.diff(traj.centers, axis=0)
    lengths = np.linalg.norm(steps, axis=1)
    n = lengths.shape[0]
    if n <= ratio:
        raise ContractError(f"need more than {ratio:g} steps to plant a jump, got {n}")
    j = int(np.argmax(lengths))
    if lengths[j] <= 0:
        raise ContractError(f"trajectory '{traj.id}' does not move")
    extra = (ratio * lengths.sum() - n * lengths[j]) / (n - ratio)
    centers = traj.centers.copy()
    centers[j + 1:] += extra * steps[j] / lengths[j]
    return traj.with_centers(centers)


def plant_jitter(traj: Trajectory, ratio: float = JITTER_DEFECT_RATIO) -> Trajectory:
    """
    Add alternating offsets along the least-variance axis of the centers.

    End points stay fixed, so net displacement is unchanged while the path
    length grows to more than `ratio` x net displacement.
    """
    centers = traj.centers
    n_steps = centers.shape[0] - 1
    if n_steps < 4:
        raise ContractError(f"need at least 4 steps to plant jitter, got {n_steps}")
    net = float(np.linalg.norm(centers[-1] - centers[0]))
    _, _, vt = np.linalg.svd(centers - centers.mean(axis=0))
    axis = vt[-1]
    amplitude = 1.25 * ratio * net / (2.0 * (n_steps - 2))
    signs = np.where(np.arange(centers.shape[0]) % 2 == 0, 1.0, -1.0)
    signs[0] = signs[-1] = 0.0
    return traj.with_centers(centers + amplitude * signs[:, None] * axis)


def static_trajectory(traj_id: str, rng: np.random.Generator, n_frames: int) -> Trajectory:
    """A frozen camera at a random pose."""
    rotation = Rotation.from_quat(rng.normal(size=4)).as_matrix()
    center = rng.uniform(-1.0, 1.0, size=3)
    return Trajectory(
        traj_id,
        np.arange(n_frames),
        np.repeat(rotation[None], n_frames, axis=0),
        np.repeat(center[None], n_frames, axis=0),
    )


# =============================================================================
# CORPUS
# =============================================================================

def _ranges(config: PipelineConfig, spec: CorpusSpec) -> SampleRanges:
    return SampleRanges.around(config.template, spec.scale_low, spec.scale_high, spec.n_frames, spec.noise)


def _plan(spec: CorpusSpec) -> List[Tuple[str, Optional[int], Optional[str], int]]:
    """(id, class_id, defect, k) for every corpus entry."""
    plan = []
    for class_id in spec.classes:
        for k in range(spec.per_class):
            plan.append((f"c{class_id:02d}_{k:04d}", class_id, None, k))
    for kind in DEFECT_KINDS:
        for k in range(spec.defects.get(kind, 0)):
            if kind in ("jump", "jitter"):
                class_id = TRANSLATIONAL_CLASS_IDS[k % len(TRANSLATIONAL_CLASS_IDS)]
            elif kind == "rotation_only":
                class_id = ROTATION_ONLY_CLASS_IDS[k % len(ROTATION_ONLY_CLASS_IDS)]
            else:
                class_id = None
            plan.append((f"d_{kind}_{k:04d}", class_id, kind, k))
    return plan


def _expected(class_id: Optional[int], defect: Optional[str]) -> Decision:
    if defect == "jump":
        return Decision.REJECT_JUMP
    if defect == "jitter":
        return Decision.REJECT_COMPLEX
    if defect == "static":
        return Decision.REJECT_STATIC
    if motion_type(class_id).is_rotation_only:
        return Decision.ROTATION_ONLY_KEEP
    return Decision.KEEP


def build_entry(traj_id: str, class_id: Optional[int], defect: Optional[str], k: int,
                ranges: SampleRanges, seed: int) -> Trajectory:
    """Deterministically generate one corpus trajectory."""
    stream = _CLEAN_STREAM if defect is None else _DEFECT_STREAMS[defect]
    if defect is None:
        seq = np.random.SeedSequence([seed, stream, class_id, k])
    else:
        seq = np.random.SeedSequence([seed, stream, k])
    if defect == "static":
        rng = np.random.default_rng(seq)
        n_frames = int(rng.integers(ranges.n_frames[0], ranges.n_frames[1] + 1))
        return static_trajectory(traj_id, rng, n_frames)

    traj = sample_trajectory(motion_type(class_id), ranges, seq, traj_id)
    if defect == "jump":
        return plant_jump(traj)
    if defect == "jitter":
        return plant_jitter(traj)
    return traj


def gen_corpus(config: PipelineConfig, spec: CorpusSpec, seed: int, out_dir: Union[str, Path],
               quiet: bool = False) -> List[ManifestEntry]:
    """
    Generate a synthetic corpus under out_dir.

    Writes poses/<id>.txt for every entry, manifest.json and truth.jsonl
    ({id, class_id, defect, expected_decision}). Output bytes depend only
    on (config.template, spec, seed).

    Args:
        config: Pipeline configuration (template magnitudes)
        spec: Corpus composition
        seed: Corpus seed
        out_dir: Output directory
        quiet: Suppress progress output

    Returns:
        Manifest entries sorted by id
    """
    out_dir = Path(out_dir)
    poses_dir = out_dir / POSES_DIR
    poses_dir.mkdir(parents=True, exist_ok=True)
    ranges = _ranges(config, spec)
    plan = _plan(spec)

    if not quiet:
        print(f"Generating {len(plan):,} trajectories into {out_dir} ...")

    entries, truth = [], []
    for traj_id, class_id, defect, k in tqdm(plan, desc="synth", unit="traj", disable=quiet):
        traj = build_entry(traj_id, class_id, defect, k, ranges, seed)
        path = write_trajectory(traj, poses_dir / f"{traj_id}{POSE_FILE_SUFFIX}")
        entries.append(ManifestEntry(traj_id, path, len(traj)))
        truth.append({
            "id": traj_id,
            "class_id": class_id,
            "defect": defect,
            "expected_decision": _expected(class_id, defect).value,
        })

    entries.sort(key=lambda e: e.id)
    truth.sort(key=lambda r: r["id"])
    write_manifest(out_dir / MANIFEST_FILE, entries)
    write_jsonl(out_dir / TRUTH_FILE, truth)

    if not quiet:
        n_defects = sum(1 for r in truth if r["defect"] is not None)
        print(f"✓ Wrote {len(entries):,} trajectories ({n_defects:,} planted defects)")
    return entries
