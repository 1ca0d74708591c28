"""
The 50-type camera motion library.

Defines the motion types (20 basic, 30 composite), builds one canonical
template trajectory per type and samples randomized trajectories per
type for synthetic corpora.

Sign table (camera-to-world, +x right, +y down, +z forward):

    primitive       +1 means             effect at progress u in [0, 1]
    pan             right                rotate about +y by +pan*u
    tilt            up                   rotate about +x by +tilt*u
    roll            clockwise            rotate about +z by +roll*u
    truck           right                move +x by truck*u
    boom            up                   move -y by boom*u
    dolly           in                   move +z by dolly*u
    diag_lateral    right                move +x by diagonal_lateral*u
    diag_vertical   up                   move -y by diagonal_vertical*u
    diag_depth      forward              move +z by diagonal_depth*u
    arc             right                circle of arc_radius about the point
                                         arc_radius ahead, yawing to face it
    orbit_<dir>     (always +1)          circle of orbit_radius about the point
                                         orbit_radius ahead, moving toward
                                         <dir>, no rotation of its own

Rotations compose as R = R_roll @ R_tilt @ R_pan; translations add.
See MOTION_LIBRARY.md for the full type list.
"""

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from .config import SAMPLE_FRAMES_RANGE, SAMPLE_SCALE_HIGH, SAMPLE_SCALE_LOW, TEMPLATE_DEFAULTS
from .errors import ContractError, OutOfRangeError
from .geometry import Trajectory
from .trajectory_io import write_trajectory

BASIC = "basic"
COMPOSITE = "composite"

ROTATION_PRIMITIVES = ("pan", "tilt", "roll")

ORBIT_DIRECTIONS = {
    "orbit_up": np.array([0.0, -1.0, 0.0]),
    "orbit_down": np.array([0.0, 1.0, 0.0]),
    "orbit_up_left": np.array([-1.0, -1.0, 0.0]) / np.sqrt(2.0),
    "orbit_up_right": np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0),
    "orbit_down_left": np.array([-1.0, 1.0, 0.0]) / np.sqrt(2.0),
    "orbit_down_right": np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0),
}

PRIMITIVES = (
    "pan", "tilt", "roll", "truck", "boom", "dolly",
    "diag_lateral", "diag_vertical", "diag_depth", "arc",
) + tuple(ORBIT_DIRECTIONS)


# =============================================================================
# MOTION TYPES
# =============================================================================

@dataclass(frozen=True)
class MotionType:
    """One of the 50 motion classes and its signed primitive decomposition."""

    class_id: int
    name: str
    kind: str
    primitives: Tuple[Tuple[str, int], ...]

    @property
    def is_rotation_only(self) -> bool:
        return all(prim in ROTATION_PRIMITIVES for prim, _ in self.primitives)

    @property
    def description(self) -> str:
        return self.name


# (name, primitives) in class-id order
_TYPE_TABLE = (
    # Basic
    ("Pan Left", (("pan", -1),)),
    ("Pan Right", (("pan", 1),)),
    ("Tilt Up", (("tilt", 1),)),
    ("Tilt Down", (("tilt", -1),)),
    ("Truck Left", (("truck", -1),)),
    ("Truck Right", (("truck", 1),)),
    ("Dolly In", (("dolly", 1),)),
    ("Dolly Out", (("dolly", -1),)),
    ("Boom Up", (("boom", 1),)),
    ("Boom Down", (("boom", -1),)),
    ("Roll Clockwise", (("roll", 1),)),
    ("Roll Counterclockwise", (("roll", -1),)),
    ("Arc Left", (("arc", -1),)),
    ("Arc Right", (("arc", 1),)),
    ("Diagonal Forward-Left", (("diag_lateral", -1), ("diag_depth", 1))),
    ("Diagonal Forward-Right", (("diag_lateral", 1), ("diag_depth", 1))),
    ("Diagonal Backward-Left", (("diag_lateral", -1), ("diag_depth", -1))),
    ("Diagonal Backward-Right", (("diag_lateral", 1), ("diag_depth", -1))),
    ("Diagonal Forward-Up", (("diag_vertical", 1), ("diag_depth", 1))),
    ("Diagonal Forward-Down", (("diag_vertical", -1), ("diag_depth", 1))),
    # Composite
    ("Truck Left + Pan Right", (("truck", -1), ("pan", 1))),
    ("Truck Right + Pan Left", (("truck", 1), ("pan", -1))),
    ("Boom Up + Tilt Down", (("boom", 1), ("tilt", -1))),
    ("Boom Down + Tilt Up", (("boom", -1), ("tilt", 1))),
    ("Pan Left + Tilt Up", (("pan", -1), ("tilt", 1))),
    ("Pan Right + Tilt Up", (("pan", 1), ("tilt", 1))),
    ("Pan Left + Tilt Down", (("pan", -1), ("tilt", -1))),
    ("Pan Right + Tilt Down", (("pan", 1), ("tilt", -1))),
    ("Dolly In + Tilt Up", (("dolly", 1), ("tilt", 1))),
    ("Dolly In + Tilt Down", (("dolly", 1), ("tilt", -1))),
    ("Dolly Out + Tilt Up", (("dolly", -1), ("tilt", 1))),
    ("Dolly Out + Tilt Down", (("dolly", -1), ("tilt", -1))),
    ("Boom Up + Truck Left", (("boom", 1), ("truck", -1))),
    ("Boom Up + Truck Right", (("boom", 1), ("truck", 1))),
    ("Boom Up + Pan Left", (("boom", 1), ("pan", -1))),
    ("Boom Up + Pan Right", (("boom", 1), ("pan", 1))),
    ("Truck Right + Tilt Up", (("truck", 1), ("tilt", 1))),
    ("Truck Left + Tilt Down", (("truck", -1), ("tilt", -1))),
    ("Truck Left + Tilt Up", (("truck", -1), ("tilt", 1))),
    ("Truck Right + Tilt Down", (("truck", 1), ("tilt", -1))),
    ("Dolly In + Truck Left + Pan Right", (("dolly", 1), ("truck", -1), ("pan", 1))),
    ("Dolly In + Truck Right + Pan Left", (("dolly", 1), ("truck", 1), ("pan", -1))),
    ("Dolly Out + Truck Right + Pan Left", (("dolly", -1), ("truck", 1), ("pan", -1))),
    ("Dolly Out + Truck Left + Pan Right", (("dolly", -1), ("truck", -1), ("pan", 1))),
    ("Orbit Forward-Up + Tilt Down", (("orbit_up", 1), ("tilt", -1))),
    ("Orbit Forward-Down + Tilt Up", (("orbit_down", 1), ("tilt", 1))),
    ("Orbit Forward-Up-Left + Tilt Down + Pan Right", (("orbit_up_left", 1), ("tilt", -1), ("pan", 1))),
    ("Orbit Forward-Up-Right + Tilt Down + Pan Left", (("orbit_up_right", 1), ("tilt", -1), ("pan", -1))),
    ("Orbit Forward-Down-Left + Tilt Up + Pan Right", (("orbit_down_left", 1), ("tilt", 1), ("pan", 1))),
    ("Orbit Forward-Down-Right + Tilt Up + Pan Left", (("orbit_down_right", 1), ("tilt", 1), ("pan", -1))),
)

N_BASIC = 20

MOTION_TYPES: Tuple[MotionType, ...] = tuple(
    MotionType(i, name, BASIC if i < N_BASIC else COMPOSITE, prims)
    for i, (name, prims) in enumerate(_TYPE_TABLE)
)

ROTATION_ONLY_CLASS_IDS = tuple(mt.class_id for mt in MOTION_TYPES if mt.is_rotation_only)
TRANSLATIONAL_CLASS_IDS = tuple(mt.class_id for mt in MOTION_TYPES if not mt.is_rotation_only)


def _name_key(name: str) -> str:
    return " + ".join(" ".join(part.split()) for part in name.split("+")).casefold()


_BY_NAME: Dict[str, MotionType] = {_name_key(mt.name): mt for mt in MOTION_TYPES}


def motion_type(class_id: int) -> MotionType:
    """Look up a motion type by class id."""
    if not 0 <= class_id < len(MOTION_TYPES):
        raise OutOfRangeError(f"class id must lie in [0, {len(MOTION_TYPES) - 1}], got {class_id}")
    return MOTION_TYPES[class_id]


def motion_type_by_name(name: str) -> MotionType:
    """
    Look up a motion type by name, ignoring case and spacing around '+'.

    Example:
        >>> motion_type_by_name("dolly in+tilt up").class_id
        28
    """
    try:
        return _BY_NAME[_name_key(name)]
    except KeyError:
        raise ContractError(f"unknown motion type '{name}'") from None


# =============================================================================
# TEMPLATE PARAMETERS
# =============================================================================

@dataclass(frozen=True)
class TemplateParams:
    """Canonical template magnitudes (degrees and world units)."""

    n_frames: int = TEMPLATE_DEFAULTS["n_frames"]
    pan_deg: float = TEMPLATE_DEFAULTS["pan_deg"]
    tilt_deg: float = TEMPLATE_DEFAULTS["tilt_deg"]
    roll_deg: float = TEMPLATE_DEFAULTS["roll_deg"]
    dolly_dist: float = TEMPLATE_DEFAULTS["dolly_dist"]
    truck_dist: float = TEMPLATE_DEFAULTS["truck_dist"]
    boom_dist: float = TEMPLATE_DEFAULTS["boom_dist"]
    arc_deg: float = TEMPLATE_DEFAULTS["arc_deg"]
    arc_radius: float = TEMPLATE_DEFAULTS["arc_radius"]
    orbit_deg: float = TEMPLATE_DEFAULTS["orbit_deg"]
    orbit_radius: float = TEMPLATE_DEFAULTS["orbit_radius"]
    diagonal_lateral: float = TEMPLATE_DEFAULTS["diagonal_lateral"]
    diagonal_vertical: float = TEMPLATE_DEFAULTS["diagonal_vertical"]
    diagonal_depth: float = TEMPLATE_DEFAULTS["diagonal_depth"]

    def __post_init__(self):
        if int(self.n_frames) != self.n_frames or self.n_frames < 2:
            raise OutOfRangeError(f"n_frames must be an integer >= 2, got {self.n_frames}")
        for name in MAGNITUDE_FIELDS + DIAGONAL_FIELDS:
            if not getattr(self, name) > 0:
                raise OutOfRangeError(f"{name} must be positive, got {getattr(self, name)}")


DIAGONAL_FIELDS = ("diagonal_lateral", "diagonal_vertical", "diagonal_depth")
MAGNITUDE_FIELDS = tuple(
    f.name for f in fields(TemplateParams) if f.name != "n_frames" and f.name not in DIAGONAL_FIELDS
)


# =============================================================================
# TEMPLATE CONSTRUCTION
# =============================================================================

@dataclass(frozen=True, eq=False)
class MotionTemplate:
    """Canonical trajectory of one motion type."""

    class_id: int
    name: str
    kind: str
    primitives: Tuple[Tuple[str, int], ...]
    description: str
    trajectory: Trajectory

    @property
    def is_rotation_only(self) -> bool:
        return motion_type(self.class_id).is_rotation_only

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "name": self.name,
            "kind": self.kind,
            "primitives": [[prim, sign] for prim, sign in self.primitives],
            "description": self.description,
        }


def _primitive_motion(mt: MotionType, p: TemplateParams, u: np.ndarray):
    """Per-frame (pan, tilt, roll) angles in radians and (N, 3) translations."""
    angles = {name: np.zeros_like(u) for name in ROTATION_PRIMITIVES}
    trans = np.zeros((u.shape[0], 3))

    for prim, sign in mt.primitives:
        if prim in ROTATION_PRIMITIVES:
            angles[prim] += sign * np.radians(getattr(p, f"{prim}_deg")) * u
        elif prim == "truck":
            trans[:, 0] += sign * p.truck_dist * u
        elif prim == "boom":
            trans[:, 1] -= sign * p.boom_dist * u
        elif prim == "dolly":
            trans[:, 2] += sign * p.dolly_dist * u
        elif prim == "diag_lateral":
            trans[:, 0] += sign * p.diagonal_lateral * u
        elif prim == "diag_vertical":
            trans[:, 1] -= sign * p.diagonal_vertical * u
        elif prim == "diag_depth":
            trans[:, 2] += sign * p.diagonal_depth * u
        elif prim == "arc":
            phi = np.radians(p.arc_deg) * u
            trans[:, 0] += sign * p.arc_radius * np.sin(phi)
            trans[:, 2] += p.arc_radius * (1.0 - np.cos(phi))
            # keep facing the circle's center
            angles["pan"] -= sign * phi
        elif prim in ORBIT_DIRECTIONS:
            phi = np.radians(p.orbit_deg) * u
            trans += p.orbit_radius * np.sin(phi)[:, None] * ORBIT_DIRECTIONS[prim]
            trans[:, 2] += p.orbit_radius * (1.0 - np.cos(phi))
        else:
            raise ContractError(f"unknown primitive '{prim}'")
    return angles, trans


def _compose_rotations(pan: np.ndarray, tilt: np.ndarray, roll: np.ndarray) -> np.ndarray:
    zeros = np.zeros_like(pan)
    r_pan = Rotation.from_rotvec(np.column_stack([zeros, pan, zeros]))
    r_tilt = Rotation.from_rotvec(np.column_stack([tilt, zeros, zeros]))
    r_roll = Rotation.from_rotvec(np.column_stack([zeros, zeros, roll]))
    return (r_roll * r_tilt * r_pan).as_matrix()


def build_template(mt: MotionType, params: Optional[TemplateParams] = None,
                   traj_id: Optional[str] = None) -> Trajectory:
    """
    Build the canonical constant-speed trajectory of a motion type.

    All primitives act simultaneously over n_frames; the first pose is the
    identity at the origin.

    Args:
        mt: Motion type
        params: Canonical magnitudes (defaults when None)
        traj_id: Trajectory id (defaults to "template_<class_id>")

    Returns:
        Trajectory with frame indices 0..n_frames-1

    Example:
        >>> traj = build_template(motion_type_by_name("Dolly In"))
        >>> traj.centers[-1]
        array([0., 0., 1.])
    """
    p = params or TemplateParams()
    u = np.linspace(0.0, 1.0, int(p.n_frames))
    angles, trans = _primitive_motion(mt, p, u)
    rotations = _compose_rotations(angles["pan"], angles["tilt"], angles["roll"])
    traj_id = traj_id if traj_id is not None else f"template_{mt.class_id:02d}"
    return Trajectory(traj_id, np.arange(u.shape[0]), rotations, trans)


def library_templates(params: Optional[TemplateParams] = None) -> List[MotionTemplate]:
    """All 50 canonical templates in class-id order."""
    p = params or TemplateParams()
    return [
        MotionTemplate(mt.class_id, mt.name, mt.kind, mt.primitives, mt.description, build_template(mt, p))
        for mt in MOTION_TYPES
    ]


def export_templates(out_dir: Union[str, Path], params: Optional[TemplateParams] = None) -> Path:
    """
    Write templates.json and one pose file per template under out_dir.

    Returns:
        Path to templates.json
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for template in library_templates(params):
        pose_path = write_trajectory(template.trajectory, out_dir / f"{template.trajectory.id}.txt")
        record = template.to_dict()
        record["path"] = pose_path.name
        records.append(record)
    index_path = out_dir / "templates.json"
    index_path.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return index_path


# =============================================================================
# RANDOMIZED SAMPLING
# =============================================================================

@dataclass(frozen=True)
class SampleRanges:
    """
    Uniform sampling ranges around the canonical magnitudes.

    The three diagonal components share one scale factor so a diagonal
    keeps its direction. Noise amplitude is relative: translation noise is
    amplitude x path length, rotation noise amplitude x total rotation.
    """

    magnitudes: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    diagonal: Tuple[float, float, float] = (
        TEMPLATE_DEFAULTS["diagonal_lateral"],
        TEMPLATE_DEFAULTS["diagonal_vertical"],
        TEMPLATE_DEFAULTS["diagonal_depth"],
    )
    diagonal_scale: Tuple[float, float] = (SAMPLE_SCALE_LOW, SAMPLE_SCALE_HIGH)
    n_frames: Tuple[int, int] = SAMPLE_FRAMES_RANGE
    noise_amplitude: float = 0.0

    def __post_init__(self):
        missing = [name for name in MAGNITUDE_FIELDS if name not in self.magnitudes]
        if missing:
            raise OutOfRangeError(f"sample ranges missing {missing}")
        for name, (lo, hi) in self.magnitudes.items():
            if name not in MAGNITUDE_FIELDS:
                raise OutOfRangeError(f"unknown magnitude '{name}'")
            if not 0 < lo <= hi:
                raise OutOfRangeError(f"range for {name} must satisfy 0 < low <= high, got ({lo}, {hi})")
        lo, hi = self.diagonal_scale
        if not 0 < lo <= hi:
            raise OutOfRangeError(f"diagonal scale range must satisfy 0 < low <= high, got ({lo}, {hi})")
        lo, hi = self.n_frames
        if not 2 <= lo <= hi:
            raise OutOfRangeError(f"n_frames range must satisfy 2 <= low <= high, got ({lo}, {hi})")
        if self.noise_amplitude < 0:
            raise OutOfRangeError(f"noise amplitude must be >= 0, got {self.noise_amplitude}")

    @classmethod
    def around(cls, params: Optional[TemplateParams] = None, low: float = SAMPLE_SCALE_LOW,
               high: float = SAMPLE_SCALE_HIGH, n_frames: Tuple[int, int] = SAMPLE_FRAMES_RANGE,
               noise_amplitude: float = 0.0) -> "SampleRanges":
        """Ranges [low, high] x each canonical magnitude."""
        p = params or TemplateParams()
        frames = (min(n_frames[0], p.n_frames), max(n_frames[1], p.n_frames))
        return cls(
            magnitudes={name: (getattr(p, name) * low, getattr(p, name) * high) for name in MAGNITUDE_FIELDS},
            diagonal=tuple(getattr(p, name) for name in DIAGONAL_FIELDS),
            diagonal_scale=(low, high),
            n_frames=frames,
            noise_amplitude=noise_amplitude,
        )

    @classmethod
    def collapsed(cls, params: Optional[TemplateParams] = None) -> "SampleRanges":
        """Degenerate ranges that reproduce the canonical template exactly."""
        p = params or TemplateParams()
        return cls.around(p, 1.0, 1.0, (p.n_frames, p.n_frames), 0.0)

    def with_noise(self, amplitude: float) -> "SampleRanges":
        return replace(self, noise_amplitude=amplitude)


def _smooth_wave(rng: np.random.Generator, u: np.ndarray) -> np.ndarray:
    """(N, 3) low-frequency sinusoids, zero at u = 0."""
    cycles = rng.integers(1, 3, size=3)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=3)
    return np.sin(2.0 * np.pi * cycles * u[:, None] + phases) - np.sin(phases)


def sample_trajectory(mt: MotionType, ranges: Optional[SampleRanges] = None,
                      seed: Union[int, np.random.SeedSequence] = 0,
                      traj_id: Optional[str] = None) -> Trajectory:
    """
    Draw one randomized trajectory of a motion type.

    Magnitudes are drawn uniformly from `ranges` in a fixed order, the
    template is rebuilt with them, and optional smooth noise is added.
    The result depends only on (mt, ranges, seed).

    Args:
        mt: Motion type
        ranges: Sampling ranges (SampleRanges.around() when None)
        seed: Integer seed or SeedSequence
        traj_id: Trajectory id (defaults to "sample_<class_id>")

    Returns:
        Sampled trajectory
    """
    ranges = ranges or SampleRanges.around()
    rng = np.random.default_rng(seed)

    values = {name: float(rng.uniform(*ranges.magnitudes[name])) for name in MAGNITUDE_FIELDS}
    scale = float(rng.uniform(*ranges.diagonal_scale))
    for name, base in zip(DIAGONAL_FIELDS, ranges.diagonal):
        values[name] = base * scale
    n_frames = int(rng.integers(ranges.n_frames[0], ranges.n_frames[1] + 1))
    trans_wave = _smooth_wave(rng, np.linspace(0.0, 1.0, n_frames))
    rot_wave = _smooth_wave(rng, np.linspace(0.0, 1.0, n_frames))

    traj_id = traj_id if traj_id is not None else f"sample_{mt.class_id:02d}"
    traj = build_template(mt, TemplateParams(n_frames=n_frames, **values), traj_id)
    if ranges.noise_amplitude == 0:
        return traj

    steps = np.diff(traj.centers, axis=0)
    length = float(np.linalg.norm(steps, axis=1).sum())
    centers = traj.centers + ranges.noise_amplitude * length * trans_wave

    total_rot = _total_rotation(traj.rotations)
    body = Rotation.from_rotvec(ranges.noise_amplitude * total_rot * rot_wave).as_matrix()
    rotations = traj.rotations @ body
    return Trajectory(traj.id, traj.frame_indices, rotations, centers)


def _total_rotation(rotations: np.ndarray) -> float:
    steps = Rotation.from_matrix(rotations[:-1]).inv() * Rotation.from_matrix(rotations[1:])
    return float(steps.magnitude().sum())
