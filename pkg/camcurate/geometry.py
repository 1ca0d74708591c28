"""
Pose and trajectory representations plus the rotation algebra and
elementary kinematics shared by every other module.

Conventions: poses are camera-to-world. In the camera frame +x points
right, +y points down and +z is the optical axis (OpenCV style).
Quaternions are stored (x, y, z, w) with the scalar last.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation, Slerp

from .config import QUAT_NORM_EPS, ROTATION_TOL
from .errors import (
    DegenerateConfigurationError,
    DegenerateQuaternionError,
    DuplicateFrameError,
    InvalidRotationError,
    OutOfRangeError,
    TrajectoryError,
    TrajectoryTooShortError,
)


# =============================================================================
# QUATERNIONS
# =============================================================================

@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion (x, y, z, w) with the canonical sign w >= 0."""

    x: float
    y: float
    z: float
    w: float

    @classmethod
    def from_components(cls, x: float, y: float, z: float, w: float) -> "Quaternion":
        """
        Build a unit quaternion from raw components.

        The components are normalized and the double cover is resolved by
        flipping the sign when w < 0 (or when w == 0 and the first non-zero
        vector component is negative).

        Raises:
            DegenerateQuaternionError: If the norm is zero or not finite
        """
        q = np.array([x, y, z, w], dtype=float)
        norm = float(np.linalg.norm(q))
        if not np.isfinite(norm) or norm <= QUAT_NORM_EPS:
            raise DegenerateQuaternionError(f"quaternion {tuple(q)} has norm {norm:g}")
        q = _canonical_sign(q / norm)
        return cls(*(float(v) for v in q))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.w], dtype=float)


def _canonical_sign(q: np.ndarray) -> np.ndarray:
    if q[3] < 0:
        return -q
    if q[3] == 0:
        nonzero = q[:3][q[:3] != 0]
        if nonzero.size and nonzero[0] < 0:
            return -q
    return q


def quat_to_rotmat(q: Union[Quaternion, Sequence[float]]) -> np.ndarray:
    """
    Convert a unit quaternion to a 3x3 rotation matrix.

    Args:
        q: Quaternion or any (x, y, z, w) sequence

    Returns:
        Orthonormal 3x3 matrix with determinant +1

    Example:
        >>> quat_to_rotmat(Quaternion(0.0, 0.0, 0.0, 1.0))
        array([[1., 0., 0.],
               [0., 1., 0.],
               [0., 0., 1.]])
    """
    if not isinstance(q, Quaternion):
        q = Quaternion.from_components(*q)
    return Rotation.from_quat(q.as_array()).as_matrix()


def rotmat_to_quat(rotation: np.ndarray) -> Quaternion:
    """Convert a rotation matrix to its canonical (w >= 0) unit quaternion."""
    x, y, z, w = Rotation.from_matrix(np.asarray(rotation, dtype=float)).as_quat()
    return Quaternion.from_components(x, y, z, w)


def axis_rotation(axis: str, angle: float) -> np.ndarray:
    """Rotation matrix of `angle` radians about the camera 'x', 'y' or 'z' axis."""
    index = "xyz".index(axis)
    rotvec = np.zeros(3)
    rotvec[index] = angle
    return Rotation.from_rotvec(rotvec).as_matrix()


# =============================================================================
# POSES & TRAJECTORIES
# =============================================================================

def _check_rotations(rotations: np.ndarray) -> None:
    gram = np.einsum("nki,nkj->nij", rotations, rotations)
    ortho_err = np.abs(gram - np.eye(3)).max(initial=0.0)
    det_err = np.abs(np.linalg.det(rotations) - 1.0).max(initial=0.0)
    if ortho_err > ROTATION_TOL or det_err > ROTATION_TOL:
        raise InvalidRotationError(
            f"rotation not orthonormal with det +1 (orthogonality error {ortho_err:.3g}, "
            f"determinant error {det_err:.3g})"
        )


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Pose:
    """One camera sample: frame index, camera-to-world rotation, camera center."""

    frame_index: int
    rotation: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        if int(self.frame_index) != self.frame_index or self.frame_index < 0:
            raise TrajectoryError(f"frame index must be a non-negative integer, got {self.frame_index}")
        rotation = np.asarray(self.rotation, dtype=float)
        center = np.asarray(self.center, dtype=float)
        if rotation.shape != (3, 3) or center.shape != (3,):
            raise TrajectoryError("pose needs a 3x3 rotation and a 3-vector center")
        if not (np.isfinite(rotation).all() and np.isfinite(center).all()):
            raise TrajectoryError("pose contains non-finite values")
        _check_rotations(rotation[None])
        object.__setattr__(self, "frame_index", int(self.frame_index))
        object.__setattr__(self, "rotation", _frozen(rotation))
        object.__setattr__(self, "center", _frozen(center))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Ordered camera poses sharing one world frame.

    Poses are stored column-wise as read-only arrays:
        frame_indices: (N,) strictly increasing non-negative integers
        rotations: (N, 3, 3) camera-to-world rotations
        centers: (N, 3) camera centers
    """

    id: str
    frame_indices: np.ndarray
    rotations: np.ndarray
    centers: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frame_indices)
        rotations = np.asarray(self.rotations, dtype=float)
        centers = np.asarray(self.centers, dtype=float)
        n = frames.shape[0] if frames.ndim == 1 else -1
        if n < 1 or rotations.shape != (n, 3, 3) or centers.shape != (n, 3):
            raise TrajectoryError(
                f"trajectory '{self.id}': expected (N,), (N,3,3), (N,3) arrays, got "
                f"{frames.shape}, {rotations.shape}, {centers.shape}"
            )
        if not (np.isfinite(rotations).all() and np.isfinite(centers).all()):
            raise TrajectoryError(f"trajectory '{self.id}' contains non-finite values")
        if not np.all(np.equal(np.mod(frames, 1), 0)) or (frames < 0).any():
            raise TrajectoryError(f"trajectory '{self.id}': frame indices must be non-negative integers")
        frames = frames.astype(np.int64)
        steps = np.diff(frames)
        if (steps == 0).any():
            dup = int(frames[1:][steps == 0][0])
            raise DuplicateFrameError(f"trajectory '{self.id}': duplicate frame index {dup}")
        if (steps < 0).any():
            raise TrajectoryError(f"trajectory '{self.id}': frame indices must increase")
        _check_rotations(rotations)
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "frame_indices", _frozen(frames))
        object.__setattr__(self, "rotations", _frozen(rotations))
        object.__setattr__(self, "centers", _frozen(centers))

    @classmethod
    def from_poses(cls, traj_id: str, poses: Iterable[Pose]) -> "Trajectory":
        poses = list(poses)
        if not poses:
            raise TrajectoryError(f"trajectory '{traj_id}' has no poses")
        return cls(
            id=traj_id,
            frame_indices=np.array([p.frame_index for p in poses]),
            rotations=np.stack([p.rotation for p in poses]),
            centers=np.stack([p.center for p in poses]),
        )

    @property
    def poses(self) -> Tuple[Pose, ...]:
        return tuple(
            Pose(int(f), r, c)
            for f, r, c in zip(self.frame_indices, self.rotations, self.centers)
        )

    def __len__(self) -> int:
        return int(self.frame_indices.shape[0])

    def with_centers(self, centers: np.ndarray) -> "Trajectory":
        return Trajectory(self.id, self.frame_indices, self.rotations, centers)

    def with_rotations(self, rotations: np.ndarray) -> "Trajectory":
        return Trajectory(self.id, self.frame_indices, rotations, self.centers)

    def with_id(self, traj_id: str) -> "Trajectory":
        return Trajectory(traj_id, self.frame_indices, self.rotations, self.centers)


def require_min_length(traj: Trajectory, minimum: int = 2) -> None:
    if len(traj) < minimum:
        raise TrajectoryTooShortError(
            f"trajectory '{traj.id}' has {len(traj)} pose(s); at least {minimum} required"
        )


# =============================================================================
# KINEMATICS
# =============================================================================

def frame_displacements(traj: Trajectory) -> np.ndarray:
    """
    Distances between consecutive camera centers, d_i = |c_{i+1} - c_i|.

    Returns:
        Array of N-1 non-negative values

    Example:
        centers (0,0,0), (1,0,0), (1,1,0) -> [1.0, 1.0]
    """
    require_min_length(traj)
    return np.linalg.norm(np.diff(traj.centers, axis=0), axis=1)


def path_length(traj: Trajectory) -> float:
    """Total traveled distance L, the sum of frame displacements."""
    return float(frame_displacements(traj).sum())


def net_displacement(traj: Trajectory) -> float:
    """Straight-line distance from the first to the last camera center."""
    require_min_length(traj)
    return float(np.linalg.norm(traj.centers[-1] - traj.centers[0]))


# =============================================================================
# ROTATION ALGEBRA
# =============================================================================

def relative_rotation(rot_a: np.ndarray, rot_b: np.ndarray) -> np.ndarray:
    """Rotation taking orientation a to orientation b, Ra^T Rb."""
    return np.asarray(rot_a).T @ np.asarray(rot_b)


def geodesic_angles(rot_a: np.ndarray, rot_b: np.ndarray) -> np.ndarray:
    """
    Vectorized geodesic distance between stacks of rotations, in [0, pi].

    Evaluates arccos((tr(Ra Rb^T) - 1) / 2) through atan2 of the sine and
    cosine parts, which is accurate near 0 and pi.
    """
    m = np.asarray(rot_a) @ np.swapaxes(np.asarray(rot_b), -1, -2)
    cos = (np.trace(m, axis1=-2, axis2=-1) - 1.0) / 2.0
    skew = np.stack(
        [
            m[..., 2, 1] - m[..., 1, 2],
            m[..., 0, 2] - m[..., 2, 0],
            m[..., 1, 0] - m[..., 0, 1],
        ],
        axis=-1,
    )
    sin = np.linalg.norm(skew, axis=-1) / 2.0
    return np.arctan2(sin, np.clip(cos, -1.0, 1.0))


def geodesic_angle(rot_a: np.ndarray, rot_b: np.ndarray) -> float:
    """Angle of the relative rotation between two orientations, in [0, pi]."""
    return float(geodesic_angles(rot_a, rot_b))


# =============================================================================
# RESAMPLING & NORMALIZATION
# =============================================================================

def resample_trajectory(traj: Trajectory, k: int) -> Trajectory:
    """
    Resample a trajectory to k evenly spaced samples in frame-index space.

    Centers are linearly interpolated and rotations spherically
    interpolated over the normalized parameter u = (f - f_first) /
    (f_last - f_first). Output frame indices are 0..k-1. A trajectory that
    already has frame indices 0..k-1 is returned unchanged.

    Raises:
        OutOfRangeError: If k < 2
        TrajectoryTooShortError: If the trajectory has fewer than two poses
    """
    if k < 2:
        raise OutOfRangeError(f"resample size must be >= 2, got {k}")
    require_min_length(traj)
    frames = traj.frame_indices
    if len(traj) == k and frames[0] == 0 and frames[-1] == k - 1:
        return traj

    u = (frames - frames[0]) / float(frames[-1] - frames[0])
    grid = np.linspace(0.0, 1.0, k)
    centers = np.column_stack(
        [np.interp(grid, u, traj.centers[:, axis]) for axis in range(3)]
    )
    rotations = Slerp(u, Rotation.from_matrix(traj.rotations))(grid).as_matrix()
    return Trajectory(traj.id, np.arange(k), rotations, centers)


def normalize_path_length(traj: Trajectory) -> Trajectory:
    """
    Scale centers about the first center so the path length becomes 1.

    Raises:
        DegenerateConfigurationError: If the path length is zero
    """
    length = path_length(traj)
    if not length > 0.0:
        raise DegenerateConfigurationError(
            f"trajectory '{traj.id}' has zero path length and cannot be normalized"
        )
    origin = traj.centers[0]
    return traj.with_centers(origin + (traj.centers - origin) / length)
