"""
Scalar trajectory measures and the smoothness filter.

Jump and complexity ratios, motion magnitudes, the keep/reject decision
with its rotation-only and near-static routing, and the TransErr/RotErr
pair errors used for classification and matching.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .alignment import RansacParams, align_rotation_only, apply_transform, estimate_alignment, fit_alignments
from .config import FILTER_DEFAULTS, RESAMPLE_K
from .errors import ContractError, OutOfRangeError, UndefinedRatioError
from .geometry import (
    Trajectory,
    frame_displacements,
    geodesic_angles,
    net_displacement,
    require_min_length,
    resample_trajectory,
)


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True)
class FilterThresholds:
    """Thresholds for the keep/reject decision."""

    tau_jump: float = FILTER_DEFAULTS["tau_jump"]
    tau_complex: float = FILTER_DEFAULTS["tau_complex"]
    epsilon: float = FILTER_DEFAULTS["epsilon"]
    tau_static_trans: float = FILTER_DEFAULTS["tau_static_trans"]
    tau_static_rot: float = FILTER_DEFAULTS["tau_static_rot"]

    def __post_init__(self):
        for name in ("tau_jump", "tau_complex", "epsilon", "tau_static_trans", "tau_static_rot"):
            if not getattr(self, name) > 0:
                raise OutOfRangeError(f"{name} must be positive, got {getattr(self, name)}")
        if self.tau_jump <= 1 or self.tau_complex <= 1:
            raise OutOfRangeError("tau_jump and tau_complex must exceed 1")


class Decision(str, Enum):
    KEEP = "Keep"
    REJECT_JUMP = "RejectJump"
    REJECT_COMPLEX = "RejectComplex"
    REJECT_STATIC = "RejectStatic"
    ROTATION_ONLY_KEEP = "RotationOnlyKeep"

    @property
    def kept(self) -> bool:
        return self in (Decision.KEEP, Decision.ROTATION_ONLY_KEEP)


@dataclass(frozen=True)
class FilterVerdict:
    """Filter outcome for one trajectory. Ratios are None on the rotation-only/static branch."""

    trajectory_id: str
    decision: Decision
    r_jump: Optional[float]
    r_complex: Optional[float]
    total_trans: float
    total_rot: float

    def to_dict(self) -> dict:
        return {
            "id": self.trajectory_id,
            "decision": self.decision.value,
            "r_jump": self.r_jump,
            "r_complex": self.r_complex,
            "total_trans": self.total_trans,
            "total_rot": self.total_rot,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FilterVerdict":
        return cls(
            trajectory_id=data["id"],
            decision=Decision(data["decision"]),
            r_jump=data.get("r_jump"),
            r_complex=data.get("r_complex"),
            total_trans=float(data["total_trans"]),
            total_rot=float(data["total_rot"]),
        )


class ErrorMode(str, Enum):
    TRANSLATIONAL = "translational"
    ROTATION_ONLY = "rotation_only"


# =============================================================================
# RATIOS & MAGNITUDES
# =============================================================================

def jump_ratio(traj: Trajectory) -> float:
    """
    Largest frame displacement over the mean displacement.

    Raises:
        UndefinedRatioError: If every displacement is zero

    Example:
        displacements [1, 1, 1, 5] -> 5 / 2 = 2.5
    """
    steps = frame_displacements(traj)
    mean = float(steps.mean())
    if mean <= 0.0:
        raise UndefinedRatioError(f"trajectory '{traj.id}' has zero mean displacement")
    return float(steps.max()) / mean


def complexity_ratio(traj: Trajectory, epsilon: float = FILTER_DEFAULTS["epsilon"]) -> float:
    """Path length over (net displacement + epsilon)."""
    steps = frame_displacements(traj)
    return float(steps.sum()) / (net_displacement(traj) + epsilon)


def motion_magnitudes(traj: Trajectory) -> Tuple[float, float]:
    """(total translation = path length, total rotation = sum of per-step geodesic angles)."""
    require_min_length(traj)
    total_trans = float(frame_displacements(traj).sum())
    total_rot = float(geodesic_angles(traj.rotations[:-1], traj.rotations[1:]).sum())
    return total_trans, total_rot


def is_rotation_only(traj: Trajectory, thresholds: Optional[FilterThresholds] = None) -> bool:
    """True when the trajectory's path length is below the static translation threshold."""
    thresholds = thresholds or FilterThresholds()
    return float(frame_displacements(traj).sum()) < thresholds.tau_static_trans


# =============================================================================
# FILTER
# =============================================================================

def filter_trajectory(traj: Trajectory, thresholds: Optional[FilterThresholds] = None) -> FilterVerdict:
    """
    Keep/reject decision for one trajectory.

    Trajectories with negligible translation skip both ratio checks: they
    are either rejected as static (negligible rotation too) or kept as
    rotation-only. Everything else is rejected on r_jump > tau_jump, then on
    r_complex > tau_complex, and kept otherwise.

    Args:
        traj: Trajectory with N >= 2
        thresholds: Filter thresholds (defaults when None)

    Returns:
        FilterVerdict with the decision and the measured quantities
    """
    th = thresholds or FilterThresholds()
    total_trans, total_rot = motion_magnitudes(traj)

    if total_trans < th.tau_static_trans:
        decision = Decision.REJECT_STATIC if total_rot < th.tau_static_rot else Decision.ROTATION_ONLY_KEEP
        return FilterVerdict(traj.id, decision, None, None, total_trans, total_rot)

    r_jump = jump_ratio(traj)
    r_complex = complexity_ratio(traj, th.epsilon)
    if r_jump > th.tau_jump:
        decision = Decision.REJECT_JUMP
    elif r_complex > th.tau_complex:
        decision = Decision.REJECT_COMPLEX
    else:
        decision = Decision.KEEP
    return FilterVerdict(traj.id, decision, r_jump, r_complex, total_trans, total_rot)


# =============================================================================
# PAIR ERRORS
# =============================================================================

def _equalize(traj_est: Trajectory, traj_ref: Trajectory, resample_k: Optional[int]):
    if resample_k is not None:
        return resample_trajectory(traj_est, resample_k), resample_trajectory(traj_ref, resample_k)
    if len(traj_est) != len(traj_ref):
        raise ContractError(
            f"'{traj_est.id}' and '{traj_ref.id}' differ in length ({len(traj_est)} vs {len(traj_ref)})"
        )
    return traj_est, traj_ref


def pair_errors(
    traj_est: Trajectory,
    traj_ref: Trajectory,
    mode: ErrorMode = ErrorMode.TRANSLATIONAL,
    params: Optional[RansacParams] = None,
    align_rotations: bool = True,
    resample_k: Optional[int] = RESAMPLE_K,
) -> Tuple[float, float]:
    """
    TransErr and RotErr of an estimate against a reference from one alignment.

    Both trajectories are resampled to `resample_k` samples first (pass
    None to require equal lengths instead).

    In translational mode traj_est is aligned onto traj_ref with the
    RANSAC similarity; TransErr is the mean center distance and RotErr the
    mean geodesic angle between paired rotations (the estimate's rotations
    rotated by the alignment unless `align_rotations` is False). In
    rotation-only mode both trajectories have their first-frame
    orientation removed, TransErr is 0 and RotErr is the mean geodesic
    angle.

    Returns:
        (trans_err, rot_err)
    """
    mode = ErrorMode(mode)
    est, ref = _equalize(traj_est, traj_ref, resample_k)

    if mode is ErrorMode.ROTATION_ONLY:
        est_rot = align_rotation_only(est).rotations
        ref_rot = align_rotation_only(ref).rotations
        return 0.0, float(geodesic_angles(est_rot, ref_rot).mean())

    transform, _ = estimate_alignment(est, ref, params)
    aligned = apply_transform(est, transform)
    trans = float(np.linalg.norm(aligned.centers - ref.centers, axis=1).mean())
    est_rot = aligned.rotations if align_rotations else est.rotations
    rot = float(geodesic_angles(est_rot, ref.rotations).mean())
    return trans, rot


def closed_form_errors(traj_est: Trajectory, trajs_ref: Sequence[Trajectory]) -> np.ndarray:
    """
    (B, 2) TransErr and RotErr of traj_est against each equal-length reference.

    Same measures as pair_errors in translational mode, but from the
    closed-form fit on all poses instead of RANSAC, for all references in
    one batch. Rows whose fit is invalid hold inf.
    """
    scale, rotation, translation, valid = fit_alignments(traj_est, trajs_ref)
    ref_centers = np.stack([t.centers for t in trajs_ref])
    ref_rotations = np.stack([t.rotations for t in trajs_ref])
    mapped = scale[:, None, None] * np.einsum("bij,nj->bni", rotation, traj_est.centers) + translation[:, None, :]
    trans = np.linalg.norm(mapped - ref_centers, axis=2).mean(axis=1)
    aligned = np.einsum("bij,njk->bnik", rotation, traj_est.rotations)
    rot = geodesic_angles(aligned, ref_rotations).mean(axis=1)
    errors = np.stack([trans, rot], axis=1)
    errors[~valid] = np.inf
    return errors


def trans_err(traj_est: Trajectory, traj_ref: Trajectory, params: Optional[RansacParams] = None,
              resample_k: Optional[int] = RESAMPLE_K) -> float:
    """Mean center distance after aligning traj_est onto traj_ref."""
    return pair_errors(traj_est, traj_ref, ErrorMode.TRANSLATIONAL, params, resample_k=resample_k)[0]


def rot_err(traj_est: Trajectory, traj_ref: Trajectory, mode: ErrorMode = ErrorMode.TRANSLATIONAL,
            params: Optional[RansacParams] = None, align_rotations: bool = True,
            resample_k: Optional[int] = RESAMPLE_K) -> float:
    """Mean geodesic angle between paired rotations (see pair_errors for the modes)."""
    return pair_errors(traj_est, traj_ref, mode, params, align_rotations, resample_k)[1]
