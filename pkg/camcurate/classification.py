"""
Trajectory classification against the 50 motion templates.

Translational trajectories are compared with the translational templates
after unit-path-length normalization; rotation-only trajectories are
compared with the zero-translation templates by rotation error alone.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .alignment import RansacParams
from .config import CLASSIFY_SHORTLIST, RESAMPLE_K, ROT_WEIGHT
from .errors import ContractError, DegenerateConfigurationError, OutOfRangeError, RobustFitError
from .geometry import Trajectory, normalize_path_length, resample_trajectory
from .metrics import ErrorMode, FilterThresholds, closed_form_errors, is_rotation_only, pair_errors
from .motion_library import MotionTemplate


@dataclass(frozen=True)
class ClassLabel:
    """Classification result for one trajectory."""

    trajectory_id: str
    class_id: int
    class_name: str
    trans_err: float
    rot_err: float
    score: float

    def to_dict(self) -> dict:
        return {
            "trajectory_id": self.trajectory_id,
            "class_id": self.class_id,
            "class_name": self.class_name,
            "trans_err": self.trans_err,
            "rot_err": self.rot_err,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassLabel":
        return cls(
            trajectory_id=data["trajectory_id"],
            class_id=int(data["class_id"]),
            class_name=data["class_name"],
            trans_err=float(data["trans_err"]),
            rot_err=float(data["rot_err"]),
            score=float(data["score"]),
        )


@dataclass(frozen=True, eq=False)
class PreparedTemplate:
    """Template resampled to the comparison grid (and normalized when translational)."""

    class_id: int
    name: str
    rotation_only: bool
    trajectory: Trajectory


def prepare_templates(templates: Sequence[MotionTemplate], resample_k: int = RESAMPLE_K) -> Tuple[PreparedTemplate, ...]:
    """Resample and normalize templates once for repeated classification."""
    prepared = []
    for template in templates:
        traj = resample_trajectory(template.trajectory, resample_k)
        if not template.is_rotation_only:
            traj = normalize_path_length(traj)
        prepared.append(PreparedTemplate(template.class_id, template.name, template.is_rotation_only, traj))
    return tuple(prepared)


def _shortlist(probe: Trajectory, candidates, rot_weight: float, size: Optional[int]):
    """Candidates ranked by closed-form score, cut to `size` (all when None)."""
    if size is None or size >= len(candidates):
        return candidates
    try:
        errors = closed_form_errors(probe, [t.trajectory for t in candidates])
    except DegenerateConfigurationError:
        return candidates
    scores = errors[:, 0] + rot_weight * errors[:, 1]
    order = np.lexsort(([t.class_id for t in candidates], scores))
    return [candidates[i] for i in order[:size]]


def classify(
    traj: Trajectory,
    templates: Sequence[Union[MotionTemplate, PreparedTemplate]],
    rot_weight: float = ROT_WEIGHT,
    thresholds: Optional[FilterThresholds] = None,
    params: Optional[RansacParams] = None,
    resample_k: int = RESAMPLE_K,
    shortlist: Optional[int] = CLASSIFY_SHORTLIST,
) -> ClassLabel:
    """
    Assign a trajectory to the template with the lowest combined error.

    score = trans_err + rot_weight * rot_err, where trans_err is 0 on the
    rotation-only branch. Ties go to the lowest class id.

    Translational candidates are first ranked by the same score from a
    closed-form fit against all of them at once; only the best
    `shortlist` get the RANSAC alignment that decides the label.

    Args:
        traj: Trajectory that passed the filter
        templates: MotionTemplate list or the output of prepare_templates
        rot_weight: Weight of the rotation error in the score
        thresholds: Filter thresholds deciding the rotation-only branch
        params: RANSAC settings for the alignments
        resample_k: Comparison grid size
        shortlist: Templates aligned with RANSAC (None aligns every candidate)

    Returns:
        ClassLabel of the best template

    Raises:
        ContractError: No template of the trajectory's branch is given
        OutOfRangeError: shortlist is below 1
        RobustFitError: Alignment failed against every candidate template
    """
    if not templates:
        raise ContractError("classification needs at least one template")
    if shortlist is not None and shortlist < 1:
        raise OutOfRangeError(f"shortlist must be >= 1, got {shortlist}")
    if isinstance(templates[0], MotionTemplate):
        templates = prepare_templates(templates, resample_k)

    rotation_only = is_rotation_only(traj, thresholds)
    candidates = sorted((t for t in templates if t.rotation_only == rotation_only), key=lambda t: t.class_id)
    if not candidates:
        branch = "rotation-only" if rotation_only else "translational"
        raise ContractError(f"no {branch} templates to compare '{traj.id}' with")

    probe = resample_trajectory(traj, resample_k)
    mode = ErrorMode.ROTATION_ONLY if rotation_only else ErrorMode.TRANSLATIONAL
    if not rotation_only:
        probe = normalize_path_length(probe)
        candidates = _shortlist(probe, candidates, rot_weight, shortlist)

    best = None
    failures = []
    for template in sorted(candidates, key=lambda t: t.class_id):
        try:
            trans, rot = pair_errors(probe, template.trajectory, mode, params, resample_k=None)
        except (RobustFitError, DegenerateConfigurationError) as exc:
            failures.append(f"{template.name}: {exc}")
            continue
        score = trans + rot_weight * rot
        if not np.isfinite(score):
            continue
        if best is None or score < best.score:
            best = ClassLabel(traj.id, template.class_id, template.name, trans, rot, score)

    if best is None:
        raise RobustFitError(f"'{traj.id}' could not be aligned to any template ({'; '.join(failures[:3])})")
    return best
