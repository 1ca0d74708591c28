"""
Intra-class pairwise trajectory matching.

Two trajectories of one class match when both TransErr and RotErr, taken
as the larger of the two alignment directions, stay below strict
thresholds. Candidate pairs are drawn uniformly without replacement from
a per-class seeded generator.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .alignment import RansacParams
from .config import MATCH_DEFAULTS, RESAMPLE_K
from .errors import ContractError, OutOfRangeError
from .geometry import Trajectory, normalize_path_length, resample_trajectory
from .metrics import ErrorMode, FilterThresholds, is_rotation_only, pair_errors


@dataclass(frozen=True)
class MatchThresholds:
    """Acceptance thresholds and the per-class candidate budget."""

    max_trans_err: float = MATCH_DEFAULTS["max_trans_err"]
    max_rot_err: float = MATCH_DEFAULTS["max_rot_err"]
    n_candidates: int = MATCH_DEFAULTS["n_candidates"]

    def __post_init__(self):
        if not self.max_trans_err > 0 or not self.max_rot_err > 0:
            raise OutOfRangeError("match thresholds must be positive")
        if int(self.n_candidates) != self.n_candidates or self.n_candidates < 0:
            raise OutOfRangeError(f"n_candidates must be a non-negative integer, got {self.n_candidates}")


@dataclass(frozen=True)
class MatchPair:
    """Accepted pair with id_a < id_b."""

    id_a: str
    id_b: str
    class_id: int
    trans_err: float
    rot_err: float

    def to_dict(self) -> dict:
        return {
            "id_a": self.id_a,
            "id_b": self.id_b,
            "class_id": self.class_id,
            "trans_err": self.trans_err,
            "rot_err": self.rot_err,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchPair":
        return cls(data["id_a"], data["id_b"], int(data["class_id"]), float(data["trans_err"]), float(data["rot_err"]))


@dataclass(frozen=True, eq=False)
class MatchMember:
    """Trajectory on the comparison grid, normalized when translational."""

    id: str
    rotation_only: bool
    trajectory: Trajectory


def prepare_member(traj: Trajectory, filter_thresholds: Optional[FilterThresholds] = None,
                   resample_k: int = RESAMPLE_K) -> MatchMember:
    rotation_only = is_rotation_only(traj, filter_thresholds)
    prepared = resample_trajectory(traj, resample_k)
    if not rotation_only:
        prepared = normalize_path_length(prepared)
    return MatchMember(traj.id, rotation_only, prepared)


def match_errors(a: MatchMember, b: MatchMember, params: Optional[RansacParams] = None) -> Tuple[float, float]:
    """
    Symmetric (trans_err, rot_err): elementwise max over both alignment directions.

    Raises:
        ContractError: One member is rotation-only and the other is not
    """
    if a.rotation_only != b.rotation_only:
        raise ContractError(f"cannot match rotation-only and translational trajectories ('{a.id}', '{b.id}')")
    mode = ErrorMode.ROTATION_ONLY if a.rotation_only else ErrorMode.TRANSLATIONAL
    trans_ab, rot_ab = pair_errors(a.trajectory, b.trajectory, mode, params, resample_k=None)
    trans_ba, rot_ba = pair_errors(b.trajectory, a.trajectory, mode, params, resample_k=None)
    return max(trans_ab, trans_ba), max(rot_ab, rot_ba)


def evaluate_pair(a: MatchMember, b: MatchMember, thresholds: MatchThresholds, class_id: int = -1,
                  params: Optional[RansacParams] = None) -> Optional[MatchPair]:
    trans, rot = match_errors(a, b, params)
    if trans > thresholds.max_trans_err or rot > thresholds.max_rot_err:
        return None
    id_a, id_b = sorted((a.id, b.id))
    return MatchPair(id_a, id_b, class_id, trans, rot)


def match_pair(
    a: Trajectory,
    b: Trajectory,
    thresholds: Optional[MatchThresholds] = None,
    class_id: int = -1,
    filter_thresholds: Optional[FilterThresholds] = None,
    params: Optional[RansacParams] = None,
    resample_k: int = RESAMPLE_K,
) -> Optional[MatchPair]:
    """
    Decide whether two same-class trajectories are the same camera motion.

    Args:
        a, b: Trajectories of one class
        thresholds: Acceptance thresholds
        class_id: Class recorded on the pair
        filter_thresholds: Thresholds deciding which trajectories are rotation-only
        params: RANSAC settings
        resample_k: Comparison grid size

    Returns:
        MatchPair with canonical id order, or None when rejected

    Raises:
        ContractError: Mixed rotation-only and translational inputs
    """
    thresholds = thresholds or MatchThresholds()
    return evaluate_pair(
        prepare_member(a, filter_thresholds, resample_k),
        prepare_member(b, filter_thresholds, resample_k),
        thresholds,
        class_id,
        params,
    )


def candidate_pairs(n_members: int, budget: int, seed: int, class_id: int = -1) -> List[Tuple[int, int]]:
    """
    Up to `budget` distinct index pairs (i < j) drawn uniformly without replacement.

    All C(n, 2) pairs are returned when the budget covers them. Otherwise
    combination ranks are drawn from a generator seeded with
    (seed, class_id) and unranked in lexicographic order.
    """
    total = n_members * (n_members - 1) // 2
    if total == 0 or budget <= 0:
        return []
    if budget >= total:
        ranks = np.arange(total)
    else:
        entropy = [seed, class_id] if class_id >= 0 else [seed]
        rng = np.random.default_rng(np.random.SeedSequence(entropy))
        ranks = np.sort(rng.choice(total, size=budget, replace=False))

    row_sizes = np.arange(n_members - 1, 0, -1)
    offsets = np.concatenate([[0], np.cumsum(row_sizes)[:-1]])
    rows = np.searchsorted(offsets, ranks, side="right") - 1
    cols = rows + 1 + (ranks - offsets[rows])
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


def match_within_class(
    members: Sequence[Trajectory],
    thresholds: Optional[MatchThresholds] = None,
    seed: int = 0,
    class_id: int = -1,
    filter_thresholds: Optional[FilterThresholds] = None,
    params: Optional[RansacParams] = None,
    resample_k: int = RESAMPLE_K,
) -> List[MatchPair]:
    """
    Random pairwise matching inside one class.

    Members are ordered by id before candidate pairs are drawn, so the
    result depends only on (members, thresholds, seed, class_id).

    Returns:
        Accepted pairs sorted by (id_a, id_b)
    """
    thresholds = thresholds or MatchThresholds()
    ordered = sorted(members, key=lambda t: t.id)
    prepared = [prepare_member(t, filter_thresholds, resample_k) for t in ordered]

    accepted = []
    for i, j in candidate_pairs(len(prepared), thresholds.n_candidates, seed, class_id):
        pair = evaluate_pair(prepared[i], prepared[j], thresholds, class_id, params)
        if pair is not None:
            accepted.append(pair)
    return sorted(accepted, key=lambda p: (p.id_a, p.id_b))
