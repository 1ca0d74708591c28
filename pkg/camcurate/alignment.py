"""
Similarity-transform estimation between trajectories.

Closed-form Umeyama fitting, a RANSAC wrapper over index-paired
correspondences, full-trajectory alignment and first-frame
rotation-only alignment.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import ANCHOR_WEIGHT, RANK_TOL, RANSAC_DEFAULTS
from .errors import (
    ContractError,
    DegenerateConfigurationError,
    DimensionMismatchError,
    OutOfRangeError,
    RobustFitError,
)
from .geometry import Trajectory, quat_to_rotmat, require_min_length, rotmat_to_quat


# =============================================================================
# TYPES
# =============================================================================

@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    """x -> scale * rotation @ x + translation"""

    scale: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.array(self.rotation, dtype=float)
        translation = np.array(self.translation, dtype=float)
        if not self.scale > 0:
            raise OutOfRangeError(f"scale must be positive, got {self.scale}")
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise DimensionMismatchError("transform needs a 3x3 rotation and a 3-vector translation")
        if np.abs(rotation.T @ rotation - np.eye(3)).max() > 1e-9 or abs(np.linalg.det(rotation) - 1.0) > 1e-9:
            raise OutOfRangeError("transform rotation must be orthonormal with det +1")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "SimilarityTransform":
        return cls(1.0, np.eye(3), np.zeros(3))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a stack of points (N, 3)."""
        points = np.asarray(points, dtype=float)
        return self.scale * points @ self.rotation.T + self.translation

    def inverse(self) -> "SimilarityTransform":
        rot_inv = self.rotation.T
        scale_inv = 1.0 / self.scale
        return SimilarityTransform(scale_inv, rot_inv, -scale_inv * rot_inv @ self.translation)

    def compose(self, other: "SimilarityTransform") -> "SimilarityTransform":
        """Transform equal to applying `other` first, then self."""
        return SimilarityTransform(
            self.scale * other.scale,
            self.rotation @ other.rotation,
            self.scale * self.rotation @ other.translation + self.translation,
        )

    def to_dict(self) -> dict:
        q = rotmat_to_quat(self.rotation)
        return {
            "scale": self.scale,
            "quaternion": [q.x, q.y, q.z, q.w],
            "translation": [float(v) for v in self.translation],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimilarityTransform":
        return cls(float(data["scale"]), quat_to_rotmat(data["quaternion"]), np.asarray(data["translation"], dtype=float))


@dataclass(frozen=True)
class RansacParams:
    """RANSAC settings for index-paired similarity estimation."""

    iterations: int = RANSAC_DEFAULTS["iterations"]
    inlier_threshold_rel: float = RANSAC_DEFAULTS["inlier_threshold_rel"]
    min_sample: int = field(default=RANSAC_DEFAULTS["min_sample"])
    seed: int = RANSAC_DEFAULTS["seed"]

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise OutOfRangeError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 < self.inlier_threshold_rel < 1:
            raise OutOfRangeError(f"inlier_threshold_rel must lie in (0, 1), got {self.inlier_threshold_rel}")
        if self.min_sample != 3:
            raise OutOfRangeError("min_sample is fixed at 3 for similarity transforms")


# =============================================================================
# CLOSED-FORM FIT (UMEYAMA)
# =============================================================================

def _umeyama_batch(src: np.ndarray, dst: np.ndarray, weights: Optional[np.ndarray] = None):
    """
    Weighted least-squares similarity for a batch of point-set pairs.

    Args:
        src, dst: (B, M, 3) corresponding points
        weights: (M,) non-negative point weights, uniform when None

    Returns:
        (scale (B,), rotation (B,3,3), translation (B,3), valid (B,) bool)
    """
    m = src.shape[1]
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=float) / float(np.sum(weights))
    mean_s = np.einsum("m,bmi->bi", w, src)
    mean_d = np.einsum("m,bmi->bi", w, dst)
    src_c = src - mean_s[:, None, :]
    dst_c = dst - mean_d[:, None, :]
    var_s = np.einsum("m,bmi,bmi->b", w, src_c, src_c)

    cov = np.einsum("m,bmi,bmj->bij", w, dst_c, src_c)
    u, d, vt = np.linalg.svd(cov)
    sign = np.sign(np.linalg.det(u) * np.linalg.det(vt))
    sign[sign == 0] = 1.0
    diag = np.ones((src.shape[0], 3))
    diag[:, 2] = sign
    rotation = np.einsum("bij,bj,bjk->bik", u, diag, vt)

    with np.errstate(divide="ignore", invalid="ignore"):
        scale = (d * diag).sum(axis=1) / var_s
    valid = np.isfinite(scale) & (scale > 0) & (var_s > 0)
    scale = np.where(valid, scale, 1.0)
    translation = mean_d - scale[:, None] * np.einsum("bij,bj->bi", rotation, mean_s)
    return scale, rotation, translation, valid


def _spans_plane(points: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """(B,) True where the weighted, centered (B, M, 3) point sets have rank >= 2."""
    m = points.shape[1]
    w = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=float) / float(np.sum(weights))
    mean = np.einsum("m,bmi->bi", w, points)
    centered = (points - mean[:, None, :]) * np.sqrt(w)[None, :, None]
    sv = np.linalg.svd(centered, compute_uv=False)
    reference = np.maximum(1.0, np.abs(points).max(axis=(1, 2))) * np.sqrt(w.max())
    return (sv[:, 0] > RANK_TOL * reference) & (sv[:, 1] >= RANK_TOL * sv[:, 0])


def _is_degenerate(points: np.ndarray) -> bool:
    return not bool(_spans_plane(points[None])[0])


def _check_pair(src, dst) -> Tuple[np.ndarray, np.ndarray]:
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    if src.ndim != 2 or src.shape[1] != 3 or dst.ndim != 2 or dst.shape[1] != 3:
        raise DimensionMismatchError(f"expected (N, 3) point sets, got {src.shape} and {dst.shape}")
    if src.shape[0] != dst.shape[0]:
        raise DimensionMismatchError(f"point sets differ in length: {src.shape[0]} vs {dst.shape[0]}")
    if src.shape[0] < 3:
        raise DegenerateConfigurationError(f"need at least 3 correspondences, got {src.shape[0]}")
    return src, dst


def estimate_similarity(src, dst) -> SimilarityTransform:
    """
    Closed-form least-squares similarity mapping src onto dst.

    Centers both sets, takes the rotation from the SVD of the
    cross-covariance (last singular direction flipped when needed so no
    reflection is produced) and the scale from least squares.

    Args:
        src: (N, 3) source points, N >= 3, not all collinear
        dst: (N, 3) destination points

    Raises:
        DimensionMismatchError: Lengths or shapes differ
        DegenerateConfigurationError: Fewer than 3 points or centered src has rank < 2

    Example:
        >>> tri = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], float)
        >>> t = estimate_similarity(tri, 2 * tri + 1)
        >>> round(t.scale, 9), t.translation
        (2.0, array([1., 1., 1.]))
    """
    src, dst = _check_pair(src, dst)
    if _is_degenerate(src):
        raise DegenerateConfigurationError("source points are collinear or coincident")
    scale, rotation, translation, valid = _umeyama_batch(src[None], dst[None])
    if not valid[0]:
        raise DegenerateConfigurationError("least-squares scale is not positive")
    return SimilarityTransform(float(scale[0]), rotation[0], translation[0])


# =============================================================================
# RANSAC
# =============================================================================

def _draw_triples(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """`count` rows of 3 distinct indices in [0, n)."""
    a = rng.integers(n, size=count)
    b = rng.integers(n - 1, size=count)
    b = b + (b >= a)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    c = rng.integers(n - 2, size=count)
    c = c + (c >= lo)
    c = c + (c >= hi)
    return np.stack([a, b, c], axis=1)


def _residuals(src, dst, scale, rotation, translation) -> np.ndarray:
    mapped = scale[:, None, None] * np.einsum("bij,nj->bni", rotation, src) + translation[:, None, :]
    return np.linalg.norm(mapped - dst[None], axis=2)


def _robust_fit(src: np.ndarray, dst: np.ndarray, weights: np.ndarray, params: RansacParams):
    """
    RANSAC over groups of points.

    src and dst are (N, G, 3): N correspondences of G points each, the
    first point of a group being its position. Hypotheses are fit on
    whole groups with the per-point `weights` (G,), but inliers are
    decided on position residuals only.
    """
    n, g = src.shape[:2]
    positions_src, positions_dst = src[:, 0], dst[:, 0]
    extent = float(np.sqrt(((positions_dst - positions_dst.mean(axis=0)) ** 2).sum(axis=1).mean()))
    threshold = params.inlier_threshold_rel * extent

    flat_src, flat_dst = src.reshape(1, -1, 3), dst.reshape(1, -1, 3)
    flat_w = np.tile(weights, n)
    if _spans_plane(flat_src, flat_w)[0]:
        scale, rotation, translation, valid = _umeyama_batch(flat_src, flat_dst, flat_w)
        if valid[0]:
            residual = _residuals(positions_src, positions_dst, scale, rotation, translation)[0]
            if (residual <= threshold).all():
                transform = SimilarityTransform(float(scale[0]), rotation[0], translation[0])
                return transform, np.ones(n, dtype=bool)

    if n < 3:
        raise RobustFitError(f"closed-form fit failed and {n} correspondences are too few to sample")

    rng = np.random.default_rng(params.seed)
    samples = _draw_triples(rng, n, int(params.iterations))
    sample_src = src[samples].reshape(len(samples), 3 * g, 3)
    sample_dst = dst[samples].reshape(len(samples), 3 * g, 3)
    sample_w = np.tile(weights, 3)
    scale, rotation, translation, valid = _umeyama_batch(sample_src, sample_dst, sample_w)

    # Samples that do not determine a rotation.
    valid &= _spans_plane(sample_src, sample_w)

    residual = _residuals(positions_src, positions_dst, scale, rotation, translation)
    inliers = (residual <= threshold) & valid[:, None]
    counts = inliers.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        rms = np.sqrt(np.where(inliers, residual ** 2, 0.0).sum(axis=1) / counts)
    rms = np.where(counts > 0, rms, np.inf)

    best = int(np.lexsort((np.arange(len(counts)), rms, -counts))[0])
    if counts[best] < 3:
        raise RobustFitError(f"best hypothesis has {int(counts[best])} inlier(s); at least 3 required")

    mask = inliers[best]
    refit_src, refit_dst = src[mask].reshape(1, -1, 3), dst[mask].reshape(1, -1, 3)
    refit_w = np.tile(weights, int(counts[best]))
    if not _spans_plane(refit_src, refit_w)[0]:
        raise RobustFitError("refit on inliers failed: inlier points are collinear or coincident")
    scale, rotation, translation, valid = _umeyama_batch(refit_src, refit_dst, refit_w)
    if not valid[0]:
        raise RobustFitError("refit on inliers failed: least-squares scale is not positive")
    return SimilarityTransform(float(scale[0]), rotation[0], translation[0]), mask


def estimate_similarity_ransac(src, dst, params: Optional[RansacParams] = None):
    """
    Robust similarity estimation over index-paired correspondences.

    A fit on all points that leaves every point an inlier is returned
    directly. Otherwise `params.iterations` minimal samples are drawn from
    a generator seeded with `params.seed`, hypotheses are ranked by
    (inlier count desc, inlier RMS asc, hypothesis index asc), and the
    winner is refit on its inliers.

    Args:
        src: (N, 3) source points
        dst: (N, 3) destination points
        params: RANSAC settings (defaults when None)

    Returns:
        (SimilarityTransform, inlier mask of shape (N,))

    Raises:
        DimensionMismatchError: Lengths or shapes differ
        DegenerateConfigurationError: Fewer than 3 points
        RobustFitError: No hypothesis reaches 3 inliers or the refit degenerates
    """
    src, dst = _check_pair(src, dst)
    return _robust_fit(src[:, None, :], dst[:, None, :], np.ones(1), params or RansacParams())


# =============================================================================
# TRAJECTORY ALIGNMENT
# =============================================================================

# Per-pose point weights: center, then the three axis anchors.
POSE_POINT_WEIGHTS = np.array([1.0, ANCHOR_WEIGHT, ANCHOR_WEIGHT, ANCHOR_WEIGHT])


def pose_anchors(traj: Trajectory) -> np.ndarray:
    """
    (N, 4, 3) correspondences for pose-aware alignment.

    Each pose contributes its center and the three points at distance l
    along its camera axes, l being the RMS spread of the centers about
    their centroid. Order per pose: center, +x, +y, +z.

    Raises:
        DegenerateConfigurationError: If the centers have no spread
    """
    centers = traj.centers
    spread = float(np.sqrt(((centers - centers.mean(axis=0)) ** 2).sum(axis=1).mean()))
    if spread <= 1e-12 * max(1.0, float(np.abs(centers.mean(axis=0)).max())):
        raise DegenerateConfigurationError(
            f"trajectory '{traj.id}' has no translation; use rotation-only alignment"
        )
    axes = centers[:, None, :] + spread * np.swapaxes(traj.rotations, 1, 2)
    return np.concatenate([centers[:, None, :], axes], axis=1)


def anchored_points(traj: Trajectory) -> np.ndarray:
    """pose_anchors flattened to (4N, 3), pose by pose."""
    return pose_anchors(traj).reshape(-1, 3)


def estimate_alignment(traj_src: Trajectory, traj_dst: Trajectory, params: Optional[RansacParams] = None):
    """
    RANSAC similarity taking traj_src onto traj_dst, with its per-pose inlier mask.

    Poses are inliers by center distance alone. The axis anchors enter
    every fit with weight ANCHOR_WEIGHT, so rotations only decide what
    the centers leave open, i.e. the twist about a straight path.
    """
    if len(traj_src) != len(traj_dst):
        raise ContractError(
            f"cannot align '{traj_src.id}' ({len(traj_src)} poses) to '{traj_dst.id}' "
            f"({len(traj_dst)} poses); resample first"
        )
    require_min_length(traj_src)
    return _robust_fit(pose_anchors(traj_src), pose_anchors(traj_dst), POSE_POINT_WEIGHTS, params or RansacParams())


def fit_alignments(traj_src: Trajectory, trajs_dst: Sequence[Trajectory]):
    """
    Closed-form (non-robust) alignments of one trajectory onto many.

    Uses the same weighted correspondences as estimate_alignment, solved
    for all destinations in one batch.

    Returns:
        (scale (B,), rotation (B,3,3), translation (B,3), valid (B,) bool)

    Raises:
        ContractError: A destination differs in pose count
        DegenerateConfigurationError: Some trajectory has no translation
    """
    src = pose_anchors(traj_src)
    dst = []
    for traj in trajs_dst:
        if len(traj) != len(traj_src):
            raise ContractError(f"cannot align '{traj_src.id}' to '{traj.id}': pose counts differ")
        dst.append(pose_anchors(traj).reshape(-1, 3))
    dst = np.stack(dst)
    flat_src = np.broadcast_to(src.reshape(1, -1, 3), dst.shape)
    return _umeyama_batch(flat_src, dst, np.tile(POSE_POINT_WEIGHTS, len(traj_src)))


def align_to(traj_src: Trajectory, traj_dst: Trajectory, params: Optional[RansacParams] = None) -> Trajectory:
    """
    Map traj_src into traj_dst's frame with a RANSAC similarity transform.

    Centers go through the transform; rotations are left-multiplied by
    its rotation.

    Raises:
        ContractError: Pose counts differ
        DegenerateConfigurationError: traj_src (or traj_dst) has no translation
        RobustFitError: RANSAC failed
    """
    transform, _ = estimate_alignment(traj_src, traj_dst, params)
    return apply_transform(traj_src, transform)


def apply_transform(traj: Trajectory, transform: SimilarityTransform) -> Trajectory:
    return Trajectory(
        traj.id,
        traj.frame_indices,
        np.einsum("ij,njk->nik", transform.rotation, traj.rotations),
        transform.apply(traj.centers),
    )


def align_rotation_only(traj: Trajectory) -> Trajectory:
    """Remove the global orientation offset: R_i -> R_1^T R_i, centers unchanged."""
    require_min_length(traj)
    first_inv = traj.rotations[0].T
    return traj.with_rotations(np.einsum("ij,njk->nik", first_inv, traj.rotations))
