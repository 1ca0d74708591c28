"""
Configuration constants for the camcurate trajectory curation toolkit.

This file defines every default the package uses, including:
- Pose file format details
- Step-2 filter thresholds
- RANSAC / alignment parameters
- Canonical motion-template magnitudes and sampling ranges
- Intra-class matching thresholds
- Pipeline settings and CLI exit codes

Per-run overrides go in a JSON config file (see settings.load_config);
edit the values here to change the package-wide defaults.
"""

import math

# =============================================================================
# POSE FILE FORMAT
# =============================================================================
# One pose per line: frame tx ty tz qx qy qz qw (quaternion w-last).
# Lines starting with COMMENT_PREFIX and blank lines are skipped.

POSE_FIELDS = ("frame", "tx", "ty", "tz", "qx", "qy", "qz", "qw")
COMMENT_PREFIX = "#"
POSE_FLOAT_FORMAT = "%.12g"
POSE_FILE_SUFFIX = ".txt"

# Quaternions with a norm at or below this are rejected as degenerate.
QUAT_NORM_EPS = 1e-12

# Orthonormality tolerance for rotation matrices.
ROTATION_TOL = 1e-9

# =============================================================================
# TRAJECTORY FILTERING (Step 2)
# =============================================================================
# tau_jump and tau_complex are the published filter thresholds; the static
# thresholds depend on the reconstruction scale of the corpus.

FILTER_DEFAULTS = {
    "tau_jump": 5.0,
    "tau_complex": 3.0,
    "epsilon": 1e-8,
    "tau_static_trans": 1e-2,   # world units, total path length
    "tau_static_rot": 0.035,    # radians (~2 degrees), total rotation
}

# =============================================================================
# ALIGNMENT / RANSAC
# =============================================================================

RANSAC_DEFAULTS = {
    "iterations": 256,
    "inlier_threshold_rel": 0.05,  # fraction of destination RMS extent
    "min_sample": 3,
    "seed": 0,
}

# Rank test for the centered source set: singular value ratios below this
# count as zero.
RANK_TOL = 1e-9

# Weight of each camera-axis anchor relative to its pose center in trajectory
# alignment. The anchors only settle the rotation the centers leave free
# (the twist about a straight path).
ANCHOR_WEIGHT = 1e-6

# Number of samples both trajectories are resampled to before comparison.
RESAMPLE_K = 64

# =============================================================================
# MOTION LIBRARY
# =============================================================================
# Canonical template magnitudes. Angles in degrees, distances in world units.

TEMPLATE_DEFAULTS = {
    "n_frames": 81,
    "pan_deg": 30.0,
    "tilt_deg": 20.0,
    "roll_deg": 45.0,
    "dolly_dist": 1.0,
    "truck_dist": 1.0,
    "boom_dist": 1.0,
    "arc_deg": 45.0,
    "arc_radius": 2.0,
    "orbit_deg": 45.0,
    "orbit_radius": 2.0,
    "diagonal_lateral": 1.0,
    "diagonal_vertical": 1.0,
    "diagonal_depth": 1.0,
}

# Sampled magnitudes are drawn from [LOW, HIGH] x canonical value.
SAMPLE_SCALE_LOW = 0.9
SAMPLE_SCALE_HIGH = 1.1
SAMPLE_FRAMES_RANGE = (49, 121)

# =============================================================================
# CLASSIFICATION & MATCHING (Steps 3-4)
# =============================================================================

ROT_WEIGHT = 1.0

# Templates kept after closed-form prescoring; only these get a RANSAC fit.
CLASSIFY_SHORTLIST = 4

MATCH_DEFAULTS = {
    "max_trans_err": 0.1,    # on unit-path-length trajectories
    "max_rot_err": 0.05,     # radians
    "n_candidates": 200,     # random pairings per class
}

# =============================================================================
# CONDITIONING MATH
# =============================================================================

ROPE_THETA = 10000.0

# Training-time condition drop rates (motion only, text only, both).
# Recorded for reference; training is not part of this package.
CONDITION_DROP_PROBABILITIES = {
    "motion_only": 0.05,
    "text_only": 0.05,
    "both": 0.05,
}

# =============================================================================
# PIPELINE
# =============================================================================

JOBS_ENV_VAR = "CAMCURATE_JOBS"
DEFAULT_SEED = 0
MAX_ERROR_RATE = 0.10

VERDICTS_FILE = "verdicts.jsonl"
FILTERED_MANIFEST_FILE = "filtered_manifest.json"
LABELS_FILE = "labels.jsonl"
PAIRS_FILE = "pairs.jsonl"
REPORT_FILE = "report.json"
MANIFEST_FILE = "manifest.json"
TRUTH_FILE = "truth.jsonl"
POSES_DIR = "poses"

# Default defect plan for synthetic corpora: counts per defect kind.
DEFECT_KINDS = ("jump", "jitter", "static", "rotation_only")

# Planted jumps scale one step to this multiple of the mean step; planted
# jitter pushes path length to at least this multiple of net displacement.
JUMP_DEFECT_RATIO = 6.0
JITTER_DEFECT_RATIO = 5.0

# =============================================================================
# EXIT CODES
# =============================================================================

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA_ERRORS = 2

# Validate defaults
assert FILTER_DEFAULTS["tau_jump"] > 1 and FILTER_DEFAULTS["tau_complex"] > 1, \
    "filter ratio thresholds must exceed 1"
assert 0 < RANSAC_DEFAULTS["inlier_threshold_rel"] < 1, \
    "inlier_threshold_rel must lie in (0, 1)"
assert SAMPLE_SCALE_LOW <= 1.0 <= SAMPLE_SCALE_HIGH, \
    "sampling ranges must contain the canonical magnitudes"
assert math.isclose(sum(CONDITION_DROP_PROBABILITIES.values()), 0.15), \
    "condition drop rates should total 15%"
