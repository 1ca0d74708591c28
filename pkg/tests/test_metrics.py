"""
Test suite for filter ratios, motion magnitudes, the keep/reject decision
and the TransErr/RotErr pair errors
"""
import unittest
import sys
import os
import math

import numpy as np

# Add parent directory to path to import camcurate modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from camcurate.alignment import anchored_points, estimate_alignment
from camcurate.config import ANCHOR_WEIGHT
from camcurate.errors import ContractError, OutOfRangeError, UndefinedRatioError
from camcurate.geometry import axis_rotation, geodesic_angle
from camcurate.metrics import (
    Decision,
    ErrorMode,
    FilterThresholds,
    FilterVerdict,
    closed_form_errors,
    complexity_ratio,
    filter_trajectory,
    is_rotation_only,
    jump_ratio,
    motion_magnitudes,
    pair_errors,
    rot_err,
    trans_err,
)
from tests.helpers import (
    line_trajectory,
    random_similarity,
    random_trajectory,
    rotate_globally,
    transform_trajectory,
)


def steps_trajectory(steps, traj_id="steps"):
    """Straight line along x with the given step lengths."""
    x = np.concatenate([[0.0], np.cumsum(steps)])
    return line_trajectory(np.column_stack([x, np.zeros_like(x), np.zeros_like(x)]), traj_id)


def pan_trajectory(total_angle, n=30, traj_id="pan"):
    rotations = np.stack([axis_rotation("y", a) for a in np.linspace(0.0, total_angle, n)])
    return line_trajectory(np.zeros((n, 3)), traj_id).with_rotations(rotations)


def dolly_trajectory(n=21, length=1.0, traj_id="dolly"):
    z = np.linspace(0.0, length, n)
    return line_trajectory(np.column_stack([np.zeros(n), np.zeros(n), z]), traj_id)


class TestRatios(unittest.TestCase):
    """Test cases for jump and complexity ratios"""

    def test_jump_equal_steps(self):
        """Test that equal steps give a jump ratio of 1"""
        self.assertAlmostEqual(jump_ratio(steps_trajectory([0.5] * 8)), 1.0, places=12)

    def test_jump_single_large_step(self):
        """Test displacements [1,1,1,5] give 2.5"""
        self.assertAlmostEqual(jump_ratio(steps_trajectory([1, 1, 1, 5])), 2.5, places=12)

    def test_jump_with_zero_steps(self):
        """Test displacements [0,0,4] give 3"""
        self.assertAlmostEqual(jump_ratio(steps_trajectory([0, 0, 4])), 3.0, places=12)

    def test_jump_static_undefined(self):
        """Test that a static trajectory has no jump ratio"""
        with self.assertRaises(UndefinedRatioError):
            jump_ratio(line_trajectory(np.zeros((5, 3))))

    def test_complexity_straight_line(self):
        """Test a straight line has complexity close to 1"""
        self.assertAlmostEqual(complexity_ratio(steps_trajectory([2 / 3] * 3)), 1.0, delta=1e-7)

    def test_complexity_out_and_back(self):
        """Test an out-and-back path gives L / epsilon"""
        traj = line_trajectory([[0, 0, 0], [1, 0, 0], [0, 0, 0]])
        self.assertAlmostEqual(complexity_ratio(traj, 1e-8), 2e8, delta=1e-2)

    def test_complexity_right_angle(self):
        """Test the right-angle path gives sqrt(2)"""
        traj = line_trajectory([[0, 0, 0], [1, 0, 0], [1, 1, 0]])
        self.assertAlmostEqual(complexity_ratio(traj), math.sqrt(2), places=6)

    def test_complexity_at_least_one(self):
        """Test complexity >= 1 up to epsilon on random trajectories"""
        rng = np.random.default_rng(0)
        for _ in range(100):
            self.assertGreater(complexity_ratio(random_trajectory(rng, n=20)), 1.0 - 1e-6)


class TestMagnitudes(unittest.TestCase):
    """Test cases for motion magnitudes"""

    def test_static(self):
        """Test a frozen camera has zero magnitudes"""
        self.assertEqual(motion_magnitudes(line_trajectory(np.zeros((5, 3)))), (0.0, 0.0))

    def test_pure_pan(self):
        """Test a 90 degree pan sums to pi/2 for any frame count"""
        for n in (2, 7, 64):
            total_trans, total_rot = motion_magnitudes(pan_trajectory(math.pi / 2, n))
            self.assertEqual(total_trans, 0.0)
            self.assertAlmostEqual(total_rot, math.pi / 2, delta=1e-9)

    def test_unit_dolly(self):
        """Test a unit dolly gives (1, 0)"""
        total_trans, total_rot = motion_magnitudes(dolly_trajectory())
        self.assertAlmostEqual(total_trans, 1.0, places=12)
        self.assertEqual(total_rot, 0.0)


class TestFilter(unittest.TestCase):
    """Test cases for filter_trajectory"""

    def test_smooth_dolly_kept(self):
        """Test a constant-speed dolly is kept"""
        verdict = filter_trajectory(dolly_trajectory())
        self.assertEqual(verdict.decision, Decision.KEEP)
        self.assertAlmostEqual(verdict.r_jump, 1.0, places=9)
        self.assertAlmostEqual(verdict.r_complex, 1.0, delta=1e-7)
        self.assertTrue(verdict.decision.kept)

    def test_jump_rejected(self):
        """Test nine unit steps and one of 10 are rejected for the jump"""
        verdict = filter_trajectory(steps_trajectory([1.0] * 9 + [10.0]))
        self.assertAlmostEqual(verdict.r_jump, 10 / 1.9, places=9)
        self.assertEqual(verdict.decision, Decision.REJECT_JUMP)
        self.assertFalse(verdict.decision.kept)

    def test_jump_checked_before_complexity(self):
        """Test that a path failing both checks is reported as a jump"""
        verdict = filter_trajectory(steps_trajectory([1.0] * 9 + [10.0] + [-1.0] * 19))
        self.assertEqual(verdict.decision, Decision.REJECT_JUMP)

    def test_complex_rejected(self):
        """Test a zig-zag path is rejected for complexity"""
        centers = [[0, 0, 0]] + [[0.1 * i, 1.0 if i % 2 else 0.0, 0] for i in range(1, 21)]
        verdict = filter_trajectory(line_trajectory(centers))
        self.assertGreater(verdict.r_complex, 3.0)
        self.assertEqual(verdict.decision, Decision.REJECT_COMPLEX)

    def test_pure_pan_rotation_only(self):
        """Test a pure pan is kept on the rotation-only branch"""
        verdict = filter_trajectory(pan_trajectory(math.pi / 2))
        self.assertEqual(verdict.decision, Decision.ROTATION_ONLY_KEEP)
        self.assertIsNone(verdict.r_jump)
        self.assertIsNone(verdict.r_complex)
        self.assertAlmostEqual(verdict.total_rot, math.pi / 2, delta=1e-9)
        self.assertTrue(is_rotation_only(pan_trajectory(math.pi / 2)))

    def test_frozen_camera_static(self):
        """Test a frozen camera is rejected as static"""
        verdict = filter_trajectory(line_trajectory(np.ones((10, 3))))
        self.assertEqual(verdict.decision, Decision.REJECT_STATIC)

    def test_custom_thresholds(self):
        """Test that a raised jump threshold keeps the jump trajectory"""
        th = FilterThresholds(tau_jump=6.0, tau_complex=3.0)
        self.assertEqual(filter_trajectory(steps_trajectory([1.0] * 9 + [10.0]), th).decision, Decision.KEEP)

    def test_thresholds_validated(self):
        """Test that ratio thresholds must exceed 1"""
        with self.assertRaises(OutOfRangeError):
            FilterThresholds(tau_jump=0.5)
        with self.assertRaises(OutOfRangeError):
            FilterThresholds(epsilon=0.0)

    def test_verdict_dict_round_trip(self):
        """Test FilterVerdict to_dict/from_dict"""
        verdict = filter_trajectory(dolly_trajectory(traj_id="d1"))
        record = verdict.to_dict()
        self.assertEqual(record["id"], "d1")
        self.assertEqual(record["decision"], "Keep")
        self.assertEqual(FilterVerdict.from_dict(record), verdict)


class TestPairErrors(unittest.TestCase):
    """Test cases for TransErr and RotErr"""

    def test_self_errors_zero(self):
        """Test a trajectory against itself"""
        traj = random_trajectory(np.random.default_rng(1), n=40)
        t, r = pair_errors(traj, traj)
        self.assertAlmostEqual(t, 0.0, delta=1e-9)
        self.assertAlmostEqual(r, 0.0, delta=1e-7)

    def test_similarity_copy_zero(self):
        """Test that a similarity-transformed copy has zero errors"""
        rng = np.random.default_rng(2)
        traj = random_trajectory(rng, n=40)
        moved = transform_trajectory(traj, random_similarity(rng, (0.5, 2.0)), "moved")
        self.assertAlmostEqual(trans_err(moved, traj), 0.0, delta=1e-6)
        self.assertAlmostEqual(rot_err(moved, traj), 0.0, delta=1e-6)

    def test_constant_offset_absorbed(self):
        """Test that a constant sideways offset of a dolly is absorbed"""
        ref = dolly_trajectory(n=20)
        est = ref.with_centers(ref.centers + np.array([0.1, 0.0, 0.0]))
        self.assertAlmostEqual(trans_err(est, ref, resample_k=None), 0.0, delta=1e-9)

    def test_matches_brute_force_alignment(self):
        """Test TransErr against an independent weighted least-squares alignment"""
        rng = np.random.default_rng(3)
        ref = dolly_trajectory(n=20)
        est = ref.with_centers(ref.centers + rng.normal(scale=1e-3, size=ref.centers.shape))

        src, dst = anchored_points(est), anchored_points(ref)
        w = np.tile([1.0, ANCHOR_WEIGHT, ANCHOR_WEIGHT, ANCHOR_WEIGHT], len(est))
        w = w / w.sum()
        mu_s, mu_d = w @ src, w @ dst
        cov = (dst - mu_d).T @ ((src - mu_s) * w[:, None])
        u, d, vt = np.linalg.svd(cov)
        s = np.diag([1.0, 1.0, np.sign(np.linalg.det(u @ vt))])
        rotation = u @ s @ vt
        scale = np.trace(np.diag(d) @ s) / (w @ ((src - mu_s) ** 2).sum(axis=1))
        translation = mu_d - scale * rotation @ mu_s
        mapped = scale * est.centers @ rotation.T + translation
        expected = float(np.linalg.norm(mapped - ref.centers, axis=1).mean())

        self.assertAlmostEqual(trans_err(est, ref, resample_k=None), expected, delta=1e-9)

    def test_body_offset_reported_in_full(self):
        """Test that a constant camera-frame yaw offset shows up whole in RotErr"""
        rng = np.random.default_rng(6)
        refs = (dolly_trajectory(n=40), random_trajectory(rng, n=40))
        for ref in refs:
            for degrees in (1.0, 2.0, 5.0, 10.0, 45.0):
                offset = axis_rotation("y", math.radians(degrees))
                est = ref.with_rotations(ref.rotations @ offset)
                t, r = pair_errors(est, ref, resample_k=None)
                self.assertAlmostEqual(t, 0.0, delta=1e-5, msg=f"{ref.id} {degrees}")
                self.assertAlmostEqual(r, math.radians(degrees), delta=1e-5, msg=f"{ref.id} {degrees}")

    def test_rotations_do_not_pick_inliers(self):
        """Test that poses with rotated cameras but correct centers stay inliers"""
        rng = np.random.default_rng(7)
        ref = random_trajectory(rng, n=30)
        rotations = ref.rotations.copy()
        rotations[::3] = rotations[::3] @ axis_rotation("x", math.radians(60))
        _, mask = estimate_alignment(ref.with_rotations(rotations), ref)
        self.assertTrue(mask.all())

    def test_closed_form_errors_match_pair_errors(self):
        """Test the batched closed-form errors against pair_errors on clean copies"""
        rng = np.random.default_rng(8)
        est = random_trajectory(rng, n=30)
        refs = [
            est,
            transform_trajectory(est, random_similarity(rng, (0.5, 2.0)), "moved"),
            est.with_centers(est.centers + rng.normal(scale=1e-3, size=est.centers.shape)),
        ]
        errors = closed_form_errors(est, refs)
        self.assertEqual(errors.shape, (3, 2))
        for row, ref in zip(errors, refs):
            np.testing.assert_allclose(row, pair_errors(est, ref, resample_k=None), atol=1e-9)

    def test_closed_form_errors_length_mismatch(self):
        """Test that the batched errors need equal pose counts"""
        rng = np.random.default_rng(9)
        with self.assertRaises(ContractError):
            closed_form_errors(random_trajectory(rng, n=10), [random_trajectory(rng, n=12)])

    def test_rotation_only_constant_offset(self):
        """Test that a constant 10 degree offset vanishes in rotation-only mode"""
        ref = pan_trajectory(math.radians(30))
        est = rotate_globally(ref, axis_rotation("x", math.radians(10)))
        t, r = pair_errors(est, ref, ErrorMode.ROTATION_ONLY)
        self.assertEqual(t, 0.0)
        self.assertAlmostEqual(r, 0.0, delta=1e-9)

    def test_rotation_only_opposite_pans(self):
        """Test that opposite pans differ in rotation-only mode"""
        left, right = pan_trajectory(-math.radians(30)), pan_trajectory(math.radians(30))
        self.assertGreater(rot_err(left, right, ErrorMode.ROTATION_ONLY), 0.4)

    def test_single_frame_rotation_term(self):
        """Test the per-pose term for a 90 degree offset about z"""
        self.assertAlmostEqual(geodesic_angle(axis_rotation("z", math.pi / 2), np.eye(3)), math.pi / 2, places=12)

    def test_unaligned_rotations_flag(self):
        """Test that disabling rotation alignment exposes a global rotation"""
        rng = np.random.default_rng(4)
        traj = random_trajectory(rng, n=30)
        moved = transform_trajectory(traj, random_similarity(rng, (0.5, 2.0)), "moved")
        self.assertAlmostEqual(rot_err(moved, traj), 0.0, delta=1e-6)
        self.assertGreater(rot_err(moved, traj, align_rotations=False), 1e-3)

    def test_unequal_lengths_without_resampling(self):
        """Test that unequal lengths need resampling"""
        rng = np.random.default_rng(5)
        with self.assertRaises(ContractError):
            trans_err(random_trajectory(rng, n=10), random_trajectory(rng, n=12), resample_k=None)

    def test_unequal_lengths_resampled(self):
        """Test that a dolly sampled at two rates has zero error after resampling"""
        self.assertAlmostEqual(trans_err(dolly_trajectory(n=21), dolly_trajectory(n=57)), 0.0, delta=1e-9)


if __name__ == '__main__':
    unittest.main()
