"""
Shared fixtures for the test suites: seeded random rotations, similarity
transforms and trajectories.
"""
import os
import sys

import numpy as np
from scipy.spatial.transform import Rotation

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from camcurate.alignment import SimilarityTransform
from camcurate.geometry import Trajectory


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.from_quat(rng.normal(size=4)).as_matrix()


def random_similarity(rng: np.random.Generator, scale_range=(0.1, 10.0)) -> SimilarityTransform:
    return SimilarityTransform(
        float(rng.uniform(*scale_range)),
        random_rotation(rng),
        rng.uniform(-5.0, 5.0, size=3),
    )


def line_trajectory(centers, traj_id="line") -> Trajectory:
    """Trajectory through the given centers with identity rotations."""
    centers = np.asarray(centers, dtype=float)
    n = centers.shape[0]
    return Trajectory(traj_id, np.arange(n), np.repeat(np.eye(3)[None], n, axis=0), centers)


def random_trajectory(rng: np.random.Generator, n: int = 40, traj_id="random") -> Trajectory:
    """Smooth random trajectory: a random walk of centers and of small body rotations."""
    steps = rng.normal(size=(n - 1, 3)) * 0.1 + rng.normal(size=3) * 0.2
    centers = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)]) + rng.uniform(-2, 2, size=3)
    rotvecs = np.cumsum(rng.normal(scale=0.05, size=(n, 3)), axis=0)
    rotations = random_rotation(rng) @ Rotation.from_rotvec(rotvecs).as_matrix()
    return Trajectory(traj_id, np.arange(n), rotations, centers)


def transform_trajectory(traj: Trajectory, transform: SimilarityTransform, traj_id=None) -> Trajectory:
    """Apply a global similarity to a trajectory's centers and rotations."""
    return Trajectory(
        traj_id or traj.id,
        traj.frame_indices,
        np.einsum("ij,njk->nik", transform.rotation, traj.rotations),
        transform.apply(traj.centers),
    )


def rotate_globally(traj: Trajectory, rotation: np.ndarray) -> Trajectory:
    """Left-multiply every rotation by one global rotation, centers unchanged."""
    return traj.with_rotations(np.einsum("ij,njk->nik", rotation, traj.rotations))
