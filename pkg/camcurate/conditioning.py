"""
Conditioning math for camera-controlled video generation.

Flow-matching interpolant and target velocity, dual-condition
classifier-free guidance, and rotary positional phases over shifted
(frame, height, width) token coordinates. State vectors are plain numpy
arrays.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .config import ROPE_THETA
from .errors import DimensionMismatchError, OutOfRangeError


# =============================================================================
# FLOW MATCHING
# =============================================================================

def _same_shape(*arrays) -> Tuple[np.ndarray, ...]:
    arrays = tuple(np.asarray(a, dtype=float) for a in arrays)
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise DimensionMismatchError(f"operand shapes differ: {shape} vs {a.shape}")
    for a in arrays:
        if not np.isfinite(a).all():
            raise OutOfRangeError("state vectors must be finite")
    return arrays


def interpolant(x0, x1, t: float) -> np.ndarray:
    """
    Linear path x_t = (1 - t) x0 + t x1.

    Raises:
        DimensionMismatchError: x0 and x1 differ in shape
        OutOfRangeError: t outside [0, 1]

    Example:
        >>> interpolant([0, 0], [2, 4], 0.5)
        array([1., 2.])
    """
    x0, x1 = _same_shape(x0, x1)
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"t must lie in [0, 1], got {t}")
    return (1.0 - t) * x0 + t * x1


def target_velocity(x0, x1) -> np.ndarray:
    """Velocity of the linear path, x1 - x0 (independent of t)."""
    x0, x1 = _same_shape(x0, x1)
    return x1 - x0


# =============================================================================
# CLASSIFIER-FREE GUIDANCE
# =============================================================================

@dataclass(frozen=True)
class GuidanceWeights:
    """Separate guidance scales for the text and motion conditions. Negative values are allowed."""

    w_text: float
    w_motion: float

    def __post_init__(self):
        if not (np.isfinite(self.w_text) and np.isfinite(self.w_motion)):
            raise OutOfRangeError("guidance weights must be finite")


def cfg_coefficients(weights: GuidanceWeights) -> Tuple[float, float, float]:
    """Affine coefficients on (uncond, text, full): (1 - w_T, w_T - w_M, w_M)."""
    return (1.0 - weights.w_text, weights.w_text - weights.w_motion, weights.w_motion)


def compose_cfg(eps_uncond, eps_text, eps_full, weights: GuidanceWeights) -> np.ndarray:
    """
    Dual-condition guidance.

    eps = eps_uncond + w_T (eps_text - eps_uncond) + w_M (eps_full - eps_text)

    where eps_text is conditioned on text only and eps_full on text and
    motion. With w_T = w_M = 1 the result is eps_full.
    """
    eps_uncond, eps_text, eps_full = _same_shape(eps_uncond, eps_text, eps_full)
    return (
        eps_uncond
        + weights.w_text * (eps_text - eps_uncond)
        + weights.w_motion * (eps_full - eps_text)
    )


# =============================================================================
# 3D CONDITION ROPE
# =============================================================================

class Modality(Enum):
    NOISE = "noise"
    CONTENT = "content"
    MOTION = "motion"


@dataclass(frozen=True)
class TokenCoord:
    f: int
    h: int
    w: int

    def __post_init__(self):
        for name in ("f", "h", "w"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise OutOfRangeError(f"token coordinate {name} must be a non-negative integer, got {value}")

    def as_array(self) -> np.ndarray:
        return np.array([self.f, self.h, self.w], dtype=float)


@dataclass(frozen=True)
class RopeConfig:
    """Noise-latent extents (frames, height, width), channel dimension and base."""

    frames: int
    height: int
    width: int
    dim: int
    theta: float = ROPE_THETA

    def __post_init__(self):
        for name in ("frames", "height", "width", "dim"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise OutOfRangeError(f"{name} must be a positive integer, got {value}")
        if self.dim % 2:
            raise OutOfRangeError(f"channel dimension must be even, got {self.dim}")
        if not self.theta > 1:
            raise OutOfRangeError(f"theta must exceed 1, got {self.theta}")


def shift_coords(coord: TokenCoord, modality: Modality, cfg: RopeConfig) -> TokenCoord:
    """
    Offset a token coordinate by its modality's base.

    noise -> (f, h, w); content -> (f + F, h, w); motion -> (f + F, h + H, w + W).
    Every modality shares the noise latent's extents.

    Raises:
        OutOfRangeError: Coordinate outside the latent extents
    """
    if coord.f >= cfg.frames or coord.h >= cfg.height or coord.w >= cfg.width:
        raise OutOfRangeError(
            f"coordinate ({coord.f}, {coord.h}, {coord.w}) outside latent "
            f"({cfg.frames}, {cfg.height}, {cfg.width})"
        )
    modality = Modality(modality)
    if modality is Modality.NOISE:
        return coord
    if modality is Modality.CONTENT:
        return TokenCoord(coord.f + cfg.frames, coord.h, coord.w)
    return TokenCoord(coord.f + cfg.frames, coord.h + cfg.height, coord.w + cfg.width)


def rope_frequencies(cfg: RopeConfig) -> np.ndarray:
    """freq_i = theta^(-2i/D) for i = 0..D/2-1."""
    return _frequencies(cfg.dim, cfg.theta)


def _frequencies(dim: int, theta: float) -> np.ndarray:
    return theta ** (-2.0 * np.arange(dim // 2) / dim)


def axis_channel_split(cfg: RopeConfig) -> Tuple[int, int, int]:
    """
    Channels per (frame, height, width) axis.

    The D/2 rotation pairs are split evenly; leftover pairs go to the
    frame axis. Example: D = 64 -> 32 pairs -> (24, 20, 20) channels.
    """
    pairs = cfg.dim // 2
    spatial = pairs // 3
    return (2 * (pairs - 2 * spatial), 2 * spatial, 2 * spatial)


def rope_phase(coord: TokenCoord, cfg: RopeConfig) -> np.ndarray:
    """
    Rotary phases of a (shifted) coordinate, concatenated frame, height, width.

    Each axis block uses the frequencies theta^(-2i/D_axis) over its own
    channel count D_axis, multiplied by that axis index.
    """
    blocks = []
    for index, channels in zip((coord.f, coord.h, coord.w), axis_channel_split(cfg)):
        blocks.append(index * _frequencies(channels, cfg.theta))
    return np.concatenate(blocks)
