"""Skeleton normalization and privileged-information targets.

Normalization makes skeletons view- and scale-invariant: translate the hip
center to the origin, rotate the hip bone onto the global x-axis, then
rescale every bone to a reference skeleton's length while keeping bone
directions. Sequences are resampled to a fixed length T that the temporal
chunking divides evenly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .skeleton_io import ActionSequence, SkeletonFrame

# Joint parent maps (child -> parent, -1 for the root), default tables per
# dataset; Kinect-v1 20-joint order for msr/utkinect, the 15-joint
# world-coordinate order for florence. Overridable through the CLI config.
PARENT_MAPS: dict[str, list[int]] = {
    "msr": [-1, 0, 1, 2, 2, 4, 5, 6, 2, 8, 9, 10, 0, 12, 13, 14, 0, 16, 17, 18],
    "utkinect": [-1, 0, 1, 2, 2, 4, 5, 6, 2, 8, 9, 10, 0, 12, 13, 14, 0, 16, 17, 18],
    "florence": [1, 2, -1, 1, 3, 4, 1, 6, 7, 2, 9, 10, 2, 12, 13],
}


class NormalizationError(ValueError):
    """Frame cannot be normalized (missing hip, degenerate bone, ...)."""


@dataclass(frozen=True)
class NormalizationConfig:
    """Immutable normalization parameters for one dataset."""

    hip_joint_index: int
    left_hip_index: int
    right_hip_index: int
    parents: tuple[int, ...]
    reference_skeleton: SkeletonFrame | None = None
    target_length: int = 70
    chunk_count: int = 7

    def __post_init__(self):
        if self.target_length <= 0 or self.target_length % self.chunk_count != 0:
            raise ValueError("target_length must be a positive multiple of chunk_count")


@dataclass
class ConstraintTargets:
    """Privileged training targets: category one-hot c, temporal one-hot t."""

    c: np.ndarray
    t: np.ndarray

    def validate(self) -> None:
        for name, v in (("c", self.c), ("t", self.t)):
            if np.count_nonzero(v == 1.0) != 1 or np.count_nonzero(v) != 1:
                raise ValueError(f"{name} is not one-hot")


def hip_center(frame: SkeletonFrame, cfg: NormalizationConfig) -> SkeletonFrame:
    """Translate the frame so the hip joint sits exactly at the origin."""
    if frame.missing[cfg.hip_joint_index]:
        raise NormalizationError("hip joint is missing; frame unusable for normalization")
    out = frame.copy()
    out.coords = frame.coords - frame.coords[cfg.hip_joint_index]
    return out


def _rotation_to_x(v: np.ndarray) -> np.ndarray:
    """Minimal rotation matrix taking direction v onto +x."""
    vhat = v / np.linalg.norm(v)
    ex = np.array([1.0, 0.0, 0.0])
    axis = np.cross(vhat, ex)
    s = np.linalg.norm(axis)
    c = float(vhat @ ex)
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        # antiparallel: half turn about z flips x
        return np.diag([-1.0, -1.0, 1.0])
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    theta = np.arctan2(s, c)
    return np.eye(3) + np.sin(theta) * K + (1.0 - np.cos(theta)) * (K @ K)


def align_hip_bone(frame: SkeletonFrame, cfg: NormalizationConfig) -> SkeletonFrame:
    """Rigidly rotate all joints so the left->right hip vector points along +x."""
    for idx in (cfg.left_hip_index, cfg.right_hip_index):
        if frame.missing[idx]:
            raise NormalizationError("hip bone end is missing; frame unusable for alignment")
    v = frame.coords[cfg.right_hip_index] - frame.coords[cfg.left_hip_index]
    if np.linalg.norm(v) < 1e-12:
        raise NormalizationError("left and right hip joints coincide; rotation undefined")
    R = _rotation_to_x(v)
    out = frame.copy()
    out.coords = frame.coords @ R.T
    return out


def _traversal_order(parents: tuple[int, ...]) -> list[int]:
    children: dict[int, list[int]] = {}
    root = -1
    for j, p in enumerate(parents):
        if p < 0:
            root = j
        else:
            children.setdefault(p, []).append(j)
    if root < 0:
        raise ValueError("parent map has no root")
    order, queue = [], [root]
    while queue:
        j = queue.pop(0)
        order.append(j)
        queue.extend(children.get(j, []))
    if len(order) != len(parents):
        raise ValueError("parent map is not a single connected tree")
    return order


def scale_normalize(sequence: ActionSequence, cfg: NormalizationConfig) -> ActionSequence:
    """Rescale every bone to the reference skeleton's length, root outward.

    Bone directions come from the input frame, so joint angles are
    untouched; only lengths change. Requires a hip-centered, hip-aligned
    sequence and a reference skeleton.
    """
    if cfg.reference_skeleton is None:
        raise ValueError("scale_normalize needs cfg.reference_skeleton")
    parents = cfg.parents
    order = _traversal_order(parents)
    ref = cfg.reference_skeleton.coords
    ref_len = {
        j: float(np.linalg.norm(ref[j] - ref[parents[j]])) for j in order if parents[j] >= 0
    }
    out_frames = []
    for frame in sequence.frames:
        old = frame.coords
        new = np.zeros_like(old)
        for j in order:
            p = parents[j]
            if p < 0:
                new[j] = old[j]
                continue
            bone = old[j] - old[p]
            length = np.linalg.norm(bone)
            if length < 1e-12:
                raise NormalizationError(
                    f"zero-length bone {p}->{j} at frame {frame.timestamp_index}; direction undefined"
                )
            new[j] = new[p] + ref_len[j] * bone / length
        f = frame.copy()
        f.coords = new
        out_frames.append(f)
    return replace(sequence, frames=out_frames)


def resample(sequence: ActionSequence, T: int) -> ActionSequence:
    """Resample to exactly T frames by per-joint linear interpolation.

    First and last frames are preserved. A joint in an interpolated frame
    is flagged missing when either bracketing source joint is missing.
    """
    L = len(sequence.frames)
    if L < 2:
        raise ValueError("resample needs at least 2 frames")
    coords = sequence.coords_array()
    missing = sequence.missing_array()
    has_conf = all(f.confidence is not None for f in sequence.frames)
    conf = np.stack([f.confidence for f in sequence.frames]) if has_conf else None

    pos = np.linspace(0.0, L - 1.0, T)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, L - 1)
    frac = (pos - lo)[:, None, None]

    new_coords = (1.0 - frac) * coords[lo] + frac * coords[hi]
    exact = pos == lo
    new_missing = missing[lo] | missing[hi]
    new_missing[exact] = missing[lo[exact]]
    frames = []
    for i in range(T):
        c = None
        if conf is not None:
            c = (1.0 - frac[i, 0, 0]) * conf[lo[i]] + frac[i, 0, 0] * conf[hi[i]]
        frames.append(SkeletonFrame(new_coords[i], new_missing[i], c, i))
    return replace(sequence, frames=frames)


def temporal_chunk_vector(frame_index: int, T: int, chunk_count: int) -> np.ndarray:
    """One-hot vector of the uniform temporal chunk containing frame_index."""
    if not 0 <= frame_index < T:
        raise ValueError(f"frame_index {frame_index} out of range for T={T}")
    v = np.zeros(chunk_count)
    v[(frame_index * chunk_count) // T] = 1.0
    return v


def one_hot_category(label: int, category_count: int) -> np.ndarray:
    if not 1 <= label <= category_count:
        raise ValueError(f"label {label} out of range 1..{category_count}")
    v = np.zeros(category_count)
    v[label - 1] = 1.0
    return v


def flatten_frame(frame: SkeletonFrame) -> np.ndarray:
    """Concatenate joint coordinates into one vector; missing joints zero."""
    out = frame.coords.copy()
    out[frame.missing] = 0.0
    return out.reshape(-1)


def unflatten_frame(vector: np.ndarray, timestamp_index: int = 0) -> SkeletonFrame:
    coords = np.asarray(vector, dtype=np.float64).reshape(-1, 3).copy()
    return SkeletonFrame(coords, np.zeros(coords.shape[0], dtype=bool), None, timestamp_index)


def select_reference_frame(sequences: list[ActionSequence], cfg: NormalizationConfig) -> SkeletonFrame:
    """Reference skeleton: first frame of the alphabetically first sequence,
    hip-centered and hip-aligned so downstream bone lengths are consistent."""
    if not sequences:
        raise ValueError("no sequences to select a reference skeleton from")
    first = min(sequences, key=lambda s: (s.instance_id, s.subject_id, s.label or 0))
    frame = align_hip_bone(hip_center(first.frames[0], cfg), cfg)
    return frame


def normalize_sequence(sequence: ActionSequence, cfg: NormalizationConfig) -> ActionSequence:
    """Full deterministic chain: hip-center, hip-align, bone rescale, resample."""
    frames = [align_hip_bone(hip_center(f, cfg), cfg) for f in sequence.frames]
    seq = replace(sequence, frames=frames)
    if cfg.reference_skeleton is not None:
        seq = scale_normalize(seq, cfg)
    return resample(seq, cfg.target_length)
