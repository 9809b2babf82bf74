"""Fourier temporal pyramid features over warped feature sequences.

The sequence is recursively split into 1, 2, 4, ... uniform segments; each
segment and feature dimension contributes the magnitudes of its first k
DFT coefficients (normalized by segment length so the DC term equals the
segment mean). Magnitudes make the representation robust to phase shifts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FtpConfig:
    levels: int = 3
    segments_per_level: tuple[int, ...] = (1, 2, 4)
    coeffs_per_segment: int = 4

    def __post_init__(self):
        if len(self.segments_per_level) != self.levels:
            raise ValueError("segments_per_level length must equal levels")
        if any(b <= a for a, b in zip(self.segments_per_level, self.segments_per_level[1:])):
            raise ValueError("segment counts must be strictly increasing")
        if self.coeffs_per_segment < 1:
            raise ValueError("coeffs_per_segment must be >= 1")

    @property
    def total_segments(self) -> int:
        return sum(self.segments_per_level)

    def feature_length(self, dim: int) -> int:
        return dim * self.total_segments * self.coeffs_per_segment


@dataclass
class FtpFeature:
    values: np.ndarray


def dft_low_freq(signal: np.ndarray, k: int) -> np.ndarray:
    """Magnitudes of the first k DFT coefficients, divided by the length."""
    signal = np.asarray(signal, dtype=np.float64)
    n = signal.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds segment length {n}")
    return np.abs(np.fft.fft(signal, axis=0)[:k]) / n


def segment_bounds(T: int, m: int) -> list[tuple[int, int]]:
    """Floor-boundary half-open segment spans of 0..T split into m parts."""
    return [((s * T) // m, ((s + 1) * T) // m) for s in range(m)]


def ftp_features(warped, cfg: FtpConfig = FtpConfig()) -> FtpFeature:
    """Concatenated pyramid magnitudes, level-major then segment, dimension,
    coefficient. Output length is dim * total_segments * k exactly."""
    values = getattr(warped, "values", warped)
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    T, dim = values.shape
    k = cfg.coeffs_per_segment
    if T < cfg.segments_per_level[-1] * k:
        raise ValueError(f"sequence length {T} too short for {cfg.segments_per_level[-1]} segments of {k} coeffs")
    parts = []
    for m in cfg.segments_per_level:
        for start, stop in segment_bounds(T, m):
            mags = dft_low_freq(values[start:stop], k)  # (k, dim)
            parts.append(mags.T.reshape(-1))  # dimension-major, then coefficient
    return FtpFeature(values=np.concatenate(parts))


def write_feature_matrix(path: str, matrix: np.ndarray, cfg: FtpConfig, dim: int) -> None:
    """CSV feature matrix (rows = instances) with a JSON layout sidecar."""
    np.savetxt(path, matrix, delimiter=",", fmt="%.17g")
    sidecar = {
        "levels": cfg.levels,
        "segments_per_level": list(cfg.segments_per_level),
        "coeffs_per_segment": cfg.coeffs_per_segment,
        "feature_dim": dim,
        "column_order": ["level", "segment", "dimension", "coefficient"],
        "columns": int(matrix.shape[1]),
        "rows": int(matrix.shape[0]),
    }
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
