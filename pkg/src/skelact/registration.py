"""Temporal registration of feature sequences against class templates.

Two registration families share one slot-assignment backend:

* DTW -- the classic monotone minimal-cost alignment with fixed endpoints,
  kept as the comparison baseline.
* Local warping -- each frame i is assigned the template index j inside a
  clipped window around i that minimizes (intra-class) or maximizes
  (inter-class) the squared Euclidean frame distance. No monotonicity is
  imposed, so local disorder is allowed.

Per-class phantom templates are fixed points of an iterative scheme:
register all class members (intra), register one random sequence of every
other class (inter), and blend the two slot-mean averages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dae import FeatureSequence


@dataclass
class PhantomTemplate:
    """Per-class reference sequence of atomic-action feature frames."""

    class_id: int
    atoms: np.ndarray  # (T, D)
    T: int

    def __post_init__(self):
        if self.atoms.shape[0] != self.T:
            raise ValueError("atom count != T")


@dataclass
class RegistrationConfig:
    """Window radii, blend weight, and stop rule of template fitting.

    The default window width is one temporal chunk (T / chunk_count), i.e.
    radius floor(T / (2 * chunk_count)).
    """

    delta: int = 5
    delta_prime: int = 5
    eta: float = 0.2
    zeta: float = 1e-6
    max_iters: int = 10
    seed: int = 0

    def validate(self, T: int) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.zeta <= 0:
            raise ValueError("zeta must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for r in (self.delta, self.delta_prime):
            if r < 0 or 2 * r + 1 > T:
                raise ValueError(f"window radius {r} invalid for sequence length {T}")


def default_window_radius(T: int, chunk_count: int = 7) -> int:
    return T // (2 * chunk_count)


@dataclass
class WarpingPath:
    pairs: list[tuple[int, int]]
    total_cost: float


@dataclass
class WarpedSequence:
    """A feature sequence after registration to a template."""

    values: np.ndarray  # (T, D)
    label: int | None = None
    subject_id: int = 0
    origin: str | None = None


def _features_of(seq) -> np.ndarray:
    if isinstance(seq, FeatureSequence):
        return seq.features
    if isinstance(seq, PhantomTemplate):
        return seq.atoms
    return np.atleast_2d(np.asarray(seq, dtype=np.float64))


def frame_distances(P, H) -> np.ndarray:
    """dist[i, j] = squared Euclidean distance between H(i) and P(j)."""
    p = _features_of(P)
    h = _features_of(H)
    diff = h[:, None, :] - p[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def dtw_align(P, H) -> WarpingPath:
    """Minimal-cost monotone alignment of sequence H onto template P.

    Path pairs are (source index i, template index j), 0-based, from (0, 0)
    to (len(H)-1, len(P)-1); traceback ties prefer diagonal then vertical
    steps. Frame cost is the squared Euclidean distance.
    """
    p = _features_of(P)
    h = _features_of(H)
    if p.shape[0] == 0 or h.shape[0] == 0:
        raise ValueError("dtw_align needs non-empty sequences")
    idx_i, idx_j, total = kernels.dtw_path(frame_distances(p, h))
    return WarpingPath(pairs=list(zip(idx_i.tolist(), idx_j.tolist())), total_cost=total)


def _window_bounds(i: int, radius: int, T: int) -> tuple[int, int]:
    return max(0, i - radius), min(T - 1, i + radius)


def lwsr_intra(P, H, i: int, cfg: RegistrationConfig) -> int:
    """Index j in the window around i minimizing ||P(j) - H(i)||^2.

    Ties resolve to the smallest j. Indices are 0-based.
    """
    p = _features_of(P)
    h = _features_of(H)
    T = p.shape[0]
    if not 0 <= i < h.shape[0]:
        raise IndexError(f"frame index {i} out of range")
    j0, j1 = _window_bounds(i, cfg.delta, T)
    d = ((p[j0 : j1 + 1] - h[i]) ** 2).sum(axis=1)
    return j0 + int(np.argmin(d))


def lwsr_inter(P, H, i: int, cfg: RegistrationConfig) -> int:
    """Index j in the window around i maximizing ||P(j) - H(i)||^2."""
    p = _features_of(P)
    h = _features_of(H)
    T = p.shape[0]
    if not 0 <= i < h.shape[0]:
        raise IndexError(f"frame index {i} out of range")
    j0, j1 = _window_bounds(i, cfg.delta_prime, T)
    d = ((p[j0 : j1 + 1] - h[i]) ** 2).sum(axis=1)
    return j0 + int(np.argmax(d))


def _slot_fill(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Average filled slots; linearly interpolate empty ones, copy at edges."""
    T = values.shape[0]
    filled = np.flatnonzero(counts > 0)
    if filled.size == 0:
        raise ValueError("no slots were assigned")
    out = np.empty_like(values)
    out[filled] = values[filled] / counts[filled, None]
    for j in np.flatnonzero(counts == 0):
        after = filled[filled > j]
        before = filled[filled < j]
        if before.size == 0:
            out[j] = out[after[0]]
        elif after.size == 0:
            out[j] = out[before[-1]]
        else:
            a, b = before[-1], after[0]
            w = (j - a) / (b - a)
            out[j] = (1.0 - w) * out[a] + w * out[b]
    return out


def _slot_means(h: np.ndarray, assign: np.ndarray, T: int) -> np.ndarray:
    sums = np.zeros((T, h.shape[1]))
    counts = np.zeros(T)
    np.add.at(sums, assign, h)
    np.add.at(counts, assign, 1.0)
    return _slot_fill(sums, counts)


def warp_sequence(P, H, mode: str, cfg: RegistrationConfig) -> WarpedSequence:
    """Register H to template P and rebuild it on the template's time grid.

    Every frame i gets a window assignment j(i) (intra: nearest, inter:
    farthest); warped slot j holds the mean of its assigned frames and
    unassigned slots are interpolated from their filled neighbours.
    """
    if mode not in ("intra", "inter"):
        raise ValueError(f"unknown warp mode {mode!r}")
    p = _features_of(P)
    h = _features_of(H)
    if h.shape[0] != p.shape[0]:
        raise ValueError(f"sequence length {h.shape[0]} != template length {p.shape[0]}")
    radius = cfg.delta if mode == "intra" else cfg.delta_prime
    assign = kernels.window_assign(frame_distances(p, h), radius, mode == "inter")
    values = _slot_means(h, assign, p.shape[0])
    label = getattr(H, "label", None)
    return WarpedSequence(
        values=values,
        label=label,
        subject_id=getattr(H, "subject_id", 0),
        origin=getattr(H, "origin", None),
    )


def dtw_warp(P, H) -> WarpedSequence:
    """DTW-based counterpart of warp_sequence for the comparison mode."""
    p = _features_of(P)
    h = _features_of(H)
    idx_i, idx_j, _ = kernels.dtw_path(frame_distances(p, h))
    sums = np.zeros((p.shape[0], h.shape[1]))
    counts = np.zeros(p.shape[0])
    np.add.at(sums, idx_j, h[idx_i])
    np.add.at(counts, idx_j, 1.0)
    values = _slot_fill(sums, counts)
    return WarpedSequence(
        values=values,
        label=getattr(H, "label", None),
        subject_id=getattr(H, "subject_id", 0),
        origin=getattr(H, "origin", None),
    )


def register(P, H, mode: str, cfg: RegistrationConfig, method: str = "lwsr") -> WarpedSequence:
    """Dispatch between local warping and the DTW baseline."""
    if method == "lwsr":
        return warp_sequence(P, H, mode, cfg)
    if method == "dtw":
        return dtw_warp(P, H)
    if method == "none":
        h = _features_of(H)
        return WarpedSequence(
            values=h.copy(),
            label=getattr(H, "label", None),
            subject_id=getattr(H, "subject_id", 0),
            origin=getattr(H, "origin", None),
        )
    raise ValueError(f"unknown registration method {method!r}")


@dataclass
class PhantomFitInfo:
    iterations: int
    converged: bool
    last_change: float
    history: list[float] = field(default_factory=list)


def compute_phantom(
    class_id: int,
    class_sequences: list[FeatureSequence],
    other_class_pools: dict[int, list[FeatureSequence]],
    cfg: RegistrationConfig,
    method: str = "lwsr",
) -> tuple[PhantomTemplate, PhantomFitInfo]:
    """Iterate the template update until the squared change drops to zeta.

    Starts from the first class sequence. Each iteration intra-registers
    every class member, inter-registers one seeded random pick per other
    class, and blends the two slot-mean averages with weights (1-eta, eta).
    When the update moves the template by at most zeta (squared Frobenius),
    iteration stops and the pre-update template is returned. With eta = 0
    the inter-class pools are never touched.
    """
    if not class_sequences:
        raise ValueError(f"class {class_id} has no sequences")
    T = class_sequences[0].features.shape[0]
    cfg.validate(T)
    if cfg.eta > 0 and not other_class_pools:
        raise ValueError("eta > 0 requires inter-class pools")
    rng = np.random.default_rng(cfg.seed)
    other_ids = sorted(other_class_pools)

    P = class_sequences[0].features.copy()
    info = PhantomFitInfo(iterations=0, converged=False, last_change=float("inf"))
    for _ in range(cfg.max_iters):
        info.iterations += 1
        intra = [register(P, H, "intra", cfg, method).values for H in class_sequences]
        P_new = (1.0 - cfg.eta) * np.mean(intra, axis=0)
        if cfg.eta > 0:
            picks = [other_class_pools[c][rng.integers(len(other_class_pools[c]))] for c in other_ids]
            inter = [register(P, H, "inter", cfg, method).values for H in picks]
            P_new = P_new + cfg.eta * np.mean(inter, axis=0)
        change = float(((P_new - P) ** 2).sum())
        info.history.append(change)
        info.last_change = change
        if change <= cfg.zeta:
            info.converged = True
            break
        P = P_new
    return PhantomTemplate(class_id=class_id, atoms=P, T=T), info


def phantom_to_bytes(template: PhantomTemplate, cfg: RegistrationConfig) -> bytes:
    doc = {
        "format": "skelact-phantom",
        "version": 1,
        "class_id": template.class_id,
        "T": template.T,
        "config": {
            "delta": cfg.delta,
            "delta_prime": cfg.delta_prime,
            "eta": cfg.eta,
            "zeta": cfg.zeta,
            "max_iters": cfg.max_iters,
            "seed": cfg.seed,
        },
        "atoms": [[float(v) for v in row] for row in template.atoms],
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def phantom_from_bytes(data: bytes) -> tuple[PhantomTemplate, RegistrationConfig]:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("format") != "skelact-phantom":
        raise ValueError("not a skelact phantom file")
    atoms = np.array(doc["atoms"], dtype=np.float64)
    cfg = RegistrationConfig(**doc["config"])
    return PhantomTemplate(class_id=doc["class_id"], atoms=atoms, T=doc["T"]), cfg
