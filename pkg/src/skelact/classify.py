"""One-vs-all linear SVM on pyramid features.

Self-contained primal trainer: hinge loss with L2 regularization,
Pegasos-style 1/(reg*t) step schedule, unregularized bias. Features are
standardized per column before training (constant columns map to 0) and
the scaler travels with the model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .seeds import derive_seed


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray  # 0 for constant columns

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        safe = np.where(self.std > 0, self.std, 1.0)
        inv = np.where(self.std > 0, 1.0 / safe, 0.0)
        return (x - self.mean) * inv

    def inverse(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=np.float64) * self.std + self.mean

    @staticmethod
    def fit(X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        return Standardizer(mean=X.mean(axis=0), std=X.std(axis=0))


@dataclass
class SvmModel:
    weights: np.ndarray  # (l, D)
    biases: np.ndarray  # (l,)
    scaler: Standardizer
    regularization: float
    feature_dim: int
    class_count: int


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, reg: float) -> float:
    """reg/2 * ||w||^2 + mean hinge loss."""
    margins = y * (X @ w + b)
    return 0.5 * reg * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


def svm_train_binary(
    X: np.ndarray, y: np.ndarray, reg: float = 1e-4, epochs: int = 100, seed: int = 0
) -> tuple[np.ndarray, float]:
    """Train one binary classifier; y must contain both +1 and -1.

    The bias rides along as an augmented constant feature (so it shares the
    1/(reg*t) schedule and stays stable); with the small default reg its
    contribution to the penalty is negligible.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("labels must contain both classes")
    rng = np.random.default_rng(seed)
    n, d = X.shape
    Xa = np.concatenate([X, np.ones((n, 1))], axis=1)
    w = np.zeros(d + 1)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (reg * t)
            w *= 1.0 - eta * reg
            if y[i] * (Xa[i] @ w) < 1.0:
                w += eta * y[i] * Xa[i]
    return w[:-1].copy(), float(w[-1])


def svm_train_ova(
    features: np.ndarray,
    labels: np.ndarray,
    reg: float = 1e-4,
    epochs: int = 100,
    seed: int = 0,
) -> SvmModel:
    """One binary model per class (class k vs rest), on standardized columns."""
    X = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    classes = np.unique(labels)
    l = int(labels.max())
    present = set(classes.tolist())
    missing = [k for k in range(1, l + 1) if k not in present]
    if missing or l < 2:
        raise ValueError(f"classes absent from training data: {missing or 'need >= 2 classes'}")
    scaler = Standardizer.fit(X)
    Z = scaler.transform(X)
    weights = np.zeros((l, X.shape[1]))
    biases = np.zeros(l)
    for k in range(1, l + 1):
        y = np.where(labels == k, 1.0, -1.0)
        w, b = svm_train_binary(Z, y, reg, epochs, derive_seed(seed, "ova", k))
        weights[k - 1] = w
        biases[k - 1] = b
    return SvmModel(
        weights=weights,
        biases=biases,
        scaler=scaler,
        regularization=reg,
        feature_dim=X.shape[1],
        class_count=l,
    )


def svm_predict(model: SvmModel, feature_variants) -> tuple[int, np.ndarray]:
    """Predict from per-class feature variants (or one shared vector).

    Variant k feeds class k's binary model; the label is the 1-based
    argmax of decision scores, ties to the smallest class index.
    """
    variants = np.atleast_2d(np.asarray(feature_variants, dtype=np.float64))
    if variants.shape[0] == 1:
        variants = np.repeat(variants, model.class_count, axis=0)
    if variants.shape[0] != model.class_count:
        raise ValueError(f"need 1 or {model.class_count} feature variants, got {variants.shape[0]}")
    if variants.shape[1] != model.feature_dim:
        raise ValueError(f"feature dim {variants.shape[1]} != model dim {model.feature_dim}")
    Z = model.scaler.transform(variants)
    scores = np.einsum("kd,kd->k", model.weights, Z) + model.biases
    return int(np.argmax(scores)) + 1, scores


def svm_to_bytes(model: SvmModel) -> bytes:
    doc = {
        "format": "skelact-svm",
        "version": 1,
        "class_count": model.class_count,
        "feature_dim": model.feature_dim,
        "regularization": model.regularization,
        "scaler": {"mean": model.scaler.mean.tolist(), "std": model.scaler.std.tolist()},
        "weights": model.weights.tolist(),
        "biases": model.biases.tolist(),
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def svm_from_bytes(data: bytes) -> SvmModel:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("format") != "skelact-svm":
        raise ValueError("not a skelact svm file")
    return SvmModel(
        weights=np.asarray(doc["weights"], dtype=np.float64),
        biases=np.asarray(doc["biases"], dtype=np.float64),
        scaler=Standardizer(
            mean=np.asarray(doc["scaler"]["mean"], dtype=np.float64),
            std=np.asarray(doc["scaler"]["std"], dtype=np.float64),
        ),
        regularization=float(doc["regularization"]),
        feature_dim=int(doc["feature_dim"]),
        class_count=int(doc["class_count"]),
    )
