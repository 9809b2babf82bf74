"""Denoising autoencoder with privileged-information heads.

One layer encodes a (corrupted) frame vector and decodes three targets:
the clean frame, the action-category one-hot, and the temporal-chunk
one-hot. The weighted sum of the three squared-error terms, plus an
optional KL sparsity penalty on batch-mean activations, is minimized by
plain mini-batch SGD. Layers stack greedily (each trained on the previous
layer's clean activations, with its own heads and fresh corruption) and
the whole stack is then fine-tuned through the deep reconstruction path.

All activations are logistic sigmoids, so frame vectors are affinely
mapped into [0.1, 0.9] before training (ScaleMap); zero stays reserved as
the masking value, for both stochastic corruption and missing joints.
"""

from __future__ import annotations

import base64
import dataclasses
import json
from dataclasses import dataclass, replace

import numpy as np

from .preprocess import flatten_frame, unflatten_frame
from .seeds import derive_seed
from .skeleton_io import ActionSequence, SkeletonFrame

MODEL_FORMAT_VERSION = 1


def sigmoid(z: np.ndarray) -> np.ndarray:
    # two-branch form avoids exp overflow for large negative inputs
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ScaleMap:
    """Per-dimension affine map of raw inputs onto [0.1, 0.9].

    Constant dimensions map to 0.5 and invert back to their constant.
    """

    lo: np.ndarray
    hi: np.ndarray

    def forward(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        span = self.hi - self.lo
        out = np.full_like(v, 0.5)
        ok = span > 0
        out[..., ok] = 0.1 + 0.8 * (v[..., ok] - self.lo[ok]) / span[ok]
        return out

    def inverse(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        span = self.hi - self.lo
        out = np.broadcast_to(self.lo, s.shape).astype(np.float64).copy()
        ok = span > 0
        out[..., ok] = self.lo[ok] + (s[..., ok] - 0.1) * span[ok] / 0.8
        return out

    @staticmethod
    def fit(rows: np.ndarray, observed: np.ndarray | None = None) -> "ScaleMap":
        """Fit per-dimension bounds over observed entries.

        ``observed`` masks which entries count (missing joints excluded);
        dimensions with no observations become constant at 0.
        """
        rows = np.asarray(rows, dtype=np.float64)
        if observed is None:
            observed = np.ones(rows.shape, dtype=bool)
        d = rows.shape[1]
        lo = np.zeros(d)
        hi = np.zeros(d)
        for k in range(d):
            vals = rows[observed[:, k], k]
            if vals.size:
                lo[k] = vals.min()
                hi[k] = vals.max()
        return ScaleMap(lo, hi)


@dataclass
class DaeLayer:
    """Parameters of one constrained denoising autoencoder layer."""

    W_enc: np.ndarray  # (d', d)
    b_enc: np.ndarray  # (d',)
    W_dec_x: np.ndarray  # (d, d')
    o_dec_x: np.ndarray  # (d,)
    W_dec_c: np.ndarray  # (l, d')
    o_dec_c: np.ndarray  # (l,)
    W_dec_t: np.ndarray  # (chunks, d')
    o_dec_t: np.ndarray  # (chunks,)

    @property
    def input_dim(self) -> int:
        return self.W_enc.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.W_enc.shape[0]

    def copy(self) -> "DaeLayer":
        return DaeLayer(*(getattr(self, f.name).copy() for f in dataclasses.fields(self)))


_PARAM_NAMES = [f.name for f in dataclasses.fields(DaeLayer)]


@dataclass
class TrainConfig:
    """Hyperparameters of layer training.

    ``lam`` and ``beta`` weight the category and temporal constraint terms;
    ``rho`` is the sparsity target for batch-mean activations and
    ``sparsity_weight`` its penalty weight (the stack trainer applies it to
    the second layer only).
    """

    q: float = 0.1
    lam: float = 1.5
    beta: float = 1.5
    rho: float = 0.1
    sparsity_weight: float = 0.1
    learning_rate: float = 1.0
    batch_size: int = 8
    epochs: int = 200
    finetune_epochs: int = 50
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.lam < 0 or self.beta < 0 or self.sparsity_weight < 0:
            raise ValueError("constraint weights must be >= 0")
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ValueError("learning_rate must be > 0 and batch_size >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "TrainConfig":
        return TrainConfig(**d)


@dataclass
class Batch:
    """One training batch: clean inputs, corrupted inputs, targets."""

    x: np.ndarray  # (n, d)
    x_tilde: np.ndarray  # (n, d)
    c: np.ndarray  # (n, l)
    t: np.ndarray  # (n, chunks)


@dataclass
class FeatureSequence:
    """Per-frame top-layer activations of one sequence."""

    features: np.ndarray  # (T, d_top)
    label: int | None
    subject_id: int
    origin: str | None = None

    def __len__(self) -> int:
        return self.features.shape[0]


def init_layer(d: int, hidden_dim: int, category_count: int, chunk_count: int, rng: np.random.Generator) -> DaeLayer:
    """Fan-based symmetric uniform init for weights, zero offsets."""
    if hidden_dim < 1:
        raise ValueError("hidden_dim must be >= 1")

    def u(rows, cols):
        bound = np.sqrt(6.0 / (rows + cols))
        return rng.uniform(-bound, bound, size=(rows, cols))

    return DaeLayer(
        W_enc=u(hidden_dim, d),
        b_enc=np.zeros(hidden_dim),
        W_dec_x=u(d, hidden_dim),
        o_dec_x=np.zeros(d),
        W_dec_c=u(category_count, hidden_dim),
        o_dec_c=np.zeros(category_count),
        W_dec_t=u(chunk_count, hidden_dim),
        o_dec_t=np.zeros(chunk_count),
    )


def corrupt(x: np.ndarray, q: float, rng: np.random.Generator) -> np.ndarray:
    """Masking corruption: each coordinate zeroed independently with prob q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    mask = rng.random(x.shape) < q
    return np.where(mask, 0.0, x)


def forward(layer: DaeLayer, x_tilde: np.ndarray):
    """Encode a batch and decode all three heads.

    Returns (h, r_x, r_c, r_t); accepts a single vector or an (n, d) batch.
    """
    x_tilde = np.atleast_2d(np.asarray(x_tilde, dtype=np.float64))
    if x_tilde.shape[1] != layer.input_dim:
        raise ValueError(f"input dim {x_tilde.shape[1]} != layer dim {layer.input_dim}")
    h = sigmoid(x_tilde @ layer.W_enc.T + layer.b_enc)
    r_x = sigmoid(h @ layer.W_dec_x.T + layer.o_dec_x)
    r_c = sigmoid(h @ layer.W_dec_c.T + layer.o_dec_c)
    r_t = sigmoid(h @ layer.W_dec_t.T + layer.o_dec_t)
    return h, r_x, r_c, r_t


def _kl_terms(h: np.ndarray, rho: float):
    hbar = np.clip(h.mean(axis=0), 1e-12, 1.0 - 1e-12)
    kl = rho * np.log(rho / hbar) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - hbar))
    return hbar, float(kl.sum())


def loss(batch: Batch, layer: DaeLayer, cfg: TrainConfig) -> float:
    """Mean constrained reconstruction loss over a batch (plus sparsity).

    With lam = beta = sparsity_weight = 0 this is exactly the plain
    denoising-autoencoder empirical loss (identical code path, the
    constraint terms are skipped, not multiplied by zero).
    """
    if batch.x.shape[0] == 0:
        raise ValueError("empty batch")
    h, r_x, r_c, r_t = forward(layer, batch.x_tilde)
    per = ((batch.x - r_x) ** 2).sum(axis=1)
    if cfg.lam != 0.0:
        per = per + cfg.lam * ((batch.c - r_c) ** 2).sum(axis=1)
    if cfg.beta != 0.0:
        per = per + cfg.beta * ((batch.t - r_t) ** 2).sum(axis=1)
    total = float(per.mean())
    if cfg.sparsity_weight != 0.0:
        _, kl = _kl_terms(h, cfg.rho)
        total += cfg.sparsity_weight * kl
    return total


def plain_dae_loss(batch: Batch, layer: DaeLayer) -> float:
    """Unconstrained empirical DAE loss: mean squared reconstruction error."""
    _, r_x, _, _ = forward(layer, batch.x_tilde)
    return float(((batch.x - r_x) ** 2).sum(axis=1).mean())


@dataclass
class LayerGrads:
    W_enc: np.ndarray
    b_enc: np.ndarray
    W_dec_x: np.ndarray
    o_dec_x: np.ndarray
    W_dec_c: np.ndarray
    o_dec_c: np.ndarray
    W_dec_t: np.ndarray
    o_dec_t: np.ndarray


def loss_and_gradients(batch: Batch, layer: DaeLayer, cfg: TrainConfig) -> tuple[float, LayerGrads]:
    """Loss together with its exact analytic gradients for every parameter."""
    n = batch.x.shape[0]
    if n == 0:
        raise ValueError("empty batch")
    x_tilde = np.atleast_2d(batch.x_tilde)
    h, r_x, r_c, r_t = forward(layer, x_tilde)

    per = ((batch.x - r_x) ** 2).sum(axis=1)
    delta_x = (2.0 / n) * (r_x - batch.x) * r_x * (1.0 - r_x)
    g_h = delta_x @ layer.W_dec_x

    if cfg.lam != 0.0:
        per = per + cfg.lam * ((batch.c - r_c) ** 2).sum(axis=1)
        delta_c = (2.0 * cfg.lam / n) * (r_c - batch.c) * r_c * (1.0 - r_c)
        g_h = g_h + delta_c @ layer.W_dec_c
    else:
        delta_c = np.zeros_like(r_c)
    if cfg.beta != 0.0:
        per = per + cfg.beta * ((batch.t - r_t) ** 2).sum(axis=1)
        delta_t = (2.0 * cfg.beta / n) * (r_t - batch.t) * r_t * (1.0 - r_t)
        g_h = g_h + delta_t @ layer.W_dec_t
    else:
        delta_t = np.zeros_like(r_t)

    total = float(per.mean())
    if cfg.sparsity_weight != 0.0:
        hbar, kl = _kl_terms(h, cfg.rho)
        total += cfg.sparsity_weight * kl
        g_h = g_h + (cfg.sparsity_weight / n) * (-cfg.rho / hbar + (1.0 - cfg.rho) / (1.0 - hbar))

    delta_h = g_h * h * (1.0 - h)
    grads = LayerGrads(
        W_enc=delta_h.T @ x_tilde,
        b_enc=delta_h.sum(axis=0),
        W_dec_x=delta_x.T @ h,
        o_dec_x=delta_x.sum(axis=0),
        W_dec_c=delta_c.T @ h,
        o_dec_c=delta_c.sum(axis=0),
        W_dec_t=delta_t.T @ h,
        o_dec_t=delta_t.sum(axis=0),
    )
    return total, grads


def gradients(batch: Batch, layer: DaeLayer, cfg: TrainConfig) -> LayerGrads:
    return loss_and_gradients(batch, layer, cfg)[1]


def _sgd_step(layer: DaeLayer, grads: LayerGrads, lr: float) -> None:
    for name in _PARAM_NAMES:
        getattr(layer, name)[...] -= lr * getattr(grads, name)


def train_layer(
    X: np.ndarray,
    C: np.ndarray,
    T: np.ndarray,
    hidden_dim: int,
    cfg: TrainConfig,
) -> tuple[DaeLayer, list[float]]:
    """Train one layer by mini-batch SGD with fresh corruption per pass.

    Deterministic given cfg.seed: one generator drives init, shuffling, and
    corruption in a fixed order. Returns the layer and per-epoch mean
    losses. epochs=0 returns the freshly initialized layer.
    """
    cfg.validate()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty (n, d) matrix")
    rng = np.random.default_rng(cfg.seed)
    layer = init_layer(X.shape[1], hidden_dim, C.shape[1], T.shape[1], rng)
    n = X.shape[0]
    history: list[float] = []
    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate / (1.0 + epoch / 50.0)
        perm = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            xb = X[idx]
            batch = Batch(x=xb, x_tilde=corrupt(xb, cfg.q, rng), c=C[idx], t=T[idx])
            value, grads = loss_and_gradients(batch, layer, cfg)
            _sgd_step(layer, grads, lr)
            epoch_losses.append(value)
        history.append(float(np.mean(epoch_losses)))
    return layer, history


@dataclass
class StackedModel:
    """A trained stack of layers plus the input scaling used to train it."""

    layers: list[DaeLayer]
    scale_map: ScaleMap | None
    input_dim: int
    category_count: int
    chunk_count: int
    train_config: TrainConfig | None = None

    @property
    def feature_dim(self) -> int:
        return self.layers[-1].hidden_dim


def encode(model: StackedModel, X: np.ndarray) -> np.ndarray:
    """Clean encoding through all layers (no corruption)."""
    h = np.atleast_2d(np.asarray(X, dtype=np.float64))
    for layer in model.layers:
        h = sigmoid(h @ layer.W_enc.T + layer.b_enc)
    return h


def decode(model: StackedModel, h_top: np.ndarray) -> np.ndarray:
    """Skeleton-head decoding in reverse layer order back to input space."""
    r = np.atleast_2d(np.asarray(h_top, dtype=np.float64))
    for layer in reversed(model.layers):
        r = sigmoid(r @ layer.W_dec_x.T + layer.o_dec_x)
    return r


def _finetune_loss_and_grads(model: StackedModel, batch_x, batch_c, batch_t, cfg: TrainConfig,
                             batch_x_tilde=None):
    """Loss/grads of the deep reconstruction path plus top-layer c/t heads.

    ``batch_x_tilde`` is the (corrupted) encoder input; targets are always
    the clean ``batch_x``. Defaults to the clean input.
    """
    layers = model.layers
    K = len(layers)
    hs = [np.atleast_2d(batch_x if batch_x_tilde is None else batch_x_tilde)]
    for layer in layers:
        hs.append(sigmoid(hs[-1] @ layer.W_enc.T + layer.b_enc))
    h_top = hs[-1]
    n = hs[0].shape[0]

    # decoder chain: d_vals[k] reconstructs layer k's input space
    d_vals = [None] * (K + 1)
    d_vals[K] = sigmoid(h_top @ layers[K - 1].W_dec_x.T + layers[K - 1].o_dec_x)
    for k in range(K - 1, 0, -1):
        d_vals[k] = sigmoid(d_vals[k + 1] @ layers[k - 1].W_dec_x.T + layers[k - 1].o_dec_x)
    recon = d_vals[1]

    top = layers[-1]
    r_c = sigmoid(h_top @ top.W_dec_c.T + top.o_dec_c)
    r_t = sigmoid(h_top @ top.W_dec_t.T + top.o_dec_t)

    total = float(((batch_x - recon) ** 2).sum(axis=1).mean())
    if cfg.lam != 0.0:
        total += cfg.lam * float(((batch_c - r_c) ** 2).sum(axis=1).mean())
    if cfg.beta != 0.0:
        total += cfg.beta * float(((batch_t - r_t) ** 2).sum(axis=1).mean())

    grads = [
        LayerGrads(**{name: np.zeros_like(getattr(layer, name)) for name in _PARAM_NAMES})
        for layer in layers
    ]

    # decoder-side backprop; decoder input of layer k-1 is d_vals[k+1] (or h_top)
    delta = (2.0 / n) * (recon - batch_x) * recon * (1.0 - recon)
    for k in range(1, K + 1):
        dec_in = h_top if k == K else d_vals[k + 1]
        grads[k - 1].W_dec_x += delta.T @ dec_in
        grads[k - 1].o_dec_x += delta.sum(axis=0)
        g_in = delta @ layers[k - 1].W_dec_x
        if k == K:
            g_h_top = g_in
        else:
            delta = g_in * d_vals[k + 1] * (1.0 - d_vals[k + 1])

    if cfg.lam != 0.0:
        delta_c = (2.0 * cfg.lam / n) * (r_c - batch_c) * r_c * (1.0 - r_c)
        grads[-1].W_dec_c += delta_c.T @ h_top
        grads[-1].o_dec_c += delta_c.sum(axis=0)
        g_h_top = g_h_top + delta_c @ top.W_dec_c
    if cfg.beta != 0.0:
        delta_t = (2.0 * cfg.beta / n) * (r_t - batch_t) * r_t * (1.0 - r_t)
        grads[-1].W_dec_t += delta_t.T @ h_top
        grads[-1].o_dec_t += delta_t.sum(axis=0)
        g_h_top = g_h_top + delta_t @ top.W_dec_t

    # encoder-side backprop
    g = g_h_top
    for k in range(K, 0, -1):
        delta_h = g * hs[k] * (1.0 - hs[k])
        grads[k - 1].W_enc += delta_h.T @ hs[k - 1]
        grads[k - 1].b_enc += delta_h.sum(axis=0)
        g = delta_h @ layers[k - 1].W_enc
    return total, grads


def finetune(model: StackedModel, X, C, T, cfg: TrainConfig) -> list[float]:
    """Joint fine-tuning at a tenth of the layer-wise rate.

    Inputs stay corrupted (fresh masking per presentation, clean targets);
    fine-tuning on clean inputs was observed to unlearn the denoising
    behavior the greedy phase establishes.
    """
    rng = np.random.default_rng(derive_seed(cfg.seed, "finetune"))
    n = X.shape[0]
    history = []
    for epoch in range(cfg.finetune_epochs):
        lr = (cfg.learning_rate / 10.0) / (1.0 + epoch / 50.0)
        perm = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            value, grads = _finetune_loss_and_grads(
                model, X[idx], C[idx], T[idx], cfg, corrupt(X[idx], cfg.q, rng)
            )
            for layer, g in zip(model.layers, grads):
                _sgd_step(layer, g, lr)
            epoch_losses.append(value)
        history.append(float(np.mean(epoch_losses)))
    return history


def train_stack(
    X: np.ndarray,
    C: np.ndarray,
    T: np.ndarray,
    hidden_sizes: list[int],
    cfg: TrainConfig,
    scale_map: ScaleMap | None = None,
) -> StackedModel:
    """Greedy layer-wise training followed by joint fine-tuning.

    Layer k+1 trains on layer k's clean activations with corruption applied
    at its own input; every layer keeps its own constraint heads against
    the same targets. The sparsity penalty applies to the second layer
    only. finetune_epochs=0 leaves the greedy layers untouched.
    """
    if not hidden_sizes:
        raise ValueError("hidden_sizes must be non-empty")
    cfg.validate()
    X = np.asarray(X, dtype=np.float64)
    layers = []
    current = X
    for k, width in enumerate(hidden_sizes):
        layer_cfg = replace(
            cfg,
            sparsity_weight=cfg.sparsity_weight if k == 1 else 0.0,
            seed=derive_seed(cfg.seed, "layer", k),
        )
        layer, _ = train_layer(current, C, T, width, layer_cfg)
        layers.append(layer)
        current = sigmoid(current @ layer.W_enc.T + layer.b_enc)
    model = StackedModel(
        layers=layers,
        scale_map=scale_map,
        input_dim=X.shape[1],
        category_count=C.shape[1],
        chunk_count=T.shape[1],
        train_config=cfg,
    )
    if cfg.finetune_epochs > 0:
        finetune(model, X, C, T, cfg)
    return model


def frame_to_input(frame: SkeletonFrame, scale_map: ScaleMap) -> np.ndarray:
    """Scaled input vector of one frame; missing joints stay exactly 0."""
    v = scale_map.forward(flatten_frame(frame))
    v[np.repeat(frame.missing, 3)] = 0.0
    return v


def sequence_inputs(sequence: ActionSequence, scale_map: ScaleMap) -> np.ndarray:
    return np.stack([frame_to_input(f, scale_map) for f in sequence.frames])


def encode_sequence(model: StackedModel, sequence: ActionSequence) -> FeatureSequence:
    """Top-layer features per frame; encoding is clean and pure."""
    if model.scale_map is None:
        raise ValueError("model has no scale map; cannot encode raw sequences")
    feats = encode(model, sequence_inputs(sequence, model.scale_map))
    return FeatureSequence(
        features=feats,
        label=sequence.label,
        subject_id=sequence.subject_id,
        origin=sequence.origin,
    )


def restore_sequence(model: StackedModel, sequence: ActionSequence) -> ActionSequence:
    """Map each frame through the full encode/decode chain back to joints."""
    if model.scale_map is None:
        raise ValueError("model has no scale map; cannot restore raw sequences")
    inputs = sequence_inputs(sequence, model.scale_map)
    restored = model.scale_map.inverse(decode(model, encode(model, inputs)))
    frames = [
        unflatten_frame(restored[i], sequence.frames[i].timestamp_index)
        for i in range(restored.shape[0])
    ]
    return ActionSequence(
        frames=frames,
        label=sequence.label,
        subject_id=sequence.subject_id,
        instance_id=sequence.instance_id,
        origin=sequence.origin,
    )


def _arr_to_b64(a: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(a, dtype="<f8").tobytes()).decode("ascii")


def _arr_from_b64(s: str, shape) -> np.ndarray:
    return np.frombuffer(base64.b64decode(s), dtype="<f8").reshape(shape).copy()


def model_to_bytes(model: StackedModel) -> bytes:
    """Self-describing, byte-stable JSON serialization of a trained stack."""
    doc = {
        "format": "skelact-model",
        "version": MODEL_FORMAT_VERSION,
        "input_dim": model.input_dim,
        "category_count": model.category_count,
        "chunk_count": model.chunk_count,
        "hidden_sizes": [layer.hidden_dim for layer in model.layers],
        "scale_map": None
        if model.scale_map is None
        else {"lo": _arr_to_b64(model.scale_map.lo), "hi": _arr_to_b64(model.scale_map.hi)},
        "train_config": None if model.train_config is None else model.train_config.to_dict(),
        "layers": [
            {name: {"shape": list(getattr(layer, name).shape), "data": _arr_to_b64(getattr(layer, name))}
             for name in _PARAM_NAMES}
            for layer in model.layers
        ],
    }
    return json.dumps(doc, indent=None, separators=(",", ":")).encode("utf-8")


def model_from_bytes(data: bytes) -> StackedModel:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("format") != "skelact-model":
        raise ValueError("not a skelact model file")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')}")
    layers = []
    for spec in doc["layers"]:
        fields = {name: _arr_from_b64(spec[name]["data"], spec[name]["shape"]) for name in _PARAM_NAMES}
        layers.append(DaeLayer(**fields))
    scale_map = None
    if doc["scale_map"] is not None:
        d = doc["input_dim"]
        scale_map = ScaleMap(
            lo=_arr_from_b64(doc["scale_map"]["lo"], (d,)),
            hi=_arr_from_b64(doc["scale_map"]["hi"], (d,)),
        )
    cfg = None if doc["train_config"] is None else TrainConfig.from_dict(doc["train_config"])
    return StackedModel(
        layers=layers,
        scale_map=scale_map,
        input_dim=doc["input_dim"],
        category_count=doc["category_count"],
        chunk_count=doc["chunk_count"],
        train_config=cfg,
    )


def save_model(model: StackedModel, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def load_model(path: str) -> StackedModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())
