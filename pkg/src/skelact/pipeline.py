"""End-to-end orchestration: protocols, per-fold training, reports.

A fold runs the full chain: normalize skeletons, fit the input scaling on
the training split, train the stacked autoencoder (unless the raw-joint
baseline is selected), encode everything, fit per-class phantom templates
on training features, register + pyramid + train the one-vs-all SVM, then
classify each test sequence from its per-phantom registered variants.

Training entry points only ever see train-tagged sequences; every stage
asserts this, so a test sequence reaching a trainer is a hard error, not a
silent leak.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import classify, dae, ftp, registration
from .preprocess import (
    NormalizationConfig,
    NormalizationError,
    normalize_sequence,
    one_hot_category,
    select_reference_frame,
    temporal_chunk_vector,
)
from .seeds import derive_seed
from .skeleton_io import ActionSequence, DatasetMeta, SkeletonFrame

VARIANTS = ("dae", "dae_cc", "dae_tc", "dae_ctc", "jp")
REGISTRATION_METHODS = ("lwsr", "dtw", "none")


class PipelineError(RuntimeError):
    """A fold cannot be trained or evaluated as configured."""


@dataclass
class ProtocolSpec:
    """Evaluation protocol: how subjects split into train/test folds."""

    kind: str = "leave_one_subject_out"
    train_subjects: tuple[int, ...] = ()
    subset_definition: list[list[int]] | None = None
    seed: int = 0
    resubstitution: bool = False

    def validate(self) -> None:
        if self.kind not in ("cross_subject", "half_subjects", "leave_one_subject_out"):
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if self.kind == "cross_subject" and not self.train_subjects and not self.resubstitution:
            raise ValueError("cross_subject protocol needs train_subjects")


@dataclass
class PipelineConfig:
    """Everything a run needs besides the data; one section per stage."""

    seed: int = 0
    variant: str = "dae_ctc"
    registration_method: str = "lwsr"
    target_length: int = 70
    chunk_count: int = 7
    hidden_sizes: tuple[int, ...] = (30, 60)
    parents: tuple[int, ...] | None = None
    train: dae.TrainConfig = field(default_factory=dae.TrainConfig)
    reg: registration.RegistrationConfig | None = None
    ftp: ftp.FtpConfig = field(default_factory=ftp.FtpConfig)
    svm_regularization: float = 1e-4
    svm_epochs: int = 100

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.registration_method not in REGISTRATION_METHODS:
            raise ValueError(f"unknown registration method {self.registration_method!r}")
        self.train.validate()

    def resolved_reg(self) -> registration.RegistrationConfig:
        if self.reg is not None:
            return self.reg
        r = registration.default_window_radius(self.target_length, self.chunk_count)
        return registration.RegistrationConfig(delta=r, delta_prime=r)

    def snapshot(self) -> dict:
        reg = self.resolved_reg()
        return {
            "seed": self.seed,
            "variant": self.variant,
            "registration_method": self.registration_method,
            "target_length": self.target_length,
            "chunk_count": self.chunk_count,
            "hidden_sizes": list(self.hidden_sizes),
            "parents": None if self.parents is None else list(self.parents),
            "train": self.train.to_dict(),
            "registration": {
                "delta": reg.delta,
                "delta_prime": reg.delta_prime,
                "eta": reg.eta,
                "zeta": reg.zeta,
                "max_iters": reg.max_iters,
            },
            "ftp": {
                "levels": self.ftp.levels,
                "segments_per_level": list(self.ftp.segments_per_level),
                "coeffs_per_segment": self.ftp.coeffs_per_segment,
            },
            "svm": {"regularization": self.svm_regularization, "epochs": self.svm_epochs},
        }


def variant_train_config(cfg: dae.TrainConfig, variant: str) -> dae.TrainConfig:
    """Ablation switches: zero out the constraint weights the variant drops."""
    if variant == "dae":
        return replace(cfg, lam=0.0, beta=0.0)
    if variant == "dae_cc":
        return replace(cfg, beta=0.0)
    if variant == "dae_tc":
        return replace(cfg, lam=0.0)
    if variant in ("dae_ctc", "jp"):
        return cfg
    raise ValueError(f"unknown variant {variant!r}")


@dataclass
class RunReport:
    class_ids: list[int]
    class_names: list[str]
    confusion: np.ndarray  # (l, l) ints, rows = true class
    accuracy: float
    per_class_precision: list[float]
    per_class_recall: list[float]
    fold_count: int
    excluded: int
    per_subset_accuracy: dict[str, float] | None
    config_snapshot: dict
    timings: dict[str, float]


def _metrics(confusion: np.ndarray):
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total) if total else 0.0
    col = confusion.sum(axis=0)
    row = confusion.sum(axis=1)
    diag = np.diag(confusion)
    precision = [float(diag[k] / col[k]) if col[k] else 0.0 for k in range(len(diag))]
    recall = [float(diag[k] / row[k]) if row[k] else 0.0 for k in range(len(diag))]
    return accuracy, precision, recall


def split_protocol(dataset: list[ActionSequence], spec: ProtocolSpec):
    """Folds of (train, test) sequence lists for the requested protocol."""
    spec.validate()
    if spec.resubstitution:
        return [(list(dataset), list(dataset))]
    subjects = sorted({s.subject_id for s in dataset})
    if spec.kind == "cross_subject":
        wanted = set(spec.train_subjects)
        unknown = wanted - set(subjects)
        if unknown:
            raise ValueError(f"unknown subjects in protocol: {sorted(unknown)}")
        train = [s for s in dataset if s.subject_id in wanted]
        test = [s for s in dataset if s.subject_id not in wanted]
        return [(train, test)]
    if spec.kind == "half_subjects":
        rng = np.random.default_rng(spec.seed)
        k = math.ceil(len(subjects) / 2)
        picked = set(rng.choice(subjects, size=k, replace=False).tolist())
        train = [s for s in dataset if s.subject_id in picked]
        test = [s for s in dataset if s.subject_id not in picked]
        return [(train, test)]
    folds = []
    for subj in subjects:
        train = [s for s in dataset if s.subject_id != subj]
        test = [s for s in dataset if s.subject_id == subj]
        folds.append((train, test))
    return folds


def _assert_trainable(seqs) -> None:
    for s in seqs:
        if getattr(s, "origin", None) == "test":
            raise PipelineError("test-tagged sequence reached a training entry point")


class _Timer:
    def __init__(self):
        self.acc: dict[str, float] = {}

    def add(self, key: str, t0: float) -> float:
        now = time.perf_counter()
        self.acc[key] = self.acc.get(key, 0.0) + (now - t0)
        return now


def _normalize_split(seqs, cfg, origin):
    out, dropped = [], 0
    for s in seqs:
        try:
            out.append(normalize_sequence(replace(s, origin=origin), cfg))
        except (NormalizationError, ValueError):
            dropped += 1
    return out, dropped


def _training_arrays(train_norm, scale_map, l, T, chunk_count):
    _assert_trainable(train_norm)
    xs, cs, ts = [], [], []
    chunk_rows = np.stack([temporal_chunk_vector(i, T, chunk_count) for i in range(T)])
    for seq in train_norm:
        xs.append(dae.sequence_inputs(seq, scale_map))
        cs.append(np.tile(one_hot_category(seq.label, l), (T, 1)))
        ts.append(chunk_rows)
    return np.concatenate(xs), np.concatenate(cs), np.concatenate(ts)


@dataclass
class FoldArtifacts:
    model: dae.StackedModel | None
    phantoms: dict[int, registration.PhantomTemplate]
    svm: classify.SvmModel
    norm_cfg: NormalizationConfig
    scale_map: dae.ScaleMap


def _encode_split(model, seqs, scale_map):
    if model is None:  # raw-joint baseline: scaled flattened frames are the features
        return [
            dae.FeatureSequence(
                features=dae.sequence_inputs(s, scale_map),
                label=s.label,
                subject_id=s.subject_id,
                origin=s.origin,
            )
            for s in seqs
        ]
    return [dae.encode_sequence(model, s) for s in seqs]


def run_fold(
    train_seqs: list[ActionSequence],
    test_seqs: list[ActionSequence],
    meta: DatasetMeta,
    config: PipelineConfig,
    fold_seed: int,
    timer: _Timer | None = None,
):
    """Train on one fold and score its test split.

    Returns (confusion, excluded_count, FoldArtifacts).
    """
    timer = timer or _Timer()
    l = meta.category_count
    T = config.target_length
    if config.parents is None:
        raise PipelineError("pipeline needs a joint parent map (config.parents)")

    t0 = time.perf_counter()
    base_cfg = NormalizationConfig(
        hip_joint_index=meta.hip_joint_index,
        left_hip_index=meta.left_hip_index,
        right_hip_index=meta.right_hip_index,
        parents=tuple(config.parents),
        reference_skeleton=None,
        target_length=T,
        chunk_count=config.chunk_count,
    )
    if not train_seqs:
        raise PipelineError("fold has no training sequences")
    norm_cfg = replace(base_cfg, reference_skeleton=select_reference_frame(train_seqs, base_cfg))
    train_norm, dropped_train = _normalize_split(train_seqs, norm_cfg, "train")
    test_norm, dropped_test = _normalize_split(test_seqs, norm_cfg, "test")
    excluded = dropped_train + dropped_test

    present = sorted({s.label for s in train_norm})
    missing = [k for k in range(1, l + 1) if k not in present]
    if missing:
        raise PipelineError(f"untrainable fold: no training sequences for class(es) {missing}")

    _assert_trainable(train_norm)
    rows = np.concatenate([np.stack([f.coords.reshape(-1) for f in s.frames]) for s in train_norm])
    observed = np.concatenate(
        [np.stack([~np.repeat(f.missing, 3) for f in s.frames]) for s in train_norm]
    )
    scale_map = dae.ScaleMap.fit(rows, observed)
    t0 = timer.add("preprocess", t0)

    model = None
    if config.variant != "jp":
        X, C, Tt = _training_arrays(train_norm, scale_map, l, T, config.chunk_count)
        train_cfg = replace(
            variant_train_config(config.train, config.variant),
            seed=derive_seed(fold_seed, "dae"),
        )
        model = dae.train_stack(X, C, Tt, list(config.hidden_sizes), train_cfg, scale_map)
    t0 = timer.add("dae_train", t0)

    train_feats = _encode_split(model, train_norm, scale_map)
    test_feats = _encode_split(model, test_norm, scale_map)
    t0 = timer.add("encode", t0)

    reg_base = config.resolved_reg()
    method = config.registration_method
    phantoms: dict[int, registration.PhantomTemplate] = {}
    if method != "none":
        by_class = {k: [f for f in train_feats if f.label == k] for k in range(1, l + 1)}
        for k in range(1, l + 1):
            _assert_trainable(by_class[k])
            pools = {c: by_class[c] for c in range(1, l + 1) if c != k}
            reg_cfg = replace(reg_base, seed=derive_seed(fold_seed, "phantom", k))
            phantoms[k], _ = registration.compute_phantom(k, by_class[k], pools, reg_cfg, method)
    t0 = timer.add("phantoms", t0)

    _assert_trainable(train_feats)
    feat_rows, labels = [], []
    for f in train_feats:
        warped = registration.register(phantoms.get(f.label), f, "intra", reg_base, method)
        feat_rows.append(ftp.ftp_features(warped, config.ftp).values)
        labels.append(f.label)
    svm_model = classify.svm_train_ova(
        np.stack(feat_rows),
        np.asarray(labels),
        reg=config.svm_regularization,
        epochs=config.svm_epochs,
        seed=derive_seed(fold_seed, "svm"),
    )
    t0 = timer.add("svm_train", t0)

    confusion = np.zeros((l, l), dtype=np.int64)
    for f in test_feats:
        if method == "none":
            variants = ftp.ftp_features(
                registration.register(None, f, "intra", reg_base, method), config.ftp
            ).values
        else:
            variants = np.stack(
                [
                    ftp.ftp_features(
                        registration.register(phantoms[k], f, "intra", reg_base, method), config.ftp
                    ).values
                    for k in range(1, l + 1)
                ]
            )
        pred, _ = classify.svm_predict(svm_model, variants)
        confusion[f.label - 1, pred - 1] += 1
    timer.add("test", t0)

    artifacts = FoldArtifacts(
        model=model, phantoms=phantoms, svm=svm_model, norm_cfg=norm_cfg, scale_map=scale_map
    )
    return confusion, excluded, artifacts


def _save_fold_artifacts(outdir: str, artifacts: FoldArtifacts, config: PipelineConfig) -> None:
    os.makedirs(outdir, exist_ok=True)
    if artifacts.model is not None:
        dae.save_model(artifacts.model, os.path.join(outdir, "model.json"))
    else:
        # raw-joint baseline still needs the input scaling at eval time
        sm = artifacts.scale_map
        with open(os.path.join(outdir, "scale_map.json"), "w", encoding="utf-8") as fh:
            json.dump({"lo": sm.lo.tolist(), "hi": sm.hi.tolist()}, fh)
    reg = config.resolved_reg()
    for k, template in sorted(artifacts.phantoms.items()):
        with open(os.path.join(outdir, f"phantom_{k:02d}.json"), "wb") as fh:
            fh.write(registration.phantom_to_bytes(template, reg))
    with open(os.path.join(outdir, "svm.json"), "wb") as fh:
        fh.write(classify.svm_to_bytes(artifacts.svm))
    ref = artifacts.norm_cfg.reference_skeleton
    fold_cfg = {
        "variant": config.variant,
        "registration_method": config.registration_method,
        "preprocess": {
            "hip_joint_index": artifacts.norm_cfg.hip_joint_index,
            "left_hip_index": artifacts.norm_cfg.left_hip_index,
            "right_hip_index": artifacts.norm_cfg.right_hip_index,
            "parents": list(artifacts.norm_cfg.parents),
            "target_length": artifacts.norm_cfg.target_length,
            "chunk_count": artifacts.norm_cfg.chunk_count,
            "reference_coords": ref.coords.tolist() if ref is not None else None,
        },
        "registration": {
            "delta": reg.delta,
            "delta_prime": reg.delta_prime,
            "eta": reg.eta,
            "zeta": reg.zeta,
            "max_iters": reg.max_iters,
            "seed": reg.seed,
        },
        "ftp": {
            "levels": config.ftp.levels,
            "segments_per_level": list(config.ftp.segments_per_level),
            "coeffs_per_segment": config.ftp.coeffs_per_segment,
        },
    }
    with open(os.path.join(outdir, "fold_config.json"), "w", encoding="utf-8") as fh:
        json.dump(fold_cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_fold_artifacts(outdir: str):
    """Reload a fold's artifacts for test-only evaluation.

    Returns (model or None, scale_map, phantoms, svm, norm_cfg, fold_cfg).
    """
    with open(os.path.join(outdir, "fold_config.json"), "r", encoding="utf-8") as fh:
        fold_cfg = json.load(fh)
    model = None
    model_path = os.path.join(outdir, "model.json")
    if os.path.exists(model_path):
        model = dae.load_model(model_path)
        scale_map = model.scale_map
    else:
        with open(os.path.join(outdir, "scale_map.json"), "r", encoding="utf-8") as fh:
            sm = json.load(fh)
        scale_map = dae.ScaleMap(lo=np.asarray(sm["lo"]), hi=np.asarray(sm["hi"]))
    phantoms = {}
    for name in sorted(os.listdir(outdir)):
        if name.startswith("phantom_") and name.endswith(".json"):
            with open(os.path.join(outdir, name), "rb") as fh:
                template, _ = registration.phantom_from_bytes(fh.read())
            phantoms[template.class_id] = template
    with open(os.path.join(outdir, "svm.json"), "rb") as fh:
        svm_model = classify.svm_from_bytes(fh.read())
    prep = fold_cfg["preprocess"]
    ref = None
    if prep["reference_coords"] is not None:
        coords = np.asarray(prep["reference_coords"], dtype=np.float64)
        ref = SkeletonFrame(coords, np.zeros(coords.shape[0], dtype=bool), None, 0)
    norm_cfg = NormalizationConfig(
        hip_joint_index=prep["hip_joint_index"],
        left_hip_index=prep["left_hip_index"],
        right_hip_index=prep["right_hip_index"],
        parents=tuple(prep["parents"]),
        reference_skeleton=ref,
        target_length=prep["target_length"],
        chunk_count=prep["chunk_count"],
    )
    return model, scale_map, phantoms, svm_model, norm_cfg, fold_cfg


def run_pipeline(
    dataset: list[ActionSequence],
    meta: DatasetMeta,
    protocol: ProtocolSpec,
    config: PipelineConfig,
    artifact_dir: str | None = None,
) -> RunReport:
    """Run every fold of the protocol and aggregate one report.

    With subset definitions (e.g. MSR AS1/AS2/AS3) each subset runs its
    folds on remapped labels; the aggregate confusion is reported in
    original class ids and per-subset accuracies are listed separately.
    """
    config.validate()
    protocol.validate()
    l = meta.category_count
    subsets = protocol.subset_definition or [list(range(1, l + 1))]
    timer = _Timer()
    overall = np.zeros((l, l), dtype=np.int64)
    per_subset: dict[str, float] = {}
    fold_count = 0
    excluded = 0

    for si, subset in enumerate(subsets):
        subset_sorted = sorted(subset)
        label_map = {orig: i + 1 for i, orig in enumerate(subset_sorted)}
        sub_data = [replace(s, label=label_map[s.label]) for s in dataset if s.label in label_map]
        if not sub_data:
            raise PipelineError(f"subset {si + 1} matches no sequences")
        sub_meta = dataclasses.replace(meta, category_count=len(subset_sorted))
        sub_conf = np.zeros((len(subset_sorted), len(subset_sorted)), dtype=np.int64)
        for fi, (train, test) in enumerate(split_protocol(sub_data, protocol)):
            conf, dropped, artifacts = run_fold(
                train, test, sub_meta, config, derive_seed(config.seed, "subset", si, "fold", fi), timer
            )
            sub_conf += conf
            excluded += dropped
            fold_count += 1
            if artifact_dir is not None:
                sub_dir = os.path.join(artifact_dir, f"subset_{si + 1:02d}", f"fold_{fi + 1:02d}") \
                    if protocol.subset_definition else os.path.join(artifact_dir, f"fold_{fi + 1:02d}")
                _save_fold_artifacts(sub_dir, artifacts, config)
        for a, orig_a in enumerate(subset_sorted):
            for b, orig_b in enumerate(subset_sorted):
                overall[orig_a - 1, orig_b - 1] += sub_conf[a, b]
        if protocol.subset_definition:
            acc = float(np.trace(sub_conf) / sub_conf.sum()) if sub_conf.sum() else 0.0
            per_subset[f"subset_{si + 1}"] = acc

    accuracy, precision, recall = _metrics(overall)
    names = meta.category_names or [f"class_{k}" for k in range(1, l + 1)]
    return RunReport(
        class_ids=list(range(1, l + 1)),
        class_names=list(names),
        confusion=overall,
        accuracy=accuracy,
        per_class_precision=precision,
        per_class_recall=recall,
        fold_count=fold_count,
        excluded=excluded,
        per_subset_accuracy=per_subset or None,
        config_snapshot=config.snapshot(),
        timings=dict(timer.acc),
    )


def emit_report(report: RunReport, fmt: str = "json", include_timings: bool = True) -> bytes:
    """Render a report as JSON (round-trippable) or CSV (for spreadsheets)."""
    if fmt == "json":
        doc = {
            "format": "skelact-report",
            "version": 1,
            "accuracy": report.accuracy,
            "fold_count": report.fold_count,
            "excluded": report.excluded,
            "class_ids": report.class_ids,
            "class_names": report.class_names,
            "per_class_precision": report.per_class_precision,
            "per_class_recall": report.per_class_recall,
            "per_subset_accuracy": report.per_subset_accuracy,
            "confusion": report.confusion.tolist(),
            "config": report.config_snapshot,
        }
        if include_timings:
            doc["timings"] = report.timings
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        lines = [f"accuracy,{report.accuracy!r}", f"fold_count,{report.fold_count}", f"excluded,{report.excluded}"]
        if report.per_subset_accuracy:
            for name, acc in report.per_subset_accuracy.items():
                lines.append(f"{name}_accuracy,{acc!r}")
        lines.append("confusion," + ",".join(report.class_names))
        for k, name in enumerate(report.class_names):
            lines.append(name + "," + ",".join(str(int(v)) for v in report.confusion[k]))
        lines.append("precision," + ",".join(repr(v) for v in report.per_class_precision))
        lines.append("recall," + ",".join(repr(v) for v in report.per_class_recall))
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def report_from_bytes(data: bytes) -> RunReport:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("format") != "skelact-report":
        raise ValueError("not a skelact report file")
    return RunReport(
        class_ids=[int(v) for v in doc["class_ids"]],
        class_names=[str(v) for v in doc["class_names"]],
        confusion=np.asarray(doc["confusion"], dtype=np.int64),
        accuracy=float(doc["accuracy"]),
        per_class_precision=[float(v) for v in doc["per_class_precision"]],
        per_class_recall=[float(v) for v in doc["per_class_recall"]],
        fold_count=int(doc["fold_count"]),
        excluded=int(doc["excluded"]),
        per_subset_accuracy=doc.get("per_subset_accuracy"),
        config_snapshot=doc.get("config", {}),
        timings=doc.get("timings", {}),
    )


def reports_equal(a: RunReport, b: RunReport, ignore_timings: bool = True) -> bool:
    if not np.array_equal(a.confusion, b.confusion):
        return False
    keys = [
        "class_ids", "class_names", "accuracy", "per_class_precision",
        "per_class_recall", "fold_count", "excluded", "per_subset_accuracy",
        "config_snapshot",
    ]
    for key in keys:
        if getattr(a, key) != getattr(b, key):
            return False
    if not ignore_timings and a.timings != b.timings:
        return False
    return True
