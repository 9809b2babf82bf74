"""Command-line surface.

Subcommands: ``convert`` (raw -> canonical), ``synth`` (generator),
``train`` (full pipeline on a protocol), ``eval`` (saved artifacts, test
only), ``restore`` (denoising demo), ``report`` (re-render a saved run
report). Every command writes its artifacts under --out together with a
manifest.json. Exit codes: 0 success, 1 configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import classify, dae, ftp, pipeline, registration
from .preprocess import (
    PARENT_MAPS,
    NormalizationConfig,
    normalize_sequence,
    one_hot_category,
    select_reference_frame,
    temporal_chunk_vector,
)
from .seeds import derive_seed
from .skeleton_io import (
    ActionSequence,
    DatasetMeta,
    ParseError,
    SyntheticSpec,
    default_meta,
    generate_synthetic,
    parse_dataset,
    synthetic_parents,
    write_canonical,
)


class ConfigError(ValueError):
    """Bad flags or config file contents."""


def _write(path: str, data: bytes) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(data)
    return path


def _write_manifest(outdir: str, command: str, files: list[str], extra: dict) -> None:
    doc = {
        "tool": "skelact",
        "command": command,
        "files": sorted(os.path.relpath(f, outdir) for f in files),
        **extra,
    }
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_meta(outdir: str, meta: DatasetMeta, parents: list[int]) -> str:
    path = os.path.join(outdir, "meta.json")
    doc = {"meta": meta.to_dict(), "parents": parents}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_meta(path: str) -> tuple[DatasetMeta, list[int] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "meta" in doc:
        return DatasetMeta.from_dict(doc["meta"]), doc.get("parents")
    return DatasetMeta.from_dict(doc), doc.get("parents")


def _load_dataset(path: str) -> list[ActionSequence]:
    return parse_dataset("canonical", [path], default_meta("msr"))


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


def _build_pipeline_config(doc: dict, args, parents) -> pipeline.PipelineConfig:
    cfg = pipeline.PipelineConfig()
    pre = doc.get("preprocess", {})
    cfg = replace(
        cfg,
        seed=doc.get("seed", cfg.seed),
        variant=doc.get("variant", cfg.variant),
        hidden_sizes=tuple(doc.get("hidden_sizes", cfg.hidden_sizes)),
        target_length=pre.get("target_length", cfg.target_length),
        chunk_count=pre.get("chunk_count", cfg.chunk_count),
        parents=tuple(pre["parents"]) if "parents" in pre else (tuple(parents) if parents else None),
    )
    if "train" in doc:
        try:
            cfg = replace(cfg, train=dae.TrainConfig(**doc["train"]))
        except TypeError as exc:
            raise ConfigError(f"bad train section: {exc}") from None
    reg_doc = dict(doc.get("registration", {}))
    method = reg_doc.pop("method", cfg.registration_method)
    if reg_doc:
        defaults = registration.RegistrationConfig(
            delta=registration.default_window_radius(cfg.target_length, cfg.chunk_count),
            delta_prime=registration.default_window_radius(cfg.target_length, cfg.chunk_count),
        )
        try:
            cfg = replace(cfg, reg=replace(defaults, **reg_doc))
        except TypeError as exc:
            raise ConfigError(f"bad registration section: {exc}") from None
    cfg = replace(cfg, registration_method=method)
    if "ftp" in doc:
        f = doc["ftp"]
        cfg = replace(
            cfg,
            ftp=ftp.FtpConfig(
                levels=f.get("levels", 3),
                segments_per_level=tuple(f.get("segments_per_level", (1, 2, 4))),
                coeffs_per_segment=f.get("coeffs_per_segment", 4),
            ),
        )
    if "svm" in doc:
        cfg = replace(
            cfg,
            svm_regularization=doc["svm"].get("regularization", cfg.svm_regularization),
            svm_epochs=doc["svm"].get("epochs", cfg.svm_epochs),
        )
    # command-line flags override the file
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "variant", None):
        cfg = replace(cfg, variant=args.variant)
    if getattr(args, "registration", None):
        cfg = replace(cfg, registration_method=args.registration)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _build_protocol(doc: dict, args) -> pipeline.ProtocolSpec:
    p = doc.get("protocol", {})
    spec = pipeline.ProtocolSpec(
        kind=p.get("kind", "leave_one_subject_out"),
        train_subjects=tuple(p.get("train_subjects", ())),
        subset_definition=p.get("subsets"),
        seed=p.get("seed", 0),
        resubstitution=p.get("resubstitution", False),
    )
    if getattr(args, "protocol", None):
        spec = replace(spec, kind=args.protocol)
    if getattr(args, "train_subjects", None):
        try:
            subjects = tuple(int(s) for s in args.train_subjects.split(","))
        except ValueError:
            raise ConfigError(f"bad --train-subjects list: {args.train_subjects!r}") from None
        spec = replace(spec, train_subjects=subjects)
    if getattr(args, "resubstitution", False):
        spec = replace(spec, resubstitution=True)
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return spec


def cmd_convert(args) -> int:
    fmt = args.format
    if fmt not in ("msr", "utkinect", "florence", "canonical"):
        raise ConfigError(f"unknown format {fmt!r}")
    meta = default_meta(fmt) if fmt != "canonical" else default_meta("msr")
    sequences = parse_dataset(fmt, list(args.inputs), meta)
    labels = [s.label for s in sequences if s.label is not None]
    meta.sequence_count = len(sequences)
    if args.categories is not None:
        meta.category_count = args.categories
    elif labels:
        meta.category_count = max(meta.category_count, max(labels))
    os.makedirs(args.out, exist_ok=True)
    data_path = _write(os.path.join(args.out, "dataset.jsonl"), write_canonical(sequences, meta))
    parents = PARENT_MAPS.get(fmt, PARENT_MAPS["msr"])
    meta_path = _write_meta(args.out, meta, list(parents))
    _write_manifest(args.out, "convert", [data_path, meta_path], {"format": fmt, "sequences": len(sequences)})
    print(f"converted {len(sequences)} sequences -> {data_path}")
    return 0


def _parse_periodic(arg: str | None, class_count: int) -> tuple[bool, ...]:
    flags = [False] * class_count
    if arg:
        for tok in arg.split(","):
            k = int(tok)
            if not 1 <= k <= class_count:
                raise ConfigError(f"periodic class {k} out of range 1..{class_count}")
            flags[k - 1] = True
    return tuple(flags)


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        class_count=args.classes,
        sequences_per_class=args.per_class,
        joint_count=args.joints,
        base_length=(args.length_min, args.length_max),
        speed_jitter=args.speed_jitter,
        noise_sigma=args.noise_sigma,
        missing_joint_prob=args.missing_prob,
        periodic_class_flags=_parse_periodic(args.periodic, args.classes),
        seed=args.seed if args.seed is not None else 0,
        subject_count=args.subjects,
    )
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sequences, meta = generate_synthetic(spec)
    os.makedirs(args.out, exist_ok=True)
    data_path = _write(os.path.join(args.out, "dataset.jsonl"), write_canonical(sequences, meta))
    meta_path = _write_meta(args.out, meta, synthetic_parents(spec.joint_count))
    _write_manifest(
        args.out, "synth", [data_path, meta_path],
        {"spec": dataclasses.asdict(spec), "sequences": len(sequences)},
    )
    print(f"generated {len(sequences)} sequences -> {data_path}")
    return 0


def cmd_train(args) -> int:
    doc = _load_config_file(args.config)
    meta, parents = _load_meta(args.meta)
    config = _build_pipeline_config(doc, args, parents)
    protocol = _build_protocol(doc, args)
    if config.parents is None:
        raise ConfigError("no joint parent map: provide it in meta.json or the config file")
    dataset = _load_dataset(args.data)
    os.makedirs(args.out, exist_ok=True)
    report = pipeline.run_pipeline(dataset, meta, protocol, config, artifact_dir=args.out)
    report_path = _write(
        os.path.join(args.out, "report.json"),
        pipeline.emit_report(report, "json", include_timings=not args.omit_timings),
    )
    files = [report_path]
    for root, _, names in os.walk(args.out):
        files.extend(os.path.join(root, n) for n in names if n != "manifest.json")
    _write_manifest(
        args.out, "train", sorted(set(files)),
        {"config": config.snapshot(), "protocol": dataclasses.asdict(protocol), "accuracy": report.accuracy},
    )
    print(f"accuracy {report.accuracy:.4f} over {report.fold_count} fold(s) -> {report_path}")
    return 0


def cmd_eval(args) -> int:
    meta, _ = _load_meta(args.meta)
    dataset = _load_dataset(args.data)
    model, scale_map, phantoms, svm_model, norm_cfg, fold_cfg = pipeline.load_fold_artifacts(args.artifacts)
    method = fold_cfg["registration_method"]
    fcfg = fold_cfg["ftp"]
    ftp_cfg = ftp.FtpConfig(
        levels=fcfg["levels"],
        segments_per_level=tuple(fcfg["segments_per_level"]),
        coeffs_per_segment=fcfg["coeffs_per_segment"],
    )
    reg_cfg = registration.RegistrationConfig(**fold_cfg["registration"])
    l = svm_model.class_count

    confusion = np.zeros((l, l), dtype=np.int64)
    predictions = []
    skipped = 0
    for seq in dataset:
        try:
            norm = normalize_sequence(replace(seq, origin="test"), norm_cfg)
        except ValueError:
            skipped += 1
            continue
        feats = pipeline._encode_split(model, [norm], scale_map)[0]
        if method == "none":
            variants = ftp.ftp_features(registration.register(None, feats, "intra", reg_cfg, method), ftp_cfg).values
        else:
            variants = np.stack(
                [
                    ftp.ftp_features(registration.register(phantoms[k], feats, "intra", reg_cfg, method), ftp_cfg).values
                    for k in range(1, l + 1)
                ]
            )
        pred, scores = classify.svm_predict(svm_model, variants)
        predictions.append({"instance": seq.instance_id, "subject": seq.subject_id,
                            "label": seq.label, "predicted": pred, "scores": scores.tolist()})
        if seq.label is not None and 1 <= seq.label <= l:
            confusion[seq.label - 1, pred - 1] += 1
    os.makedirs(args.out, exist_ok=True)
    pred_path = os.path.join(args.out, "predictions.json")
    with open(pred_path, "w", encoding="utf-8") as fh:
        json.dump(predictions, fh, indent=2)
        fh.write("\n")
    files = [pred_path]
    if confusion.sum() > 0:
        accuracy, precision, recall = pipeline._metrics(confusion)
        report = pipeline.RunReport(
            class_ids=list(range(1, l + 1)),
            class_names=meta.category_names or [f"class_{k}" for k in range(1, l + 1)],
            confusion=confusion,
            accuracy=accuracy,
            per_class_precision=precision,
            per_class_recall=recall,
            fold_count=1,
            excluded=skipped,
            per_subset_accuracy=None,
            config_snapshot={"eval_artifacts": args.artifacts, "variant": fold_cfg["variant"]},
            timings={},
        )
        files.append(_write(os.path.join(args.out, "report.json"), pipeline.emit_report(report, "json")))
        print(f"accuracy {accuracy:.4f} on {int(confusion.sum())} labeled sequences")
    else:
        print(f"wrote predictions for {len(predictions)} sequences (no labels)")
    _write_manifest(args.out, "eval", files, {"artifacts": args.artifacts, "skipped": skipped})
    return 0


def _corrupt_sequence(seq: ActionSequence, mask_prob: float, noise_sigma: float,
                      rng: np.random.Generator) -> ActionSequence:
    frames = []
    for f in seq.frames:
        g = f.copy()
        g.coords = g.coords + rng.normal(0.0, noise_sigma, size=g.coords.shape)
        g.missing = g.missing | (rng.random(g.joint_count) < mask_prob)
        frames.append(g)
    return replace(seq, frames=frames)


def cmd_restore(args) -> int:
    doc = _load_config_file(args.config)
    meta, parents = _load_meta(args.meta)
    config = _build_pipeline_config(doc, args, parents)
    if config.parents is None:
        raise ConfigError("no joint parent map: provide it in meta.json or the config file")
    dataset = _load_dataset(args.data)
    if not dataset:
        raise ParseError("restore needs a non-empty dataset")

    base_cfg = NormalizationConfig(
        hip_joint_index=meta.hip_joint_index,
        left_hip_index=meta.left_hip_index,
        right_hip_index=meta.right_hip_index,
        parents=tuple(config.parents),
        target_length=config.target_length,
        chunk_count=config.chunk_count,
    )
    norm_cfg = replace(base_cfg, reference_skeleton=select_reference_frame(dataset, base_cfg))
    clean = [normalize_sequence(s, norm_cfg) for s in dataset]

    if args.model:
        model = dae.load_model(args.model)
    else:
        rows = np.concatenate([np.stack([f.coords.reshape(-1) for f in s.frames]) for s in clean])
        observed = np.concatenate([np.stack([~np.repeat(f.missing, 3) for f in s.frames]) for s in clean])
        scale_map = dae.ScaleMap.fit(rows, observed)
        chunk_rows = np.stack(
            [temporal_chunk_vector(i, config.target_length, config.chunk_count) for i in range(config.target_length)]
        )
        X = np.concatenate([dae.sequence_inputs(s, scale_map) for s in clean])
        C = np.concatenate([np.tile(one_hot_category(s.label, meta.category_count), (len(s), 1)) for s in clean])
        Tt = np.concatenate([chunk_rows for _ in clean])
        train_cfg = replace(config.train, seed=derive_seed(config.seed, "restore"))
        model = dae.train_stack(X, C, Tt, list(config.hidden_sizes), train_cfg, scale_map)

    rng = np.random.default_rng(derive_seed(config.seed, "corrupt"))
    corrupted = [_corrupt_sequence(s, args.mask_prob, args.noise_sigma, rng) for s in clean]
    restored = [dae.restore_sequence(model, s) for s in corrupted]

    def mse_vs_clean(seqs, zero_fill_missing):
        total, count = 0.0, 0
        for ref, s in zip(clean, seqs):
            a = ref.coords_array()
            b = s.coords_array().copy()
            if zero_fill_missing:
                b[s.missing_array()] = 0.0
            total += float(((a - b) ** 2).sum())
            count += a.size
        return total / count

    corrupted_mse = mse_vs_clean(corrupted, zero_fill_missing=True)
    restored_mse = mse_vs_clean(restored, zero_fill_missing=False)
    os.makedirs(args.out, exist_ok=True)
    files = [
        _write(os.path.join(args.out, "clean.jsonl"), write_canonical(clean, meta)),
        _write(os.path.join(args.out, "corrupted.jsonl"), write_canonical(corrupted, meta)),
        _write(os.path.join(args.out, "restored.jsonl"), write_canonical(restored, meta)),
    ]
    summary = {
        "corrupted_mse": corrupted_mse,
        "restored_mse": restored_mse,
        "ratio": restored_mse / corrupted_mse if corrupted_mse else float("nan"),
        "mask_prob": args.mask_prob,
        "noise_sigma": args.noise_sigma,
        "sequences": len(clean),
    }
    path = os.path.join(args.out, "restore_report.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(path)
    _write_manifest(args.out, "restore", files, {"summary": summary})
    print(f"corrupted mse {corrupted_mse:.6f}, restored mse {restored_mse:.6f} -> {path}")
    return 0


def cmd_report(args) -> int:
    with open(args.report, "rb") as fh:
        report = pipeline.report_from_bytes(fh.read())
    data = pipeline.emit_report(report, args.format)
    if args.out:
        _write(args.out, data)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelact", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="parse a raw dataset into canonical JSONL")
    p.add_argument("--format", required=True, choices=["msr", "utkinect", "florence", "canonical"])
    p.add_argument("--out", required=True)
    p.add_argument("--categories", type=int, default=None, help="override category count")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--joints", type=int, default=8)
    p.add_argument("--length-min", type=int, default=50)
    p.add_argument("--length-max", type=int, default=90)
    p.add_argument("--speed-jitter", type=float, default=0.0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--missing-prob", type=float, default=0.0)
    p.add_argument("--periodic", default=None, help="comma-separated 1-based periodic class ids")
    p.add_argument("--subjects", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="run the full pipeline under a protocol")
    p.add_argument("--data", required=True, help="canonical JSONL dataset")
    p.add_argument("--meta", required=True, help="meta.json written by convert/synth")
    p.add_argument("--config", default=None, help="master JSON config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--variant", choices=list(pipeline.VARIANTS), default=None)
    p.add_argument("--registration", choices=list(pipeline.REGISTRATION_METHODS), default=None)
    p.add_argument("--protocol", choices=["cross_subject", "half_subjects", "leave_one_subject_out"], default=None)
    p.add_argument("--train-subjects", default=None, help="comma-separated subject ids (cross_subject)")
    p.add_argument("--resubstitution", action="store_true", help="debug: train set == test set")
    p.add_argument("--omit-timings", action="store_true", help="deterministic report bytes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate saved fold artifacts on a dataset")
    p.add_argument("--artifacts", required=True, help="a fold directory written by train")
    p.add_argument("--data", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("restore", help="corrupt sequences and restore them through the model")
    p.add_argument("--data", required=True, help="clean canonical JSONL dataset")
    p.add_argument("--meta", required=True)
    p.add_argument("--model", default=None, help="trained model; trains one on the data when absent")
    p.add_argument("--config", default=None)
    p.add_argument("--mask-prob", type=float, default=0.2)
    p.add_argument("--noise-sigma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("report", help="re-render a saved run report")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, pipeline.PipelineError, FileNotFoundError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
