import json
import os

import numpy as np
import pytest

from skelact.cli import main
from skelact.skeleton_io import default_meta, parse_dataset


def run_cli(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    code = run_cli(
        "synth", "--classes", 3, "--per-class", 6, "--joints", 5,
        "--length-min", 25, "--length-max", 40, "--speed-jitter", 0.1,
        "--noise-sigma", 0.01, "--subjects", 3, "--seed", 7, "--out", out,
    )
    assert code == 0
    return out


def tiny_config(tmp_path, **extra):
    cfg = {
        "preprocess": {"target_length": 28},
        "hidden_sizes": [10],
        "train": {"epochs": 10, "finetune_epochs": 3, "batch_size": 16},
        "svm": {"epochs": 30},
    }
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestSynth:
    def test_outputs_exist(self, synth_dir):
        for name in ("dataset.jsonl", "meta.json", "manifest.json"):
            assert (synth_dir / name).exists()

    def test_dataset_parses(self, synth_dir):
        seqs = parse_dataset("canonical", [str(synth_dir / "dataset.jsonl")], default_meta("msr"))
        assert len(seqs) == 18
        with open(synth_dir / "meta.json") as fh:
            doc = json.load(fh)
        assert doc["meta"]["category_count"] == 3
        assert doc["parents"][0] == -1

    def test_determinism(self, tmp_path):
        for sub in ("a", "b"):
            assert run_cli("synth", "--classes", 2, "--per-class", 3, "--joints", 4,
                           "--seed", 5, "--out", tmp_path / sub) == 0
        a = (tmp_path / "a" / "dataset.jsonl").read_bytes()
        b = (tmp_path / "b" / "dataset.jsonl").read_bytes()
        assert a == b

    def test_bad_spec_is_config_error(self, tmp_path):
        assert run_cli("synth", "--classes", 1, "--out", tmp_path / "x") == 1


class TestConvert:
    def test_msr_round_trip(self, tmp_path):
        raw = tmp_path / "raw"
        raw.mkdir()
        rows = []
        for t in range(3):
            for j in range(20):
                rows.append(f"{t}.0 {j}.5 1.0 1.0")
        (raw / "a02_s01_e01_skeleton3D.txt").write_text("\n".join(rows))
        out = tmp_path / "canon"
        code = run_cli("convert", "--format", "msr", "--out", out, raw / "a02_s01_e01_skeleton3D.txt")
        assert code == 0
        seqs = parse_dataset("canonical", [str(out / "dataset.jsonl")], default_meta("msr"))
        assert seqs[0].label == 2 and seqs[0].subject_id == 1
        assert len(seqs[0].frames) == 3

    def test_missing_input_is_data_error(self, tmp_path):
        assert run_cli("convert", "--format", "msr", "--out", tmp_path / "o", tmp_path / "nope.txt") == 2

    def test_unknown_format_is_config_error(self, tmp_path):
        assert main(["convert", "--format", "weird", "--out", str(tmp_path), "x"]) == 1


@pytest.fixture(scope="module")
def trained(synth_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("trained")
    cfg = tiny_config(out)
    code = run_cli(
        "train", "--data", synth_dir / "dataset.jsonl", "--meta", synth_dir / "meta.json",
        "--config", cfg, "--seed", 3, "--protocol", "cross_subject",
        "--train-subjects", "1,2", "--out", out, "--omit-timings",
    )
    assert code == 0
    return out


class TestTrainEvalReport:

    def test_report_written(self, trained):
        with open(trained / "report.json") as fh:
            doc = json.load(fh)
        assert doc["format"] == "skelact-report"
        assert 0.0 <= doc["accuracy"] <= 1.0
        assert "timings" not in doc

    def test_fold_artifacts_written(self, trained):
        fold = trained / "fold_01"
        for name in ("model.json", "svm.json", "fold_config.json", "phantom_01.json"):
            assert (fold / name).exists()

    def test_manifest_lists_files(self, trained):
        with open(trained / "manifest.json") as fh:
            doc = json.load(fh)
        assert doc["command"] == "train"
        assert any(f.endswith("report.json") for f in doc["files"])

    def test_eval_on_training_artifacts(self, trained, synth_dir, tmp_path):
        out = tmp_path / "eval"
        code = run_cli(
            "eval", "--artifacts", trained / "fold_01",
            "--data", synth_dir / "dataset.jsonl", "--meta", synth_dir / "meta.json",
            "--out", out,
        )
        assert code == 0
        with open(out / "report.json") as fh:
            doc = json.load(fh)
        assert doc["confusion"] is not None
        with open(out / "predictions.json") as fh:
            preds = json.load(fh)
        assert len(preds) == 18

    def test_report_rerender_csv(self, trained, tmp_path, capsys):
        code = run_cli("report", "--report", trained / "report.json", "--format", "csv")
        assert code == 0
        captured = capsys.readouterr()
        assert captured.out.startswith("accuracy,")

    def test_variant_and_registration_flags(self, synth_dir, tmp_path):
        out = tmp_path / "jp"
        code = run_cli(
            "train", "--data", synth_dir / "dataset.jsonl", "--meta", synth_dir / "meta.json",
            "--config", tiny_config(tmp_path), "--variant", "jp", "--registration", "none",
            "--protocol", "cross_subject", "--train-subjects", "1,2", "--out", out,
        )
        assert code == 0
        assert not (out / "fold_01" / "model.json").exists()  # jp has no DAE
        assert (out / "fold_01" / "scale_map.json").exists()

    def test_train_determinism_with_omit_timings(self, synth_dir, tmp_path):
        outs = []
        for sub in ("r1", "r2"):
            out = tmp_path / sub
            code = run_cli(
                "train", "--data", synth_dir / "dataset.jsonl", "--meta", synth_dir / "meta.json",
                "--config", tiny_config(tmp_path), "--seed", 11, "--protocol", "cross_subject",
                "--train-subjects", "1,2", "--out", out, "--omit-timings",
            )
            assert code == 0
            outs.append(out)
        a, b = outs
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
        assert (a / "fold_01" / "model.json").read_bytes() == (b / "fold_01" / "model.json").read_bytes()
        assert (a / "fold_01" / "svm.json").read_bytes() == (b / "fold_01" / "svm.json").read_bytes()

    def test_missing_data_file(self, synth_dir, tmp_path):
        assert run_cli(
            "train", "--data", tmp_path / "missing.jsonl", "--meta", synth_dir / "meta.json",
            "--out", tmp_path / "x",
        ) == 2


class TestRestore:
    def test_restore_writes_reports(self, synth_dir, tmp_path):
        out = tmp_path / "restore"
        code = run_cli(
            "restore", "--data", synth_dir / "dataset.jsonl", "--meta", synth_dir / "meta.json",
            "--config", tiny_config(tmp_path), "--mask-prob", 0.2, "--noise-sigma", 0.05,
            "--seed", 1, "--out", out,
        )
        assert code == 0
        for name in ("clean.jsonl", "corrupted.jsonl", "restored.jsonl", "restore_report.json"):
            assert (out / name).exists()
        with open(out / "restore_report.json") as fh:
            doc = json.load(fh)
        assert doc["corrupted_mse"] > 0
        assert doc["restored_mse"] > 0


class TestExitCodes:
    def test_bad_flag_is_config_error(self):
        assert main(["train", "--nonsense"]) == 1

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_no_command_is_config_error(self):
        assert main([]) == 1
