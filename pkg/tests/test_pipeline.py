from dataclasses import replace

import numpy as np
import pytest

from skelact.dae import TrainConfig
from skelact.pipeline import (
    PipelineConfig,
    PipelineError,
    ProtocolSpec,
    RunReport,
    emit_report,
    report_from_bytes,
    reports_equal,
    run_pipeline,
    split_protocol,
    variant_train_config,
    _assert_trainable,
)
from skelact.skeleton_io import SyntheticSpec, generate_synthetic, synthetic_parents


def fast_config(joint_count, seed=0, **overrides):
    """Small but trainable settings for pipeline tests."""
    base = dict(
        seed=seed,
        target_length=28,
        chunk_count=7,
        hidden_sizes=(10,),
        parents=tuple(synthetic_parents(joint_count)),
        train=TrainConfig(epochs=12, finetune_epochs=4, batch_size=16, seed=0),
        svm_epochs=40,
    )
    base.update(overrides)
    return PipelineConfig(**base)


@pytest.fixture(scope="module")
def tiny_dataset():
    spec = SyntheticSpec(
        class_count=3,
        sequences_per_class=8,
        joint_count=5,
        base_length=(25, 45),
        speed_jitter=0.1,
        noise_sigma=0.01,
        seed=2,
        subject_count=4,
    )
    return generate_synthetic(spec)


class TestSplitProtocol:
    def make_dataset(self, subjects):
        spec = SyntheticSpec(class_count=2, sequences_per_class=2 * len(subjects),
                             joint_count=4, seed=0, subject_count=len(subjects))
        seqs, _ = generate_synthetic(spec)
        return seqs

    def test_loso_one_fold_per_subject(self):
        dataset = self.make_dataset(range(10))
        folds = split_protocol(dataset, ProtocolSpec(kind="leave_one_subject_out"))
        assert len(folds) == 10
        for train, test in folds:
            test_subjects = {s.subject_id for s in test}
            assert len(test_subjects) == 1
            assert test_subjects.isdisjoint({s.subject_id for s in train})

    def test_cross_subject_split(self):
        dataset = self.make_dataset(range(10))
        spec = ProtocolSpec(kind="cross_subject", train_subjects=(1, 3, 5, 7, 9))
        [(train, test)] = split_protocol(dataset, spec)
        assert {s.subject_id for s in train} == {1, 3, 5, 7, 9}
        assert {s.subject_id for s in test} == {2, 4, 6, 8, 10}

    def test_folds_disjoint_and_cover(self):
        dataset = self.make_dataset(range(6))
        for spec in (
            ProtocolSpec(kind="leave_one_subject_out"),
            ProtocolSpec(kind="half_subjects", seed=3),
            ProtocolSpec(kind="cross_subject", train_subjects=(1, 2, 3)),
        ):
            for train, test in split_protocol(dataset, spec):
                ids = lambda seqs: {id(s) for s in seqs}
                assert ids(train).isdisjoint(ids(test))
                assert len(train) + len(test) == len(dataset)

    def test_half_subjects_takes_ceiling(self):
        dataset = self.make_dataset(range(5))
        [(train, test)] = split_protocol(dataset, ProtocolSpec(kind="half_subjects", seed=0))
        assert len({s.subject_id for s in train}) == 3

    def test_unknown_subjects_rejected(self):
        dataset = self.make_dataset(range(4))
        spec = ProtocolSpec(kind="cross_subject", train_subjects=(1, 99))
        with pytest.raises(ValueError, match="99"):
            split_protocol(dataset, spec)

    def test_resubstitution(self):
        dataset = self.make_dataset(range(4))
        [(train, test)] = split_protocol(dataset, ProtocolSpec(resubstitution=True))
        assert train == test == dataset


class TestVariants:
    def test_ablation_switches(self):
        cfg = TrainConfig(lam=1.5, beta=1.5)
        assert variant_train_config(cfg, "dae").lam == 0.0
        assert variant_train_config(cfg, "dae").beta == 0.0
        assert variant_train_config(cfg, "dae_cc") == replace(cfg, beta=0.0)
        assert variant_train_config(cfg, "dae_tc") == replace(cfg, lam=0.0)
        assert variant_train_config(cfg, "dae_ctc") == cfg
        assert variant_train_config(cfg, "jp") == cfg

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            variant_train_config(TrainConfig(), "dae_xx")


class TestInstrumentation:
    def test_test_tagged_sequence_rejected(self, tiny_dataset):
        seqs, _ = tiny_dataset
        tagged = replace(seqs[0], origin="test")
        with pytest.raises(PipelineError, match="test-tagged"):
            _assert_trainable([seqs[1], tagged])

    def test_untagged_passes(self, tiny_dataset):
        seqs, _ = tiny_dataset
        _assert_trainable(seqs[:3])


class TestRunPipeline:
    def test_cross_subject_end_to_end(self, tiny_dataset):
        seqs, meta = tiny_dataset
        config = fast_config(meta.joint_count, seed=1)
        protocol = ProtocolSpec(kind="cross_subject", train_subjects=(1, 2))
        report = run_pipeline(seqs, meta, protocol, config)
        assert report.fold_count == 1
        assert report.confusion.sum() == sum(1 for s in seqs if s.subject_id in (3, 4))
        assert report.confusion.shape == (3, 3)
        assert 0.0 <= report.accuracy <= 1.0
        assert report.accuracy == pytest.approx(np.trace(report.confusion) / report.confusion.sum())
        rows = report.confusion.sum(axis=1)
        for k in range(3):
            want = sum(1 for s in seqs if s.subject_id in (3, 4) and s.label == k + 1)
            assert rows[k] == want

    def test_determinism(self, tiny_dataset):
        seqs, meta = tiny_dataset
        config = fast_config(meta.joint_count, seed=5)
        protocol = ProtocolSpec(kind="cross_subject", train_subjects=(1, 2))
        a = run_pipeline(seqs, meta, protocol, config)
        b = run_pipeline(seqs, meta, protocol, config)
        assert reports_equal(a, b)
        assert emit_report(a, "json", include_timings=False) == emit_report(b, "json", include_timings=False)

    def test_resubstitution_not_worse_than_heldout(self, tiny_dataset):
        seqs, meta = tiny_dataset
        config = fast_config(meta.joint_count, seed=3)
        heldout = run_pipeline(
            seqs, meta, ProtocolSpec(kind="cross_subject", train_subjects=(1, 2)), config
        )
        resub = run_pipeline(seqs, meta, ProtocolSpec(kind="cross_subject", resubstitution=True), config)
        assert resub.accuracy >= heldout.accuracy

    def test_untrainable_class_aborts_with_named_error(self, tiny_dataset):
        seqs, meta = tiny_dataset
        config = fast_config(meta.joint_count)
        only_class1_train = [s for s in seqs if s.label == 1 or s.subject_id == 4]
        protocol = ProtocolSpec(kind="cross_subject", train_subjects=(1,))
        filtered = [s for s in only_class1_train if s.subject_id in (1, 4)]
        with pytest.raises(PipelineError, match="class"):
            run_pipeline(filtered, meta, protocol, config)

    def test_registration_mode_none_and_jp(self, tiny_dataset):
        seqs, meta = tiny_dataset
        protocol = ProtocolSpec(kind="cross_subject", train_subjects=(1, 2))
        for overrides in ({"registration_method": "none"}, {"variant": "jp"},
                          {"registration_method": "dtw"}):
            config = fast_config(meta.joint_count, seed=2, **overrides)
            report = run_pipeline(seqs, meta, protocol, config)
            assert report.confusion.sum() > 0

    def test_subsets_report_per_subset_accuracy(self):
        spec = SyntheticSpec(class_count=4, sequences_per_class=6, joint_count=5,
                             base_length=(25, 40), seed=4, subject_count=3)
        seqs, meta = generate_synthetic(spec)
        config = fast_config(meta.joint_count)
        protocol = ProtocolSpec(
            kind="cross_subject", train_subjects=(1, 2),
            subset_definition=[[1, 2], [3, 4]],
        )
        report = run_pipeline(seqs, meta, protocol, config)
        assert set(report.per_subset_accuracy) == {"subset_1", "subset_2"}
        # classes never cross subsets, so off-block confusion must be zero
        assert report.confusion[:2, 2:].sum() == 0
        assert report.confusion[2:, :2].sum() == 0

    def test_artifacts_written_and_loadable(self, tiny_dataset, tmp_path):
        from skelact.pipeline import load_fold_artifacts

        seqs, meta = tiny_dataset
        config = fast_config(meta.joint_count, seed=1)
        protocol = ProtocolSpec(kind="cross_subject", train_subjects=(1, 2))
        run_pipeline(seqs, meta, protocol, config, artifact_dir=str(tmp_path))
        fold_dir = tmp_path / "fold_01"
        assert (fold_dir / "model.json").exists()
        assert (fold_dir / "svm.json").exists()
        model, scale_map, phantoms, svm_model, norm_cfg, fold_cfg = load_fold_artifacts(str(fold_dir))
        assert model is not None and len(phantoms) == 3
        assert svm_model.class_count == 3
        assert fold_cfg["registration_method"] == "lwsr"


class TestReports:
    def make_report(self):
        confusion = np.array([[10, 0, 0], [1, 9, 0], [0, 2, 8]], dtype=np.int64)
        total = confusion.sum()
        return RunReport(
            class_ids=[1, 2, 3],
            class_names=["a", "b", "c"],
            confusion=confusion,
            accuracy=float(np.trace(confusion) / total),
            per_class_precision=[10 / 11, 9 / 11, 1.0],
            per_class_recall=[1.0, 0.9, 0.8],
            fold_count=2,
            excluded=0,
            per_subset_accuracy=None,
            config_snapshot={"seed": 0},
            timings={"train": 1.0},
        )

    def test_json_round_trip(self):
        report = self.make_report()
        back = report_from_bytes(emit_report(report, "json"))
        assert reports_equal(report, back, ignore_timings=False)

    def test_accuracy_consistent_with_matrix(self):
        report = self.make_report()
        back = report_from_bytes(emit_report(report, "json"))
        assert back.accuracy == pytest.approx(np.trace(back.confusion) / back.confusion.sum())

    def test_csv_rendering(self):
        data = emit_report(self.make_report(), "csv").decode()
        lines = data.strip().splitlines()
        assert lines[0].startswith("accuracy,0.9")
        assert "confusion,a,b,c" in data
        assert "a,10,0,0" in data

    def test_perfect_classifier_diagonal(self):
        report = self.make_report()
        report.confusion = np.diag([10, 10, 10]).astype(np.int64)
        data = emit_report(report, "csv").decode()
        assert "a,10,0,0" in data and "b,0,10,0" in data and "c,0,0,10" in data

    def test_timings_omitted_when_asked(self):
        report = self.make_report()
        blob = emit_report(report, "json", include_timings=False)
        assert b"timings" not in blob

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(self.make_report(), "yaml")
