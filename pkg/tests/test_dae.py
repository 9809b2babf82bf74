import dataclasses
import math
from dataclasses import replace

import numpy as np
import pytest

from skelact.dae import (
    Batch,
    DaeLayer,
    FeatureSequence,
    ScaleMap,
    StackedModel,
    TrainConfig,
    corrupt,
    decode,
    encode,
    encode_sequence,
    forward,
    gradients,
    init_layer,
    loss,
    loss_and_gradients,
    model_from_bytes,
    model_to_bytes,
    plain_dae_loss,
    restore_sequence,
    train_layer,
    train_stack,
)
from skelact.seeds import derive_seed
from skelact.skeleton_io import ActionSequence, SkeletonFrame

PARAM_NAMES = [f.name for f in dataclasses.fields(DaeLayer)]


def zero_layer(d, dh, l, ch):
    rng = np.random.default_rng(0)
    layer = init_layer(d, dh, l, ch, rng)
    for name in PARAM_NAMES:
        getattr(layer, name)[...] = 0.0
    return layer


def toy_layer_2x2():
    layer = zero_layer(2, 2, 2, 2)
    layer.W_enc[...] = [[0.5, -0.3], [0.2, 0.7]]
    layer.b_enc[...] = [0.1, -0.2]
    layer.W_dec_x[...] = [[0.4, 0.6], [-0.5, 0.3]]
    layer.o_dec_x[...] = [0.05, -0.05]
    layer.W_dec_c[...] = [[0.3, -0.4], [0.8, 0.1]]
    layer.o_dec_c[...] = [0.0, 0.2]
    layer.W_dec_t[...] = [[-0.6, 0.2], [0.1, 0.9]]
    layer.o_dec_t[...] = [-0.1, 0.3]
    return layer


class TestCorrupt:
    def test_q_zero_is_identity(self, rng):
        x = rng.normal(size=100)
        assert np.array_equal(corrupt(x, 0.0, rng), x)

    def test_q_one_zeroes_everything(self, rng):
        x = rng.normal(size=100) + 1.0
        assert np.array_equal(corrupt(x, 1.0, rng), np.zeros(100))

    def test_binomial_rate(self):
        rng = np.random.default_rng(42)
        x = np.ones(10_000)
        zeroed = int((corrupt(x, 0.1, rng) == 0).sum())
        bound = 3 * math.sqrt(10_000 * 0.1 * 0.9)
        assert abs(zeroed - 1000) <= bound

    def test_bad_probability(self, rng):
        with pytest.raises(ValueError):
            corrupt(np.ones(3), 1.5, rng)


class TestForward:
    def test_zero_params_give_half(self, rng):
        layer = zero_layer(4, 3, 2, 7)
        h, r_x, r_c, r_t = forward(layer, rng.normal(size=4))
        for arr, width in [(h, 3), (r_x, 4), (r_c, 2), (r_t, 7)]:
            assert arr.shape == (1, width)
            assert np.all(arr == 0.5)

    def test_toy_2_to_1(self):
        layer = zero_layer(2, 1, 2, 2)
        layer.W_enc[...] = [[1.0, 1.0]]
        h, _, _, _ = forward(layer, np.array([0.0, 0.0]))
        assert h[0, 0] == 0.5

    def test_toy_2x2_matches_scalar_oracle(self):
        # frozen values from an independent math.exp evaluation
        h, r_x, r_c, r_t = forward(toy_layer_2x2(), np.array([0.8, 0.3]))
        assert np.allclose(h[0], [0.6010878788483698, 0.542397940774351], atol=1e-12)
        assert np.allclose(r_x[0], [0.649279554516909, 0.4531814189186998], atol=1e-12)
        assert np.allclose(r_c[0], [0.49084282086289344, 0.675925644993526], atol=1e-12)
        assert np.allclose(r_t[0], [0.4128555398820476, 0.700203466130177], atol=1e-12)

    def test_dimension_mismatch(self):
        layer = zero_layer(4, 3, 2, 7)
        with pytest.raises(ValueError):
            forward(layer, np.zeros(5))


def make_batch(rng, n, d, l, ch, q=0.0):
    x = rng.uniform(0.1, 0.9, size=(n, d))
    c = np.zeros((n, l))
    c[np.arange(n), rng.integers(0, l, n)] = 1.0
    t = np.zeros((n, ch))
    t[np.arange(n), rng.integers(0, ch, n)] = 1.0
    return Batch(x=x, x_tilde=corrupt(x, q, rng), c=c, t=t)


class TestLoss:
    def test_perfect_reconstruction_zero_loss(self):
        layer = zero_layer(2, 3, 2, 2)
        batch = Batch(
            x=np.full((4, 2), 0.5),
            x_tilde=np.full((4, 2), 0.5),
            c=np.full((4, 2), 0.5),
            t=np.full((4, 2), 0.5),
        )
        cfg = TrainConfig(lam=1.5, beta=1.5, sparsity_weight=0.0)
        assert loss(batch, layer, cfg) == 0.0

    def test_reduces_to_plain_dae_bitwise(self, rng):
        layer = init_layer(5, 3, 4, 7, rng)
        batch = make_batch(rng, 8, 5, 4, 7, q=0.2)
        cfg = TrainConfig(lam=0.0, beta=0.0, sparsity_weight=0.0)
        assert loss(batch, layer, cfg) == plain_dae_loss(batch, layer)

    def test_frozen_scalar_value(self):
        # frozen from the independent scalar evaluation of the toy layer
        batch = Batch(
            x=np.array([[0.9, 0.2]]),
            x_tilde=np.array([[0.8, 0.3]]),
            c=np.array([[1.0, 0.0]]),
            t=np.array([[0.0, 1.0]]),
        )
        cfg = TrainConfig(lam=1.5, beta=0.7, rho=0.1, sparsity_weight=0.3)
        assert loss(batch, toy_layer_2x2(), cfg) == pytest.approx(1.6811467574347516, abs=1e-12)
        cfg0 = replace(cfg, lam=0.0, beta=0.0, sparsity_weight=0.0)
        assert loss(batch, toy_layer_2x2(), cfg0) == pytest.approx(0.12696157266892577, abs=1e-12)

    def test_empty_batch_rejected(self):
        layer = zero_layer(2, 2, 2, 2)
        empty = Batch(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)))
        with pytest.raises(ValueError):
            loss(empty, layer, TrainConfig())


def fd_gradients(batch, layer, cfg, step=1e-5):
    """Central finite differences over every parameter entry."""
    grads = {}
    for name in PARAM_NAMES:
        param = getattr(layer, name)
        g = np.zeros_like(param)
        it = np.nditer(param, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = param[idx]
            param[idx] = orig + step
            up = loss(batch, layer, cfg)
            param[idx] = orig - step
            down = loss(batch, layer, cfg)
            param[idx] = orig
            g[idx] = (up - down) / (2 * step)
            it.iternext()
        grads[name] = g
    return grads


def max_rel_error(analytic, numeric):
    worst = 0.0
    for name in PARAM_NAMES:
        a = getattr(analytic, name)
        n = numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


class TestGradients:
    def test_zero_loss_configuration_has_zero_gradients(self):
        layer = zero_layer(2, 3, 2, 2)
        batch = Batch(
            x=np.full((4, 2), 0.5), x_tilde=np.full((4, 2), 0.5),
            c=np.full((4, 2), 0.5), t=np.full((4, 2), 0.5),
        )
        cfg = TrainConfig(lam=1.5, beta=1.5, sparsity_weight=0.0)
        grads = gradients(batch, layer, cfg)
        for name in PARAM_NAMES:
            assert np.all(getattr(grads, name) == 0.0)

    def test_finite_difference_toy_layer(self, rng):
        layer = init_layer(3, 2, 2, 3, rng)
        batch = make_batch(rng, 6, 3, 2, 3, q=0.1)
        cfg = TrainConfig(lam=1.5, beta=0.8, rho=0.1, sparsity_weight=0.2)
        value, analytic = loss_and_gradients(batch, layer, cfg)
        assert value == pytest.approx(loss(batch, layer, cfg))
        assert max_rel_error(analytic, fd_gradients(batch, layer, cfg)) <= 1e-4

    def test_lambda_term_scales_linearly(self, rng):
        layer = init_layer(4, 3, 3, 2, rng)
        batch = make_batch(rng, 5, 4, 3, 2)

        def grad_at(lam):
            cfg = TrainConfig(lam=lam, beta=0.5, sparsity_weight=0.0)
            return gradients(batch, layer, cfg)

        g0, g1, g3 = grad_at(0.0), grad_at(1.0), grad_at(3.0)
        for name in PARAM_NAMES:
            lhs = getattr(g3, name) - getattr(g0, name)
            rhs = 3.0 * (getattr(g1, name) - getattr(g0, name))
            assert np.allclose(lhs, rhs, atol=1e-9)


class TestTrainLayer:
    def make_inputs(self, rng, n=40, d=6, l=3, ch=7):
        x = rng.uniform(0.1, 0.9, size=(n, d))
        c = np.zeros((n, l))
        c[np.arange(n), rng.integers(0, l, n)] = 1.0
        t = np.zeros((n, ch))
        t[np.arange(n), rng.integers(0, ch, n)] = 1.0
        return x, c, t

    def test_zero_epochs_returns_initialized_layer(self, rng):
        x, c, t = self.make_inputs(rng)
        cfg = TrainConfig(epochs=0, seed=9)
        layer, history = train_layer(x, c, t, 4, cfg)
        fresh = init_layer(6, 4, 3, 7, np.random.default_rng(9))
        assert history == []
        for name in PARAM_NAMES:
            assert np.array_equal(getattr(layer, name), getattr(fresh, name))

    def test_deterministic(self, rng):
        x, c, t = self.make_inputs(rng)
        cfg = TrainConfig(epochs=5, seed=3)
        a, ha = train_layer(x, c, t, 4, cfg)
        b, hb = train_layer(x, c, t, 4, cfg)
        assert ha == hb
        for name in PARAM_NAMES:
            assert np.array_equal(getattr(a, name), getattr(b, name))

    def test_loss_halves_over_training(self):
        # structured inputs (per-class sinusoid manifolds, like the synthetic
        # generator produces after flattening) are learnable; 200 frames
        n, d, l, ch = 200, 6, 3, 7
        rng = np.random.default_rng(0)
        u = rng.random(n)
        klass = rng.integers(0, l, n)
        phases = rng.uniform(0, 2 * np.pi, size=(l, d))
        freq = np.array([1.0, 1.5, 2.0])
        x = 0.5 + 0.4 * np.sin(2 * np.pi * freq[klass][:, None] * u[:, None] + phases[klass])
        c = np.zeros((n, l))
        c[np.arange(n), klass] = 1.0
        t = np.zeros((n, ch))
        t[np.arange(n), (u * ch).astype(int)] = 1.0
        cfg = TrainConfig(epochs=300, seed=1)
        _, history = train_layer(x, c, t, 20, cfg)
        assert history[-1] <= 0.5 * history[0]

    def test_bad_hidden_dim(self, rng):
        x, c, t = self.make_inputs(rng)
        with pytest.raises(ValueError):
            train_layer(x, c, t, 0, TrainConfig(epochs=1))


class TestTrainStack:
    def make_inputs(self, rng, n=30, d=5, l=2, ch=7):
        x = rng.uniform(0.1, 0.9, size=(n, d))
        c = np.zeros((n, l))
        c[np.arange(n), rng.integers(0, l, n)] = 1.0
        t = np.zeros((n, ch))
        t[np.arange(n), rng.integers(0, ch, n)] = 1.0
        return x, c, t

    def test_single_layer_no_finetune_equals_train_layer(self, rng):
        x, c, t = self.make_inputs(rng)
        cfg = TrainConfig(epochs=3, finetune_epochs=0, seed=21)
        model = train_stack(x, c, t, [4], cfg)
        layer, _ = train_layer(x, c, t, 4, replace(cfg, sparsity_weight=0.0, seed=derive_seed(21, "layer", 0)))
        for name in PARAM_NAMES:
            assert np.array_equal(getattr(model.layers[0], name), getattr(layer, name))

    def test_two_layers_no_finetune_are_greedy_layers(self, rng):
        x, c, t = self.make_inputs(rng)
        cfg = TrainConfig(epochs=2, finetune_epochs=0, seed=5)
        model = train_stack(x, c, t, [4, 3], cfg)
        assert [lay.hidden_dim for lay in model.layers] == [4, 3]
        l0, _ = train_layer(x, c, t, 4, replace(cfg, sparsity_weight=0.0, seed=derive_seed(5, "layer", 0)))
        from skelact.dae import sigmoid

        h1 = sigmoid(x @ l0.W_enc.T + l0.b_enc)
        l1, _ = train_layer(h1, c, t, 3, replace(cfg, seed=derive_seed(5, "layer", 1)))
        for name in PARAM_NAMES:
            assert np.array_equal(getattr(model.layers[0], name), getattr(l0, name))
            assert np.array_equal(getattr(model.layers[1], name), getattr(l1, name))

    def test_finetune_changes_parameters_deterministically(self, rng):
        x, c, t = self.make_inputs(rng)
        cfg = TrainConfig(epochs=2, finetune_epochs=3, seed=5)
        a = train_stack(x, c, t, [4, 3], cfg)
        b = train_stack(x, c, t, [4, 3], cfg)
        frozen = train_stack(x, c, t, [4, 3], replace(cfg, finetune_epochs=0))
        assert model_to_bytes(a) == model_to_bytes(b)
        assert model_to_bytes(a) != model_to_bytes(frozen)

    def test_paper_shaped_stack_output_dim(self, rng):
        # untrained (0 epochs) keeps it cheap; shape contract is what matters
        x = rng.uniform(0.1, 0.9, size=(5, 60))
        c = np.zeros((5, 20))
        c[:, 0] = 1.0
        t = np.zeros((5, 7))
        t[:, 0] = 1.0
        cfg = TrainConfig(epochs=0, finetune_epochs=0)
        model = train_stack(x, c, t, [200, 400, 800], cfg)
        assert encode(model, x).shape == (5, 800)


class TestFinetuneGradients:
    def test_matches_finite_differences(self, rng):
        from skelact.dae import _finetune_loss_and_grads

        x = rng.uniform(0.1, 0.9, size=(4, 3))
        c = np.zeros((4, 2))
        c[np.arange(4), rng.integers(0, 2, 4)] = 1.0
        t = np.zeros((4, 2))
        t[np.arange(4), rng.integers(0, 2, 4)] = 1.0
        cfg = TrainConfig(lam=1.2, beta=0.6)
        layers = [init_layer(3, 3, 2, 2, rng), init_layer(3, 2, 2, 2, rng)]
        model = StackedModel(layers, None, 3, 2, 2)
        _, analytic = _finetune_loss_and_grads(model, x, c, t, cfg)

        step = 1e-5
        worst = 0.0
        for li, layer in enumerate(model.layers):
            for name in PARAM_NAMES:
                param = getattr(layer, name)
                it = np.nditer(param, flags=["multi_index"])
                while not it.finished:
                    idx = it.multi_index
                    orig = param[idx]
                    param[idx] = orig + step
                    up, _ = _finetune_loss_and_grads(model, x, c, t, cfg)
                    param[idx] = orig - step
                    down, _ = _finetune_loss_and_grads(model, x, c, t, cfg)
                    param[idx] = orig
                    num = (up - down) / (2 * step)
                    ana = getattr(analytic[li], name)[idx]
                    denom = max(abs(num), abs(ana), 1e-8)
                    worst = max(worst, abs(num - ana) / denom)
                    it.iternext()
        assert worst <= 1e-4


def make_model(rng, d=6, sizes=(5, 4), l=2, ch=7, lo=-1.0, hi=1.0):
    layers = []
    cur = d
    for width in sizes:
        layers.append(init_layer(cur, width, l, ch, rng))
        cur = width
    scale = ScaleMap(lo=np.full(d, lo), hi=np.full(d, hi))
    return StackedModel(list(layers), scale, d, l, ch)


def make_sequence(rng, T=14, J=2):
    frames = [
        SkeletonFrame(rng.uniform(-1, 1, size=(J, 3)), np.zeros(J, bool), None, i) for i in range(T)
    ]
    return ActionSequence(frames, 1, 1, "seq")


class TestEncodeRestore:
    def test_encode_shapes_and_range(self, rng):
        model = make_model(rng)
        seq = make_sequence(rng)
        feats = encode_sequence(model, seq)
        assert feats.features.shape == (14, 4)
        assert np.all((feats.features > 0) & (feats.features < 1))

    def test_identical_frames_identical_features(self, rng):
        model = make_model(rng)
        frame = SkeletonFrame(rng.uniform(-1, 1, size=(2, 3)), np.zeros(2, bool), None, 0)
        f2 = frame.copy()
        f2.timestamp_index = 1
        seq = ActionSequence([frame, f2], 1, 1, "dup")
        feats = encode_sequence(model, seq)
        assert np.array_equal(feats.features[0], feats.features[1])

    def test_restore_is_total_on_random_model(self, rng):
        model = make_model(rng)
        seq = make_sequence(rng)
        out = restore_sequence(model, seq)
        assert len(out.frames) == len(seq.frames)
        for f in out.frames:
            assert np.all(np.isfinite(f.coords))

    def test_missing_joints_zeroed_in_input(self, rng):
        from skelact.dae import frame_to_input

        model = make_model(rng)
        frame = SkeletonFrame(
            rng.uniform(-1, 1, size=(2, 3)), np.array([False, True]), None, 0
        )
        v = frame_to_input(frame, model.scale_map)
        assert np.array_equal(v[3:], np.zeros(3))
        assert np.all(v[:3] != 0)


class TestScaleMap:
    def test_round_trip(self, rng):
        rows = rng.normal(size=(50, 6)) * 3
        sm = ScaleMap.fit(rows)
        v = rows[7]
        assert np.allclose(sm.inverse(sm.forward(v)), v, atol=1e-12)

    def test_range_mapped_to_tenth_and_ninetieth(self, rng):
        rows = rng.normal(size=(50, 4))
        sm = ScaleMap.fit(rows)
        scaled = sm.forward(rows)
        assert scaled.min() == pytest.approx(0.1)
        assert scaled.max() == pytest.approx(0.9)

    def test_constant_dimension(self):
        rows = np.stack([np.array([1.0, 5.0]), np.array([2.0, 5.0])])
        sm = ScaleMap.fit(rows)
        out = sm.forward(np.array([1.5, 5.0]))
        assert out[1] == 0.5
        assert np.allclose(sm.inverse(out), [1.5, 5.0])

    def test_fit_ignores_masked_entries(self):
        rows = np.array([[0.0, 10.0], [1.0, -10.0], [2.0, 0.5]])
        observed = np.array([[True, False], [True, False], [True, True]])
        sm = ScaleMap.fit(rows, observed)
        assert sm.lo[1] == 0.5 and sm.hi[1] == 0.5


class TestSerialization:
    def test_round_trip_and_byte_stability(self, rng):
        model = make_model(rng)
        model.train_config = TrainConfig(seed=4)
        blob = model_to_bytes(model)
        back = model_from_bytes(blob)
        assert model_to_bytes(back) == blob
        x = rng.uniform(0.1, 0.9, size=(3, 6))
        assert np.array_equal(encode(model, x), encode(back, x))
        assert np.array_equal(decode(model, encode(model, x)), decode(back, encode(back, x)))

    def test_rejects_foreign_payload(self):
        with pytest.raises(ValueError):
            model_from_bytes(b'{"format": "something-else"}')


class TestFeatureSequenceCarriesContext:
    def test_label_subject_origin(self, rng):
        model = make_model(rng)
        seq = make_sequence(rng)
        seq.label = 2
        seq.subject_id = 9
        seq.origin = "train"
        feats = encode_sequence(model, seq)
        assert isinstance(feats, FeatureSequence)
        assert (feats.label, feats.subject_id, feats.origin) == (2, 9, "train")
