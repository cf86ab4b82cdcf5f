"""Training stack: data generators, network pieces, bank updates, gradients,
and the loop's determinism/convergence contracts.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlb.training import (
    Dataset,
    GeneratorSpec,
    PriorBank,
    TrainConfig,
    TrainingDiverged,
    assign_centers,
    bayes_accuracy,
    encoder_forward,
    init_params,
    objective,
    sample_latent,
    synth_dataset,
    train,
    update_bank,
)
from mdlb.training.network import decoder_log_proba, predict_proba


class TestSynthData:
    def test_empty_dataset(self):
        ds = synth_dataset(GeneratorSpec(), 0, seed=0)
        assert ds.n == 0

    def test_same_seed_identical(self):
        spec = GeneratorSpec(kind="blobs", separation=4.0)
        a, b = synth_dataset(spec, 100, 3), synth_dataset(spec, 100, 3)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_class_means_clt(self):
        spec = GeneratorSpec(kind="blobs", separation=4.0)
        ds = synth_dataset(spec, 4000, 7)
        means = spec.class_means()
        for k in (0, 1):
            sample_mean = ds.features[ds.labels == k].mean(axis=0)
            n_k = int((ds.labels == k).sum())
            assert np.linalg.norm(sample_mean - means[k]) < 3.0 / math.sqrt(n_k) * 2

    def test_quadrant_bayes_oracle(self):
        spec = GeneratorSpec(kind="quadrant", classes=4, dim=2, bayes_target=0.85)
        assert bayes_accuracy(spec) == pytest.approx(0.85, abs=1e-12)
        # empirical check: optimal rule = quadrant of the signs
        ds = synth_dataset(spec, 100_000, 11)
        means = spec.class_means()
        pred = np.argmin(
            ((ds.features[:, None, :] - means[None]) ** 2).sum(-1), axis=1
        )
        acc = float(np.mean(pred == ds.labels))
        assert acc == pytest.approx(0.85, abs=0.01)

    def test_blob_bayes(self):
        assert bayes_accuracy(GeneratorSpec(separation=4.0)) == pytest.approx(
            0.977249868052, abs=1e-9
        )

    def test_rings_have_no_oracle(self):
        with pytest.raises(ValueError):
            bayes_accuracy(GeneratorSpec(kind="rings"))

    def test_label_validation(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((2, 2)), np.array([0, 5]), 2)


class TestNetwork:
    def test_zero_params_give_standard_gaussian(self):
        params = init_params(3, 4, 2, 2, np.random.default_rng(0))
        for arr in params.arrays().values():
            arr[:] = 0.0
        mean, var = encoder_forward(params.encoder, np.ones((5, 3)))
        np.testing.assert_allclose(mean, 0.0, atol=0)
        np.testing.assert_allclose(var, 1.0, atol=0)

    def test_hand_computed_chain(self):
        params = init_params(1, 1, 1, 2, np.random.default_rng(0))
        params.encoder.w_hidden[:] = 2.0
        params.encoder.b_hidden[:] = -1.0
        params.encoder.w_mean[:] = 3.0
        params.encoder.b_mean[:] = 0.5
        params.encoder.w_logvar[:] = 1.0
        params.encoder.b_logvar[:] = 0.0
        # x = 2: pre = 3 -> hidden 3 -> mean 9.5, logvar 3
        mean, var = encoder_forward(params.encoder, np.array([[2.0]]))
        assert mean[0, 0] == pytest.approx(9.5)
        assert var[0, 0] == pytest.approx(math.exp(3.0))
        # x = 0: pre = -1 -> leaky -0.1 -> mean 0.2, logvar -0.1
        mean, var = encoder_forward(params.encoder, np.array([[0.0]]))
        assert mean[0, 0] == pytest.approx(-0.1 * 3 + 0.5)
        assert var[0, 0] == pytest.approx(math.exp(-0.1))

    def test_determinism_on_identical_inputs(self):
        params = init_params(3, 4, 2, 2, np.random.default_rng(1))
        x = np.tile(np.array([[0.3, -0.7, 1.0]]), (2, 1))
        mean, var = encoder_forward(params.encoder, x)
        np.testing.assert_array_equal(mean[0], mean[1])
        np.testing.assert_array_equal(var[0], var[1])

    def test_sample_latent(self):
        mean = np.array([[1.0, -2.0]])
        var = np.array([[4.0, 9.0]])
        np.testing.assert_array_equal(sample_latent(mean, var, np.zeros((1, 2))), mean)
        noise = np.array([[1.0, -1.0]])
        np.testing.assert_allclose(
            sample_latent(np.zeros((1, 2)), np.ones((1, 2)), noise), noise, atol=0
        )
        np.testing.assert_allclose(
            sample_latent(mean, var, noise), [[3.0, -5.0]], atol=0
        )

    def test_softmax_normalization(self):
        params = init_params(2, 3, 4, 5, np.random.default_rng(2))
        u = np.random.default_rng(3).standard_normal((7, 4))
        proba = np.exp(decoder_log_proba(params.decoder, u))
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)

    def test_predict_proba_deterministic(self):
        params = init_params(2, 3, 4, 3, np.random.default_rng(4))
        x = np.random.default_rng(5).standard_normal((6, 2))
        np.testing.assert_array_equal(
            predict_proba(params, x, 12, 42), predict_proba(params, x, 12, 42)
        )


class TestPriorBank:
    def test_initialized_at_standard_normal(self):
        bank = PriorBank.initial(3, 2, 4, 0.01, "lossless")
        np.testing.assert_array_equal(bank.means, 0.0)
        np.testing.assert_array_equal(bank.stds, 1.0)

    def test_single_center_assignment(self):
        bank = PriorBank.initial(2, 1, 2, 0.1, "lossless")
        idx = assign_centers(np.zeros((3, 2)), np.ones((3, 2)), np.array([0, 1, 0]), bank)
        np.testing.assert_array_equal(idx, 0)

    def test_exact_match_wins(self):
        bank = PriorBank.initial(1, 3, 2, 0.1, "lossless")
        bank.means[0, 1] = np.array([2.0, -1.0])
        bank.stds[0, 1] = np.array([0.5, 2.0])
        mean = np.array([[2.0, -1.0]])
        var = np.array([[0.25, 4.0]])
        assert assign_centers(mean, var, np.array([0]), bank)[0] == 1

    def test_lossless_two_center_example(self):
        # centers at mu 0 and 2 (unit std): sample (mu=0.5, var=1) is closer
        # to the first (KL 0.125 vs 1.125).
        bank = PriorBank.initial(1, 2, 1, 0.1, "lossless")
        bank.means[0, 1, 0] = 2.0
        idx = assign_centers(np.array([[0.5]]), np.array([[1.0]]), np.array([0]), bank)
        assert idx[0] == 0

    def test_assignment_minimizes_exhaustively(self):
        rng = np.random.default_rng(6)
        bank = PriorBank.initial(2, 4, 3, 0.001, "lossy")
        bank.means += rng.standard_normal(bank.means.shape)
        bank.stds *= np.exp(0.3 * rng.standard_normal(bank.stds.shape))
        mean = rng.standard_normal((20, 3))
        var = np.exp(rng.standard_normal((20, 3)))
        labels = rng.integers(0, 2, 20)
        idx = assign_centers(mean, var, labels, bank)
        from mdlb.training.bank import _center_divergences

        div = _center_divergences(mean, var, labels, bank)
        for i in range(20):
            assert div[i, idx[i]] <= div[i].min() + 1e-12

    def test_update_alpha_zero_noop(self):
        bank = PriorBank.initial(2, 2, 2, 0.0, "lossless")
        new = update_bank(bank, np.ones((3, 2)), np.ones((3, 2)), np.zeros(3, int), np.zeros(3, int))
        np.testing.assert_array_equal(new.means, bank.means)

    def test_full_replacement_at_alpha_one(self):
        bank = PriorBank.initial(1, 1, 2, 1.0, "lossless")
        mean = np.array([[3.0, -1.0]])
        var = np.array([[0.25, 4.0]])
        new = update_bank(bank, mean, var, np.array([0]), np.array([0]))
        np.testing.assert_allclose(new.means[0, 0], mean[0], atol=0)
        np.testing.assert_allclose(new.stds[0, 0] ** 2, var[0], atol=1e-15)

    def test_single_sample_drift(self):
        bank = PriorBank.initial(1, 1, 1, 0.1, "lossless")
        new = update_bank(bank, np.array([[1.0]]), np.array([[1.0]]), np.array([0]), np.array([0]))
        assert new.means[0, 0, 0] == pytest.approx(0.1, abs=1e-15)

    def test_untouched_centers_fixed(self):
        bank = PriorBank.initial(2, 2, 1, 0.2, "lossless")
        new = update_bank(bank, np.array([[5.0]]), np.array([[1.0]]), np.array([1]), np.array([0]))
        np.testing.assert_array_equal(new.means[0], bank.means[0])
        np.testing.assert_array_equal(new.means[1, 1], bank.means[1, 1])
        assert new.means[1, 0, 0] != 0.0

    def test_overfull_cell_rejected(self):
        bank = PriorBank.initial(1, 1, 1, 0.3, "lossless")
        with pytest.raises(ValueError):
            update_bank(
                bank, np.ones((4, 1)), np.ones((4, 1)), np.zeros(4, int), np.zeros(4, int)
            )

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_update_preserves_positive_std(self, seed):
        rng = np.random.default_rng(seed)
        bank = PriorBank.initial(2, 2, 3, 0.05, "lossless")
        for _ in range(5):
            mean = rng.standard_normal((10, 3)) * 3
            var = np.exp(rng.standard_normal((10, 3)) * 2)
            labels = rng.integers(0, 2, 10)
            idx = assign_centers(mean, var, labels, bank)
            bank = update_bank(bank, mean, var, labels, idx)
            assert np.all(bank.stds > 0.0)


class TestObjective:
    def _toy(self, seed=0):
        rng = np.random.default_rng(seed)
        params = init_params(3, 4, 2, 3, rng)
        x = rng.standard_normal((5, 3))
        y = rng.integers(0, 3, size=5)
        noise = rng.standard_normal((5, 2))
        return params, x, y, noise, rng

    def test_uniform_decoder_cross_entropy(self):
        params, x, y, noise, _ = self._toy()
        params.decoder.w_out[:] = 0.0
        params.decoder.b_out[:] = 0.0
        loss, _, aux = objective(params, x, y, "vib", None, 0.0, noise)
        assert aux["cross_entropy_mean"] == pytest.approx(math.log(3), abs=1e-12)

    def test_standard_encoder_zero_kl(self):
        params, x, y, noise, _ = self._toy()
        for name, arr in params.arrays().items():
            if name.startswith("encoder."):
                arr[:] = 0.0
        _, _, aux = objective(params, x, y, "vib", None, 1.0, noise)
        assert aux["kl_mean"] == pytest.approx(0.0, abs=1e-12)

    def test_vib_equals_lossless_at_initial_bank(self):
        params, x, y, noise, _ = self._toy(1)
        bank = PriorBank.initial(3, 1, 2, 0.0, "lossless")
        loss_vib, grads_vib, _ = objective(params, x, y, "vib", None, 0.4, noise)
        loss_cd, grads_cd, _ = objective(params, x, y, "cdvib_lossless", bank, 0.4, noise)
        assert loss_vib == pytest.approx(loss_cd, abs=1e-14)
        for name in grads_vib.arrays():
            np.testing.assert_allclose(
                grads_vib.arrays()[name], grads_cd.arrays()[name], atol=1e-14
            )

    def test_lossy_regularizer_nonnegative_and_zero_at_center(self):
        params, x, y, noise, rng = self._toy(2)
        bank = PriorBank.initial(3, 1, 2, 0.0, "lossy")
        _, _, aux = objective(params, x, y, "cdvib_lossy", bank, 1.0, noise)
        assert aux["kl_mean"] >= 0.0
        # move centers onto the encoder outputs: regularizer collapses to 0
        mean, var = encoder_forward(params.encoder, x)
        for i in range(5):
            bank.means[y[i], 0] = mean[i]
            bank.stds[y[i], 0] = np.sqrt(var[i])
        if len(set(y.tolist())) == 5:  # only exact when classes are distinct
            _, _, aux2 = objective(params, x, y, "cdvib_lossy", bank, 1.0, noise)
            assert aux2["kl_mean"] == pytest.approx(0.0, abs=1e-12)
        else:
            _, _, aux2 = objective(params, x, y, "cdvib_lossy", bank, 1.0, noise)
            assert aux2["kl_mean"] <= aux["kl_mean"]

    @pytest.mark.parametrize("kind", ["vib", "cdvib_lossless", "cdvib_lossy"])
    def test_gradients_match_finite_differences(self, kind):
        params, x, y, noise, rng = self._toy(3)
        bank = None
        if kind != "vib":
            mode = "lossy" if kind == "cdvib_lossy" else "lossless"
            bank = PriorBank.initial(3, 2, 2, 0.1, mode)
            bank.means += 0.3 * rng.standard_normal(bank.means.shape)
            bank.stds *= np.exp(0.2 * rng.standard_normal(bank.stds.shape))
        beta = 0.7
        _, grads, _ = objective(params, x, y, kind, bank, beta, noise)
        eps = 1e-5
        for name, arr in params.arrays().items():
            g = grads.arrays()[name]
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                keep = arr[idx]
                arr[idx] = keep + eps
                up, _, _ = objective(params, x, y, kind, bank, beta, noise)
                arr[idx] = keep - eps
                down, _, _ = objective(params, x, y, kind, bank, beta, noise)
                arr[idx] = keep
                numeric = (up - down) / (2 * eps)
                scale = max(abs(numeric), abs(g[idx]), 1e-8)
                assert abs(numeric - g[idx]) / scale < 1e-4, f"{kind} {name} {idx}"

    def test_nonfinite_loss_raises(self):
        params, x, y, noise, _ = self._toy(4)
        params.decoder.w_out[:] = np.inf
        with pytest.raises(FloatingPointError):
            objective(params, x, y, "vib", None, 0.1, noise)


class TestTrainLoop:
    def test_zero_epochs_keeps_init(self):
        spec = GeneratorSpec(separation=4.0)
        data = synth_dataset(spec, 50, 0)
        cfg = TrainConfig(epochs=0, seed=9)
        result = train(cfg, data)
        fresh = init_params(2, cfg.hidden_dim, cfg.latent_dim, 2, np.random.default_rng(9))
        for name, arr in result.params.arrays().items():
            np.testing.assert_array_equal(arr, fresh.arrays()[name])

    def test_bit_identical_reruns(self):
        spec = GeneratorSpec(separation=3.0)
        data = synth_dataset(spec, 120, 1)
        test = synth_dataset(spec, 80, 2)
        cfg = TrainConfig(objective="cdvib_lossless", epochs=3, seed=5, alpha=0.01)
        r1, r2 = train(cfg, data, test), train(cfg, data, test)
        assert r1.history == r2.history
        for name, arr in r1.params.arrays().items():
            np.testing.assert_array_equal(arr, r2.params.arrays()[name])
        np.testing.assert_array_equal(r1.bank.means, r2.bank.means)

    @pytest.mark.parametrize("objective_kind", ["vib", "cdvib_lossless", "cdvib_lossy"])
    def test_separable_blobs_fit(self, objective_kind):
        # Bayes accuracy is 0.9772; the stochastic model converges to the
        # Bayes-level fit on the train set (memorizing the overlap points is
        # blocked by the latent noise floor, so >= 0.97 is the honest target).
        spec = GeneratorSpec(kind="blobs", classes=2, dim=2, separation=4.0)
        data = synth_dataset(spec, 500, 1)
        cfg = TrainConfig(objective=objective_kind, beta=1e-3, epochs=15, seed=3)
        result = train(cfg, data)
        final = [r for r in result.history if r["split"] == "train"][-1]
        assert final["accuracy"] >= 0.97

    def test_alpha_batch_product_validated(self):
        with pytest.raises(ValueError):
            TrainConfig(objective="cdvib_lossless", alpha=0.5, batch_size=64).validate()

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_aborts_with_last_good_state(self):
        spec = GeneratorSpec(separation=2.0)
        data = synth_dataset(spec, 60, 3)
        cfg = TrainConfig(epochs=50, learning_rate=8000.0, lr_decay=1.0, seed=0)
        with pytest.raises(TrainingDiverged) as excinfo:
            train(cfg, data)
        result = excinfo.value.result
        assert result.diverged_at is not None
        for arr in result.params.arrays().values():
            assert np.all(np.isfinite(arr))

    def test_history_schema(self):
        spec = GeneratorSpec(separation=3.0)
        data = synth_dataset(spec, 60, 4)
        result = train(TrainConfig(epochs=2, seed=1), data, data)
        assert {r["split"] for r in result.history} == {"train", "test"}
        row = result.history[0]
        assert set(row) == {"epoch", "split", "accuracy", "loss", "mean_kl", "log_likelihood"}
