import math

import numpy as np
import pytest
from scipy.special import expit

from stockbench.nn import (
    LayerSpec,
    conv1d_forward,
    dense_forward,
    dropout_forward,
    gru_step,
    lstm_step,
    maxpool1d_forward,
    run_recurrent_layer,
)


def lstm_params(d, n, b=None):
    return {
        "W": np.zeros((d, 4 * n)),
        "U": np.zeros((n, 4 * n)),
        "b": np.zeros(4 * n) if b is None else np.asarray(b, dtype=np.float64),
    }


def gru_params(d, n, b=None):
    return {
        "W": np.zeros((d, 3 * n)),
        "U": np.zeros((n, 3 * n)),
        "b": np.zeros(3 * n) if b is None else np.asarray(b, dtype=np.float64),
    }


class TestLstmStep:
    def test_zero_fixed_point(self):
        h, c = lstm_step([0.7], [0.0, 0.0], [0.0, 0.0], lstm_params(1, 2), "tanh")
        assert h.tolist() == [0.0, 0.0]
        assert c.tolist() == [0.0, 0.0]

    def test_forget_gate_bias_scalar(self):
        # gate order [i, f, g, o]: forget bias +10 holds the cell state
        params = lstm_params(1, 1, b=[0.0, 10.0, 0.0, 0.0])
        h, c = lstm_step([0.3], [0.0], [2.0], params, "relu")
        assert abs(c[0] - 2.0 * expit(10.0)) < 1e-12
        assert abs(h[0] - 0.5 * max(c[0], 0.0)) < 1e-12
        assert abs(c[0] - 1.99991) < 1e-4
        assert abs(h[0] - 0.99995) < 1e-4

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lstm_step([0.1], [0.0, 0.0, 0.0], [0.0, 0.0], lstm_params(1, 2), "tanh")


class TestGruStep:
    def test_all_zero_params_halves_state(self):
        h = gru_step([0.4], [0.8, -0.2], gru_params(1, 2), "tanh")
        np.testing.assert_allclose(h, [0.4, -0.1], atol=1e-15)

    def test_saturated_update_gate_holds_memory(self):
        params = gru_params(1, 1, b=[20.0, 0.0, 0.0])
        h = gru_step([0.9], [0.6], params, "tanh")
        assert abs(h[0] - 0.6) < 1e-8

    def test_scalar_hand_recomputation(self):
        wz, wr, wh = 0.3, -0.2, 0.5
        uz, ur, uh = 0.1, 0.4, -0.3
        bz, br, bh = 0.05, -0.1, 0.2
        x, h_prev = 0.7, 0.4
        params = {
            "W": np.array([[wz, wr, wh]]),
            "U": np.array([[uz, ur, uh]]),
            "b": np.array([bz, br, bh]),
        }
        z = 1 / (1 + math.exp(-(wz * x + uz * h_prev + bz)))
        r = 1 / (1 + math.exp(-(wr * x + ur * h_prev + br)))
        hh = math.tanh(wh * x + uh * (r * h_prev) + bh)
        expected = z * h_prev + (1 - z) * hh
        h = gru_step([x], [h_prev], params, "tanh")
        assert abs(h[0] - expected) < 1e-12


class TestRunRecurrentLayer:
    def test_shape_contract(self):
        rng = np.random.default_rng(0)
        seq = rng.normal(size=(3, 1))
        params = {
            "W": rng.normal(size=(1, 8)),
            "U": rng.normal(size=(2, 8)),
            "b": np.zeros(8),
        }
        spec_seq = LayerSpec(kind="LSTM", units=2, activation="tanh", return_sequences=True)
        assert run_recurrent_layer(seq, spec_seq, params).shape == (3, 2)
        spec_last = LayerSpec(kind="LSTM", units=2, activation="tanh", return_sequences=False)
        assert run_recurrent_layer(seq, spec_last, params).shape == (2,)

    def test_bidirectional_last_step_definition(self):
        rng = np.random.default_rng(1)
        seq = rng.normal(size=(4, 1))
        fwd = {"W": rng.normal(size=(1, 8)), "U": rng.normal(size=(2, 8)), "b": rng.normal(size=8)}
        bwd = {"W": rng.normal(size=(1, 8)), "U": rng.normal(size=(2, 8)), "b": rng.normal(size=8)}
        params = {f"forward/{k}": v for k, v in fwd.items()}
        params.update({f"backward/{k}": v for k, v in bwd.items()})
        spec = LayerSpec(kind="BidirectionalLSTM", units=2, activation="tanh", return_sequences=False)
        out = run_recurrent_layer(seq, spec, params)

        uni = LayerSpec(kind="LSTM", units=2, activation="tanh", return_sequences=True)
        forward_states = run_recurrent_layer(seq, uni, fwd)
        backward_states = run_recurrent_layer(seq[::-1], uni, bwd)
        expected = np.concatenate([forward_states[-1], backward_states[-1]])
        np.testing.assert_array_equal(out, expected)

    def test_bidirectional_shared_zero_params_symmetry(self):
        seq = np.array([[0.5], [0.2], [0.9]])
        zero = {"W": np.zeros((1, 8)), "U": np.zeros((2, 8)), "b": np.zeros(8)}
        params = {f"forward/{k}": v for k, v in zero.items()}
        params.update({f"backward/{k}": v.copy() for k, v in zero.items()})
        spec = LayerSpec(kind="BidirectionalLSTM", units=2, activation="tanh", return_sequences=True)
        out = run_recurrent_layer(seq, spec, params)
        np.testing.assert_array_equal(out[:, :2], out[:, 2:])

    def test_empty_sequence_rejected(self):
        spec = LayerSpec(kind="GRU", units=1, activation="tanh", return_sequences=False)
        with pytest.raises(ValueError):
            run_recurrent_layer(np.empty((0, 1)), spec, gru_params(1, 1))


class TestConv1d:
    def test_pointwise_affine_relu(self):
        params = {"W": np.array([[[2.0]]]), "b": np.array([1.0])}
        out = conv1d_forward(np.array([[1.0], [-3.0], [2.0]]), params, "relu")
        assert out.ravel().tolist() == [3.0, 0.0, 5.0]

    def test_identity_kernel(self):
        params = {"W": np.array([[[1.0]]]), "b": np.array([0.0])}
        seq = np.array([[0.3], [0.7], [-0.1]])
        np.testing.assert_array_equal(conv1d_forward(seq, params, "linear"), seq)

    def test_kernel3_same_padding(self):
        params = {"W": np.ones((3, 1, 1)), "b": np.array([0.0])}
        out = conv1d_forward(np.array([[1.0], [2.0], [3.0]]), params, "linear")
        assert out.ravel().tolist() == [3.0, 6.0, 5.0]

    def test_channel_mismatch(self):
        params = {"W": np.ones((1, 2, 1)), "b": np.zeros(1)}
        with pytest.raises(ValueError):
            conv1d_forward(np.ones((3, 1)), params)


class TestMaxPool1d:
    def test_even_length(self):
        out = maxpool1d_forward(np.array([[1.0], [3.0], [2.0], [5.0]]), 2)
        assert out.ravel().tolist() == [3.0, 5.0]

    def test_ragged_tail(self):
        out = maxpool1d_forward(np.array([[1.0], [3.0], [2.0]]), 2)
        assert out.ravel().tolist() == [3.0, 2.0]

    def test_single_step(self):
        out = maxpool1d_forward(np.array([[4.0]]), 2)
        assert out.ravel().tolist() == [4.0]


class TestDense:
    def test_affine(self):
        params = {"W": np.array([[0.5], [0.5]]), "b": np.array([1.0])}
        assert dense_forward([1.0, 2.0], params, "linear").tolist() == [2.5]

    def test_zero_weights_yield_bias(self):
        params = {"W": np.zeros((3, 1)), "b": np.array([4.5])}
        assert dense_forward([9.0, -2.0, 3.0], params, "linear").tolist() == [4.5]

    def test_relu_clamps(self):
        params = {"W": np.array([[1.0]]), "b": np.array([0.0])}
        assert dense_forward([-3.0], params, "relu").tolist() == [0.0]


class TestDropout:
    def test_eval_identity(self):
        x = np.linspace(-1, 1, 11)
        np.testing.assert_array_equal(dropout_forward(x, 0.5, "eval"), x)

    def test_survivor_scaling(self):
        rng = np.random.default_rng(0)
        x = np.ones(1000)
        out = dropout_forward(x, 0.2, "train", rng)
        survivors = out[out != 0.0]
        np.testing.assert_allclose(survivors, 1.25)

    def test_zeroed_fraction_concentrates(self):
        rng = np.random.default_rng(42)
        out = dropout_forward(np.ones(10_000), 0.2, "train", rng)
        zeroed = float(np.mean(out == 0.0))
        assert 0.17 <= zeroed <= 0.23

    def test_deterministic_given_seed(self):
        x = np.ones(100)
        a = dropout_forward(x, 0.3, "train", np.random.default_rng(9))
        b = dropout_forward(x, 0.3, "train", np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            dropout_forward(np.ones(3), 1.0, "train", np.random.default_rng(0))
        with pytest.raises(ValueError):
            dropout_forward(np.ones(3), 0.5, "sometimes")
