import numpy as np
import pytest

from stockbench import zoo
from stockbench.nn import Dense, Dropout


class TestBiLstm:
    def test_layer_list(self):
        model = zoo.build_bilstm(10)
        kinds = [spec.kind for spec in model.specs]
        assert kinds == ["BidirectionalLSTM", "Dense"]
        assert model.specs[0].units == 50
        assert model.specs[0].activation == "relu"
        assert model.specs[0].return_sequences is False
        assert model.specs[1].units == 1
        assert model.specs[1].activation == "linear"

    def test_parameter_count(self):
        model = zoo.build_bilstm(10)
        per_direction = 4 * (50 * (1 + 50) + 50)
        assert per_direction == 10_400
        assert model.layers[0].param_count() == 20_800
        assert model.layers[1].param_count() == 101
        assert zoo.param_count(model) == 20_901

    def test_time_step_zero_rejected(self):
        with pytest.raises(ValueError):
            zoo.build_bilstm(0)


class TestCnnLstm:
    def test_time_distributed_stack_shapes(self):
        model = zoo.build_cnn_lstm(10, seed=1)
        x = np.linspace(0.1, 0.9, 10).reshape(1, 10, 1)
        conv_out = model.layers[0].forward(x)
        assert conv_out.shape == (1, 10, 64)
        pool_out = model.layers[1].forward(conv_out)
        assert pool_out.shape == (1, 5, 64)
        flat_out = model.layers[2].forward(pool_out)
        assert flat_out.shape == (1, 320)

    @pytest.mark.parametrize("time_step", [2, 10, 11])
    def test_scalar_output(self, time_step):
        model = zoo.build_cnn_lstm(time_step, seed=1)
        out = model.forward(model.reshape_input(np.linspace(0.2, 0.8, time_step)))
        assert out.shape == (1,)

    def test_conv_parameter_count(self):
        model = zoo.build_cnn_lstm(10)
        assert model.layers[0].param_count() == 1 * 1 * 64 + 64 == 128

    def test_minimum_time_step(self):
        with pytest.raises(ValueError):
            zoo.build_cnn_lstm(1)


class TestGruStack:
    def test_layer_list(self):
        model = zoo.build_gru_stack(10)
        kinds = [spec.kind for spec in model.specs]
        assert kinds == ["GRU", "GRU", "GRU", "Dropout", "Dense"]
        assert [s.units for s in model.specs[:3]] == [32, 32, 32]
        assert [s.return_sequences for s in model.specs[:3]] == [True, True, False]
        assert model.specs[3].rate == 0.20

    def test_parameter_count(self):
        model = zoo.build_gru_stack(10)
        assert model.layers[0].param_count() == 3 * (32 * (1 + 32) + 32) == 3_264
        assert model.layers[1].param_count() == 3 * (32 * (32 + 32) + 32) == 6_240
        assert model.layers[2].param_count() == 6_240
        assert model.layers[4].param_count() == 33
        assert zoo.param_count(model) == 15_777

    def test_eval_predict_ignores_dropout(self):
        with_dropout = zoo.build_gru_stack(6, seed=3)
        without = zoo.build_gru_stack(6, seed=3)
        del without.layers[3]  # same weights, dropout removed
        row = np.linspace(0.1, 0.9, 6)
        assert with_dropout.predict([row])[0] == without.predict([row])[0]


class TestLstmGru:
    def test_layer_list(self):
        model = zoo.build_lstm_gru(10)
        kinds = [spec.kind for spec in model.specs]
        assert kinds == ["LSTM", "LSTM", "GRU", "GRU", "GRU", "Dense"]
        assert all(s.units == 32 for s in model.specs[:5])
        assert [s.return_sequences for s in model.specs[:5]] == [True, True, True, True, False]
        assert not any(s.kind == "Dropout" for s in model.specs)

    def test_parameter_counts(self):
        model = zoo.build_lstm_gru(10)
        assert model.layers[0].param_count() == 4 * (32 * 33 + 32) == 4_352
        assert model.layers[1].param_count() == 4 * (32 * 64 + 32) == 8_320

    @pytest.mark.parametrize("time_step", [1, 4])
    def test_scalar_output(self, time_step):
        model = zoo.build_lstm_gru(time_step, seed=2)
        out = model.forward(model.reshape_input(np.linspace(0.3, 0.7, time_step)))
        assert out.shape == (1,)


class TestZooCommon:
    @pytest.mark.parametrize("name", zoo.NETWORK_NAMES)
    def test_ends_in_single_linear_dense(self, name):
        model = zoo.build_network(name, 5, seed=0)
        last = model.layers[-1]
        assert isinstance(last, Dense)
        assert last.units == 1
        assert last.activation == "linear"

    @pytest.mark.parametrize("name", zoo.NETWORK_NAMES)
    def test_same_seed_bit_identical_init(self, name):
        a = zoo.build_network(name, 5, seed=123)
        b = zoo.build_network(name, 5, seed=123)
        for key, value in a.param_blocks().items():
            np.testing.assert_array_equal(value, b.param_blocks()[key])

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            zoo.build_network("Prophet", 5)

    def test_table_order_covers_the_five_rows(self):
        assert zoo.TABLE_ORDER == ("BiLSTM", "ARIMA", "CNN_LSTM", "GRU", "LSTM_GRU")
        assert set(zoo.ZOO) == set(zoo.TABLE_ORDER)


class TestArimaGridConfig:
    def test_default_25_cells(self):
        p, q = zoo.arima_grid_config()
        assert len(p) * len(q) == 25

    def test_override_single_cell(self):
        p, q = zoo.arima_grid_config([1], [1])
        assert (p, q) == ((1,), (1,))

    def test_empty_override_rejected(self):
        with pytest.raises(ValueError):
            zoo.arima_grid_config([], [1])
