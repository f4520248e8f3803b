"""The five benchmark architectures with their fixed hyperparameters.

Parameter counts follow from the single-bias gate convention:

    LSTM layer   4 * (n * (d + n) + n)
    GRU layer    3 * (n * (d + n) + n)
    Conv1D       kernel * c_in * filters + filters
    Dense        d * units + units

so BiLSTM(50) on 1 feature totals 20,901 and the GRU stack 15,777.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nn import (
    BidirectionalLSTM,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    GRU,
    LSTM,
    MaxPool1D,
    NetworkModel,
)

__all__ = [
    "TABLE_ORDER",
    "NETWORK_NAMES",
    "ZooEntry",
    "ZOO",
    "build_bilstm",
    "build_cnn_lstm",
    "build_gru_stack",
    "build_lstm_gru",
    "build_network",
    "arima_grid_config",
    "param_count",
]

TABLE_ORDER = ("BiLSTM", "ARIMA", "CNN_LSTM", "GRU", "LSTM_GRU")
NETWORK_NAMES = ("BiLSTM", "CNN_LSTM", "GRU", "LSTM_GRU")

DEFAULT_ARIMA_P = (0, 1, 2, 3, 4)
DEFAULT_ARIMA_Q = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    kind: str  # "network" | "arima"
    description: str


ZOO: dict[str, ZooEntry] = {
    "BiLSTM": ZooEntry(
        "BiLSTM", "network", "Bidirectional LSTM, 50 units, relu, single-node output"
    ),
    "ARIMA": ZooEntry(
        "ARIMA", "arima", "Conditional-least-squares ARMA with a (p, q) grid search by MAE"
    ),
    "CNN_LSTM": ZooEntry(
        "CNN_LSTM",
        "network",
        "TimeDistributed Conv1D(64, k=1) + MaxPool(2) + Flatten into LSTM(50, relu)",
    ),
    "GRU": ZooEntry(
        "GRU", "network", "Three stacked GRU(32) layers with 0.20 dropout before the output"
    ),
    "LSTM_GRU": ZooEntry(
        "LSTM_GRU", "network", "Two LSTM(32) layers feeding three GRU(32) layers"
    ),
}


def build_bilstm(time_step: int, seed: int = 0) -> NetworkModel:
    """Bidirectional LSTM(50, relu) into Dense(1, linear)."""
    if time_step < 1:
        raise ValueError(f"time_step must be >= 1, got {time_step}")
    layers = [
        BidirectionalLSTM(50, activation="relu", return_sequences=False),
        Dense(1, activation="linear"),
    ]
    return NetworkModel(layers, input_shape=(time_step, 1), rng_seed=seed)


def build_cnn_lstm(time_step: int, seed: int = 0) -> NetworkModel:
    """TimeDistributed Conv1D/MaxPool/Flatten over one subsequence, then LSTM(50, relu).

    Each sample is a single subsequence of ``time_step`` steps, so the
    convolutional stack runs per subsequence and the LSTM consumes the
    flattened feature vector as a length-1 sequence.
    """
    if time_step < 2:
        raise ValueError(f"time_step must be >= 2, got {time_step}")
    layers = [
        Conv1D(64, kernel_size=1, activation="relu", time_distributed=True),
        MaxPool1D(2, time_distributed=True),
        Flatten(time_distributed=True),
        LSTM(50, activation="relu", return_sequences=False),
        Dense(1, activation="linear"),
    ]
    return NetworkModel(layers, input_shape=(1, time_step, 1), rng_seed=seed)


def build_gru_stack(time_step: int, seed: int = 0) -> NetworkModel:
    """GRU(32) x2 returning sequences, GRU(32), Dropout(0.20), Dense(1, linear)."""
    if time_step < 1:
        raise ValueError(f"time_step must be >= 1, got {time_step}")
    layers = [
        GRU(32, return_sequences=True),
        GRU(32, return_sequences=True),
        GRU(32, return_sequences=False),
        Dropout(0.20),
        Dense(1, activation="linear"),
    ]
    return NetworkModel(layers, input_shape=(time_step, 1), rng_seed=seed)


def build_lstm_gru(time_step: int, seed: int = 0) -> NetworkModel:
    """LSTM(32) x2 into GRU(32) x3, Dense(1, linear); no dropout layer."""
    if time_step < 1:
        raise ValueError(f"time_step must be >= 1, got {time_step}")
    layers = [
        LSTM(32, return_sequences=True),
        LSTM(32, return_sequences=True),
        GRU(32, return_sequences=True),
        GRU(32, return_sequences=True),
        GRU(32, return_sequences=False),
        Dense(1, activation="linear"),
    ]
    return NetworkModel(layers, input_shape=(time_step, 1), rng_seed=seed)


_BUILDERS = {
    "BiLSTM": build_bilstm,
    "CNN_LSTM": build_cnn_lstm,
    "GRU": build_gru_stack,
    "LSTM_GRU": build_lstm_gru,
}


def build_network(name: str, time_step: int, seed: int = 0) -> NetworkModel:
    """Build any of the four neural entries by its table name."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown network {name!r}; choose from {NETWORK_NAMES}") from None
    return builder(time_step, seed)


def arima_grid_config(
    p_params=None, q_params=None
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """ARIMA grid candidates, default {0..4} x {0..4}, overridable per run."""
    p = DEFAULT_ARIMA_P if p_params is None else tuple(int(v) for v in p_params)
    q = DEFAULT_ARIMA_Q if q_params is None else tuple(int(v) for v in q_params)
    if not p or not q:
        raise ValueError("candidate lists must be nonempty")
    if any(v < 0 for v in p) or any(v < 0 for v in q):
        raise ValueError("orders must be non-negative")
    return p, q


def param_count(model: NetworkModel) -> int:
    """Total trainable parameter count across all layer blocks."""
    return model.param_count()
