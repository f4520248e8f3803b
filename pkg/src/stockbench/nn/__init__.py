"""From-scratch neural toolkit: layers, exact gradients, Adam, training loop."""

from .adam import AdamState, adam_step
from .layers import (
    BidirectionalLSTM,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    GRU,
    LSTM,
    Layer,
    LayerSpec,
    MaxPool1D,
    build_layer,
    conv1d_forward,
    dense_forward,
    dropout_forward,
    gru_step,
    lstm_step,
    maxpool1d_forward,
    run_recurrent_layer,
)
from .network import (
    NetworkModel,
    TrainConfig,
    TrainingError,
    compute_gradients,
    mse_loss,
)

__all__ = [
    "AdamState",
    "adam_step",
    "BidirectionalLSTM",
    "Conv1D",
    "Dense",
    "Dropout",
    "Flatten",
    "GRU",
    "LSTM",
    "Layer",
    "LayerSpec",
    "MaxPool1D",
    "build_layer",
    "conv1d_forward",
    "dense_forward",
    "dropout_forward",
    "gru_step",
    "lstm_step",
    "maxpool1d_forward",
    "run_recurrent_layer",
    "NetworkModel",
    "TrainConfig",
    "TrainingError",
    "compute_gradients",
    "mse_loss",
]
