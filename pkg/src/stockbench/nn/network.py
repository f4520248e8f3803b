"""Sequential network container: training loop, inference, and checkpoints.

A ``NetworkModel`` owns an ordered layer stack built for a concrete input
shape.  Samples are lag vectors of ``time_step`` values; ``input_shape``
decides how a lag vector is presented to the first layer:

    (T, 1)     a sequence of T steps with one feature each
    (1, T, 1)  one subsequence of T steps (TimeDistributed Conv/Pool stacks)

Training follows the per-sample regime: batch size 1, MSE loss, Adam, with
parameter init, shuffling, and dropout all driven by ``rng_seed`` so that two
fits with the same seed produce bit-identical histories.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .adam import AdamState, adam_step
from .layers import Dropout, Layer, LayerSpec, build_layer

__all__ = [
    "TrainConfig",
    "TrainingError",
    "NetworkModel",
    "mse_loss",
    "compute_gradients",
]

CHECKPOINT_FORMAT = "stockbench-network-v1"


class TrainingError(RuntimeError):
    """Raised when training cannot proceed (empty data, diverged loss)."""


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; defaults mirror the benchmark regime."""

    epochs: int = 50
    batch_size: int = 1
    learning_rate: float = 0.001
    loss: str = "mse"
    shuffle: bool = True

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.batch_size != 1:
            raise ValueError("only per-sample training (batch_size 1) is supported")
        if self.loss != "mse":
            raise ValueError(f"only the mse loss is supported, got {self.loss!r}")


def mse_loss(pred, target) -> tuple[float, np.ndarray]:
    """Mean squared error and its gradient with respect to ``pred``."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    diff = p - t
    return float(np.mean(diff * diff)), 2.0 * diff / p.size


class NetworkModel:
    """An ordered stack of layers plus Adam state and the seed that built it."""

    def __init__(self, layers: list[Layer], input_shape: tuple[int, ...], rng_seed: int = 0):
        if not layers:
            raise ValueError("a network needs at least one layer")
        self.layers = layers
        self.input_shape = tuple(int(s) for s in input_shape)
        self.rng_seed = int(rng_seed)
        self.adam = AdamState()
        self.train_config: TrainConfig | None = None
        init_rng = np.random.default_rng([self.rng_seed, 0])
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.build(shape, init_rng)
        self.output_shape = shape

    @property
    def specs(self) -> list[LayerSpec]:
        return [layer.spec() for layer in self.layers]

    @property
    def time_step(self) -> int:
        # (T, 1) and (1, T, 1) shapes carry the window length second to last;
        # a plain (d,) vector input IS the window
        return self.input_shape[-2] if len(self.input_shape) > 1 else self.input_shape[0]

    def param_count(self) -> int:
        return sum(layer.param_count() for layer in self.layers)

    def param_blocks(self) -> dict[str, np.ndarray]:
        """All parameters flattened into one dict keyed ``<layer_idx>/<name>``."""
        out: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.params.items():
                out[f"{i}/{name}"] = value
        return out

    def grad_blocks(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.grads.items():
                out[f"{i}/{name}"] = value
        return out

    def reshape_input(self, lag_vector) -> np.ndarray:
        x = np.asarray(lag_vector, dtype=np.float64).reshape(-1)
        expected = int(np.prod(self.input_shape))
        if x.size != expected:
            raise ValueError(f"expected {expected} lag values, got {x.size}")
        return x.reshape(self.input_shape)

    def forward(self, x: np.ndarray, *, train: bool = False, rng=None) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, train=train, rng=rng)
        return x

    def zero_grads(self) -> None:
        for layer in self.layers:
            layer.zero_grads()

    def freeze_dropout(self, frozen: bool = True) -> None:
        """Pin dropout masks to their last sampled values (gradient checking)."""
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.frozen = frozen
                if not frozen:
                    layer._mask = None

    def loss_on(self, lag_vector, target: float, *, train: bool = False, rng=None) -> float:
        """Forward-only loss for one sample."""
        y = self.forward(self.reshape_input(lag_vector), train=train, rng=rng)
        loss, _ = mse_loss(y, np.array([float(target)]))
        return loss

    def predict(self, inputs) -> np.ndarray:
        """Eval-mode predictions (dropout off) for rows of lag vectors."""
        rows = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        out = np.empty(rows.shape[0])
        for i, row in enumerate(rows):
            y = self.forward(self.reshape_input(row), train=False)
            out[i] = float(y[0])
        return out

    def fit(self, dataset, config: TrainConfig | None = None) -> list[float]:
        """Per-sample training; returns the mean loss of each epoch."""
        config = config or TrainConfig()
        n = len(dataset)
        if n == 0:
            raise TrainingError("cannot train on an empty dataset")
        rng = np.random.default_rng([self.rng_seed, 1])
        self.train_config = config
        history: list[float] = []
        for epoch in range(config.epochs):
            order = rng.permutation(n) if config.shuffle else np.arange(n)
            total = 0.0
            for idx in order:
                loss = self.train_step(
                    dataset.inputs[idx], dataset.targets[idx], config.learning_rate, rng
                )
                if not math.isfinite(loss):
                    raise TrainingError(
                        f"non-finite loss at epoch {epoch + 1}, sample {int(idx)}"
                    )
                total += loss
            history.append(total / n)
        return history

    def train_step(self, lag_vector, target: float, learning_rate: float, rng) -> float:
        loss, _ = compute_gradients(self, lag_vector, target, rng=rng, train=True)
        if not math.isfinite(loss):
            return loss  # caller reports; skipping the update keeps params clean
        adam_step(self.param_blocks(), self.grad_blocks(), self.adam, learning_rate)
        return loss

    # -- checkpoints ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "rng_seed": self.rng_seed,
            "input_shape": list(self.input_shape),
            "train_config": asdict(self.train_config) if self.train_config else None,
            "layers": [spec.to_dict() for spec in self.specs],
            "params": [
                {name: value.tolist() for name, value in layer.params.items()}
                for layer in self.layers
            ],
            "adam": {
                "step": self.adam.step,
                "m": {k: v.tolist() for k, v in self.adam.m.items()},
                "v": {k: v.tolist() for k, v in self.adam.v.items()},
            },
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_dict(cls, payload: dict) -> "NetworkModel":
        if payload.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"unsupported checkpoint format {payload.get('format')!r}")
        layers = [build_layer(LayerSpec(**spec)) for spec in payload["layers"]]
        model = cls(layers, tuple(payload["input_shape"]), payload["rng_seed"])
        for layer, block in zip(model.layers, payload["params"]):
            for name, value in block.items():
                arr = np.asarray(value, dtype=np.float64)
                if layer.params[name].shape != arr.shape:
                    raise ValueError(f"checkpoint block {name!r} has shape {arr.shape}")
                layer.params[name][...] = arr
            if hasattr(layer, "_collect_params"):
                layer._collect_params()
        adam = payload.get("adam") or {}
        model.adam = AdamState(
            step=int(adam.get("step", 0)),
            m={k: np.asarray(v, dtype=np.float64) for k, v in adam.get("m", {}).items()},
            v={k: np.asarray(v, dtype=np.float64) for k, v in adam.get("v", {}).items()},
        )
        tc = payload.get("train_config")
        model.train_config = TrainConfig(**tc) if tc else None
        return model

    @classmethod
    def load(cls, path: str | Path) -> "NetworkModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def compute_gradients(
    model: NetworkModel, lag_vector, target: float, *, rng=None, train: bool = True
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and exact reverse-mode gradients for one sample.

    Dropout masks are sampled once in the forward pass and reused in the
    backward pass; pass ``train=False`` for the eval-mode gradient.
    """
    x = model.reshape_input(lag_vector)
    model.zero_grads()
    y = model.forward(x, train=train, rng=rng)
    loss, gy = mse_loss(y, np.array([float(target)]))
    for layer in reversed(model.layers):
        gy = layer.backward(gy)
    return loss, model.grad_blocks()
