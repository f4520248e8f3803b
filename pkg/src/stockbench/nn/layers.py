"""Neural layers with exact reverse-mode gradients, implemented on numpy float64.

Every layer works on a single sample (no batch axis), matching the per-sample
training regime used throughout.  Data shapes between layers:

    vector          (d,)            Dense input/output, Dropout
    sequence        (T, d)          recurrent layers, Conv1D, MaxPool1D
    subsequences    (S, T, c)       TimeDistributed Conv/Pool/Flatten

Recurrent cells use one bias vector per gate (no separate input/recurrent
biases), which fixes the parameter counts at 4*(n*(d+n)+n) for LSTM and
3*(n*(d+n)+n) for GRU.  Gate activations are always sigmoid; the layer's
``activation`` replaces both the candidate activation and the cell-output
activation.

Weights are initialized uniformly in [-limit, limit] with
limit = sqrt(6 / (fan_in + fan_out)) computed on each combined kernel;
biases start at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit as sigmoid


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def _identity(z: np.ndarray) -> np.ndarray:
    return z


# Each activation pairs the map with its derivative computed FROM THE OUTPUT,
# which is all the backward passes ever need.
_ACTIVATIONS: dict[str, tuple[Callable, Callable]] = {
    "relu": (_relu, lambda y: (y > 0).astype(np.float64)),
    "tanh": (np.tanh, lambda y: 1.0 - y * y),
    "sigmoid": (sigmoid, lambda y: y * (1.0 - y)),
    "linear": (_identity, lambda y: np.ones_like(y)),
}


def activation_pair(name: str) -> tuple[Callable, Callable]:
    try:
        return _ACTIVATIONS[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None


def glorot_uniform(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    fan_in, fan_out = shape[0], shape[-1]
    if len(shape) == 3:  # conv kernel (k, c_in, filters)
        fan_in = shape[0] * shape[1]
        fan_out = shape[0] * shape[2]
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


@dataclass(frozen=True)
class LayerSpec:
    """Serializable description of one layer; fields are set exactly when
    meaningful for the kind."""

    kind: str
    units: int | None = None
    filters: int | None = None
    kernel_size: int | None = None
    pool_size: int | None = None
    activation: str | None = None
    return_sequences: bool | None = None
    rate: float | None = None
    time_distributed: bool | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


class Layer:
    """Base: ``build`` allocates parameters for a concrete input shape, then
    ``forward``/``backward`` run one sample and accumulate ``grads``."""

    kind: str = "Layer"

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def build(self, input_shape: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
        raise NotImplementedError

    def forward(self, x: np.ndarray, *, train: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
        raise NotImplementedError

    def backward(self, gy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grads(self) -> None:
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def spec(self) -> LayerSpec:
        raise NotImplementedError

    def param_count(self) -> int:
        return int(sum(v.size for v in self.params.values()))


class Dense(Layer):
    """Affine map plus activation on a vector; optionally applied per row of a
    sequence when ``time_distributed``."""

    kind = "Dense"

    def __init__(self, units: int, activation: str = "linear", time_distributed: bool = False):
        super().__init__()
        if units < 1:
            raise ValueError("units must be >= 1")
        self.units = units
        self.activation = activation
        self.time_distributed = time_distributed
        self._act, self._dact = activation_pair(activation)

    def build(self, input_shape, rng):
        d = input_shape[-1]
        self.params = {
            "W": glorot_uniform((d, self.units), rng),
            "b": np.zeros(self.units),
        }
        self.zero_grads()
        return (*input_shape[:-1], self.units) if self.time_distributed else (self.units,)

    def forward(self, x, *, train=False, rng=None):
        y = self._act(x @ self.params["W"] + self.params["b"])
        self._x, self._y = x, y
        return y

    def backward(self, gy):
        gz = gy * self._dact(self._y)
        x = self._x
        if x.ndim == 1:
            self.grads["W"] += np.outer(x, gz)
            self.grads["b"] += gz
        else:
            flat_x = x.reshape(-1, x.shape[-1])
            flat_g = gz.reshape(-1, self.units)
            self.grads["W"] += flat_x.T @ flat_g
            self.grads["b"] += flat_g.sum(axis=0)
        return gz @ self.params["W"].T

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            units=self.units,
            activation=self.activation,
            time_distributed=self.time_distributed or None,
        )


class Dropout(Layer):
    """Inverted dropout: train mode zeroes entries with probability ``rate``
    and scales survivors by 1/(1-rate); eval mode is the identity.

    ``frozen`` makes the layer reuse its last sampled mask, which lets a
    finite-difference check probe the exact training loss surface.
    """

    kind = "Dropout"

    def __init__(self, rate: float):
        super().__init__()
        if not (0.0 <= rate < 1.0):
            raise ValueError(f"rate must lie in [0, 1), got {rate}")
        self.rate = rate
        self.frozen = False
        self._mask: np.ndarray | None = None

    def build(self, input_shape, rng):
        return input_shape

    def forward(self, x, *, train=False, rng=None):
        if not train or self.rate == 0.0:
            self._live_mask = None
            return x
        if self.frozen and self._mask is not None and self._mask.shape == x.shape:
            mask = self._mask
        else:
            if rng is None:
                raise ValueError("train-mode dropout needs an rng")
            mask = rng.random(x.shape) >= self.rate
            self._mask = mask
        self._live_mask = mask
        return x * mask / (1.0 - self.rate)

    def backward(self, gy):
        if self._live_mask is None:
            return gy
        return gy * self._live_mask / (1.0 - self.rate)

    def spec(self):
        return LayerSpec(kind=self.kind, rate=self.rate)


class Flatten(Layer):
    """Collapse trailing axes; with ``time_distributed``, per subsequence."""

    kind = "Flatten"

    def __init__(self, time_distributed: bool = False):
        super().__init__()
        self.time_distributed = time_distributed

    def build(self, input_shape, rng):
        if self.time_distributed:
            s, *rest = input_shape
            return (s, int(np.prod(rest)))
        return (int(np.prod(input_shape)),)

    def forward(self, x, *, train=False, rng=None):
        self._shape = x.shape
        if self.time_distributed:
            return x.reshape(x.shape[0], -1)
        return x.reshape(-1)

    def backward(self, gy):
        return gy.reshape(self._shape)

    def spec(self):
        return LayerSpec(kind=self.kind, time_distributed=self.time_distributed or None)


def _same_pad(kernel_size: int) -> tuple[int, int]:
    # stride-1 'same': total pad = k - 1, split with the extra column on the right
    left = (kernel_size - 1) // 2
    return left, kernel_size - 1 - left


class Conv1D(Layer):
    """Cross-correlation with 'same' zero padding and stride 1.

    Kernel shape (kernel_size, c_in, filters); with kernel_size 1 this is a
    pointwise affine map per step.
    """

    kind = "Conv1D"

    def __init__(
        self,
        filters: int,
        kernel_size: int,
        activation: str = "linear",
        time_distributed: bool = False,
    ):
        super().__init__()
        if filters < 1 or kernel_size < 1:
            raise ValueError("filters and kernel_size must be >= 1")
        self.filters = filters
        self.kernel_size = kernel_size
        self.activation = activation
        self.time_distributed = time_distributed
        self._act, self._dact = activation_pair(activation)

    def build(self, input_shape, rng):
        c_in = input_shape[-1]
        self.params = {
            "W": glorot_uniform((self.kernel_size, c_in, self.filters), rng),
            "b": np.zeros(self.filters),
        }
        self.zero_grads()
        return (*input_shape[:-1], self.filters)

    def _corr(self, x: np.ndarray) -> np.ndarray:
        t = x.shape[0]
        left, right = _same_pad(self.kernel_size)
        xp = np.pad(x, ((left, right), (0, 0)))
        out = np.broadcast_to(self.params["b"], (t, self.filters)).copy()
        for j in range(self.kernel_size):
            out += xp[j : j + t] @ self.params["W"][j]
        return out

    def forward(self, x, *, train=False, rng=None):
        self._x = x
        if self.time_distributed:
            y = np.stack([self._act(self._corr(sub)) for sub in x])
        else:
            y = self._act(self._corr(x))
        self._y = y
        return y

    def _corr_backward(self, x: np.ndarray, gz: np.ndarray) -> np.ndarray:
        t = x.shape[0]
        left, right = _same_pad(self.kernel_size)
        xp = np.pad(x, ((left, right), (0, 0)))
        gxp = np.zeros_like(xp)
        for j in range(self.kernel_size):
            self.grads["W"][j] += xp[j : j + t].T @ gz
            gxp[j : j + t] += gz @ self.params["W"][j].T
        self.grads["b"] += gz.sum(axis=0)
        return gxp[left : left + t]

    def backward(self, gy):
        gz = gy * self._dact(self._y)
        if self.time_distributed:
            return np.stack(
                [self._corr_backward(sub, g) for sub, g in zip(self._x, gz)]
            )
        return self._corr_backward(self._x, gz)

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            filters=self.filters,
            kernel_size=self.kernel_size,
            activation=self.activation,
            time_distributed=self.time_distributed or None,
        )


class MaxPool1D(Layer):
    """Max pooling with stride == pool_size and 'same' padding: windows tile
    the sequence and a ragged tail window simply covers fewer steps (padded
    positions can never win)."""

    kind = "MaxPool1D"

    def __init__(self, pool_size: int, time_distributed: bool = False):
        super().__init__()
        if pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        self.pool_size = pool_size
        self.time_distributed = time_distributed

    def build(self, input_shape, rng):
        if self.time_distributed:
            s, t, c = input_shape
            return (s, -(-t // self.pool_size), c)
        t, c = input_shape
        return (-(-t // self.pool_size), c)

    def _pool(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t, c = x.shape
        t_out = -(-t // self.pool_size)
        out = np.empty((t_out, c))
        argmax = np.empty((t_out, c), dtype=np.intp)
        for w in range(t_out):
            lo = w * self.pool_size
            seg = x[lo : min(lo + self.pool_size, t)]
            idx = np.argmax(seg, axis=0)
            out[w] = seg[idx, np.arange(c)]
            argmax[w] = lo + idx
        return out, argmax

    def forward(self, x, *, train=False, rng=None):
        self._shape = x.shape
        if self.time_distributed:
            pooled = [self._pool(sub) for sub in x]
            self._argmax = [a for _, a in pooled]
            return np.stack([o for o, _ in pooled])
        out, self._argmax = self._pool(x)
        return out

    def _pool_backward(self, gy: np.ndarray, argmax: np.ndarray, t: int) -> np.ndarray:
        gx = np.zeros((t, gy.shape[1]))
        cols = np.arange(gy.shape[1])
        for w in range(gy.shape[0]):
            gx[argmax[w], cols] += gy[w]
        return gx

    def backward(self, gy):
        if self.time_distributed:
            return np.stack(
                [
                    self._pool_backward(g, a, self._shape[1])
                    for g, a in zip(gy, self._argmax)
                ]
            )
        return self._pool_backward(gy, self._argmax, self._shape[0])

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            pool_size=self.pool_size,
            time_distributed=self.time_distributed or None,
        )


def _lstm_gates(zx_t, h_prev, c_prev, u, act):
    """One LSTM step from a precomputed input projection.

    zx_t = x_t @ W + b.  Gate layout along the last axis is [i, f, g, o].
    """
    n = h_prev.shape[0]
    z = zx_t + h_prev @ u
    i = sigmoid(z[:n])
    f = sigmoid(z[n : 2 * n])
    g = act(z[2 * n : 3 * n])
    o = sigmoid(z[3 * n :])
    c = f * c_prev + i * g
    a = act(c)
    h = o * a
    return h, c, i, f, g, o, a


def _gru_gates(zx_t, h_prev, u, act):
    """One GRU step from a precomputed input projection.

    zx_t = x_t @ W + b.  Gate layout is [z, r, candidate]; the candidate's
    recurrent term uses r * h_prev.
    """
    n = h_prev.shape[0]
    zu = h_prev @ u[:, : 2 * n]
    z = sigmoid(zx_t[:n] + zu[:n])
    r = sigmoid(zx_t[n : 2 * n] + zu[n:])
    rh = r * h_prev
    hh = act(zx_t[2 * n :] + rh @ u[:, 2 * n :])
    h = z * h_prev + (1.0 - z) * hh
    return h, z, r, rh, hh


class LSTM(Layer):
    """LSTM over a (T, d) sequence from zero initial state."""

    kind = "LSTM"

    def __init__(self, units: int, activation: str = "tanh", return_sequences: bool = False):
        super().__init__()
        if units < 1:
            raise ValueError("units must be >= 1")
        self.units = units
        self.activation = activation
        self.return_sequences = return_sequences
        self._act, self._dact = activation_pair(activation)

    def build(self, input_shape, rng):
        t, d = input_shape
        n = self.units
        self.params = {
            "W": glorot_uniform((d, 4 * n), rng),
            "U": glorot_uniform((n, 4 * n), rng),
            "b": np.zeros(4 * n),
        }
        self.zero_grads()
        return (t, n) if self.return_sequences else (n,)

    def forward(self, x, *, train=False, rng=None):
        t = x.shape[0]
        n = self.units
        zx = x @ self.params["W"] + self.params["b"]
        u = self.params["U"]
        h = np.zeros(n)
        c = np.zeros(n)
        i_s = np.empty((t, n)); f_s = np.empty((t, n)); g_s = np.empty((t, n))
        o_s = np.empty((t, n)); c_s = np.empty((t, n)); a_s = np.empty((t, n))
        h_s = np.empty((t, n))
        for step in range(t):
            h, c, i, f, g, o, a = _lstm_gates(zx[step], h, c, u, self._act)
            i_s[step], f_s[step], g_s[step], o_s[step] = i, f, g, o
            c_s[step], a_s[step], h_s[step] = c, a, h
        self._cache = (x, i_s, f_s, g_s, o_s, c_s, a_s, h_s)
        return h_s if self.return_sequences else h_s[-1]

    def backward(self, gy):
        t = self._cache[0].shape[0]
        if self.return_sequences:
            gys = gy
        else:
            gys = np.zeros((t, self.units))
            gys[-1] = gy
        return self.backward_sequence(gys)

    def backward_sequence(self, gys: np.ndarray) -> np.ndarray:
        """BPTT given a per-step output gradient (T, n)."""
        x, i_s, f_s, g_s, o_s, c_s, a_s, h_s = self._cache
        t = x.shape[0]
        n = self.units
        w, u = self.params["W"], self.params["U"]
        gw, gu, gb = self.grads["W"], self.grads["U"], self.grads["b"]
        gx = np.empty_like(x)
        dh_next = np.zeros(n)
        dc_next = np.zeros(n)
        for step in range(t - 1, -1, -1):
            i, f, g, o = i_s[step], f_s[step], g_s[step], o_s[step]
            a = a_s[step]
            h_prev = h_s[step - 1] if step > 0 else np.zeros(n)
            c_prev = c_s[step - 1] if step > 0 else np.zeros(n)
            dh = gys[step] + dh_next
            do = dh * a
            dc = dc_next + dh * o * self._dact(a)
            di = dc * g
            dg = dc * i
            df = dc * c_prev
            dc_next = dc * f
            dz = np.concatenate(
                [di * i * (1 - i), df * f * (1 - f), dg * self._dact(g), do * o * (1 - o)]
            )
            gw += np.outer(x[step], dz)
            gu += np.outer(h_prev, dz)
            gb += dz
            gx[step] = w @ dz
            dh_next = u @ dz
        return gx

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            units=self.units,
            activation=self.activation,
            return_sequences=self.return_sequences,
        )


class GRU(Layer):
    """GRU over a (T, d) sequence from zero initial state.

    h = z * h_prev + (1 - z) * candidate, so a saturated update gate (z -> 1)
    holds the previous state.
    """

    kind = "GRU"

    def __init__(self, units: int, activation: str = "tanh", return_sequences: bool = False):
        super().__init__()
        if units < 1:
            raise ValueError("units must be >= 1")
        self.units = units
        self.activation = activation
        self.return_sequences = return_sequences
        self._act, self._dact = activation_pair(activation)

    def build(self, input_shape, rng):
        t, d = input_shape
        n = self.units
        self.params = {
            "W": glorot_uniform((d, 3 * n), rng),
            "U": glorot_uniform((n, 3 * n), rng),
            "b": np.zeros(3 * n),
        }
        self.zero_grads()
        return (t, n) if self.return_sequences else (n,)

    def forward(self, x, *, train=False, rng=None):
        t = x.shape[0]
        n = self.units
        zx = x @ self.params["W"] + self.params["b"]
        u = self.params["U"]
        h = np.zeros(n)
        z_s = np.empty((t, n)); r_s = np.empty((t, n)); rh_s = np.empty((t, n))
        hh_s = np.empty((t, n)); h_s = np.empty((t, n))
        for step in range(t):
            h, z, r, rh, hh = _gru_gates(zx[step], h, u, self._act)
            z_s[step], r_s[step], rh_s[step], hh_s[step], h_s[step] = z, r, rh, hh, h
        self._cache = (x, z_s, r_s, rh_s, hh_s, h_s)
        return h_s if self.return_sequences else h_s[-1]

    def backward(self, gy):
        t = self._cache[0].shape[0]
        if self.return_sequences:
            gys = gy
        else:
            gys = np.zeros((t, self.units))
            gys[-1] = gy
        return self.backward_sequence(gys)

    def backward_sequence(self, gys: np.ndarray) -> np.ndarray:
        x, z_s, r_s, rh_s, hh_s, h_s = self._cache
        t = x.shape[0]
        n = self.units
        w, u = self.params["W"], self.params["U"]
        gw, gu, gb = self.grads["W"], self.grads["U"], self.grads["b"]
        gx = np.empty_like(x)
        dh_next = np.zeros(n)
        for step in range(t - 1, -1, -1):
            z, r, rh, hh = z_s[step], r_s[step], rh_s[step], hh_s[step]
            h_prev = h_s[step - 1] if step > 0 else np.zeros(n)
            dh = gys[step] + dh_next
            dz_gate = dh * (h_prev - hh)
            dhh = dh * (1.0 - z)
            dh_prev = dh * z
            dzg = dhh * self._dact(hh)
            d_rh = u[:, 2 * n :] @ dzg
            dr = d_rh * h_prev
            dh_prev = dh_prev + d_rh * r
            dzz = dz_gate * z * (1 - z)
            dzr = dr * r * (1 - r)
            dz2 = np.concatenate([dzz, dzr])
            dz_all = np.concatenate([dzz, dzr, dzg])
            gw += np.outer(x[step], dz_all)
            gu[:, : 2 * n] += np.outer(h_prev, dz2)
            gu[:, 2 * n :] += np.outer(rh, dzg)
            gb += dz_all
            dh_prev = dh_prev + u[:, : 2 * n] @ dz2
            gx[step] = w @ dz_all
            dh_next = dh_prev
        return gx

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            units=self.units,
            activation=self.activation,
            return_sequences=self.return_sequences,
        )


class BidirectionalLSTM(Layer):
    """Two independent LSTMs, one consuming the sequence reversed.

    Output at step t is concat(forward_h[t], backward_h[t]) where backward_h
    is re-aligned to input order; without return_sequences the output is
    concat(last forward state, backward state computed at the sequence start).
    """

    kind = "BidirectionalLSTM"

    def __init__(self, units: int, activation: str = "tanh", return_sequences: bool = False):
        super().__init__()
        self.units = units
        self.activation = activation
        self.return_sequences = return_sequences
        self.fwd = LSTM(units, activation, return_sequences=True)
        self.bwd = LSTM(units, activation, return_sequences=True)

    def build(self, input_shape, rng):
        t, _ = input_shape
        self.fwd.build(input_shape, rng)
        self.bwd.build(input_shape, rng)
        self._collect_params()
        return (t, 2 * self.units) if self.return_sequences else (2 * self.units,)

    def _collect_params(self):
        self.params = {f"forward/{k}": v for k, v in self.fwd.params.items()}
        self.params.update({f"backward/{k}": v for k, v in self.bwd.params.items()})
        self.grads = {f"forward/{k}": v for k, v in self.fwd.grads.items()}
        self.grads.update({f"backward/{k}": v for k, v in self.bwd.grads.items()})

    def zero_grads(self):
        self.fwd.zero_grads()
        self.bwd.zero_grads()
        self._collect_params()

    def forward(self, x, *, train=False, rng=None):
        hf = self.fwd.forward(x)
        hb = self.bwd.forward(x[::-1])[::-1]  # re-aligned to input positions
        if self.return_sequences:
            return np.concatenate([hf, hb], axis=1)
        return np.concatenate([hf[-1], hb[0]])

    def backward(self, gy):
        n = self.units
        t = self.fwd._cache[0].shape[0]
        if self.return_sequences:
            gf = gy[:, :n]
            gb = gy[:, n:]
        else:
            gf = np.zeros((t, n))
            gf[-1] = gy[:n]
            gb = np.zeros((t, n))
            gb[0] = gy[n:]
        gx_f = self.fwd.backward_sequence(gf)
        gx_b = self.bwd.backward_sequence(gb[::-1])[::-1]
        return gx_f + gx_b

    def spec(self):
        return LayerSpec(
            kind=self.kind,
            units=self.units,
            activation=self.activation,
            return_sequences=self.return_sequences,
        )


_LAYER_KINDS = {
    cls.kind: cls
    for cls in (Dense, Dropout, Flatten, Conv1D, MaxPool1D, LSTM, GRU, BidirectionalLSTM)
}


def build_layer(spec: LayerSpec) -> Layer:
    """Instantiate an unbuilt layer from its spec."""
    kind = spec.kind
    if kind not in _LAYER_KINDS:
        raise ValueError(f"unknown layer kind {kind!r}")
    if kind == "Dense":
        return Dense(spec.units, spec.activation or "linear", bool(spec.time_distributed))
    if kind == "Dropout":
        return Dropout(spec.rate)
    if kind == "Flatten":
        return Flatten(bool(spec.time_distributed))
    if kind == "Conv1D":
        return Conv1D(
            spec.filters, spec.kernel_size, spec.activation or "linear", bool(spec.time_distributed)
        )
    if kind == "MaxPool1D":
        return MaxPool1D(spec.pool_size, bool(spec.time_distributed))
    cls = _LAYER_KINDS[kind]
    return cls(spec.units, spec.activation or "tanh", bool(spec.return_sequences))


# -- Functional views used by tests and small callers ------------------------


def lstm_step(x_t, h_prev, c_prev, params: dict[str, np.ndarray], activation: str = "tanh"):
    """Single LSTM step: returns (h, c)."""
    x_t = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    w, u, b = params["W"], params["U"], params["b"]
    if x_t.shape[0] != w.shape[0] or h_prev.shape[0] != u.shape[0] or h_prev.shape != c_prev.shape:
        raise ValueError("dimension mismatch between inputs and parameters")
    act, _ = activation_pair(activation)
    h, c, *_ = _lstm_gates(x_t @ w + b, h_prev, c_prev, u, act)
    return h, c


def gru_step(x_t, h_prev, params: dict[str, np.ndarray], activation: str = "tanh"):
    """Single GRU step: returns h."""
    x_t = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    w, u, b = params["W"], params["U"], params["b"]
    if x_t.shape[0] != w.shape[0] or h_prev.shape[0] != u.shape[0]:
        raise ValueError("dimension mismatch between inputs and parameters")
    act, _ = activation_pair(activation)
    h, *_ = _gru_gates(x_t @ w + b, h_prev, u, act)
    return h


def run_recurrent_layer(seq, spec: LayerSpec, params: dict[str, np.ndarray]) -> np.ndarray:
    """Unroll a recurrent layer described by ``spec`` with explicit parameters."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise ValueError("sequence must be a nonempty (T, d) array")
    layer = build_layer(spec)
    layer.params = {k: np.asarray(v, dtype=np.float64) for k, v in params.items()}
    if isinstance(layer, BidirectionalLSTM):
        layer.fwd.params = {k.split("/", 1)[1]: v for k, v in layer.params.items() if k.startswith("forward/")}
        layer.bwd.params = {k.split("/", 1)[1]: v for k, v in layer.params.items() if k.startswith("backward/")}
    return layer.forward(seq)


def conv1d_forward(seq, params: dict[str, np.ndarray], activation: str = "linear") -> np.ndarray:
    """'same'-padded stride-1 cross-correlation plus activation on (T, c_in)."""
    seq = np.asarray(seq, dtype=np.float64)
    w = np.asarray(params["W"], dtype=np.float64)
    layer = Conv1D(filters=w.shape[2], kernel_size=w.shape[0], activation=activation)
    layer.params = {"W": w, "b": np.asarray(params["b"], dtype=np.float64)}
    if seq.shape[1] != w.shape[1]:
        raise ValueError("input channel count does not match the kernel")
    return layer.forward(seq)


def maxpool1d_forward(seq, pool_size: int) -> np.ndarray:
    """'same' max pooling with stride == pool_size on (T, c)."""
    layer = MaxPool1D(pool_size)
    return layer.forward(np.asarray(seq, dtype=np.float64))


def dense_forward(x, params: dict[str, np.ndarray], activation: str = "linear") -> np.ndarray:
    """Affine map plus activation."""
    w = np.asarray(params["W"], dtype=np.float64)
    layer = Dense(units=w.shape[1], activation=activation)
    layer.params = {"W": w, "b": np.asarray(params["b"], dtype=np.float64)}
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != w.shape[0]:
        raise ValueError("input dimension does not match the weight matrix")
    return layer.forward(x)


def dropout_forward(x, rate: float, mode: str, rng: np.random.Generator | None = None) -> np.ndarray:
    """Inverted dropout; ``mode`` is 'train' or 'eval'."""
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    layer = Dropout(rate)
    return layer.forward(np.asarray(x, dtype=np.float64), train=(mode == "train"), rng=rng)
