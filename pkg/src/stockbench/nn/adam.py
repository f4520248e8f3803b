"""Adam with bias correction.

Defaults are the standard constants: beta1=0.9, beta2=0.999,
eps=1e-8, learning rate 1e-3.  One ``adam_step`` call advances the shared
step counter by exactly 1, regardless of how many parameter blocks it touches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    """First/second moment accumulators keyed like the parameter dict."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def mirrors(self, params: dict[str, np.ndarray]) -> bool:
        return set(self.m) <= set(params) and all(
            self.m[k].shape == params[k].shape for k in self.m
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    learning_rate: float = 1e-3,
    beta1: float = BETA1,
    beta2: float = BETA2,
    eps: float = EPS,
) -> AdamState:
    """Update ``params`` in place from ``grads`` and advance ``state``."""
    if set(grads) != set(params):
        raise ValueError("grads must carry exactly the parameter keys")
    state.step += 1
    t = state.step
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t
    for key, p in params.items():
        g = grads[key]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} mismatches parameter {key!r} {p.shape}")
        m = state.m.get(key)
        if m is None:
            m = state.m[key] = np.zeros_like(p)
            state.v[key] = np.zeros_like(p)
        v = state.v[key]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= learning_rate * (m / bc1) / (np.sqrt(v / bc2) + eps)
    return state
