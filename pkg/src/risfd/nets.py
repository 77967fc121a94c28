"""Dense feed-forward networks with hand-rolled reverse-mode gradients.

Small enough to stay in numpy: the policy and value networks are a few
fully-connected layers of width 128. Parameters are float64; forward
accepts a single vector or a batch (rows). The backward pass returns
gradients for every parameter *and* for the input, which the policy
update chains through the value network.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

_ACTIVATIONS = ("relu", "tanh", "linear")


@dataclass
class Mlp:
    """Layer sizes, per-layer activation tags, and parameters.

    ``weights[i]`` has shape (sizes[i+1], sizes[i]); ``biases[i]`` has
    shape (sizes[i+1],). ``activations`` has one tag per weight layer.
    """

    sizes: tuple[int, ...]
    activations: tuple[str, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if len(self.activations) != len(self.sizes) - 1:
            raise ValueError("one activation tag per layer required")
        for tag in self.activations:
            if tag not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {tag!r}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i + 1], self.sizes[i]):
                raise ValueError(f"layer {i} weight shape {w.shape} does not "
                                 f"chain {self.sizes[i]} -> {self.sizes[i+1]}")
            if b.shape != (self.sizes[i + 1],):
                raise ValueError(f"layer {i} bias shape mismatch")

    def clone(self) -> "Mlp":
        return Mlp(sizes=self.sizes, activations=self.activations,
                   weights=[w.copy() for w in self.weights],
                   biases=[b.copy() for b in self.biases])


def init_uniform(rng: np.random.Generator, sizes, activations) -> Mlp:
    """Fan-in uniform weights on [-1/sqrt(n_in), 1/sqrt(n_in)], zero biases."""
    sizes = tuple(int(s) for s in sizes)
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return Mlp(sizes=sizes, activations=tuple(activations),
               weights=weights, biases=biases)


def forward(net: Mlp, x: np.ndarray):
    """Run the network; returns (output, cache) with cache for backward.

    ``x`` may be a vector (input_size,) or a batch (batch, input_size);
    the output matches the input's dimensionality.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != net.sizes[0]:
        raise ValueError(f"input size {h.shape[1]} != {net.sizes[0]}")
    cache = []
    for w, b, tag in zip(net.weights, net.biases, net.activations):
        z = h @ w.T + b
        if tag == "relu":
            out = np.maximum(z, 0.0)
            cache.append((h, z, None))
        elif tag == "tanh":
            out = np.tanh(z)
            cache.append((h, None, out))
        else:
            out = z
            cache.append((h, None, None))
        h = out
    y = h[0] if single else h
    return y, (cache, single)


def backward(net: Mlp, cache, upstream: np.ndarray, need_input_grad: bool = True):
    """Exact gradients of sum(upstream * output) w.r.t. parameters and input.

    ``upstream`` is dLoss/dOutput with the same shape as the forward
    output. Returns (param_grads, input_grad) where param_grads is a
    list of (dW, db) per layer; input_grad is None when
    ``need_input_grad`` is False (skips one matrix product).
    """
    layer_cache, single = cache
    g = np.asarray(upstream, dtype=np.float64)
    if single:
        g = g[None, :]
    grads = [None] * len(net.weights)
    for i in range(len(net.weights) - 1, -1, -1):
        h_in, z, tanh_out = layer_cache[i]
        tag = net.activations[i]
        if tag == "relu":
            g = g * (z > 0.0)
        elif tag == "tanh":
            g = g * (1.0 - tanh_out ** 2)
        grads[i] = (g.T @ h_in, g.sum(axis=0))
        if i > 0 or need_input_grad:
            g = g @ net.weights[i]
    if not need_input_grad:
        return grads, None
    return grads, (g[0] if single else g)


@dataclass
class AdamState:
    """First/second moment accumulators matching one network's parameters."""

    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_net(cls, net: Mlp, beta1: float = 0.9, beta2: float = 0.999,
                eps: float = 1e-8) -> "AdamState":
        return cls(m_w=[np.zeros_like(w) for w in net.weights],
                   v_w=[np.zeros_like(w) for w in net.weights],
                   m_b=[np.zeros_like(b) for b in net.biases],
                   v_b=[np.zeros_like(b) for b in net.biases],
                   beta1=beta1, beta2=beta2, eps=eps)


def _adam_update(param, grad, m, v, b1, b2, eps, step_size, corr2) -> None:
    # in-place moment update and parameter step; grad buffer is consumed
    m *= b1
    m += (1.0 - b1) * grad
    np.multiply(grad, grad, out=grad)
    v *= b2
    v += (1.0 - b2) * grad
    denom = np.sqrt(v / corr2)
    denom += eps
    param -= step_size * m / denom


def adam_step(net: Mlp, grads, state: AdamState, lr: float) -> None:
    """One bias-corrected Adam update, in place on the network.

    The gradient arrays are scratch after this call.
    """
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1 ** t
    corr2 = 1.0 - b2 ** t
    step_size = lr / corr1
    for i, (dw, db) in enumerate(grads):
        _adam_update(net.weights[i], np.asarray(dw, dtype=np.float64),
                     state.m_w[i], state.v_w[i], b1, b2, state.eps,
                     step_size, corr2)
        _adam_update(net.biases[i], np.asarray(db, dtype=np.float64),
                     state.m_b[i], state.v_b[i], b1, b2, state.eps,
                     step_size, corr2)


def soft_update(target: Mlp, online: Mlp, beta: float) -> None:
    """Blend target parameters toward the online network, in place."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    if target.sizes != online.sizes or target.activations != online.activations:
        raise ValueError("architecture mismatch between target and online nets")
    for tw, ow in zip(target.weights, online.weights):
        tw *= (1.0 - beta)
        tw += beta * ow
    for tb, ob in zip(target.biases, online.biases):
        tb *= (1.0 - beta)
        tb += beta * ob


def save_mlp(path: str, net: Mlp) -> None:
    """Self-describing JSON checkpoint; round-trips exactly."""
    doc = {
        "format": "risfd-mlp",
        "sizes": list(net.sizes),
        "activations": list(net.activations),
        "weights": [w.ravel().tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_mlp(path: str) -> Mlp:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "risfd-mlp":
        raise ValueError(f"{path} is not a network checkpoint")
    sizes = tuple(doc["sizes"])
    weights = [np.array(w, dtype=np.float64).reshape(sizes[i + 1], sizes[i])
               for i, w in enumerate(doc["weights"])]
    biases = [np.array(b, dtype=np.float64) for b in doc["biases"]]
    return Mlp(sizes=sizes, activations=tuple(doc["activations"]),
               weights=weights, biases=biases)
