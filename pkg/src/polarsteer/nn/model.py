"""Dense feed-forward regression network with inverted dropout.

Weights are stored row-major as (out, in) matrices.  Forward passes run in
deterministic mode (no dropout) or stochastic mode (inverted-dropout masks
drawn from a seeded generator); backward returns exact gradients for
weights, biases and the input vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import kernels

ACTIVATIONS = ("relu", "identity")


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = "relu"
    dropout_rate: float = 0.0

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("bias length must equal weight row count")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")

    @property
    def n_out(self):
        return self.weights.shape[0]

    @property
    def n_in(self):
        return self.weights.shape[1]


@dataclass
class SurrogateModel:
    layers: list[Layer]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("model needs at least one layer")
        for i in range(1, len(self.layers)):
            if self.layers[i].n_in != self.layers[i - 1].n_out:
                raise ValueError(
                    f"layer {i} expects {self.layers[i].n_in} inputs but layer "
                    f"{i - 1} outputs {self.layers[i - 1].n_out}"
                )

    @property
    def n_in(self):
        return self.layers[0].n_in

    @property
    def n_out(self):
        return self.layers[-1].n_out

    @property
    def layer_sizes(self):
        return [self.n_in] + [layer.n_out for layer in self.layers]

    def copy(self) -> "SurrogateModel":
        return SurrogateModel(
            [Layer(l.weights.copy(), l.bias.copy(), l.activation, l.dropout_rate)
             for l in self.layers],
            dict(self.meta),
        )


@dataclass
class ForwardTrace:
    """Per-layer intermediates from one forward pass (batched)."""

    inputs: list  # input to each layer, (n, in)
    pre_acts: list  # z = x @ W.T + b, (n, out)
    masks: list  # scaled inverted-dropout mask or None per layer
    output: np.ndarray  # (n, n_out)


# Architecture presets: layer sizes plus the dropout rate of each hidden layer.
PRESETS = {
    "paper": ([35, 1024, 800, 500, 400], [0.3, 0.3, 0.0]),
    "desk": ([35, 256, 128, 400], [0.3, 0.3]),
}


def init_model(layer_sizes, hidden_dropout, seed: int, meta=None) -> SurrogateModel:
    """He-style uniform init (limit sqrt(6/fan_in)), seeded."""
    if len(hidden_dropout) != len(layer_sizes) - 2:
        raise ValueError("need one dropout rate per hidden layer")
    rng = np.random.default_rng(seed)
    layers = []
    for i in range(len(layer_sizes) - 1):
        fan_in, fan_out = layer_sizes[i], layer_sizes[i + 1]
        limit = np.sqrt(6.0 / fan_in)
        weights = rng.uniform(-limit, limit, (fan_out, fan_in))
        hidden = i < len(layer_sizes) - 2
        layers.append(Layer(
            weights, np.zeros(fan_out),
            activation="relu" if hidden else "identity",
            dropout_rate=hidden_dropout[i] if hidden else 0.0,
        ))
    return SurrogateModel(layers, meta or {})


def init_preset(preset: str, seed: int) -> SurrogateModel:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    sizes, dropout = PRESETS[preset]
    return init_model(sizes, dropout, seed, meta={"preset": preset})


def forward_batch(model: SurrogateModel, x: np.ndarray,
                  rng: np.random.Generator | None = None) -> ForwardTrace:
    """Run a (n, n_in) batch through the network.

    With rng=None the pass is deterministic (dropout off); otherwise
    inverted-dropout masks are sampled from rng for every layer with a
    nonzero rate.
    """
    x = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    if x.shape[1] != model.n_in:
        raise ValueError(f"input width {x.shape[1]} != model input {model.n_in}")
    inputs, pre_acts, masks = [], [], []
    for layer in model.layers:
        inputs.append(x)
        z = kernels.linear_forward(x, layer.weights, layer.bias)
        pre_acts.append(z)
        a = kernels.relu(z) if layer.activation == "relu" else z
        if rng is not None and layer.dropout_rate > 0.0:
            keep = 1.0 - layer.dropout_rate
            mask = (rng.random(a.shape) < keep) / keep
            a = a * mask
        else:
            mask = None
        masks.append(mask)
        x = np.ascontiguousarray(a)
    return ForwardTrace(inputs, pre_acts, masks, x)


def forward(model: SurrogateModel, config, mode: str = "deterministic",
            seed: int | None = None, rng=None):
    """Single-sample forward pass; returns (output, trace).

    mode 'stochastic' samples dropout masks from seed (or a caller-supplied
    generator); 'deterministic' applies no dropout.
    """
    if mode == "deterministic":
        gen = None
    elif mode == "stochastic":
        gen = rng if rng is not None else np.random.default_rng(seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    trace = forward_batch(model, np.asarray(config, dtype=float)[None, :], rng=gen)
    return trace.output[0], trace


def backward_batch(model: SurrogateModel, trace: ForwardTrace, d_output: np.ndarray):
    """Exact gradients for the affine/relu/dropout graph of one forward pass.

    Returns (weight_grads, bias_grads, d_input) with weight/bias grads summed
    over the batch and d_input per sample, shape (n, n_in).
    """
    d_a = np.ascontiguousarray(np.atleast_2d(d_output), dtype=np.float64)
    if d_a.shape != trace.output.shape:
        raise ValueError(
            f"upstream gradient shape {d_a.shape} does not match output {trace.output.shape}"
        )
    weight_grads = [None] * len(model.layers)
    bias_grads = [None] * len(model.layers)
    for i in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[i]
        if trace.masks[i] is not None:
            d_a = np.ascontiguousarray(d_a * trace.masks[i])
        if layer.activation == "relu":
            d_z = kernels.relu_grad(d_a, trace.pre_acts[i])
        else:
            d_z = d_a
        weight_grads[i] = kernels.grad_weights(d_z, trace.inputs[i])
        bias_grads[i] = kernels.grad_bias(d_z)
        d_a = kernels.grad_input(d_z, layer.weights)
    return weight_grads, bias_grads, d_a


def backward(model: SurrogateModel, trace: ForwardTrace, d_output):
    """Single-sample wrapper over backward_batch; d_input has shape (n_in,)."""
    d_output = np.asarray(d_output, dtype=float)
    if d_output.ndim == 1:
        d_output = d_output[None, :]
    weight_grads, bias_grads, d_input = backward_batch(model, trace, d_output)
    return weight_grads, bias_grads, d_input[0]
