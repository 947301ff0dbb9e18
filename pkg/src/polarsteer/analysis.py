"""Post-hoc analyses on a trained surrogate.

All operations are read-only on the model: dropout-based uncertainty,
squared-derivative sensitivity maps, hidden-layer sensitivity, gradient
ascent over the inputs, and weight-matrix knowledge extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nn.model import SurrogateModel, backward, forward, forward_batch
from .oracle import N_CELLS, N_PARAMS


@dataclass
class UncertaintyEstimate:
    mean: np.ndarray  # (400,)
    std: np.ndarray  # (400,), >= 0
    samples: int


def mc_dropout_predict(model: SurrogateModel, config, t: int, seed: int = 0) -> UncertaintyEstimate:
    """Mean and per-location std over t stochastic forward passes.

    Masks are drawn sequentially from one seeded generator, so runs with
    larger t share the mask stream of smaller ones.  t = 1 yields std 0.
    """
    if t < 1:
        raise ValueError("number of passes must be >= 1")
    rng = np.random.default_rng(seed)
    outputs = np.empty((t, model.n_out))
    for i in range(t):
        outputs[i], _ = forward(model, config, mode="stochastic", rng=rng)
    return UncertaintyEstimate(outputs.mean(axis=0), outputs.std(axis=0), t)


def _jacobian(model: SurrogateModel, config, upto_layer: int | None = None,
              include_activation: bool = True) -> np.ndarray:
    """d activation / d input for the (deterministic) forward pass at config.

    upto_layer selects the layer whose output the Jacobian is taken at
    (default: the network output).
    """
    _, trace = forward(model, config, mode="deterministic")
    last = len(model.layers) - 1 if upto_layer is None else upto_layer
    jac = np.eye(model.n_in)
    for i in range(last + 1):
        layer = model.layers[i]
        jac = layer.weights @ jac
        if layer.activation == "relu" and (i < last or include_activation):
            jac = (trace.pre_acts[i][0] > 0.0)[:, None] * jac
    return jac


def sensitivity(model: SurrogateModel, config) -> np.ndarray:
    """(400, 35) map of squared partials of each output w.r.t. each input."""
    return _jacobian(model, config) ** 2


def avg_sensitivity(sens_map: np.ndarray, mask=None) -> np.ndarray:
    """Per-parameter mean of the map rows selected by mask (default: all)."""
    sens_map = np.asarray(sens_map, dtype=float)
    if mask is None:
        return sens_map.mean(axis=0)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (sens_map.shape[0],):
        raise ValueError("mask length must match map rows")
    if not mask.any():
        raise ValueError("mask selects no locations")
    return sens_map[mask].mean(axis=0)


def hidden_sensitivity(model: SurrogateModel, config, layer_index: int,
                       neuron_indices) -> np.ndarray:
    """Squared input-gradient of the mean activation of selected hidden neurons."""
    if not 0 <= layer_index < len(model.layers):
        raise IndexError(f"layer index {layer_index} out of range")
    neuron_indices = np.asarray(neuron_indices, dtype=int)
    width = model.layers[layer_index].n_out
    if neuron_indices.size == 0:
        raise ValueError("neuron selection is empty")
    if neuron_indices.min() < 0 or neuron_indices.max() >= width:
        raise IndexError(f"neuron index out of range for layer of width {width}")
    jac = _jacobian(model, config, upto_layer=layer_index)
    return jac[neuron_indices].mean(axis=0) ** 2


@dataclass
class OptimizationRequest:
    max_mask: np.ndarray  # (400,) bool
    min_mask: np.ndarray  # (400,) bool
    anchor: np.ndarray  # (35,)
    lam: float = 0.1
    steps: int = 500
    step_size: float = 0.01

    def __post_init__(self):
        self.max_mask = np.asarray(self.max_mask, dtype=bool)
        self.min_mask = np.asarray(self.min_mask, dtype=bool)
        self.anchor = np.asarray(self.anchor, dtype=float)
        if self.max_mask.shape != (N_CELLS,) or self.min_mask.shape != (N_CELLS,):
            raise ValueError("masks must have length 400")
        if np.any(self.max_mask & self.min_mask):
            raise ValueError("max and min masks must be disjoint")
        if not (self.max_mask.any() or self.min_mask.any()):
            raise ValueError("at least one mask must be nonempty")
        if self.anchor.shape != (N_PARAMS,):
            raise ValueError("anchor must have length 35")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be > 0")

    @property
    def origin(self) -> str:
        if self.max_mask.any() and self.min_mask.any():
            return "maxmin"
        return "max" if self.max_mask.any() else "min"


@dataclass
class OptimizationResult:
    optimum: np.ndarray  # (35,), within [-1, 1]
    trajectory: np.ndarray  # objective value after each step
    profile: np.ndarray  # deterministic prediction at the optimum
    objective: float = 0.0


def activation_optimize(model: SurrogateModel, req: OptimizationRequest) -> OptimizationResult:
    """Gradient ascent on the region objective

        (sum(max region) - sum(min region)) / #selected - lam*||x - x'||^2,

    i.e. a mean over all selected cells with min cells entering negatively.
    This keeps the objective on the scale of a single concentration value
    (stable against brush size) while still penalizing every min-region
    cell at full weight.  Starts at the anchor, clamps every iterate to
    [-1, 1]^35, and returns the best-objective iterate seen (anchor
    included).  Deterministic.
    """
    n_selected = int(req.max_mask.sum() + req.min_mask.sum())
    d_out = np.zeros(model.n_out)
    d_out[req.max_mask] = 1.0 / n_selected
    d_out[req.min_mask] = -1.0 / n_selected

    def objective(output, x):
        value = float(d_out @ output) - req.lam * float(np.sum((x - req.anchor) ** 2))
        return value

    x = req.anchor.copy()
    output, trace = forward(model, x, mode="deterministic")
    best_x, best_j = x.copy(), objective(output, x)
    trajectory = np.empty(req.steps)
    for step in range(req.steps):
        _, _, d_input = backward(model, trace, d_out)
        grad = d_input - 2.0 * req.lam * (x - req.anchor)
        x = np.clip(x + req.step_size * grad, -1.0, 1.0)
        output, trace = forward(model, x, mode="deterministic")
        j = objective(output, x)
        if not np.isfinite(j):
            raise RuntimeError(f"non-finite objective at step {step}")
        trajectory[step] = j
        if j > best_j:
            best_j, best_x = j, x.copy()
    profile, _ = forward(model, best_x, mode="deterministic")
    return OptimizationResult(best_x, trajectory, profile, best_j)


def weight_matrix(model: SurrogateModel, layer_index: int) -> np.ndarray:
    """Weights of one layer oriented inputs x outputs (copy)."""
    if not 0 <= layer_index < len(model.layers):
        raise IndexError(f"layer index {layer_index} out of range")
    return model.layers[layer_index].weights.T.copy()


def sort_rows(matrix: np.ndarray) -> np.ndarray:
    """Copy with each row sorted ascending; the input is untouched."""
    return np.sort(np.asarray(matrix, dtype=float), axis=1)


def row_pattern_query(matrix: np.ndarray, window, quantile: float = 0.81) -> np.ndarray:
    """Rows whose mean weight over the column window [lo, hi] strictly
    exceeds the quantile of all rows' window means; sorted ascending."""
    matrix = np.asarray(matrix, dtype=float)
    lo, hi = int(window[0]), int(window[1])
    if not 0 <= lo <= hi < matrix.shape[1]:
        raise ValueError(f"empty or out-of-range window [{lo}, {hi}]")
    if not 0.0 <= quantile <= 1.0:
        raise ValueError("quantile must be in [0, 1]")
    means = matrix[:, lo:hi + 1].mean(axis=1)
    threshold = np.quantile(means, quantile)
    return np.flatnonzero(means > threshold)


def parameter_range_flags(first_matrix: np.ndarray) -> np.ndarray:
    """Flag parameter rows whose max |weight| exceeds mean + 2*std of all
    rows' max |weight| — the range-may-need-expanding signal."""
    first_matrix = np.asarray(first_matrix, dtype=float)
    row_max = np.abs(first_matrix).max(axis=1)
    return row_max > row_max.mean() + 2.0 * row_max.std()
