"""PF-weighted training loop, loss and validation metric."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..oracle import Dataset
from .model import SurrogateModel, backward_batch, forward_batch


def loss(predicted, target, sample_pf: float, beta: float) -> float:
    """Weighted MSE: (1 + beta*pf) * mean((pred - target)^2)."""
    predicted = np.asarray(predicted, dtype=float)
    target = np.asarray(target, dtype=float)
    if predicted.shape != target.shape:
        raise ValueError("predicted and target lengths differ")
    return float((1.0 + beta * sample_pf) * np.mean((predicted - target) ** 2))


@dataclass
class TrainConfig:
    epochs: int = 5000
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # "adam" or "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    pf_weight_beta: float = 4.0
    rng_seed: int = 0
    validation_fraction: float = 0.0
    validation: Dataset | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


class _Adam:
    def __init__(self, shapes, cfg: TrainConfig):
        self.cfg = cfg
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params, grads):
        cfg = self.cfg
        self.t += 1
        b1c = 1.0 - cfg.adam_beta1 ** self.t
        b2c = 1.0 - cfg.adam_beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= cfg.adam_beta1
            m += (1.0 - cfg.adam_beta1) * g
            v *= cfg.adam_beta2
            v += (1.0 - cfg.adam_beta2) * g * g
            p -= cfg.learning_rate * (m / b1c) / (np.sqrt(v / b2c) + cfg.adam_eps)


class _SGD:
    def __init__(self, shapes, cfg: TrainConfig):
        self.lr = cfg.learning_rate

    def step(self, params, grads):
        for p, g in zip(params, grads):
            p -= self.lr * g


def _split_validation(data: Dataset, cfg: TrainConfig):
    if cfg.validation is not None:
        return data, cfg.validation
    if cfg.validation_fraction <= 0.0:
        return data, None
    n_val = max(1, int(round(len(data) * cfg.validation_fraction)))
    if n_val >= len(data):
        raise ValueError("validation fraction leaves no training data")
    # Deterministic tail split; dataset rows are i.i.d. by construction.
    train = Dataset(data.configs[:-n_val], data.profiles[:-n_val], data.pf[:-n_val], data.seed)
    val = Dataset(data.configs[-n_val:], data.profiles[-n_val:], data.pf[-n_val:], data.seed)
    return train, val


def train(model: SurrogateModel, train_data: Dataset, cfg: TrainConfig):
    """Mini-batch descent with dropout active; returns (trained copy, history).

    History holds per-epoch mean train loss and validation accuracy (nan
    when no validation data is configured).
    """
    if len(train_data) == 0:
        raise ValueError("training dataset is empty")
    if train_data.configs.shape[1] != model.n_in:
        raise ValueError("dataset parameter width does not match model input")
    model = model.copy()
    data, validation = _split_validation(train_data, cfg)

    params = [a for layer in model.layers for a in (layer.weights, layer.bias)]
    opt_cls = _Adam if cfg.optimizer == "adam" else _SGD
    opt = opt_cls([p.shape for p in params], cfg)

    rng = np.random.default_rng(cfg.rng_seed)
    n = len(data)
    n_out = model.n_out
    history = {"train_loss": [], "val_accuracy": []}
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = data.configs[idx]
            y = data.profiles[idx]
            w = 1.0 + cfg.pf_weight_beta * data.pf[idx]

            trace = forward_batch(model, x, rng=rng)
            err = trace.output - y
            batch_loss = float(np.mean(w * np.mean(err * err, axis=1)))
            if not np.isfinite(batch_loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}, batch {start // cfg.batch_size}; "
                    "try a lower learning rate"
                )
            epoch_loss += batch_loss * len(idx)

            d_out = np.ascontiguousarray(
                (2.0 / (n_out * len(idx))) * w[:, None] * err
            )
            w_grads, b_grads, _ = backward_batch(model, trace, d_out)
            grads = [g for pair in zip(w_grads, b_grads) for g in pair]
            opt.step(params, grads)
        history["train_loss"].append(epoch_loss / n)
        history["val_accuracy"].append(
            rmse_accuracy(model, validation) if validation is not None else float("nan")
        )
    model.meta.setdefault("training", {})
    model.meta["training"].update({
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "optimizer": cfg.optimizer,
        "learning_rate": cfg.learning_rate,
        "pf_weight_beta": cfg.pf_weight_beta,
        "rng_seed": cfg.rng_seed,
        "final_train_loss": history["train_loss"][-1],
        "final_val_accuracy": (
            history["val_accuracy"][-1] if np.isfinite(history["val_accuracy"][-1]) else None
        ),
    })
    return model, history


def rmse_accuracy(model: SurrogateModel, validation: Dataset) -> float:
    """100 * (1 - RMSE / target range), clamped to [0, 100]."""
    if len(validation) == 0:
        raise ValueError("validation dataset is empty")
    targets = validation.profiles
    spread = float(targets.max() - targets.min())
    if spread == 0.0:
        raise ValueError("degenerate validation targets (max == min)")
    preds = forward_batch(model, validation.configs).output
    rmse = float(np.sqrt(np.mean((preds - targets) ** 2)))
    return float(np.clip(100.0 * (1.0 - rmse / spread), 0.0, 100.0))
