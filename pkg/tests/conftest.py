"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import functools

import numpy as np
import pytest

from polarsteer import nn, oracle

# --------------------------------------------------------------- training

TRAIN_N = 3000
SWEEP_EPOCHS = 60


@functools.lru_cache(maxsize=None)
def dataset_for_seed(seed: int, n: int = TRAIN_N) -> oracle.Dataset:
    return oracle.generate_dataset(n, seed)


@functools.lru_cache(maxsize=None)
def desk_model(seed: int, epochs: int = SWEEP_EPOCHS, n: int = TRAIN_N):
    """Train (and cache) a desk-preset surrogate on the seed's dataset."""
    cfg = nn.TrainConfig(epochs=epochs, rng_seed=seed)
    model, _ = nn.train(nn.init_preset("desk", seed=seed), dataset_for_seed(seed, n), cfg)
    return model


@pytest.fixture(scope="session")
def trained_desk():
    return desk_model(0)


@pytest.fixture(scope="session")
def train_dataset():
    return dataset_for_seed(0)


# ------------------------------------------------- finite-difference oracle

def fd_input_gradient(model, x, d_out, h=1e-4):
    """Central finite differences of d_out . f(x) w.r.t. the input."""
    def value(xv):
        out, _ = nn.forward(model, xv)
        return float(np.dot(d_out, out))

    grad = np.empty(len(x))
    for i in range(len(x)):
        step = np.zeros(len(x))
        step[i] = h
        grad[i] = (value(x + step) - value(x - step)) / (2 * h)
    return grad


def fd_param_gradients(model, x, d_out, h=1e-4):
    """Central finite differences w.r.t. every weight and bias entry."""
    def value():
        out, _ = nn.forward(model, x)
        return float(np.dot(d_out, out))

    weight_grads, bias_grads = [], []
    for layer in model.layers:
        wg = np.empty_like(layer.weights)
        for idx in np.ndindex(layer.weights.shape):
            orig = layer.weights[idx]
            layer.weights[idx] = orig + h
            hi = value()
            layer.weights[idx] = orig - h
            lo = value()
            layer.weights[idx] = orig
            wg[idx] = (hi - lo) / (2 * h)
        weight_grads.append(wg)
        bg = np.empty_like(layer.bias)
        for i in range(len(layer.bias)):
            orig = layer.bias[i]
            layer.bias[i] = orig + h
            hi = value()
            layer.bias[i] = orig - h
            lo = value()
            layer.bias[i] = orig
            bg[i] = (hi - lo) / (2 * h)
        bias_grads.append(bg)
    return weight_grads, bias_grads


def grad_close(analytic, numeric, rel=1e-4, floor=1e-8):
    """Relative comparison with an absolute floor for near-zero entries."""
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    small = np.abs(analytic) < floor
    diff = np.abs(analytic - numeric)
    ok_small = diff[small] < rel
    ok_big = diff[~small] / np.abs(analytic)[~small] < rel
    return bool(ok_small.all() and ok_big.all())


def random_relu_net(rng):
    """A random net with <= 4 layers and widths <= 16, relu hidden layers."""
    depth = rng.integers(1, 5)
    sizes = rng.integers(2, 17, size=depth + 1).tolist()
    model = nn.init_model(sizes, [0.0] * (depth - 1), seed=int(rng.integers(1 << 31)))
    # Random biases so relu kinks sit away from zero inputs.
    for layer in model.layers:
        layer.bias[:] = rng.normal(0.0, 0.5, layer.bias.shape)
    return model


# ------------------------------------------------ brute-force cluster oracle

def naive_hcluster(points, linkage):
    """O(n^3)-style agglomeration recomputing every linkage from the raw
    pairwise distances at each step; mirrors the documented tie-break."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    dist = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    clusters = {i: [i] for i in range(n)}
    merges = []
    for step in range(n - 1):
        best = None
        for a in sorted(clusters):
            for b in sorted(clusters):
                if b <= a:
                    continue
                block = dist[np.ix_(clusters[a], clusters[b])]
                if linkage == "single":
                    d = block.min()
                elif linkage == "complete":
                    d = block.max()
                else:
                    d = block.mean()
                key = (d, a, b)
                if best is None or key < best:
                    best = key
        d, a, b = best
        new_id = n + step
        clusters[new_id] = clusters.pop(a) + clusters.pop(b)
        merges.append((a, b, float(d)))
    return merges
