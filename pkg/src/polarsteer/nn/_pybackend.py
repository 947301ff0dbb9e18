"""Pure-numpy reference kernels for the dense network hot path."""

import numpy as np

NAME = "python"


def linear_forward(x, w, b):
    """z = x @ w.T + b for a (n, in) batch; w is (out, in) row-major."""
    return x @ w.T + b


def relu(z):
    return np.maximum(z, 0.0)


def relu_grad(d_a, z):
    """Upstream grad gated by the relu derivative at z."""
    return np.where(z > 0.0, d_a, 0.0)


def grad_weights(d_z, x):
    """dW = d_z.T @ x, shape (out, in)."""
    return d_z.T @ x


def grad_bias(d_z):
    return d_z.sum(axis=0)


def grad_input(d_z, w):
    """dX = d_z @ w, shape (n, in)."""
    return d_z @ w
