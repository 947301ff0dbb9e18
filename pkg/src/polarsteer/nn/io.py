"""Model persistence.

Versioned container: an ASCII header (magic, version, layer count, per-layer
dims/activation/dropout) terminated by a ``data`` line, followed by raw
little-endian float64 blocks per layer — weights row-major, then biases.
"""

from __future__ import annotations

import json

import numpy as np

from .model import ACTIVATIONS, Layer, SurrogateModel

MAGIC = b"POLARSTEER-MODEL"
VERSION = 1


class ModelFormatError(ValueError):
    """Raised for corrupt, truncated or incompatible model files."""


def save_model(model: SurrogateModel, destination) -> None:
    header = [f"{MAGIC.decode()} v{VERSION}", f"layers {len(model.layers)}"]
    for i, layer in enumerate(model.layers):
        header.append(
            f"layer {i} {layer.n_out} {layer.n_in} {layer.activation} {layer.dropout_rate!r}"
        )
    header.append("meta " + json.dumps(model.meta, sort_keys=True))
    header.append("data")
    with open(destination, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode())
        for layer in model.layers:
            fh.write(layer.weights.astype("<f8").tobytes())
            fh.write(layer.bias.astype("<f8").tobytes())


def load_model(source) -> SurrogateModel:
    with open(source, "rb") as fh:
        blob = fh.read()
    end = blob.find(b"\ndata\n")
    if end < 0 or not blob.startswith(MAGIC):
        raise ModelFormatError(f"{source}: not a model file (bad magic or missing data marker)")
    lines = blob[:end].decode(errors="replace").splitlines()
    if lines[0] != f"{MAGIC.decode()} v{VERSION}":
        raise ModelFormatError(f"{source}: unsupported version line {lines[0]!r}")
    try:
        n_layers = int(lines[1].split()[1])
    except (IndexError, ValueError) as exc:
        raise ModelFormatError(f"{source}: bad layer-count line") from exc

    specs = []
    meta = {}
    for line in lines[2:]:
        parts = line.split(None, 1)
        if parts[0] == "meta":
            meta = json.loads(parts[1])
            continue
        fields = line.split()
        if fields[0] != "layer" or len(fields) != 6:
            raise ModelFormatError(f"{source}: malformed header line {line!r}")
        idx, n_out, n_in = int(fields[1]), int(fields[2]), int(fields[3])
        activation, dropout = fields[4], float(fields[5])
        if idx != len(specs):
            raise ModelFormatError(f"{source}: layer lines out of order at index {idx}")
        if activation not in ACTIVATIONS:
            raise ModelFormatError(f"{source}: layer {idx} has unknown activation {activation!r}")
        specs.append((n_out, n_in, activation, dropout))
    if len(specs) != n_layers:
        raise ModelFormatError(f"{source}: header declares {n_layers} layers, found {len(specs)}")
    for i in range(1, n_layers):
        if specs[i][1] != specs[i - 1][0]:
            raise ModelFormatError(
                f"{source}: layer {i} expects {specs[i][1]} inputs but layer "
                f"{i - 1} outputs {specs[i - 1][0]}"
            )

    payload = blob[end + len(b"\ndata\n"):]
    expected = sum(o * i + o for o, i, _, _ in specs) * 8
    if len(payload) != expected:
        raise ModelFormatError(
            f"{source}: truncated or oversized payload ({len(payload)} bytes, expected {expected})"
        )
    layers = []
    offset = 0
    for n_out, n_in, activation, dropout in specs:
        w = np.frombuffer(payload, "<f8", n_out * n_in, offset).reshape(n_out, n_in)
        offset += n_out * n_in * 8
        b = np.frombuffer(payload, "<f8", n_out, offset)
        offset += n_out * 8
        layers.append(Layer(w.copy(), b.copy(), activation, dropout))
    return SurrogateModel(layers, meta)
