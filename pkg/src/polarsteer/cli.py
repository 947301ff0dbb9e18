"""Headless driver for the full pipeline.

Every command prints a one-line summary, writes a replayable run manifest
next to its outputs, and exits 0 on success (2: missing file, 3: shape
mismatch, 4: non-finite input, 1: anything else).
"""

from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__, analysis, oracle
from .nn import TrainConfig, init_preset, load_model, rmse_accuracy, save_model, train
from .oracle import N_CELLS, ParameterSpace

EXIT_MISSING_FILE = 2
EXIT_SHAPE = 3
EXIT_NONFINITE = 4

CELL_DEG = 360.0 / N_CELLS


class CliError(click.ClickException):
    def __init__(self, message, exit_code=1):
        super().__init__(message)
        self.exit_code = exit_code


def parse_angle_range(spec: str) -> np.ndarray:
    """Degree interval 'a:b' -> boolean cell mask, floor convention,
    wrapping across 0 degrees when a > b."""
    try:
        lo_deg, hi_deg = (float(v) for v in spec.split(":"))
    except ValueError:
        raise CliError(f"bad angle range {spec!r}; expected 'start:end' in degrees")
    lo = int(math.floor(lo_deg / CELL_DEG)) % N_CELLS
    hi = int(math.floor(hi_deg / CELL_DEG)) % N_CELLS
    mask = np.zeros(N_CELLS, dtype=bool)
    if lo <= hi:
        mask[lo:hi + 1] = True
    else:
        mask[lo:] = True
        mask[:hi + 1] = True
    return mask


def _read_config_file(path):
    """Simple 'key = value' file; '#' starts a comment."""
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}: malformed line {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _resolve(ctx, config_file, **cli_values):
    """File values fill in options the user left at their defaults."""
    resolved = dict(cli_values)
    if config_file:
        if not Path(config_file).exists():
            raise CliError(f"config file not found: {config_file}", EXIT_MISSING_FILE)
        from click.core import ParameterSource
        file_values = _read_config_file(config_file)
        for key, raw in file_values.items():
            if key not in resolved:
                raise CliError(f"{config_file}: unknown option {key!r}")
            if ctx.get_parameter_source(key) == ParameterSource.DEFAULT:
                current = resolved[key]
                caster = type(current) if current is not None else str
                resolved[key] = caster(raw) if caster is not bool else raw.lower() in ("1", "true", "yes")
    return resolved


def _write_manifest(command, params, outputs, seed, config_file, wall_time, manifest_path):
    manifest = {
        "version": __version__,
        "command": command,
        "seed": seed,
        "config_file": config_file,
        "parameters": {k: v for k, v in params.items() if k != "config_file"},
        "outputs": [str(p) for p in outputs],
        "wall_time_s": wall_time,
    }
    Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n")


def _require(path, what="file"):
    if not Path(path).exists():
        raise CliError(f"{what} not found: {path}", EXIT_MISSING_FILE)
    return path


@click.group()
@click.version_option(__version__)
def main():
    """Surrogate-assisted steering workbench for the polarization model."""


# ---------------------------------------------------------------- gen-data

def _gen_data_impl(n, seed, out):
    if n < 1:
        raise CliError("--n must be >= 1")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    space = ParameterSpace.default()
    dataset = oracle.generate_dataset(n, seed)
    configs_path = out_dir / "configs.csv"
    profiles_path = out_dir / "profiles.csv"
    oracle.save_dataset(dataset, space, configs_path, profiles_path)
    return [configs_path, profiles_path], f"wrote {n} samples to {out_dir}"


@main.command("gen-data")
@click.option("--n", default=3000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--config-file", type=click.Path(), default=None)
@click.pass_context
def gen_data(ctx, config_file, **kwargs):
    """Sample random configs and simulate their profiles."""
    params = _resolve(ctx, config_file, **kwargs)
    t0 = time.time()
    outputs, summary = _gen_data_impl(**params)
    _write_manifest("gen-data", params, outputs, params["seed"], config_file,
                    time.time() - t0, Path(params["out"]) / "manifest.json")
    click.echo(f"gen-data: {summary} (seed {params['seed']})")


# ------------------------------------------------------------------- train

def _load_dataset_dir(data):
    data_dir = Path(_require(data, "dataset directory"))
    configs = _require(data_dir / "configs.csv", "dataset configs")
    profiles = _require(data_dir / "profiles.csv", "dataset profiles")
    try:
        return oracle.load_dataset(configs, profiles, ParameterSpace.default())
    except ValueError as exc:
        raise CliError(str(exc), EXIT_SHAPE)


def _train_impl(data, preset, epochs, beta, seed, out, learning_rate, batch_size,
                validation_fraction):
    dataset = _load_dataset_dir(data)
    model = init_preset(preset, seed)
    cfg = TrainConfig(
        epochs=epochs, batch_size=batch_size, learning_rate=learning_rate,
        pf_weight_beta=beta, rng_seed=seed, validation_fraction=validation_fraction,
    )
    trained, history = train(model, dataset, cfg)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_model(trained, out_path)
    acc = history["val_accuracy"][-1]
    acc_text = f"{acc:.1f}%" if not math.isnan(acc) else "n/a"
    return [out_path], (
        f"{preset} preset, {epochs} epochs, final loss "
        f"{history['train_loss'][-1]:.3f}, val accuracy {acc_text}"
    )


@main.command("train")
@click.option("--data", required=True, type=click.Path())
@click.option("--preset", default="desk", type=click.Choice(["paper", "desk"]), show_default=True)
@click.option("--epochs", default=500, show_default=True)
@click.option("--beta", default=4.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--learning-rate", default=1e-3, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--validation-fraction", default=1 / 6, show_default=True)
@click.option("--config-file", type=click.Path(), default=None)
@click.pass_context
def train_cmd(ctx, config_file, **kwargs):
    """Train a surrogate on a generated dataset."""
    params = _resolve(ctx, config_file, **kwargs)
    t0 = time.time()
    try:
        outputs, summary = _train_impl(**params)
    except RuntimeError as exc:
        raise CliError(str(exc), EXIT_NONFINITE)
    _write_manifest("train", params, outputs, params["seed"], config_file,
                    time.time() - t0, str(outputs[0]) + ".manifest.json")
    click.echo(f"train: {summary} -> {outputs[0]}")


# -------------------------------------------------------------------- eval

def _eval_impl(model, data):
    net = load_model(_require(model, "model file"))
    dataset = _load_dataset_dir(data)
    if dataset.configs.shape[1] != net.n_in:
        raise CliError("dataset parameter width does not match model input", EXIT_SHAPE)
    return rmse_accuracy(net, dataset)


@main.command("eval")
@click.option("--model", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path())
def eval_cmd(model, data):
    """Report RMSE accuracy of a model on a dataset."""
    accuracy = _eval_impl(model, data)
    click.echo(f"eval: accuracy {accuracy:.1f}%")


# ----------------------------------------------------------------- predict

def _parse_config_row(spec):
    if ":" not in spec:
        raise CliError("--config-row must be FILE:ROW")
    path, _, row_text = spec.rpartition(":")
    _require(path, "config file")
    try:
        row = int(row_text)
    except ValueError:
        raise CliError(f"bad row index {row_text!r}")
    configs = np.atleast_2d(oracle.import_configs(path, ParameterSpace.default()))
    if not 0 <= row < len(configs):
        raise CliError(f"{path} has {len(configs)} rows, no row {row}", EXIT_SHAPE)
    config = configs[row]
    if not np.all(np.isfinite(config)):
        raise CliError("config row contains non-finite values", EXIT_NONFINITE)
    return config


def _predict_impl(model, config_row, out):
    from .nn import forward

    net = load_model(_require(model, "model file"))
    config = _parse_config_row(config_row)
    profile, _ = forward(net, config, mode="deterministic")
    outputs = []
    if out:
        Path(out).write_text(",".join(f"{v:.17g}" for v in profile) + "\n")
        outputs.append(Path(out))
    return outputs, profile


@main.command()
@click.option("--model", required=True, type=click.Path())
@click.option("--config-row", required=True, help="FILE:ROW in the export format")
@click.option("--out", type=click.Path(), default=None)
@click.option("--config-file", type=click.Path(), default=None)
@click.pass_context
def predict(ctx, config_file, **kwargs):
    """Predict the concentration profile for one exported config row."""
    params = _resolve(ctx, config_file, **kwargs)
    t0 = time.time()
    outputs, profile = _predict_impl(**params)
    if outputs:
        _write_manifest("predict", params, outputs, None, config_file,
                        time.time() - t0, str(outputs[0]) + ".manifest.json")
    click.echo(f"predict: max {profile.max():.2f} at cell {int(profile.argmax())}, "
               f"mean {profile.mean():.2f}")


# ---------------------------------------------------------------- optimize

def _optimize_impl(model, max_range, min_range, lam, steps, step_size, out):
    net = load_model(_require(model, "model file"))
    max_mask = parse_angle_range(max_range) if max_range else np.zeros(N_CELLS, bool)
    min_mask = parse_angle_range(min_range) if min_range else np.zeros(N_CELLS, bool)
    try:
        req = analysis.OptimizationRequest(
            max_mask, min_mask, np.zeros(net.n_in), lam=lam, steps=steps, step_size=step_size,
        )
        result = analysis.activation_optimize(net, req)
    except ValueError as exc:
        raise CliError(str(exc))
    except RuntimeError as exc:
        raise CliError(str(exc), EXIT_NONFINITE)
    pf = oracle.polarization_factor(oracle.simulate(result.optimum))
    outputs = []
    if out:
        oracle.export_configs(result.optimum[None, :], ParameterSpace.default(), out)
        outputs.append(Path(out))
    return outputs, result, pf, req.origin


@main.command()
@click.option("--model", required=True, type=click.Path())
@click.option("--max-range", default=None, help="degrees 'a:b' to maximize")
@click.option("--min-range", default=None, help="degrees 'a:b' to minimize")
@click.option("--lambda", "lam", default=0.1, show_default=True)
@click.option("--steps", default=500, show_default=True)
@click.option("--step-size", default=0.01, show_default=True)
@click.option("--out", type=click.Path(), default="optimum.csv", show_default=True)
@click.option("--config-file", type=click.Path(), default=None)
@click.pass_context
def optimize(ctx, config_file, **kwargs):
    """Recommend a parameter config for the selected membrane regions."""
    params = _resolve(ctx, config_file, **kwargs)
    t0 = time.time()
    outputs, result, pf, origin = _optimize_impl(**params)
    if outputs:
        _write_manifest("optimize", params, outputs, None, config_file,
                        time.time() - t0, str(outputs[0]) + ".manifest.json")
    click.echo(f"optimize[{origin}]: objective {result.objective:.3f}, oracle PF {pf:.4f}"
               + (f" -> {outputs[0]}" if outputs else ""))


# ------------------------------------------------------------------ export

def _export_impl(list_path, out):
    entries = json.loads(Path(_require(list_path, "saved list")).read_text())
    if not entries:
        raise CliError("saved list is empty; nothing to export")
    configs = np.array([e["config"] for e in entries], dtype=float)
    if configs.ndim != 2 or configs.shape[1] != oracle.N_PARAMS:
        raise CliError("saved list rows must have 35 values", EXIT_SHAPE)
    if not np.all(np.isfinite(configs)):
        raise CliError("saved list contains non-finite values", EXIT_NONFINITE)
    oracle.export_configs(configs, ParameterSpace.default(), out)
    return [Path(out)], len(entries)


@main.command()
@click.option("--list", "list_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--config-file", type=click.Path(), default=None)
@click.pass_context
def export(ctx, config_file, **kwargs):
    """Write a saved-list JSON file in the simulation-ready format."""
    params = _resolve(ctx, config_file, **kwargs)
    t0 = time.time()
    outputs, count = _export_impl(**params)
    _write_manifest("export", params, outputs, None, config_file,
                    time.time() - t0, str(outputs[0]) + ".manifest.json")
    click.echo(f"export: {count} configs -> {outputs[0]}")


# ------------------------------------------------------------------- serve

@main.command()
@click.option("--model", required=True, type=click.Path())
@click.option("--port", default=8040, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", type=click.Path(), default=None, help="gen-data output dir")
@click.option("--space", type=click.Path(), default=None, help="parameter-space JSON")
@click.option("--saved-list", type=click.Path(), default=None)
def serve(model, port, host, dataset, space, saved_list):
    """Serve the HTTP analysis API for a trained model."""
    import uvicorn

    from .service import build_state, create_app

    _require(model, "model file")
    configs = profiles = None
    if dataset:
        configs = _require(Path(dataset) / "configs.csv", "dataset configs")
        profiles = _require(Path(dataset) / "profiles.csv", "dataset profiles")
    state = build_state(model, configs, profiles, space, saved_list)
    click.echo(f"serve: model {state.hash} on {host}:{port}")
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")


# ------------------------------------------------------------------ replay

_REPLAYABLE = {
    "gen-data": _gen_data_impl,
    "train": _train_impl,
    "predict": _predict_impl,
    "optimize": _optimize_impl,
    "export": _export_impl,
}


@main.command()
@click.argument("manifest", type=click.Path())
def replay(manifest):
    """Re-run the command recorded in a manifest, reproducing its outputs."""
    path = _require(manifest, "manifest")
    record = json.loads(Path(path).read_text())
    command = record.get("command")
    if command not in _REPLAYABLE:
        raise CliError(f"cannot replay command {command!r}")
    _REPLAYABLE[command](**record["parameters"])
    click.echo(f"replay: {command} reproduced {len(record['outputs'])} output(s)")


if __name__ == "__main__":  # pragma: no cover
    main()
