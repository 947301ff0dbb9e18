"""HTTP facade over the trained surrogate and its analyses.

Every computational endpoint delegates to the library functions with the
request's seeds, so responses match direct library calls exactly.  The
loaded model is immutable; the saved-parameter list is the only mutable
state and is guarded by a lock.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import analysis, clustering, oracle
from .nn.model import SurrogateModel, forward
from .oracle import N_CELLS, N_PARAMS, ParameterSpace, PFParams

DEFAULT_MC_SAMPLES = 50


def _error(status: int, code: str, message: str, fld: str | None = None):
    payload = {"error": {"code": code, "message": message}}
    if fld:
        payload["error"]["field"] = fld
    return JSONResponse(status_code=status, content=payload)


class ApiError(Exception):
    def __init__(self, status, code, message, field=None):
        super().__init__(message)
        self.status, self.code, self.message, self.field = status, code, message, field


def model_hash(model: SurrogateModel) -> str:
    digest = hashlib.sha256()
    for layer in model.layers:
        digest.update(layer.weights.tobytes())
        digest.update(layer.bias.tobytes())
    return digest.hexdigest()[:16]


@dataclass
class SessionState:
    model: SurrogateModel
    space: ParameterSpace
    dataset: oracle.Dataset | None = None
    pf_params: PFParams = field(default_factory=PFParams)
    saved_path: str | None = None
    saved_list: list = field(default_factory=list)  # (name, config list, origin)
    current_instance: int | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.hash = model_hash(self.model)

    def cached(self, key, compute):
        key = (self.hash,) + key
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def persist_saved(self):
        if self.saved_path:
            entries = [
                {"name": n, "config": list(map(float, c)), "origin": o}
                for n, c, o in self.saved_list
            ]
            with open(self.saved_path, "w") as fh:
                json.dump(entries, fh, indent=2)

    def load_saved(self):
        if self.saved_path:
            try:
                with open(self.saved_path) as fh:
                    entries = json.load(fh)
                self.saved_list = [
                    (e["name"], np.asarray(e["config"], dtype=float), e["origin"])
                    for e in entries
                ]
            except FileNotFoundError:
                pass


def _parse_config(values, field_name="config") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (N_PARAMS,):
        raise ApiError(400, "bad_config", f"expected {N_PARAMS} values, got {arr.size}", field_name)
    if not np.all(np.isfinite(arr)):
        raise ApiError(400, "bad_config", "config contains non-finite values", field_name)
    return arr


def _parse_mask(indices, field_name, allow_empty=False) -> np.ndarray:
    mask = np.zeros(N_CELLS, dtype=bool)
    if indices is None:
        indices = []
    idx = np.asarray(indices, dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= N_CELLS):
        raise ApiError(400, "bad_mask", f"cell indices must be in [0, {N_CELLS})", field_name)
    if not allow_empty and idx.size == 0:
        raise ApiError(400, "bad_mask", "mask selects no cells", field_name)
    mask[idx] = True
    return mask


def create_app(state: SessionState) -> FastAPI:
    app = FastAPI(title="polarsteer service")
    state.load_saved()

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return _error(exc.status, exc.code, exc.message, exc.field)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        return _error(400, "bad_request", str(first.get("msg", "invalid request")),
                      ".".join(str(p) for p in first.get("loc", [])))

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.get("/model/meta")
    def model_meta():
        model = state.model
        return {
            "layer_sizes": model.layer_sizes,
            "activations": [l.activation for l in model.layers],
            "dropout_rates": [l.dropout_rate for l in model.layers],
            "parameters": [
                {"name": n, "lo": float(lo), "hi": float(hi)}
                for n, lo, hi in zip(state.space.names, state.space.raw_lo, state.space.raw_hi)
            ],
            "training": state.model.meta.get("training", {}),
            "model_hash": state.hash,
            "n_instances": len(state.dataset) if state.dataset is not None else 0,
        }

    @app.post("/predict")
    def predict(body: dict):
        config = _parse_config(body.get("config"))
        profile, _ = forward(state.model, config, mode="deterministic")
        return {"profile": profile.tolist()}

    @app.post("/predict_uncertain")
    def predict_uncertain(body: dict):
        config = _parse_config(body.get("config"))
        t = body.get("T", DEFAULT_MC_SAMPLES)
        if not isinstance(t, int) or t < 1:
            raise ApiError(400, "bad_samples", "T must be a positive integer", "T")
        seed = int(body.get("seed", 0))
        est = analysis.mc_dropout_predict(state.model, config, t, seed=seed)
        return {"mean": est.mean.tolist(), "std": est.std.tolist(), "T": t, "seed": seed}

    @app.post("/sensitivity")
    def sensitivity_endpoint(body: dict):
        config = _parse_config(body.get("config"))
        sens = analysis.sensitivity(state.model, config)
        out = {
            "map": sens.tolist(),
            "averages": analysis.avg_sensitivity(sens).tolist(),
        }
        if "mask" in body and body["mask"] is not None:
            mask = _parse_mask(body["mask"], "mask")
            out["averages_selected"] = analysis.avg_sensitivity(sens, mask).tolist()
        return out

    @app.post("/optimize")
    def optimize(body: dict):
        max_mask = _parse_mask(body.get("max_mask"), "max_mask", allow_empty=True)
        min_mask = _parse_mask(body.get("min_mask"), "min_mask", allow_empty=True)
        if np.any(max_mask & min_mask):
            raise ApiError(400, "bad_mask", "max and min masks overlap", "min_mask")
        if not (max_mask.any() or min_mask.any()):
            raise ApiError(400, "bad_mask", "need at least one nonempty mask", "max_mask")
        anchor = _parse_config(body.get("anchor", [0.0] * N_PARAMS), "anchor")
        req = analysis.OptimizationRequest(
            max_mask, min_mask, anchor,
            lam=float(body.get("lambda", 0.1)),
            steps=int(body.get("steps", 500)),
            step_size=float(body.get("step_size", 0.01)),
        )
        result = analysis.activation_optimize(state.model, req)
        return {
            "optimum": result.optimum.tolist(),
            "trajectory": result.trajectory.tolist(),
            "profile": result.profile.tolist(),
            "objective": result.objective,
            "origin": req.origin,
        }

    @app.post("/diff")
    def diff(body: dict):
        a = _parse_config(body.get("configA"), "configA")
        b = _parse_config(body.get("configB"), "configB")
        pa, _ = forward(state.model, a, mode="deterministic")
        pb, _ = forward(state.model, b, mode="deterministic")
        return {"delta": (pa - pb).tolist()}

    def _instance(instance_id: int):
        if state.dataset is None or not 0 <= instance_id < len(state.dataset):
            raise ApiError(404, "unknown_instance", f"no instance {instance_id}")
        return state.dataset.configs[instance_id], state.dataset.profiles[instance_id]

    @app.get("/instance/{instance_id}")
    def instance(instance_id: int):
        config, profile = _instance(instance_id)
        predicted, _ = forward(state.model, config, mode="deterministic")
        state.current_instance = instance_id
        return {
            "id": instance_id,
            "config": config.tolist(),
            "profile": profile.tolist(),
            "predicted": predicted.tolist(),
            "pf": float(state.dataset.pf[instance_id]),
        }

    @app.get("/clusters/spatial")
    def clusters_spatial(instance: int, mode: str = "value",
                         T: int = DEFAULT_MC_SAMPLES, seed: int = 0):
        if mode not in ("value", "uncertainty"):
            raise ApiError(400, "bad_mode", "mode must be 'value' or 'uncertainty'", "mode")
        config, _ = _instance(instance)

        def compute():
            est = analysis.mc_dropout_predict(state.model, config, T, seed=seed)
            weights = (1.0, 0.0) if mode == "value" else (0.0, 1.0)
            return clustering.spatial_clusters(est.mean, est.std, weights=weights).to_dict()

        return {"mode": mode, "tree": state.cached(("spatial", instance, mode, T, seed), compute)}

    @app.get("/clusters/params")
    def clusters_params(instance: int):
        config, _ = _instance(instance)

        def compute():
            sens = analysis.sensitivity(state.model, config)
            return clustering.parameter_clusters(sens).to_dict()

        return {"tree": state.cached(("params", instance), compute)}

    def _layer(layer: int):
        if not 0 <= layer < len(state.model.layers):
            raise ApiError(404, "unknown_layer", f"no layer {layer}")
        return layer

    @app.get("/weights/{layer}")
    def weights(layer: int, sorted: int = 0):
        matrix = analysis.weight_matrix(state.model, _layer(layer))
        if sorted:
            matrix = analysis.sort_rows(matrix)
        return {"layer": layer, "shape": list(matrix.shape), "sorted": bool(sorted),
                "matrix": matrix.tolist()}

    @app.get("/weights/{layer}/row/{row}")
    def weights_row(layer: int, row: int):
        matrix = analysis.weight_matrix(state.model, _layer(layer))
        if not 0 <= row < matrix.shape[0]:
            raise ApiError(404, "unknown_row", f"layer {layer} has no row {row}")
        return {"layer": layer, "row": row, "values": matrix[row].tolist()}

    @app.post("/weights/pattern")
    def weights_pattern(body: dict):
        layer = _layer(int(body.get("layer", len(state.model.layers) - 1)))
        window = body.get("window")
        if not window or len(window) != 2:
            raise ApiError(400, "bad_window", "window must be [lo, hi]", "window")
        quantile = float(body.get("quantile", 0.81))
        matrix = analysis.weight_matrix(state.model, layer)
        try:
            indices = analysis.row_pattern_query(matrix, window, quantile)
        except ValueError as exc:
            raise ApiError(400, "bad_window", str(exc), "window")
        if state.current_instance is not None and state.dataset is not None:
            config = state.dataset.configs[state.current_instance]
        else:
            config = np.zeros(N_PARAMS)
        hidden = (
            analysis.hidden_sensitivity(state.model, config, layer - 1, indices).tolist()
            if len(indices) and layer > 0 else None
        )
        return {"layer": layer, "indices": indices.tolist(), "hidden_sensitivity": hidden}

    @app.post("/params/save")
    def params_save(body: dict):
        config = _parse_config(body.get("config"))
        name = str(body.get("name", f"config-{len(state.saved_list)}"))
        origin = body.get("origin", "manual")
        if origin not in ("manual", "max", "min", "maxmin"):
            raise ApiError(400, "bad_origin", f"unknown origin {origin!r}", "origin")
        with state._lock:
            state.saved_list.append((name, config, origin))
            index = len(state.saved_list) - 1
            state.persist_saved()
        return {"index": index, "name": name, "origin": origin}

    @app.get("/params/list")
    def params_list():
        with state._lock:
            return {
                "entries": [
                    {"index": i, "name": n, "config": c.tolist(), "origin": o}
                    for i, (n, c, o) in enumerate(state.saved_list)
                ]
            }

    @app.delete("/params/{index}")
    def params_delete(index: int):
        with state._lock:
            if not 0 <= index < len(state.saved_list):
                raise ApiError(404, "unknown_entry", f"no saved entry {index}")
            state.saved_list.pop(index)
            state.persist_saved()
        return {"remaining": len(state.saved_list)}

    @app.get("/params/export")
    def params_export():
        with state._lock:
            if not state.saved_list:
                raise ApiError(409, "empty_list", "no saved configurations to export")
            configs = np.stack([c for _, c, _ in state.saved_list])
        text = oracle.format_configs(configs, state.space)
        return Response(
            content=text,
            media_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="configs.csv"'},
        )

    return app


def build_state(model_path, dataset_configs=None, dataset_profiles=None,
                space_path=None, saved_path=None) -> SessionState:
    from .nn.io import load_model

    model = load_model(model_path)
    space = (ParameterSpace.from_json(open(space_path).read())
             if space_path else ParameterSpace.default())
    dataset = None
    if dataset_configs and dataset_profiles:
        dataset = oracle.load_dataset(dataset_configs, dataset_profiles, space)
    return SessionState(model=model, space=space, dataset=dataset, saved_path=saved_path)
