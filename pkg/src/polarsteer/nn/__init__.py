from .backend import BACKEND_NAME, get_backend
from .io import ModelFormatError, load_model, save_model
from .model import (
    PRESETS,
    ForwardTrace,
    Layer,
    SurrogateModel,
    backward,
    backward_batch,
    forward,
    forward_batch,
    init_model,
    init_preset,
)
from .train import TrainConfig, loss, rmse_accuracy, train

__all__ = [
    "BACKEND_NAME", "get_backend", "ModelFormatError", "load_model", "save_model",
    "PRESETS", "ForwardTrace", "Layer", "SurrogateModel", "backward",
    "backward_batch", "forward", "forward_batch", "init_model", "init_preset",
    "TrainConfig", "loss", "rmse_accuracy", "train",
]
