"""Neural lift/drag surrogate: model, training, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .model import (
    AOA_INPUT_SCALE,
    SurrogateModel,
    assemble_inputs,
    forward_batch,
    init_model,
    predict,
    predict_batch,
)
from .training import (
    AdamState,
    TrainConfig,
    TrainReport,
    adam_step,
    backward,
    loss_and_grads,
    mse_loss,
    relative_errors,
    train,
)

__all__ = [
    "AOA_INPUT_SCALE",
    "AdamState",
    "SurrogateModel",
    "TrainConfig",
    "TrainReport",
    "adam_step",
    "assemble_inputs",
    "backward",
    "forward_batch",
    "init_model",
    "load_checkpoint",
    "loss_and_grads",
    "mse_loss",
    "predict",
    "predict_batch",
    "relative_errors",
    "save_checkpoint",
    "train",
]
