"""Surrogate training: manual backprop, Adam, and the fit loop.

Gradients are exact derivatives of the batch MSE (head softplus, tanh,
batch norm with batch statistics, affine layers) computed by hand; the
test suite holds them against central finite differences.  The learning
rate follows a per-step linear warm-up to the configured peak and a
cosine decay to zero afterwards.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..dataset import LabeledSample
from ..errors import TrainingDivergedError
from .model import SurrogateModel, assemble_inputs, forward_batch, init_model, sigmoid


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 128
    warmup_epochs: int = 10
    epochs: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    hidden_dims: tuple[int, ...] = (256, 256, 128)

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 2 or self.epochs < 1:
            raise ValueError(f"invalid training config: {self}")
        if not 0 <= self.warmup_epochs <= self.epochs:
            raise ValueError(f"warmup ({self.warmup_epochs}) must be within total epochs ({self.epochs})")


@dataclass
class TrainReport:
    train_mse: list[float] = field(default_factory=list)   # one entry per epoch
    val_mse: list[float] = field(default_factory=list)
    best_epoch: int = -1
    final_val_mse: float = math.inf
    rel_err_cd: float = math.inf
    rel_err_cl: float = math.inf
    wall_seconds: float = 0.0
    lr_schedule: str = "linear-warmup+cosine"
    notes: list[str] = field(default_factory=list)

    def as_dict(self, include_wall_clock: bool = True) -> dict:
        record = {
            "train_mse": self.train_mse,
            "val_mse": self.val_mse,
            "best_epoch": self.best_epoch,
            "final_val_mse": self.final_val_mse,
            "rel_err_cd": self.rel_err_cd,
            "rel_err_cl": self.rel_err_cl,
            "lr_schedule": self.lr_schedule,
            "notes": self.notes,
        }
        if include_wall_clock:
            record["wall_seconds"] = self.wall_seconds
        return record


def mse_loss(outputs: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean((outputs - targets) ** 2))


def backward(model: SurrogateModel, cache: dict, outputs: np.ndarray, targets: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of the batch MSE w.r.t. every trainable parameter.

    `cache`/`outputs` must come from a train-mode forward_batch call with
    want_cache=True on the same batch.
    """
    n = outputs.shape[0]
    if n < 2:
        raise ValueError("backward needs batch size >= 2")
    grads: dict[str, np.ndarray] = {}

    d_out = (outputs - targets) / (n * outputs.shape[1]) * 2.0
    raw = cache["raw"]
    d_raw = d_out.copy()
    d_raw[:, 0] *= sigmoid(raw[:, 0])  # softplus' = sigmoid

    last = len(model.hidden_dims)
    h_last = cache["last_input"]
    grads[f"W{last}"] = h_last.T @ d_raw
    grads[f"b{last}"] = d_raw.sum(axis=0)
    d_h = d_raw @ model.params[f"W{last}"].T

    for layer in reversed(range(len(model.hidden_dims))):
        c = cache["layers"][layer]
        d_s = d_h * (1.0 - c["tanh"] ** 2)
        a_hat = c["a_hat"]
        grads[f"gamma{layer}"] = (d_s * a_hat).sum(axis=0)
        grads[f"beta{layer}"] = d_s.sum(axis=0)
        d_a_hat = d_s * model.params[f"gamma{layer}"]
        # batch-norm backward through the batch mean and variance
        d_a = c["inv_std"] / n * (
            n * d_a_hat - d_a_hat.sum(axis=0) - a_hat * (d_a_hat * a_hat).sum(axis=0)
        )
        grads[f"W{layer}"] = c["input"].T @ d_a
        grads[f"b{layer}"] = d_a.sum(axis=0)
        if layer > 0:
            d_h = d_a @ model.params[f"W{layer}"].T
    return grads


def loss_and_grads(model: SurrogateModel, x: np.ndarray, y: np.ndarray, update_running: bool = True):
    outputs, cache = forward_batch(model, x, mode="train", update_running=update_running, want_cache=True)
    return mse_loss(outputs, y), backward(model, cache, outputs, y)


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], beta1=0.9, beta2=0.999, eps=1e-8) -> "AdamState":
        return cls(
            m={k: np.zeros_like(v) for k, v in params.items()},
            v={k: np.zeros_like(v) for k, v in params.items()},
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )


def adam_step(state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray], lr: float) -> AdamState:
    """One bias-corrected Adam update, applied in place to `params`."""
    if set(grads) != set(state.m):
        raise ValueError("gradient keys do not match optimizer state")
    state.t += 1
    b1c = 1.0 - state.beta1 ** state.t
    b2c = 1.0 - state.beta2 ** state.t
    for key, g in grads.items():
        state.m[key] = state.beta1 * state.m[key] + (1.0 - state.beta1) * g
        state.v[key] = state.beta2 * state.v[key] + (1.0 - state.beta2) * g * g
        m_hat = state.m[key] / b1c
        v_hat = state.v[key] / b2c
        params[key] -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return state


def _sample_matrices(model: SurrogateModel, samples: list[LabeledSample]):
    params = np.stack([s.params for s in samples])
    aoas = np.array([s.aoa_deg for s in samples])
    x = assemble_inputs(model, params, aoas)
    y = np.column_stack([[s.cd for s in samples], [s.cl for s in samples]]).astype(np.float64)
    return x, y


def relative_errors(outputs: np.ndarray, targets: np.ndarray) -> tuple[float, float]:
    """Sum-normalized absolute error per target column.

    Aggregate normalization keeps the metric defined where individual
    labels cross zero (cl at zero angle of attack).
    """
    err = np.abs(outputs - targets).sum(axis=0)
    scale = np.abs(targets).sum(axis=0)
    out = err / np.maximum(scale, 1e-30)
    return float(out[0]), float(out[1])


def train(
    train_samples: list[LabeledSample],
    val_samples: list[LabeledSample],
    normalization: tuple[np.ndarray, np.ndarray],
    config: TrainConfig = TrainConfig(),
) -> tuple[SurrogateModel, TrainReport]:
    """Fit the surrogate; returns the best-by-validation model.

    Deterministic for a fixed (seed, dataset): initialization and epoch
    shuffles derive from one seed sequence.
    """
    if not train_samples or not val_samples:
        raise ValueError("train and validation sets must be non-empty")

    t_start = time.perf_counter()
    seeds = np.random.SeedSequence(config.seed).spawn(2)
    init_rng = np.random.default_rng(seeds[0])
    shuffle_rng = np.random.default_rng(seeds[1])

    n_cage_params = len(train_samples[0].params)
    mean, std = normalization
    model = init_model(n_cage_params, init_rng, hidden_dims=config.hidden_dims,
                       input_mean=mean, input_std=std)
    x_train, y_train = _sample_matrices(model, train_samples)
    x_val, y_val = _sample_matrices(model, val_samples)

    n = len(x_train)
    steps_per_epoch = max(1, n // config.batch_size + (1 if n % config.batch_size >= 2 else 0))
    total_steps = steps_per_epoch * config.epochs
    warmup_steps = steps_per_epoch * config.warmup_epochs

    def lr_at(step: int) -> float:
        if warmup_steps > 0 and step < warmup_steps:
            return config.learning_rate * (step + 1) / warmup_steps
        span = max(1, total_steps - warmup_steps)
        progress = (step - warmup_steps) / span
        return config.learning_rate * 0.5 * (1.0 + math.cos(math.pi * progress))

    adam = AdamState.for_params(model.params, config.beta1, config.beta2, config.eps)
    report = TrainReport()
    best_model = model.copy()
    best_val = math.inf
    step = 0

    for epoch in range(config.epochs):
        perm = shuffle_rng.permutation(n)
        losses = []
        for b in range(steps_per_epoch):
            idx = perm[b * config.batch_size:(b + 1) * config.batch_size]
            if len(idx) < 2:
                continue
            loss, grads = loss_and_grads(model, x_train[idx], y_train[idx])
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, step)
            adam_step(adam, model.params, grads, lr_at(step))
            losses.append(loss)
            step += 1
        report.train_mse.append(float(np.mean(losses)))

        val_out, _ = forward_batch(model, x_val, mode="infer")
        val_loss = mse_loss(val_out, y_val)
        report.val_mse.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_model = model.copy()
            report.best_epoch = epoch

    best_out, _ = forward_batch(best_model, x_val, mode="infer")
    report.final_val_mse = mse_loss(best_out, y_val)
    report.rel_err_cd, report.rel_err_cl = relative_errors(best_out, y_val)
    report.wall_seconds = time.perf_counter() - t_start
    best_model.meta["train_config"] = {
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "warmup_epochs": config.warmup_epochs,
        "epochs": config.epochs,
        "seed": config.seed,
        "hidden_dims": list(config.hidden_dims),
    }
    return best_model, report
