"""Four-layer MLP with batch normalization mapping (cage params, AoA) to (cd, cl).

Everything is plain numpy, float64.  Hidden layers are affine -> batch
norm -> tanh; the output layer is affine, with a softplus on the drag
channel so cd stays positive.  The angle of attack enters as one extra
input scaled by 1/30 (degrees), so the training range +/-30 deg maps to
+/-1.  Inference uses running batch-norm statistics and is a pure
function of (model, input); training mode normalizes with batch
statistics and (optionally) updates the running ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..hydro import HydroCoeffs

DEFAULT_HIDDEN_DIMS = (256, 256, 128)
AOA_INPUT_SCALE = 1.0 / 30.0   # degrees -> model input
BN_EPS = 1e-5
BN_MOMENTUM = 0.1
N_OUTPUTS = 2                   # (cd raw, cl)


@dataclass
class SurrogateModel:
    """Weights, batch-norm state, and input normalization constants."""

    hidden_dims: tuple[int, ...]
    params: dict[str, np.ndarray]          # W0..W3, b0..b3, gamma0..2, beta0..2
    running_mean: list[np.ndarray]         # one per hidden layer
    running_var: list[np.ndarray]
    input_mean: np.ndarray                 # (n_cage_params,)
    input_std: np.ndarray
    bn_momentum: float = BN_MOMENTUM
    meta: dict = field(default_factory=dict)

    @property
    def n_layers(self) -> int:
        return len(self.hidden_dims) + 1

    @property
    def n_inputs(self) -> int:
        return self.params["W0"].shape[0]

    @property
    def n_cage_params(self) -> int:
        return self.n_inputs - 1

    def copy(self) -> "SurrogateModel":
        return SurrogateModel(
            hidden_dims=self.hidden_dims,
            params={k: v.copy() for k, v in self.params.items()},
            running_mean=[v.copy() for v in self.running_mean],
            running_var=[v.copy() for v in self.running_var],
            input_mean=self.input_mean.copy(),
            input_std=self.input_std.copy(),
            bn_momentum=self.bn_momentum,
            meta=dict(self.meta),
        )

    def validate(self) -> None:
        """Shape and finiteness checks; raises ValueError on any mismatch."""
        dims = [self.n_inputs, *self.hidden_dims, N_OUTPUTS]
        for layer in range(self.n_layers):
            w = self.params[f"W{layer}"]
            b = self.params[f"b{layer}"]
            if w.shape != (dims[layer], dims[layer + 1]):
                raise ValueError(f"W{layer} has shape {w.shape}, expected {(dims[layer], dims[layer + 1])}")
            if b.shape != (dims[layer + 1],):
                raise ValueError(f"b{layer} has shape {b.shape}, expected ({dims[layer + 1]},)")
        for layer, width in enumerate(self.hidden_dims):
            for name in (f"gamma{layer}", f"beta{layer}"):
                if self.params[name].shape != (width,):
                    raise ValueError(f"{name} has shape {self.params[name].shape}, expected ({width},)")
            if self.running_mean[layer].shape != (width,) or self.running_var[layer].shape != (width,):
                raise ValueError(f"running stats of layer {layer} do not match width {width}")
            if np.any(self.running_var[layer] < 0):
                raise ValueError(f"running variance of layer {layer} has negative entries")
        if self.input_mean.shape != (self.n_cage_params,) or self.input_std.shape != (self.n_cage_params,):
            raise ValueError("input normalization constants do not match the input width")
        for name, value in self.params.items():
            if not np.all(np.isfinite(value)):
                raise ValueError(f"parameter {name} has non-finite entries")


def init_model(
    n_cage_params: int,
    seed: int,
    hidden_dims: tuple[int, ...] = DEFAULT_HIDDEN_DIMS,
    input_mean: np.ndarray | None = None,
    input_std: np.ndarray | None = None,
) -> SurrogateModel:
    """Xavier-uniform weights, zero biases, identity batch norm."""
    rng = np.random.default_rng(seed)
    dims = [n_cage_params + 1, *hidden_dims, N_OUTPUTS]
    params: dict[str, np.ndarray] = {}
    for layer in range(len(dims) - 1):
        fan_in, fan_out = dims[layer], dims[layer + 1]
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        params[f"W{layer}"] = rng.uniform(-limit, limit, (fan_in, fan_out))
        params[f"b{layer}"] = np.zeros(fan_out)
    for layer, width in enumerate(hidden_dims):
        params[f"gamma{layer}"] = np.ones(width)
        params[f"beta{layer}"] = np.zeros(width)
    return SurrogateModel(
        hidden_dims=tuple(hidden_dims),
        params=params,
        running_mean=[np.zeros(w) for w in hidden_dims],
        running_var=[np.ones(w) for w in hidden_dims],
        input_mean=np.zeros(n_cage_params) if input_mean is None else np.asarray(input_mean, dtype=np.float64),
        input_std=np.ones(n_cage_params) if input_std is None else np.asarray(input_std, dtype=np.float64),
    )


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def assemble_inputs(model: SurrogateModel, params: np.ndarray, aoa_deg: np.ndarray) -> np.ndarray:
    """Stack normalized cage parameters and the scaled AoA column."""
    params = np.atleast_2d(np.asarray(params, dtype=np.float64))
    aoa_deg = np.atleast_1d(np.asarray(aoa_deg, dtype=np.float64))
    if params.shape[1] != model.n_cage_params:
        raise ValueError(f"expected {model.n_cage_params} cage parameters, got {params.shape[1]}")
    if len(aoa_deg) != len(params):
        raise ValueError(f"{len(params)} parameter rows but {len(aoa_deg)} angles")
    normalized = (params - model.input_mean) / model.input_std
    return np.concatenate([normalized, (aoa_deg * AOA_INPUT_SCALE)[:, None]], axis=1)


def forward_batch(
    model: SurrogateModel,
    x: np.ndarray,
    mode: str = "infer",
    update_running: bool = True,
    want_cache: bool = False,
):
    """Run assembled inputs through the network.

    Returns (outputs, cache); outputs are head-transformed (softplus on
    the cd channel).  `cache` holds the intermediates backward() needs
    and is None unless requested.
    """
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_inputs:
        raise ValueError(f"input must be (batch, {model.n_inputs}), got {x.shape}")
    if mode == "train" and x.shape[0] < 2:
        raise ValueError("train mode needs batch size >= 2 (batch norm variance)")

    h = x
    layers = []
    for layer in range(len(model.hidden_dims)):
        a = h @ model.params[f"W{layer}"] + model.params[f"b{layer}"]
        if mode == "train":
            mu = a.mean(axis=0)
            var = a.var(axis=0)
            if update_running:
                m = model.bn_momentum
                model.running_mean[layer] = (1 - m) * model.running_mean[layer] + m * mu
                model.running_var[layer] = (1 - m) * model.running_var[layer] + m * var
        else:
            mu = model.running_mean[layer]
            var = model.running_var[layer]
        inv_std = 1.0 / np.sqrt(var + BN_EPS)
        a_hat = (a - mu) * inv_std
        s = model.params[f"gamma{layer}"] * a_hat + model.params[f"beta{layer}"]
        out = np.tanh(s)
        if want_cache:
            layers.append({"input": h, "a_hat": a_hat, "inv_std": inv_std, "tanh": out})
        h = out

    last = len(model.hidden_dims)
    raw = h @ model.params[f"W{last}"] + model.params[f"b{last}"]
    outputs = np.column_stack([softplus(raw[:, 0]), raw[:, 1]])
    cache = {"layers": layers, "last_input": h, "raw": raw, "x": x} if want_cache else None
    return outputs, cache


def predict(model: SurrogateModel, params: np.ndarray, aoa_deg: float) -> HydroCoeffs:
    """Single-design inference; pure function of its arguments."""
    x = assemble_inputs(model, np.asarray(params)[None, :], [aoa_deg])
    out, _ = forward_batch(model, x, mode="infer")
    return HydroCoeffs(cd=float(out[0, 0]), cl=float(out[0, 1]))


def predict_batch(model: SurrogateModel, params: np.ndarray, aoa_deg: np.ndarray) -> np.ndarray:
    """(n, 2) array of (cd, cl) rows in infer mode."""
    x = assemble_inputs(model, params, aoa_deg)
    out, _ = forward_batch(model, x, mode="infer")
    return out
