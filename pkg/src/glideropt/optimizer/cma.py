"""Covariance matrix adaptation evolution strategy, from scratch.

Standard formulation: weighted recombination of the top half of each
generation, rank-one and rank-mu covariance updates, and cumulative
step-size adaptation, with the usual default population size and
adaptation constants.  Candidates whose objective comes back NaN get a
death penalty (+inf) instead of poisoning the update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_CONDITION = 1e14
F_TOLERANCE = 1e-10
F_TOLERANCE_GENERATIONS = 10
SIGMA_UNDERFLOW = 1e-20


def default_population_size(n: int) -> int:
    return 4 + int(3 * math.log(n))


@dataclass
class CmaState:
    """Search distribution and adaptation state for one CMA-ES run."""

    mean: np.ndarray
    sigma: float
    cov: np.ndarray
    path_sigma: np.ndarray
    path_cov: np.ndarray
    generation: int
    lam: int
    rng: np.random.Generator
    evaluations: int = 0

    # generation-constant strategy parameters
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]
    mu_eff: float = 0.0
    c_sigma: float = 0.0
    d_sigma: float = 0.0
    c_cov_path: float = 0.0
    c_rank1: float = 0.0
    c_rank_mu: float = 0.0
    chi_n: float = 0.0

    # eigendecomposition of cov, refreshed each generation
    eig_vectors: np.ndarray = field(default=None)  # type: ignore[assignment]
    eig_values: np.ndarray = field(default=None)   # type: ignore[assignment]


def init_state(x0: np.ndarray, sigma0: float, seed, lam: int | None = None) -> CmaState:
    x0 = np.asarray(x0, dtype=np.float64)
    n = len(x0)
    if sigma0 <= 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    lam = default_population_size(n) if lam is None else lam
    mu = lam // 2
    raw = np.log((lam + 1) / 2.0) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / np.sum(weights ** 2)

    state = CmaState(
        mean=x0.copy(),
        sigma=float(sigma0),
        cov=np.eye(n),
        path_sigma=np.zeros(n),
        path_cov=np.zeros(n),
        generation=0,
        lam=lam,
        rng=np.random.default_rng(seed),
    )
    state.weights = weights
    state.mu_eff = mu_eff
    state.c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0)
    state.d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + state.c_sigma
    state.c_cov_path = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n)
    state.c_rank1 = 2.0 / ((n + 1.3) ** 2 + mu_eff)
    state.c_rank_mu = min(
        1.0 - state.c_rank1,
        2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) ** 2 + mu_eff),
    )
    state.chi_n = math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n ** 2))
    _refresh_eigen(state)
    return state


def _refresh_eigen(state: CmaState) -> None:
    """Symmetrize, eigendecompose, and recondition the covariance."""
    state.cov = (state.cov + state.cov.T) / 2.0
    values, vectors = np.linalg.eigh(state.cov)
    floor = max(values.max(), 0.0) / MAX_CONDITION
    if values.min() <= floor:
        values = np.maximum(values, max(floor, np.finfo(np.float64).tiny))
        state.cov = (vectors * values) @ vectors.T
    state.eig_values = values
    state.eig_vectors = vectors


def ask(state: CmaState) -> np.ndarray:
    """Sample one generation of candidates, shape (lam, n)."""
    n = len(state.mean)
    z = state.rng.standard_normal((state.lam, n))
    y = z @ (state.eig_vectors * np.sqrt(state.eig_values)).T
    return state.mean + state.sigma * y


def tell(state: CmaState, candidates: np.ndarray, values: np.ndarray) -> None:
    """Update mean, evolution paths, covariance, and step size."""
    n = len(state.mean)
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    mu = len(state.weights)
    selected = candidates[order[:mu]]

    old_mean = state.mean
    state.mean = state.weights @ selected
    y_mean = (state.mean - old_mean) / state.sigma

    inv_sqrt = (state.eig_vectors / np.sqrt(state.eig_values)) @ state.eig_vectors.T
    cs, ds = state.c_sigma, state.d_sigma
    state.path_sigma = (1.0 - cs) * state.path_sigma + math.sqrt(
        cs * (2.0 - cs) * state.mu_eff
    ) * (inv_sqrt @ y_mean)

    state.generation += 1
    ps_norm2 = float(state.path_sigma @ state.path_sigma)
    expected = 1.0 - (1.0 - cs) ** (2.0 * state.generation)
    h_sigma = ps_norm2 / n / expected < 2.0 + 4.0 / (n + 1.0)

    cc = state.c_cov_path
    state.path_cov = (1.0 - cc) * state.path_cov + (
        math.sqrt(cc * (2.0 - cc) * state.mu_eff) * y_mean if h_sigma else 0.0
    )

    steps = (selected - old_mean) / state.sigma
    c1, cmu = state.c_rank1, state.c_rank_mu
    rank1 = np.outer(state.path_cov, state.path_cov)
    rank_mu = (steps.T * state.weights) @ steps
    # variance correction for a stalled rank-one path
    c1_adjust = 0.0 if h_sigma else c1 * cc * (2.0 - cc)
    state.cov = (
        (1.0 - c1 - cmu + c1_adjust) * state.cov + c1 * rank1 + cmu * rank_mu
    )

    state.sigma *= math.exp((cs / ds) * (math.sqrt(ps_norm2) / state.chi_n - 1.0))
    _refresh_eigen(state)


@dataclass
class CmaResult:
    x: np.ndarray
    f: float
    evaluations: int
    generations: int
    stop_reason: str
    history: list[float]           # best-ever objective after each generation


def cma_minimize(
    objective,
    x0: np.ndarray,
    sigma0: float,
    budget: int,
    seed,
    lam: int | None = None,
) -> CmaResult:
    """Minimize `objective` with at most `budget` evaluations.

    Stops on budget exhaustion, on the per-generation best values
    spanning less than F_TOLERANCE over the trailing window, or on step
    size underflow.  Returns the best candidate ever evaluated.
    """
    state = init_state(np.asarray(x0, dtype=np.float64), sigma0, seed, lam)
    if budget < state.lam:
        raise ValueError(f"budget {budget} is below one generation ({state.lam} evaluations)")

    best_x = state.mean.copy()
    best_f = math.inf
    history: list[float] = []
    recent: list[float] = []
    stop = "budget"

    while state.evaluations + state.lam <= budget:
        candidates = ask(state)
        values = np.empty(state.lam)
        for i in range(state.lam):
            v = objective(candidates[i])
            values[i] = math.inf if (v is None or not math.isfinite(v)) else float(v)
        state.evaluations += state.lam

        gen_best = int(np.argmin(values))
        if values[gen_best] < best_f:
            best_f = float(values[gen_best])
            best_x = candidates[gen_best].copy()

        tell(state, candidates, values)
        history.append(best_f)

        recent.append(float(values[gen_best]))
        if len(recent) > F_TOLERANCE_GENERATIONS:
            recent.pop(0)
            if max(recent) - min(recent) < F_TOLERANCE:
                stop = "f-tolerance"
                break
        if state.sigma < SIGMA_UNDERFLOW:
            stop = "sigma-underflow"
            break

    return CmaResult(
        x=best_x,
        f=best_f,
        evaluations=state.evaluations,
        generations=state.generation,
        stop_reason=stop,
        history=history,
    )
