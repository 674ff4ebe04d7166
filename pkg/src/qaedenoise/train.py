"""Fidelity cost, gradients and the SGD training loops."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import metrics, qmath
from .network import ArchitectureSpec, Circuit, SINGLE, forward, mean_fidelity
from .noise import DataPair, DataSet

log = logging.getLogger(__name__)

SINGLE_SHIFT = np.pi / 2
TWO_SHIFT = np.pi / 4


@dataclass(frozen=True)
class TrainConfig:
    strategy: str = "average"  # "average" or "per_sample"
    learning_rate: float = 0.4
    iterations: int = 100
    grad_method: str = "param_shift"  # or "finite_diff"
    fd_step: float = 1e-5
    init: str = "uniform"  # or "warm_start"
    warm_steps: int | None = None  # None: one pass over the training set
    warm_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("average", "per_sample"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError("iterations must be an integer >= 1")
        if self.grad_method not in ("param_shift", "finite_diff"):
            raise ValueError(f"unknown grad_method {self.grad_method!r}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")
        if self.init not in ("uniform", "warm_start"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.warm_steps is not None and self.warm_steps < 1:
            raise ValueError("warm_steps must be >= 1")
        if self.warm_sigma < 0:
            raise ValueError("warm_sigma must be non-negative")


@dataclass
class TrainHistory:
    records: list[metrics.IterationRecord]
    final_params: np.ndarray
    init_params: np.ndarray = field(repr=False, default=None)


# -- costs -------------------------------------------------------------------

def fidelity_cost(arch: ArchitectureSpec, params: Sequence[float], pair: DataPair) -> float:
    return qmath.fidelity_pure(forward(arch, params, pair.input), pair.reference)


def average_cost(arch: ArchitectureSpec, params: Sequence[float], data: DataSet) -> float:
    """Mean fidelity of the network outputs to each pair's reference."""
    if len(data) == 0:
        raise ValueError("empty data set")
    return mean_fidelity(Circuit(arch, params).block, data.components(), len(data), arch.m)


# -- gradients -----------------------------------------------------------------

def occurrence_terms(
    arch: ArchitectureSpec,
    params: Sequence[float],
    data: DataSet,
    shifts: tuple[float, float] = (SINGLE_SHIFT, TWO_SHIFT),
) -> list[tuple[int, int, int, float]]:
    """Parameter-shift contribution of every angle occurrence.

    Returns ``(gate_index, position, slot, d_cost/d_slot)`` tuples; the
    gradient of a slot is the sum over its occurrences.
    """
    circ = Circuit(arch, params)
    comps = data.components()
    n, m = len(data), arch.m
    out = []
    for k, g in enumerate(arch.gates):
        ang = g.angles(circ.params)
        if g.kind == SINGLE:
            shift, coef = shifts[0], 0.5
        else:
            shift, coef = shifts[1], 1.0
        for j in range(3):
            plus, minus = ang.copy(), ang.copy()
            plus[j] += shift
            minus[j] -= shift
            fp = mean_fidelity(circ.block_with(k, g.matrix_from_angles(plus)), comps, n, m)
            fm = mean_fidelity(circ.block_with(k, g.matrix_from_angles(minus)), comps, n, m)
            # realized angle = sign * slot value
            out.append((k, j, g.slot_for(j), g.sign * coef * (fp - fm)))
    return out


def grad_param_shift(
    arch: ArchitectureSpec,
    params: Sequence[float],
    data: DataSet,
    shifts: tuple[float, float] = (SINGLE_SHIFT, TWO_SHIFT),
) -> np.ndarray:
    grad = np.zeros(arch.n_slots)
    for _, _, slot, val in occurrence_terms(arch, params, data, shifts):
        grad[slot] += val
    return grad


def grad_finite_diff(
    arch: ArchitectureSpec, params: Sequence[float], data: DataSet, h: float = 1e-5
) -> np.ndarray:
    """Central differences, moving every occurrence of a slot together."""
    if not h > 0:
        raise ValueError("step h must be positive")
    params = arch.check_params(params)
    grad = np.zeros(arch.n_slots)
    for s in range(arch.n_slots):
        e = np.zeros(arch.n_slots)
        e[s] = h
        grad[s] = (average_cost(arch, params + e, data) - average_cost(arch, params - e, data)) / (2 * h)
    return grad


def gradient(arch, params, data, config: TrainConfig) -> np.ndarray:
    if config.grad_method == "finite_diff":
        return grad_finite_diff(arch, params, data, config.fd_step)
    return grad_param_shift(arch, params, data)


def sgd_step(params: Sequence[float], grad: Sequence[float], lr: float) -> np.ndarray:
    """Ascent step on the fidelity."""
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape:
        raise ValueError(f"params {params.shape} and grad {grad.shape} differ in shape")
    return params + lr * grad


# -- training loops ------------------------------------------------------------

def uniform_init(arch: ArchitectureSpec, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=arch.n_slots)


def train_per_sample(
    arch: ArchitectureSpec,
    config: TrainConfig,
    train_set: DataSet,
    init: np.ndarray | None = None,
    steps: int | None = None,
    step_norms: list[float] | None = None,
) -> np.ndarray:
    """One ascent step per training pair, in data-set order.

    ``steps`` longer than the data set cycles through it again.
    When ``step_norms`` is given, the max-norm of each update is appended.
    """
    if init is None:
        init = uniform_init(arch, np.random.default_rng(config.seed))
    params = arch.check_params(init).copy()
    steps = len(train_set) if steps is None else steps
    for i in range(steps):
        pair = train_set.pairs[i % len(train_set)]
        single = DataSet([pair], train_set.m, train_set.spec)
        new = sgd_step(params, gradient(arch, params, single, config), config.learning_rate)
        if step_norms is not None:
            step_norms.append(float(np.max(np.abs(new - params))))
        params = new
    return params


def warm_start(
    arch: ArchitectureSpec, config: TrainConfig, train_set: DataSet, rng: np.random.Generator
) -> np.ndarray:
    """Per-sample pre-training followed by a Gaussian kick of width ``warm_sigma``."""
    base = train_per_sample(arch, config, train_set, uniform_init(arch, rng), config.warm_steps)
    return base + rng.normal(0.0, config.warm_sigma, size=arch.n_slots)


def initial_params(arch: ArchitectureSpec, config: TrainConfig, train_set: DataSet) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    if config.init == "warm_start":
        return warm_start(arch, config, train_set, rng)
    return uniform_init(arch, rng)


def train_average(
    arch: ArchitectureSpec,
    config: TrainConfig,
    train_set: DataSet,
    val_set: DataSet,
    init: np.ndarray | None = None,
    callback: Callable[[metrics.IterationRecord], None] | None = None,
) -> TrainHistory:
    """Full-batch gradient ascent on the average fidelity.

    One record is taken before the first step and one after every step.
    """
    if config.strategy != "average":
        raise ValueError("train_average needs strategy='average'")
    params = initial_params(arch, config, train_set) if init is None else arch.check_params(init)
    start = params.copy()
    records = [metrics.evaluate(arch, params, train_set, val_set, 0)]
    for it in range(1, config.iterations + 1):
        params = sgd_step(params, gradient(arch, params, train_set, config), config.learning_rate)
        rec = metrics.evaluate(arch, params, train_set, val_set, it)
        records.append(rec)
        log.debug("iter %d cost %.6f val %.6f", it, rec.cost_train, rec.fid_val)
        if callback is not None:
            callback(rec)
    return TrainHistory(records, params, start)


# -- params file ---------------------------------------------------------------

def dumps_params(arch: ArchitectureSpec, params: Sequence[float]) -> str:
    params = arch.check_params(params)
    model = arch.model if arch.model is not None else "-"
    lines = [f"# {arch.name} m={arch.m} model={model} n_slots={arch.n_slots}"]
    lines += [repr(float(v)) for v in params]
    return "\n".join(lines) + "\n"


def loads_params(text: str) -> tuple[dict, np.ndarray]:
    """Parse a params file into its header fields and the angle vector."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("params file is missing its header line")
    fields = lines[0][1:].split()
    header = {"name": fields[0]}
    for f in fields[1:]:
        key, val = f.split("=", 1)
        header[key] = None if val == "-" else int(val)
    values = np.array([float(v) for v in lines[1:]])
    if len(values) != header["n_slots"]:
        raise ValueError(f"header says {header['n_slots']} slots, file has {len(values)}")
    return header, values
