"""Run and sweep configuration, read from ``key = value`` text files."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from .network import ARCH_NAMES
from .train import TrainConfig

DEFAULT_SWEEP_P = tuple(round(0.05 * i, 2) for i in range(11))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    arch_name: str = "qae_nisq"
    m: int = 2
    model: int | None = None
    p_train: float = 0.2
    p_val_max: float | None = None  # None: same as p_train
    n_train: int = 30
    n_val: int = 30
    learning_rate: float = 0.4
    iterations: int = 100
    grad_method: str = "param_shift"
    fd_step: float = 1e-5
    init: str = "uniform"
    warm_steps: int | None = None
    warm_sigma: float = 0.1
    init_params: str | None = None
    seed: int = 0
    out_dir: str = "runs"

    def __post_init__(self):
        if self.arch_name not in ARCH_NAMES:
            raise ConfigError(f"arch_name must be one of {', '.join(ARCH_NAMES)}")
        if self.m < 2:
            raise ConfigError("m must be >= 2")
        if (self.model is not None) != (self.arch_name == "qae_conj_mod_dec"):
            raise ConfigError("model is required for qae_conj_mod_dec and only allowed there")
        if self.model is not None and self.model not in (1, 2, 3):
            raise ConfigError("model must be 1, 2 or 3")
        for name in ("p_train", "p_val_max"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.n_train < 1 or self.n_val < 1:
            raise ConfigError("data set sizes must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            self.train_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def p_val(self) -> float:
        return self.p_train if self.p_val_max is None else self.p_val_max

    def train_config(self, seed: int = 0) -> TrainConfig:
        return TrainConfig(
            strategy="average",
            learning_rate=self.learning_rate,
            iterations=self.iterations,
            grad_method=self.grad_method,
            fd_step=self.fd_step,
            init=self.init,
            warm_steps=self.warm_steps,
            warm_sigma=self.warm_sigma,
            seed=seed,
        )

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    p_values: tuple[float, ...] = DEFAULT_SWEEP_P
    iterations_at_eval: int = 50

    def __post_init__(self):
        if not self.p_values:
            raise ConfigError("p_values must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ConfigError("every p value must lie in [0, 1]")
        if self.iterations_at_eval < 1:
            raise ConfigError("iterations_at_eval must be >= 1")


_RUN_FIELDS = {f.name: f for f in fields(RunConfig)}
_SWEEP_KEYS = ("p_values", "iterations_at_eval")
_INT = {"m", "model", "n_train", "n_val", "iterations", "warm_steps", "seed", "iterations_at_eval"}
_FLOAT = {"p_train", "p_val_max", "learning_rate", "fd_step", "warm_sigma"}
_OPTIONAL = {"model", "p_val_max", "warm_steps", "init_params"}


def _convert(key: str, raw: str):
    if key in _OPTIONAL and raw.lower() == "none":
        return None
    try:
        if key == "p_values":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if key in _INT:
            return int(raw)
        if key in _FLOAT:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_text(text: str, allow_sweep: bool = False) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _RUN_FIELDS and not (allow_sweep and key in _SWEEP_KEYS):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, val)
    return values


def parse_config(path: str | Path) -> RunConfig:
    return RunConfig(**parse_text(Path(path).read_text()))


def parse_sweep_config(path: str | Path) -> SweepConfig:
    values = parse_text(Path(path).read_text(), allow_sweep=True)
    sweep = {k: values.pop(k) for k in _SWEEP_KEYS if k in values}
    return SweepConfig(RunConfig(**values), **sweep)


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def serialize(cfg: RunConfig | SweepConfig) -> str:
    if isinstance(cfg, SweepConfig):
        lines = [f"{k} = {_fmt(getattr(cfg.base, k))}" for k in _RUN_FIELDS]
        lines += [f"p_values = {_fmt(cfg.p_values)}", f"iterations_at_eval = {cfg.iterations_at_eval}"]
    else:
        lines = [f"{k} = {_fmt(getattr(cfg, k))}" for k in _RUN_FIELDS]
    return "\n".join(lines) + "\n"
