"""Training runs, noise sweeps and the named figure presets.

Every run is reproducible from one integer seed: the training data,
validation data and parameter initialization each draw from their own
child of ``SeedSequence(seed)``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, network, noise, train
from .config import DEFAULT_SWEEP_P, RunConfig, SweepConfig, serialize
from .metrics import IterationRecord
from .plot import emit_plot

log = logging.getLogger(__name__)

GRAD_TOL = 1e-6


@dataclass
class RunResult:
    config: RunConfig
    arch: network.ArchitectureSpec
    history: train.TrainHistory
    train_set: noise.DataSet
    val_set: noise.DataSet
    init_seed: int

    @property
    def final(self) -> IterationRecord:
        return self.history.records[-1]


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit sub-seed number ``index`` of ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def arch_for(cfg: RunConfig) -> network.ArchitectureSpec:
    return network.build(cfg.arch_name, cfg.m, cfg.model)


def datasets_for(cfg: RunConfig) -> tuple[noise.DataSet, noise.DataSet, int]:
    train_ss, val_ss, init_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    tr = noise.make_training_set(cfg.m, cfg.p_train, cfg.n_train, np.random.default_rng(train_ss))
    va = noise.make_validation_set(cfg.m, cfg.p_val, cfg.n_val, np.random.default_rng(val_ss))
    init_seed = int(init_ss.generate_state(1, np.uint64)[0])
    return tr, va, init_seed


def run_training(cfg: RunConfig) -> RunResult:
    arch = arch_for(cfg)
    tr, va, init_seed = datasets_for(cfg)
    init = None
    if cfg.init_params is not None:
        _, init = train.loads_params(Path(cfg.init_params).read_text())
    hist = train.train_average(arch, cfg.train_config(init_seed), tr, va, init=init)
    return RunResult(cfg, arch, hist, tr, va, init_seed)


# -- file output -------------------------------------------------------------

def _cell(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_meta(path: Path, cfg: RunConfig | SweepConfig, extra: dict | None = None) -> Path:
    lines = [f"# qaedenoise {__version__}", serialize(cfg).rstrip("\n")]
    lines.append(f"depolarizing_convention = {noise.DEPOLARIZING_CONVENTION}")
    lines.append("single_qubit_gate = Rz(gamma) Ry(beta) Rz(alpha), R_A(phi) = exp(-i phi A/2)")
    lines.append("two_qubit_gate = exp(i tx XX) exp(i ty YY) exp(i tz ZZ)")
    lines.append("validation_probs = per-qubit uniform[0, p_val_max]")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    path.write_text("\n".join(lines) + "\n")
    return path


def run_tag(cfg: RunConfig) -> str:
    model = f"_model{cfg.model}" if cfg.model is not None else ""
    return f"{cfg.arch_name}{model}_m{cfg.m}_p{cfg.p_train:g}"


def describe_arch(arch: network.ArchitectureSpec) -> str:
    """Human-readable gate list with 1-based qubit labels q1..q(2m+1)."""
    lines = [f"{arch.name} (m={arch.m}, model={arch.model}, {arch.n_slots} parameters)"]
    for g in arch.gates:
        wires = ",".join(f"q{w + 1}" for w in g.wires)
        dag = "^dagger" if g.sign < 0 else ""
        name = "U" if g.kind == network.SINGLE else "U2"
        lines.append(f"  {name}{dag}({wires})  slots {g.slots[0]}-{g.slots[2]}")
    return "\n".join(lines)


def cmd_train(cfg: RunConfig, out_dir: str | Path | None = None, tag: str | None = None,
              dump_data: bool = False) -> RunResult:
    """Train one network and write ``<tag>.csv``, ``.params``, ``.arch`` and ``.meta``."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tag = tag or run_tag(cfg)
    res = run_training(cfg)
    write_csv(out / f"{tag}.csv", IterationRecord.columns(), [r.values() for r in res.history.records])
    (out / f"{tag}.params").write_text(train.dumps_params(res.arch, res.history.final_params))
    (out / f"{tag}.arch").write_text(network.dumps_arch(res.arch))
    write_meta(out / f"{tag}.meta", cfg, {"init_seed": res.init_seed})
    if dump_data:
        (out / f"{tag}.train_data").write_text(noise.dump_dataset(res.train_set))
        (out / f"{tag}.val_data").write_text(noise.dump_dataset(res.val_set))
    return res


SWEEP_COLUMNS = ["p", "fid_train_final", "fid_val_final", "renyi_hidden_final", "renyi_output_final"]


def sweep_configs(sweep: SweepConfig) -> list[RunConfig]:
    out = []
    for i, p in enumerate(sweep.p_values):
        out.append(
            sweep.base.replace(
                p_train=p,
                p_val_max=p if sweep.base.p_val_max is None else sweep.base.p_val_max,
                iterations=sweep.iterations_at_eval,
                seed=derive_seed(sweep.base.seed, i),
            )
        )
    return out


def cmd_sweep(sweep: SweepConfig, out_dir: str | Path | None = None, tag: str = "sweep") -> Path:
    out = Path(out_dir if out_dir is not None else sweep.base.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    seeds = {}
    for cfg in sweep_configs(sweep):
        fin = run_training(cfg).final
        log.info("p=%g train %.4f val %.4f", cfg.p_train, fin.fid_train_clean, fin.fid_val)
        rows.append([cfg.p_train, fin.fid_train_clean, fin.fid_val, fin.renyi_hidden, fin.renyi_output])
        seeds[f"seed_p{cfg.p_train:g}"] = cfg.seed
    path = write_csv(out / f"{tag}.csv", SWEEP_COLUMNS, rows)
    write_meta(out / f"{tag}.meta", sweep, seeds)
    return path


# -- presets -------------------------------------------------------------------

def _run(arch_name, m, p, model=None, iterations=100):
    return RunConfig(arch_name=arch_name, m=m, model=model, p_train=p, iterations=iterations,
                     init="warm_start")


PRESETS: dict[str, dict] = {
    "212-compare": {
        "doc": "(2-1-2) with and without conjugate layer, p=0.2",
        "runs": [_run("qae_nisq", 2, 0.2), _run("qae_conj", 2, 0.2)],
    },
    "212-compare-p04": {
        "doc": "(2-1-2) with and without conjugate layer, p=0.4",
        "runs": [_run("qae_nisq", 2, 0.4), _run("qae_conj", 2, 0.4)],
    },
    "212-moddec": {
        "doc": "(2-1-2) conjugate layer + modified decoder, p=0.2 and 0.4",
        "runs": [_run("qae_conj_mod_dec", 2, 0.2, 3), _run("qae_conj_mod_dec", 2, 0.4, 3)],
    },
    "313-models": {
        "doc": "(3-1-3) plain, conjugate, modified decoder models 2 and 3, p=0.2",
        "runs": [
            _run("qae_nisq", 3, 0.2),
            _run("qae_conj", 3, 0.2),
            _run("qae_conj_mod_dec", 3, 0.2, 2),
            _run("qae_conj_mod_dec", 3, 0.2, 3),
        ],
    },
    "313-m3-p04": {
        "doc": "(3-1-3) modified decoder model 3, p=0.4",
        "runs": [_run("qae_conj_mod_dec", 3, 0.4, 3)],
    },
    "212-noise-sweep": {
        "doc": "(2-1-2) modified decoder, final values after 50 iterations vs p",
        "sweep": SweepConfig(_run("qae_conj_mod_dec", 2, 0.2, 3), DEFAULT_SWEEP_P, 50),
    },
    "313-noise-sweep": {
        "doc": "(3-1-3) modified decoder model 3, final values after 100 iterations vs p",
        "sweep": SweepConfig(_run("qae_conj_mod_dec", 3, 0.2, 3), DEFAULT_SWEEP_P, 100),
    },
}


def preset_names() -> list[str]:
    return list(PRESETS)


def cmd_preset(name: str, out_dir: str | Path = "runs", seed: int | None = None) -> list[Path]:
    """Run a named experiment; returns the CSV files written (combined CSV last)."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    spec = PRESETS[name]
    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    if "sweep" in spec:
        sweep: SweepConfig = spec["sweep"]
        if seed is not None:
            sweep = SweepConfig(sweep.base.replace(seed=seed), sweep.p_values, sweep.iterations_at_eval)
        path = cmd_sweep(sweep, out, tag="sweep")
        emit_plot(path, SWEEP_COLUMNS[1:], out / "sweep.svg", title=spec["doc"])
        return [path]

    paths, combined, header = [], None, ["iter"]
    for cfg in spec["runs"]:
        if seed is not None:
            cfg = cfg.replace(seed=seed)
        tag = run_tag(cfg)
        res = cmd_train(cfg, out, tag)
        paths.append(out / f"{tag}.csv")
        recs = res.history.records
        if combined is None:
            combined = [[r.iter] for r in recs]
        for row, r in zip(combined, recs):
            row += [r.fid_train_clean, r.fid_val, r.renyi_hidden, r.renyi_output]
        header += [f"{tag}:{c}" for c in ("fid_train_clean", "fid_val", "renyi_hidden", "renyi_output")]
    comb = write_csv(out / "combined.csv", header, combined)
    emit_plot(comb, [h for h in header if h.endswith(("fid_train_clean", "fid_val"))], out / "fidelity.svg", title=spec["doc"])
    emit_plot(comb, [h for h in header if "renyi" in h], out / "renyi.svg", title=spec["doc"])
    paths.append(comb)
    return paths


# -- gradient check --------------------------------------------------------------

def gradient_check(
    arch: network.ArchitectureSpec,
    data: noise.DataSet,
    points: int,
    rng: np.random.Generator,
    h: float = 1e-5,
    shifts: tuple[float, float] = (train.SINGLE_SHIFT, train.TWO_SHIFT),
) -> np.ndarray:
    """Per-slot max |parameter shift - finite difference| over random points."""
    worst = np.zeros(arch.n_slots)
    for _ in range(points):
        params = rng.uniform(-np.pi, np.pi, arch.n_slots)
        ps = train.grad_param_shift(arch, params, data, shifts)
        fd = train.grad_finite_diff(arch, params, data, h)
        worst = np.maximum(worst, np.abs(ps - fd))
    return worst


def cmd_gradient_check(cfg: RunConfig, points: int = 10, n_pairs: int | None = None) -> tuple[bool, str]:
    arch = arch_for(cfg)
    tr, _, init_seed = datasets_for(cfg.replace(n_train=n_pairs or cfg.n_train))
    worst = gradient_check(arch, tr, points, np.random.default_rng(init_seed), cfg.fd_step)
    lines = [f"gradient check: {arch.name} m={arch.m} model={arch.model}, {points} random points"]
    lines += [f"  slot {s:3d}  max|ps-fd| = {v:.3e}" for s, v in enumerate(worst)]
    ok = bool(np.all(worst <= GRAD_TOL))
    lines.append(f"{'PASS' if ok else 'FAIL'}: max deviation {worst.max():.3e} (tolerance {GRAD_TOL:g})")
    return ok, "\n".join(lines)
