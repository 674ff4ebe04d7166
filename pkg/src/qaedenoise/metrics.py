"""Per-iteration fidelities and second-order Renyi entropies."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Sequence

import numpy as np

from . import qmath
from .network import ArchitectureSpec, Circuit, final_state, mean_fidelity
from .noise import DataSet, clean_reference_view


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    cost_train: float
    fid_train_clean: float
    fid_val: float
    renyi_hidden: float
    renyi_output: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


def renyi2(rho: np.ndarray) -> float:
    """``-ln Tr(rho^2)`` in nats, clamped at zero."""
    return max(0.0, -float(np.log(qmath.purity(rho))))


def subsystem_entropies(
    arch: ArchitectureSpec, params: Sequence[float], rho_in: np.ndarray
) -> tuple[float, float]:
    """Renyi entropies of the hidden qubit and of the output block after the circuit."""
    rho = final_state(arch, params, rho_in)
    lay = arch.layout
    return (
        renyi2(qmath.partial_trace(rho, [lay.hidden])),
        renyi2(qmath.partial_trace(rho, lay.outputs)),
    )


def _mean_entropies(arch: ArchitectureSpec, block: np.ndarray, data: DataSet) -> tuple[float, float]:
    vecs, weights, _, owner = data.components()
    psi = block @ vecs
    lay = arch.layout
    hid = out = 0.0
    for i in range(len(data)):
        sel = owner == i
        hid += renyi2(qmath.reduced_from_vectors(psi[:, sel], weights[sel], lay.n_total, [lay.hidden]))
        out += renyi2(qmath.reduced_from_vectors(psi[:, sel], weights[sel], lay.n_total, lay.outputs))
    return hid / len(data), out / len(data)


def evaluate(
    arch: ArchitectureSpec,
    params: Sequence[float],
    train_set: DataSet,
    val_set: DataSet,
    iter: int,
) -> IterationRecord:
    """Record the training cost, clean-GHZ fidelities and mean entropies at ``params``.

    Entropies are averaged over the training inputs.
    """
    if len(train_set) == 0 or len(val_set) == 0:
        raise ValueError("empty data set")
    block = Circuit(arch, params).block
    m = arch.m
    clean = train_set._cache.get("clean_view")
    if clean is None:
        clean = train_set._cache["clean_view"] = clean_reference_view(train_set)
    hid, out = _mean_entropies(arch, block, train_set)
    return IterationRecord(
        iter=iter,
        cost_train=mean_fidelity(block, train_set.components(), len(train_set), m),
        fid_train_clean=mean_fidelity(block, clean.components(), len(clean), m),
        fid_val=mean_fidelity(block, val_set.components(), len(val_set), m),
        renyi_hidden=hid,
        renyi_output=out,
    )
