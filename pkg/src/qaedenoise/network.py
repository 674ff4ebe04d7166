"""Quantum autoencoder architectures and their evaluation.

An architecture is an ordered list of gate instances over a flat vector of
parameter slots.  Qubits of an ``(m-1-m)`` network are laid out as inputs
``0..m-1``, the hidden (bottleneck) qubit ``m`` and outputs ``m+1..2m``.

A gate instance with ``sign = -1`` realizes the Hermitian conjugate of the
gate built from its slots.  That is how the conjugate decoder shares the
encoder's parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gates, qmath

SINGLE = "single"
TWO = "two_qubit"

ARCH_NAMES = ("qae_nisq", "qae_conj", "qae_conj_mod_dec")

# Position j of a realized angle triple reads slot ``slots[perm[j]]``.
_DAGGER_PERM = {SINGLE: (2, 1, 0), TWO: (0, 1, 2)}


@dataclass(frozen=True)
class QubitLayout:
    m: int

    @property
    def inputs(self) -> tuple[int, ...]:
        return tuple(range(self.m))

    @property
    def hidden(self) -> int:
        return self.m

    @property
    def outputs(self) -> tuple[int, ...]:
        return tuple(range(self.m + 1, 2 * self.m + 1))

    @property
    def n_total(self) -> int:
        return 2 * self.m + 1


@dataclass(frozen=True)
class GateInstance:
    kind: str
    wires: tuple[int, ...]
    slots: tuple[int, int, int]
    sign: int = 1

    def slot_for(self, j: int) -> int:
        """Slot read by position ``j`` of the realized angle triple."""
        if self.sign == 1:
            return self.slots[j]
        return self.slots[_DAGGER_PERM[self.kind][j]]

    def angles(self, params: np.ndarray) -> np.ndarray:
        return np.array([self.sign * params[self.slot_for(j)] for j in range(3)])

    def matrix_from_angles(self, angles: Sequence[float]) -> np.ndarray:
        if self.kind == SINGLE:
            return gates.single_qubit_matrix(angles)
        return gates.two_qubit_matrix(angles)

    def matrix(self, params: np.ndarray) -> np.ndarray:
        return self.matrix_from_angles(self.angles(params))


@dataclass(frozen=True)
class ArchitectureSpec:
    name: str
    layout: QubitLayout
    gates: tuple[GateInstance, ...]
    n_slots: int
    model: int | None = None

    @property
    def m(self) -> int:
        return self.layout.m

    @property
    def n_total(self) -> int:
        return self.layout.n_total

    def validate(self) -> None:
        used: set[int] = set()
        n = self.n_total
        for g in self.gates:
            want = 1 if g.kind == SINGLE else 2
            if g.kind not in (SINGLE, TWO) or len(g.wires) != want:
                raise ValueError(f"bad gate instance {g}")
            if len(set(g.wires)) != len(g.wires) or not all(0 <= w < n for w in g.wires):
                raise ValueError(f"bad wires in {g}")
            if g.sign not in (1, -1):
                raise ValueError(f"bad sign in {g}")
            for s in g.slots:
                if not 0 <= s < self.n_slots:
                    raise ValueError(f"slot {s} out of range in {g}")
            used.update(g.slots)
        if used != set(range(self.n_slots)):
            raise ValueError(f"unused slots {sorted(set(range(self.n_slots)) - used)}")

    def check_params(self, params: Sequence[float]) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_slots,):
            raise ValueError(f"expected {self.n_slots} parameters, got shape {params.shape}")
        if not np.all(np.isfinite(params)):
            raise ValueError("parameters must be finite")
        return params


def _slots(start: int) -> tuple[int, int, int]:
    return (start, start + 1, start + 2)


def _check_m(m: int) -> None:
    if int(m) != m or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m}")


def build_qae_nisq(m: int) -> ArchitectureSpec:
    _check_m(m)
    lay = QubitLayout(m)
    out: list[GateInstance] = []
    nxt = 0

    def add(kind, wires):
        nonlocal nxt
        out.append(GateInstance(kind, tuple(wires), _slots(nxt)))
        nxt += 3

    for i in lay.inputs:
        add(SINGLE, [i])
    for i in lay.inputs:
        add(TWO, [i, lay.hidden])
    add(SINGLE, [lay.hidden])
    for o in lay.outputs:
        add(TWO, [lay.hidden, o])
    for o in lay.outputs:
        add(SINGLE, [o])
    arch = ArchitectureSpec("qae_nisq", lay, tuple(out), nxt)
    arch.validate()
    return arch


def _conj_encoder(lay: QubitLayout) -> tuple[list[GateInstance], list[tuple], list[tuple]]:
    m = lay.m
    singles = [_slots(3 * i) for i in range(m)]
    twos = [_slots(3 * m + 3 * i) for i in range(m)]
    enc = [GateInstance(SINGLE, (i,), singles[i]) for i in lay.inputs]
    enc += [GateInstance(TWO, (i, lay.hidden), twos[i]) for i in lay.inputs]
    return enc, singles, twos


def _tied_decoder(lay, couplings, singles, twos) -> list[GateInstance]:
    dec = [GateInstance(TWO, tuple(w), twos[k], -1) for k, w in enumerate(couplings)]
    dec += [GateInstance(SINGLE, (o,), singles[j], -1) for j, o in enumerate(lay.outputs)]
    return dec


def build_qae_conj(m: int) -> ArchitectureSpec:
    """Encoder as in ``qae_nisq`` minus the hidden single; decoder tied by conjugation.

    The decoder couplings run in reverse so that, mapped back onto the
    input wires, the decoder is exactly the inverse of the encoder.
    """
    _check_m(m)
    lay = QubitLayout(m)
    enc, singles, twos = _conj_encoder(lay)
    order = list(range(m))[::-1]
    dec = [GateInstance(TWO, (lay.hidden, lay.outputs[j]), twos[j], -1) for j in order]
    dec += [GateInstance(SINGLE, (o,), singles[j], -1) for j, o in enumerate(lay.outputs)]
    arch = ArchitectureSpec("qae_conj", lay, tuple(enc + dec), 6 * m)
    arch.validate()
    return arch


def decoder_couplings(m: int, model: int) -> list[tuple[int, int]]:
    """Two-qubit wiring of the modified decoder, in application order.

    For ``m = 2`` every model is the single modified wiring: the hidden
    qubit couples to the last output, which then couples to the first.
    """
    if model not in (1, 2, 3):
        raise ValueError(f"model must be 1, 2 or 3, got {model}")
    lay = QubitLayout(m)
    h, outs = lay.hidden, lay.outputs
    if m == 2:
        return [(h, outs[1]), (outs[1], outs[0])]
    if model == 3:
        chain = [h, *outs]
        return list(zip(chain[:-1], chain[1:]))
    if model == 2:
        return [(h, outs[0])] + [(outs[0], o) for o in outs[1:]]
    return [(h, outs[0]), (h, outs[1])] + [(outs[1], o) for o in outs[2:]]


def build_qae_conj_mod_dec(m: int, model: int) -> ArchitectureSpec:
    _check_m(m)
    lay = QubitLayout(m)
    enc, singles, twos = _conj_encoder(lay)
    dec = _tied_decoder(lay, decoder_couplings(m, model), singles, twos)
    arch = ArchitectureSpec("qae_conj_mod_dec", lay, tuple(enc + dec), 6 * m, model)
    arch.validate()
    return arch


def build(name: str, m: int, model: int | None = None) -> ArchitectureSpec:
    if name == "qae_nisq":
        return build_qae_nisq(m)
    if name == "qae_conj":
        return build_qae_conj(m)
    if name == "qae_conj_mod_dec":
        if model is None:
            raise ValueError("qae_conj_mod_dec needs a model number")
        return build_qae_conj_mod_dec(m, model)
    raise ValueError(f"unknown architecture {name!r}; choose from {', '.join(ARCH_NAMES)}")


# -- serialization -----------------------------------------------------------

def dumps_arch(arch: ArchitectureSpec) -> str:
    """Plain-text gate table, one instance per line."""
    lines = [
        f"name {arch.name}",
        f"m {arch.m}",
        f"model {arch.model if arch.model is not None else '-'}",
        f"n_slots {arch.n_slots}",
        "# kind wires slots sign",
    ]
    for g in arch.gates:
        wires = ",".join(str(w) for w in g.wires)
        slots = ",".join(str(s) for s in g.slots)
        lines.append(f"{g.kind} {wires} {slots} {g.sign:+d}")
    return "\n".join(lines) + "\n"


def loads_arch(text: str) -> ArchitectureSpec:
    head: dict[str, str] = {}
    gl: list[GateInstance] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] in ("name", "m", "model", "n_slots"):
            head[parts[0]] = parts[1]
            continue
        if len(parts) != 4:
            raise ValueError(f"malformed gate line {raw!r}")
        kind, wires, slots, sign = parts
        gl.append(
            GateInstance(
                kind,
                tuple(int(w) for w in wires.split(",")),
                tuple(int(s) for s in slots.split(",")),  # type: ignore[arg-type]
                int(sign),
            )
        )
    model = None if head.get("model", "-") == "-" else int(head["model"])
    arch = ArchitectureSpec(head["name"], QubitLayout(int(head["m"])), tuple(gl), int(head["n_slots"]), model)
    arch.validate()
    return arch


# -- evaluation --------------------------------------------------------------

def unitary_of(arch: ArchitectureSpec, params: Sequence[float]) -> np.ndarray:
    """Full circuit unitary, built from embedded gate matrices."""
    params = arch.check_params(params)
    n = arch.n_total
    u = np.eye(2**n, dtype=complex)
    for g in arch.gates:
        u = gates.embed(g.matrix(params), g.wires, n) @ u
    return u


def _extend_with_ancillas(rho: np.ndarray, m: int) -> np.ndarray:
    anc = np.zeros((2 ** (m + 1),) * 2, dtype=complex)
    anc[0, 0] = 1.0
    return np.kron(rho, anc)


def _check_input(arch: ArchitectureSpec, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**arch.m, 2**arch.m):
        raise ValueError(f"input must be a {arch.m}-qubit density matrix, got shape {rho.shape}")
    return rho


def final_state(arch: ArchitectureSpec, params: Sequence[float], rho_in: np.ndarray) -> np.ndarray:
    """State of all ``2m+1`` qubits after the circuit, before anything is traced out."""
    params = arch.check_params(params)
    rho = _extend_with_ancillas(_check_input(arch, rho_in), arch.m)
    n = arch.n_total
    for g in arch.gates:
        mat = g.matrix(params)
        # U rho U^† as two left-multiplications, using (U rho)^† = rho U^†
        rho = gates.apply(mat, g.wires, rho, n)
        rho = gates.apply(mat, g.wires, rho.conj().T, n)
    return rho


def forward(arch: ArchitectureSpec, params: Sequence[float], rho_in: np.ndarray) -> np.ndarray:
    """Output-qubit state of the network for input state ``rho_in``."""
    return qmath.partial_trace(final_state(arch, params, rho_in), arch.layout.outputs)


class Circuit:
    """Column-restricted circuit unitaries for fast repeated evaluation.

    Only the columns of ``U`` where hidden and output qubits start in
    ``|0>`` matter, so everything here works on a ``(2**(2m+1), 2**m)``
    block.  ``prefix[k]`` is that block after gates ``0..k-1`` and
    ``suffix[k]`` the full product of gates ``k+1..end``, which makes a
    one-gate change cost a single small application and one matrix product.
    """

    def __init__(self, arch: ArchitectureSpec, params: Sequence[float]):
        self.arch = arch
        self.params = arch.check_params(params)
        n, m = arch.n_total, arch.m
        self.n = n
        self.mats = [g.matrix(self.params) for g in arch.gates]
        block = np.zeros((2**n, 2**m), dtype=complex)
        block[np.arange(2**m) * 2 ** (m + 1), np.arange(2**m)] = 1.0
        self.prefix = [block]
        for g, mat in zip(arch.gates, self.mats):
            self.prefix.append(gates.apply(mat, g.wires, self.prefix[-1], n))
        eye = np.eye(2**n, dtype=complex)
        suffix = [eye] * len(arch.gates)
        acc = eye
        for k in range(len(arch.gates) - 1, -1, -1):
            suffix[k] = acc
            g = arch.gates[k]
            # acc <- acc @ G_k, computed as (G_k^† acc^†)^†
            acc = gates.apply(self.mats[k].conj().T, g.wires, acc.conj().T, n).conj().T
        self.suffix = suffix

    @property
    def block(self) -> np.ndarray:
        return self.prefix[-1]

    def block_with(self, k: int, mat: np.ndarray) -> np.ndarray:
        """Restricted unitary with gate ``k`` replaced by ``mat``."""
        g = self.arch.gates[k]
        return self.suffix[k] @ gates.apply(mat, g.wires, self.prefix[k], self.n)


def output_overlaps(block: np.ndarray, vecs: np.ndarray, refs: np.ndarray, m: int) -> np.ndarray:
    """``<r_k| Tr_{in,hid}(U |v_k><v_k| ⊗ |0><0| U^†) |r_k>`` for every column ``k``."""
    psi = block @ vecs
    psi = psi.reshape(2 ** (m + 1), 2**m, -1)
    amp = np.einsum("aok,ok->ak", psi, refs.conj())
    return np.sum(np.abs(amp) ** 2, axis=0)


def mean_fidelity(block: np.ndarray, components, n_pairs: int, m: int) -> float:
    """Average fidelity over a data set given its pure-component decomposition."""
    vecs, weights, refs, _ = components
    return float(np.dot(weights, output_overlaps(block, vecs, refs, m)) / n_pairs)
