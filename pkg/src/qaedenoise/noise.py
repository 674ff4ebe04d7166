"""GHZ states, noise channels and training/validation data sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gates, qmath

DEPOLARIZING_CONVENTION = "(1-p)*rho + (p/3)*(X rho X + Y rho Y + Z rho Z) per qubit"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str  # "bitflip" or "depolarizing"
    p: float
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("bitflip", "depolarizing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        _check_prob(self.p)


@dataclass(frozen=True)
class DataPair:
    input: np.ndarray  # m-qubit density matrix
    reference: np.ndarray  # m-qubit pure state


@dataclass
class DataSet:
    pairs: list[DataPair]
    m: int
    spec: NoiseSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a data set needs at least one pair")

    def __len__(self) -> int:
        return len(self.pairs)

    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Flattened pure-state decomposition of every input.

        Returns ``(vecs, weights, refs, owner)``: column ``k`` of ``vecs`` is
        a pure component of input ``owner[k]`` with weight ``weights[k]`` and
        that pair's reference in column ``k`` of ``refs``.
        """
        if "components" not in self._cache:
            vs, ws, rs, own = [], [], [], []
            for i, pair in enumerate(self.pairs):
                w, v = qmath.pure_components(pair.input)
                vs.append(v)
                ws.append(w)
                rs.append(np.repeat(pair.reference[:, None], len(w), axis=1))
                own.append(np.full(len(w), i))
            self._cache["components"] = (
                np.hstack(vs),
                np.concatenate(ws),
                np.hstack(rs),
                np.concatenate(own),
            )
        return self._cache["components"]


def _check_prob(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} not in [0, 1]")
    return float(p)


def ghz(m: int) -> np.ndarray:
    if m < 1:
        raise ValueError(f"GHZ needs at least one qubit, got {m}")
    psi = np.zeros(2**m, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def flip(psi: np.ndarray, flips: Sequence[bool]) -> np.ndarray:
    """Apply ``X`` to every qubit whose entry in ``flips`` is true."""
    m = len(flips)
    mask = 0
    for i, f in enumerate(flips):
        if f:
            mask |= 1 << (m - 1 - i)
    return psi[np.arange(2**m) ^ mask]


def sample_bitflip_ghz(m: int, p: float, rng: np.random.Generator) -> np.ndarray:
    _check_prob(p)
    return flip(ghz(m), rng.random(m) < p)


def depolarize(rho: np.ndarray, probs: Sequence[float]) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    n = qmath.num_qubits(rho.shape[0])
    if len(probs) != n:
        raise ValueError(f"need {n} probabilities, got {len(probs)}")
    for q, p in enumerate(probs):
        _check_prob(p)
        if p == 0:
            continue
        acc = (1 - p) * rho
        for pauli in (gates.X, gates.Y, gates.Z):
            pr = gates.apply(pauli, [q], rho, n)
            acc = acc + (p / 3) * gates.apply(pauli, [q], pr.conj().T, n)
        rho = acc
    return rho


def make_training_set(m: int, p: float, n: int, rng: np.random.Generator) -> DataSet:
    """Bit-flipped GHZ inputs, each paired with an independent bit-flipped reference."""
    if n < 1:
        raise ValueError("training set size must be >= 1")
    pairs = []
    for _ in range(n):
        t = sample_bitflip_ghz(m, p, rng)
        r = sample_bitflip_ghz(m, p, rng)
        pairs.append(DataPair(qmath.dm(t), r))
    return DataSet(pairs, m, NoiseSpec("bitflip", p))


def make_validation_set(m: int, p_max: float, n: int, rng: np.random.Generator) -> DataSet:
    """Depolarized GHZ inputs with per-qubit strengths drawn from U[0, p_max]."""
    _check_prob(p_max)
    if n < 1:
        raise ValueError("validation set size must be >= 1")
    clean = ghz(m)
    rho0 = qmath.dm(clean)
    pairs = []
    for _ in range(n):
        probs = rng.uniform(0.0, p_max, size=m)
        pairs.append(DataPair(depolarize(rho0, probs), clean))
    return DataSet(pairs, m, NoiseSpec("depolarizing", p_max))


def clean_reference_view(data: DataSet) -> DataSet:
    """Same inputs, every reference replaced by the clean GHZ state."""
    clean = ghz(data.m)
    return DataSet([DataPair(pr.input, clean) for pr in data.pairs], data.m, data.spec)


def dump_dataset(data: DataSet) -> str:
    """Debug text dump: pure members as basis index/amplitude lists, mixed as full matrices."""
    out = [f"# m={data.m} kind={data.spec.kind} p={data.spec.p!r}"]

    def pure_repr(psi):
        idx = np.flatnonzero(np.abs(psi) > 1e-12)
        return " ".join(f"{i}:{psi[i].real!r}{psi[i].imag:+.17g}j" for i in idx)

    for i, pair in enumerate(data.pairs):
        w, v = qmath.pure_components(pair.input)
        if len(w) == 1 and abs(w[0] - 1) < 1e-12:
            # fix the global phase so the dump is deterministic
            psi = v[:, 0]
            k = int(np.argmax(np.abs(psi)))
            psi = psi * np.exp(-1j * np.angle(psi[k]))
            out.append(f"pair {i} input pure {pure_repr(psi)}")
        else:
            flat = " ".join(f"{z.real!r}{z.imag:+.17g}j" for z in pair.input.reshape(-1))
            out.append(f"pair {i} input mixed {flat}")
        out.append(f"pair {i} reference pure {pure_repr(pair.reference)}")
    return "\n".join(out) + "\n"
