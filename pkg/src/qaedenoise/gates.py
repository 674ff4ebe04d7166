"""Parametrized gate matrices and their placement inside a register.

Single-qubit gates use the ZYZ Euler form ``Rz(gamma) Ry(beta) Rz(alpha)``
with ``R_A(phi) = exp(-i phi A / 2)``.  The canonical two-qubit gate is
``R_XX(tx) R_YY(ty) R_ZZ(tz)`` with ``R_AA(theta) = exp(+i theta A⊗A)``; the
three factors commute.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

XX = np.kron(X, X)
YY = np.kron(Y, Y)
ZZ = np.kron(Z, Z)
I4 = np.eye(4, dtype=complex)


class SingleQubitAngles(NamedTuple):
    alpha: float
    beta: float
    gamma: float


class TwoQubitAngles(NamedTuple):
    theta_x: float
    theta_y: float
    theta_z: float


def rz(phi: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pauli_rotation2(pauli2: np.ndarray, theta: float) -> np.ndarray:
    """``exp(+i theta P)`` for a two-qubit Pauli product ``P`` (``P^2 = I``)."""
    return np.cos(theta) * I4 + 1j * np.sin(theta) * pauli2


def single_qubit_matrix(a: Sequence[float]) -> np.ndarray:
    alpha, beta, gamma = a
    return rz(gamma) @ ry(beta) @ rz(alpha)


def two_qubit_matrix(t: Sequence[float]) -> np.ndarray:
    tx, ty, tz = t
    return pauli_rotation2(XX, tx) @ pauli_rotation2(YY, ty) @ pauli_rotation2(ZZ, tz)


def dagger_angles_single(a: Sequence[float]) -> SingleQubitAngles:
    """Angles whose matrix is the conjugate transpose of ``single_qubit_matrix(a)``."""
    alpha, beta, gamma = a
    return SingleQubitAngles(-gamma, -beta, -alpha)


def dagger_angles_two(t: Sequence[float]) -> TwoQubitAngles:
    tx, ty, tz = t
    return TwoQubitAngles(-tx, -ty, -tz)


def _check_targets(targets: Sequence[int], n_total: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n_total:
            raise ValueError(f"target qubit {t} out of range for {n_total} qubits")
    return targets


def apply(op: np.ndarray, targets: Sequence[int], vecs: np.ndarray, n_total: int) -> np.ndarray:
    """Apply ``op`` on ``targets`` to every column of ``vecs`` (shape ``(2**n, K)``).

    Works by tensor contraction, so the full-register operator is never built.
    """
    k = len(targets)
    K = vecs.shape[1]
    t = vecs.reshape((2,) * n_total + (K,))
    g = op.reshape((2,) * (2 * k))
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate's output axes first; restore register order
    rest = [q for q in range(n_total) if q not in targets]
    src = list(targets) + rest
    perm = [src.index(q) for q in range(n_total)] + [n_total]
    return out.transpose(perm).reshape(2**n_total, K)


def embed(op: np.ndarray, targets: Sequence[int], n_total: int) -> np.ndarray:
    """Full-register matrix acting as ``op`` on ``targets`` and identity elsewhere.

    ``targets[0]`` is the most significant qubit of ``op``'s own index.
    Built as ``op ⊗ I`` in the qubit order ``targets + rest`` and then
    permuted back to register order.
    """
    op = np.asarray(op, dtype=complex)
    targets = _check_targets(targets, n_total)
    k = len(targets)
    if op.shape != (2**k,) * 2:
        raise ValueError(f"operator shape {op.shape} does not match {k} targets")
    order = targets + [q for q in range(n_total) if q not in targets]
    full = np.kron(op, np.eye(2 ** (n_total - k), dtype=complex))
    idx = np.arange(2**n_total)
    bits = (idx[:, None] >> (n_total - 1 - np.arange(n_total))) & 1
    # position of each register basis state in the reordered basis
    perm = bits[:, order] @ (1 << (n_total - 1 - np.arange(n_total)))
    return full[np.ix_(perm, perm)]
