"""Dense complex linear algebra for small qubit registers.

Conventions used everywhere in the package:

* Matrices and states are plain ``numpy`` complex arrays.
* Qubit 0 is the most significant bit of a computational-basis index, so
  ``kron(a, b)`` puts ``a`` on the lower-numbered qubits.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_FLOOR = -1e-8
NORM_ATOL = 1e-10


class StateError(ValueError):
    """Raised when an array is not a valid state of the expected size."""


def num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise StateError(f"dimension {dim} is not a power of two")
    return n


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices (or vectors)."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def dm(psi: np.ndarray) -> np.ndarray:
    """Density matrix ``|psi><psi|`` of a pure state vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def check_pure_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise StateError("pure state must be a 1-D amplitude vector")
    num_qubits(psi.shape[0])
    if abs(np.linalg.norm(psi) - 1.0) > NORM_ATOL:
        raise StateError(f"state norm {np.linalg.norm(psi)!r} is not 1")
    return psi


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array.

    Hermiticity and unit trace are checked to 1e-10; the smallest
    eigenvalue may dip to -1e-8 to absorb rounding from repeated channels.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"density matrix must be square, got shape {rho.shape}")
    num_qubits(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_ATOL:
        raise StateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_ATOL:
        raise StateError(f"density matrix trace {np.trace(rho).real!r} is not 1")
    if np.linalg.eigvalsh(rho).min() < PSD_FLOOR:
        raise StateError("density matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho: np.ndarray) -> bool:
    try:
        check_density_matrix(rho)
    except StateError:
        return False
    return True


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` to the qubits in ``keep``.

    Kept qubits stay in ascending index order regardless of how ``keep``
    is ordered.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"qubit {k} out of range for {n}-qubit state")
    traced = [q for q in range(n) if q not in keep]
    k = len(keep)
    t = rho.reshape((2,) * (2 * n))
    # move kept bra/ket axes to the front, traced ones to the back
    order = keep + [n + q for q in keep] + traced + [n + q for q in traced]
    t = t.transpose(order).reshape(2**k, 2**k, 2 ** len(traced), 2 ** len(traced))
    return np.trace(t, axis1=2, axis2=3)


def reduced_from_vectors(
    vecs: np.ndarray, weights: np.ndarray, n: int, keep: Iterable[int]
) -> np.ndarray:
    """Reduced state of ``sum_k w_k |v_k><v_k|`` without forming the full matrix.

    ``vecs`` has shape ``(2**n, K)``; column ``k`` is ``v_k``.
    """
    keep = sorted(set(keep))
    traced = [q for q in range(n) if q not in keep]
    K = vecs.shape[1]
    t = vecs.reshape((2,) * n + (K,)).transpose(keep + traced + [n])
    t = t.reshape(2 ** len(keep), 2 ** len(traced), K) * np.sqrt(weights)
    a = t.reshape(2 ** len(keep), -1)
    return a @ a.conj().T


def purity(rho: np.ndarray) -> float:
    """``Tr(rho^2)``."""
    rho = np.asarray(rho)
    # Tr(rho rho) = sum_ij rho_ij rho_ji; for Hermitian rho that is sum |rho_ij|^2
    val = np.einsum("ij,ji->", rho, rho)
    return float(val.real)


def fidelity_pure(rho: np.ndarray, ref: np.ndarray) -> float:
    """Overlap ``<ref|rho|ref>`` of a state with a pure reference."""
    rho = np.asarray(rho)
    ref = np.asarray(ref).reshape(-1)
    if rho.shape != (ref.shape[0], ref.shape[0]):
        raise StateError(
            f"reference of length {ref.shape[0]} does not match state shape {rho.shape}"
        )
    return float(np.vdot(ref, rho @ ref).real)


def pure_components(rho: np.ndarray, cutoff: float = 1e-13) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose ``rho`` into weights and pure components.

    Returns ``(weights, vecs)`` with ``rho ~= vecs @ diag(weights) @ vecs^†``,
    dropping components whose weight is below ``cutoff``.
    """
    w, v = np.linalg.eigh(np.asarray(rho, dtype=complex))
    mask = w > cutoff
    return w[mask], v[:, mask]
