"""Dense complex linear algebra for small Hilbert spaces.

Subsystem 0 is always the leftmost (slowest-varying) tensor factor.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .config import TOL


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns


class DimensionError(ValueError):
    """Subsystem dimensions do not match the matrix they describe."""


class NotHermitianError(ValueError):
    pass


def kron(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    return reduce(np.kron, (a, b) + more)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionError(
            f"subsystem dims {list(dims)} multiply to {int(np.prod(dims))}, "
            f"matrix dimension is {m.shape[0]}"
        )


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in `keep`.

    The kept factors appear in ascending subsystem order in the result.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep={keep} is not a nonempty subset of range({n})")

    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d, d)


def permute_subsystems(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor j is old factor order[j]."""
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise DimensionError(f"order={list(order)} is not a permutation of range({n})")
    t = np.asarray(m).reshape(dims + dims)
    t = t.transpose(list(order) + [n + i for i in order])
    return t.reshape(m.shape)


def eigh(h: np.ndarray, tol: float = TOL.hermitian) -> HermitianEigen:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    asym = np.max(np.abs(h - dagger(h))) if h.size else 0.0
    if asym > tol:
        raise NotHermitianError(f"matrix is not Hermitian: max |H - H^dagger| = {asym:.3e}")
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    return HermitianEigen(w, v)


def hs_norm(m: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm sqrt(Tr M^dagger M)."""
    return float(np.linalg.norm(m, "fro"))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)
