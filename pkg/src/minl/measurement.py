"""Rank-1 projective measurements on B that leave the marginal rho_B invariant.

Such measurements are exactly the rank-1 refinements of the eigenprojectors
of rho_B. Inside a degenerate eigenspace of dimension m the refinement is a
free m x m unitary, parametrized here as exp(iH) with H Hermitian and given
by m^2 real coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .config import TOL
from .linalg import DimensionError, commutator, eigh, hs_norm
from .qstate import DensityMatrix, _require_bipartite


@dataclass(frozen=True, eq=False)
class Block:
    eigenvalue: float
    basis: np.ndarray  # dB x m, orthonormal columns

    @property
    def size(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class SpectralBlocks:
    blocks: tuple[Block, ...]
    source_dim: int
    cluster_tol: float = TOL.cluster

    def free(self) -> list[int]:
        """Indices of blocks whose basis choice can change the measurement outcome.

        One-dimensional blocks have no freedom; the kernel block cannot affect
        the post-measurement state because supp(rho_AB) restricted to B lies in
        supp(rho_B).
        """
        return [
            i
            for i, b in enumerate(self.blocks)
            if b.size > 1 and b.eigenvalue > self.cluster_tol
        ]

    def param_sizes(self) -> list[int]:
        return [self.blocks[i].size for i in self.free()]

    @property
    def degenerate(self) -> bool:
        return bool(self.free())

    def rotated(self, v: np.ndarray) -> "SpectralBlocks":
        """Blocks of V rho_B V^dagger obtained by rotating every basis with V."""
        return SpectralBlocks(
            tuple(Block(b.eigenvalue, v @ b.basis) for b in self.blocks),
            self.source_dim,
            self.cluster_tol,
        )


def spectral_blocks(rho_b: DensityMatrix | np.ndarray, cluster_tol: float = TOL.cluster) -> SpectralBlocks:
    """Cluster the ascending spectrum of rho_B; neighbours within cluster_tol share a block."""
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    mat = rho_b.mat if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b)
    w, v = eigh(mat)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= cluster_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    blocks = tuple(Block(float(np.mean(w[g])), v[:, g]) for g in groups)
    return SpectralBlocks(blocks, len(w), cluster_tol)


@lru_cache(maxsize=None)
def _triu(m: int):
    return np.triu_indices(m, 1)


def hermitian_from_coords(x: np.ndarray, m: int) -> np.ndarray:
    """Hermitian m x m matrix from m^2 reals: diagonal, then Re and Im of the upper triangle."""
    x = np.asarray(x, dtype=float)
    if x.size != m * m:
        raise DimensionError(f"expected {m * m} generator coordinates, got {x.size}")
    h = np.diag(x[:m]).astype(complex)
    iu = _triu(m)
    k = len(iu[0])
    off = x[m : m + k] + 1j * x[m + k :]
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


def block_unitary(x: np.ndarray, m: int) -> np.ndarray:
    return expm(1j * hermitian_from_coords(x, m))


@dataclass(frozen=True, eq=False)
class InvariantMeasurement:
    """Rank-1 projectors |v_k><v_k| given by the columns of `vectors`.

    `block_of[k]` is the spectral block that column k came from.
    """

    vectors: np.ndarray
    block_of: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def projectors(self) -> list[np.ndarray]:
        return [np.outer(v, v.conj()) for v in self.vectors.T]

    def commutation_residual(self, rho_b: DensityMatrix | np.ndarray) -> float:
        mat = rho_b.mat if isinstance(rho_b, DensityMatrix) else rho_b
        return max(hs_norm(commutator(mat, p)) for p in self.projectors)

    def conjugated(self, v: np.ndarray) -> "InvariantMeasurement":
        return InvariantMeasurement(v @ self.vectors, self.block_of)


def realize(
    blocks: SpectralBlocks,
    params: Sequence[np.ndarray] | None = None,
    unitaries: Sequence[np.ndarray] | None = None,
) -> InvariantMeasurement:
    """Concrete measurement for one point of the invariant family.

    Either `params` (generator coordinates) or `unitaries` may be given, one
    entry per free block in `blocks.free()` order; omitted means identity.
    """
    free = blocks.free()
    if params is not None and unitaries is not None:
        raise ValueError("pass params or unitaries, not both")
    if params is not None:
        if len(params) != len(free):
            raise DimensionError(f"expected {len(free)} parameter blocks, got {len(params)}")
        unitaries = [block_unitary(x, blocks.blocks[i].size) for x, i in zip(params, free)]
    if unitaries is None:
        unitaries = [None] * len(free)
    if len(unitaries) != len(free):
        raise DimensionError(f"expected {len(free)} block unitaries, got {len(unitaries)}")
    rot = dict(zip(free, unitaries))

    cols, owner = [], []
    for i, b in enumerate(blocks.blocks):
        basis = b.basis
        u = rot.get(i)
        if u is not None:
            if u.shape != (b.size, b.size):
                raise DimensionError(f"block {i} needs a {b.size}x{b.size} unitary, got {u.shape}")
            basis = basis @ u
        cols.append(basis)
        owner.extend([i] * b.size)
    return InvariantMeasurement(np.hstack(cols), tuple(owner))


def _check_measured(rho: DensityMatrix, m: InvariantMeasurement) -> None:
    _require_bipartite(rho)
    if rho.dims[1] != m.dim:
        raise DimensionError(f"measurement acts on dimension {m.dim}, subsystem B has {rho.dims[1]}")


def pinch(rho: DensityMatrix, m: InvariantMeasurement) -> DensityMatrix:
    """Post-measurement state sum_k (I x P_k) rho (I x P_k)."""
    _check_measured(rho, m)
    da, db = rho.dims
    r = rho.mat.reshape(da, db, da, db)
    out = sum(np.einsum("xi,aibj,jy->axby", p, r, p) for p in m.projectors).reshape(rho.mat.shape)
    out /= np.trace(out).real
    return DensityMatrix(out, rho.dims)


def conditional_blocks(rho4: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Unnormalized conditional states <v_k| rho |v_k> on A, shape (k, dA, dA).

    `rho4` is rho_AB reshaped to (dA, dB, dA, dB).
    """
    da, db = rho4.shape[:2]
    x = rho4.transpose(0, 2, 1, 3).reshape(da * da, db, db) @ vectors
    return np.einsum("xik,ik->kx", x, vectors.conj()).reshape(-1, da, da)


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple[DensityMatrix, ...]
    valid: np.ndarray  # False marks a zero-probability outcome with a placeholder state


def ensemble(rho: DensityMatrix, m: InvariantMeasurement) -> Ensemble:
    """Outcome probabilities p_k and conditional states rho_A^k of measuring B."""
    _check_measured(rho, m)
    da, db = rho.dims
    blocks = conditional_blocks(rho.mat.reshape(da, db, da, db), m.vectors)
    probs = np.clip(np.einsum("kaa->k", blocks).real, 0.0, None)
    valid = probs > TOL.zero_prob
    placeholder = DensityMatrix(np.eye(da) / da, (da,))
    states = tuple(
        DensityMatrix(b / np.trace(b).real, (da,)) if ok else placeholder
        for b, ok in zip(blocks, valid)
    )
    return Ensemble(probs / probs.sum(), states, valid)


def random_invariant_measurement(rho: DensityMatrix, seed=None, cluster_tol: float = TOL.cluster) -> InvariantMeasurement:
    """Uniformly drawn block unitaries inside the degenerate eigenspaces of rho_B."""
    from .qstate import random_unitary

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    _require_bipartite(rho)
    blocks = spectral_blocks(rho.reduce(1), cluster_tol)
    return realize(blocks, unitaries=[random_unitary(m, rng) for m in blocks.param_sizes()])
