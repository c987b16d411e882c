"""Validated density matrices, entropic functionals and state families.

All entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import TOL
from .linalg import (
    PAULIS,
    DimensionError,
    dagger,
    eigh,
    kron,
    partial_trace,
)


class StateValidationError(ValueError):
    """A matrix failed one of the density-matrix invariants.

    ``invariant`` names the failed check, ``violation`` is its measured size.
    """

    def __init__(self, invariant: str, violation: float, message: str | None = None):
        self.invariant = invariant
        self.violation = float(violation)
        super().__init__(message or f"{invariant} invariant violated by {violation:.3e}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite unit-trace matrix on a tensor product space.

    Construction validates Hermiticity, trace and positivity and clips
    eigenvalues that are negative only through roundoff.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {mat.shape}")
        dims = tuple(int(d) for d in self.dims) if len(self.dims) else (mat.shape[0],)
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimensionError(
                f"subsystem dims {list(dims)} multiply to {int(np.prod(dims))}, "
                f"matrix dimension is {mat.shape[0]}"
            )
        if not np.all(np.isfinite(mat)):
            raise StateValidationError("finite", float("inf"), "matrix has NaN or Inf entries")
        asym = float(np.max(np.abs(mat - dagger(mat))))
        if asym > TOL.hermitian:
            raise StateValidationError("hermitian", asym)
        mat = 0.5 * (mat + dagger(mat))
        tr_err = abs(np.trace(mat).real - 1.0)
        if tr_err > TOL.trace:
            raise StateValidationError(
                "trace", tr_err, f"trace invariant violated: trace is {np.trace(mat).real:.12g}"
            )
        w, v = np.linalg.eigh(mat)
        if w[0] < -TOL.negative_eig:
            raise StateValidationError(
                "positivity", -w[0], f"positivity invariant violated: eigenvalue {w[0]:.3e}"
            )
        if w[0] < 0:
            w = np.clip(w, 0.0, None)
            mat = (v * w) @ dagger(v)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def spectrum(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.mat), 0.0, None)

    def reduce(self, keep: Sequence[int] | int) -> "DensityMatrix":
        """Marginal on the listed subsystems (in ascending order)."""
        if isinstance(keep, (int, np.integer)):
            keep = [int(keep)]
        kept = sorted(set(keep))
        sub = partial_trace(self.mat, self.dims, kept)
        return DensityMatrix(sub, tuple(self.dims[i] for i in kept))

    def is_pure(self) -> bool:
        return self.spectrum()[-1] > 1.0 - TOL.pure


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(d) for d in self.dims) if len(self.dims) else (psi.size,)
        if int(np.prod(dims)) != psi.size:
            raise DimensionError(f"dims {list(dims)} do not match {psi.size} amplitudes")
        norm_err = abs(np.linalg.norm(psi) - 1.0)
        if norm_err > TOL.unit_norm:
            raise StateValidationError("unit_norm", norm_err)
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)
        object.__setattr__(self, "dims", dims)

    def density(self) -> DensityMatrix:
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), self.dims)


def _require_bipartite(rho: DensityMatrix) -> None:
    if len(rho.dims) != 2:
        raise DimensionError(f"expected a bipartite state, got dims {list(rho.dims)}")


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(abs(-np.sum(p * np.log2(p))))


def entropy(rho: DensityMatrix | np.ndarray) -> float:
    """von Neumann entropy -Tr rho log2 rho, with 0 log 0 = 0."""
    if isinstance(rho, DensityMatrix):
        return shannon_entropy(rho.spectrum())
    return shannon_entropy(np.clip(np.linalg.eigvalsh(rho), 0.0, None))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho||sigma) = Tr rho (log2 rho - log2 sigma); ``inf`` when supp rho is not in supp sigma."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    p, u = eigh(rho.mat)
    q, v = eigh(sigma.mat)
    p = np.clip(p, 0.0, None)
    q = np.clip(q, 0.0, None)
    # |<u_i|v_j>|^2 weights the cross term Tr rho log sigma
    overlap = np.abs(dagger(u) @ v) ** 2
    kernel = q <= TOL.support
    leak = float(p @ overlap[:, kernel].sum(axis=1)) if kernel.any() else 0.0
    if leak > TOL.support:
        return float("inf")
    p_pos = p > 0
    self_term = float(np.sum(p[p_pos] * np.log2(p[p_pos])))
    cross = overlap[:, ~kernel] @ np.log2(q[~kernel])
    value = self_term - float(p @ cross)
    return max(value, 0.0)


def conditional_entropy(rho: DensityMatrix) -> float:
    """S(A|B) = S(rho_AB) - S(rho_B)."""
    _require_bipartite(rho)
    return entropy(rho) - entropy(rho.reduce(1))


def mutual_information(rho: DensityMatrix) -> float:
    _require_bipartite(rho)
    return entropy(rho.reduce(0)) + entropy(rho.reduce(1)) - entropy(rho)


def purify(rho: DensityMatrix) -> PureState:
    """Purification on rho's space tensored with an ancilla of dimension rank(rho).

    The ancilla is appended as the last subsystem.
    """
    w, v = eigh(rho.mat)
    support = w > TOL.rank
    w, v = w[support][::-1], v[:, support][:, ::-1]
    psi = np.zeros((rho.dim, w.size), dtype=complex)
    psi[:, :] = v * np.sqrt(w)
    psi = psi.ravel()
    psi /= np.linalg.norm(psi)
    return PureState(psi, rho.dims + (w.size,))


@dataclass(frozen=True)
class BellDiagonalParams:
    c1: float
    c2: float
    c3: float

    def eigenvalues(self) -> np.ndarray:
        c1, c2, c3 = self.c1, self.c2, self.c3
        return np.array(
            [
                (1 - c1 - c2 - c3) / 4,
                (1 - c1 + c2 + c3) / 4,
                (1 + c1 - c2 + c3) / 4,
                (1 + c1 + c2 - c3) / 4,
            ]
        )

    def check(self) -> None:
        for name, c in zip(("c1", "c2", "c3"), (self.c1, self.c2, self.c3)):
            if not -1.0 <= c <= 1.0:
                raise StateValidationError("range", abs(c) - 1.0, f"{name}={c} outside [-1, 1]")
        lam = self.eigenvalues()
        k = int(np.argmin(lam))
        if lam[k] < -1e-12:
            raise StateValidationError(
                "positivity",
                -lam[k],
                f"positivity invariant violated: Bell-diagonal eigenvalue #{k} is {lam[k]:.6g}",
            )

    @classmethod
    def from_weights(cls, weights) -> "BellDiagonalParams":
        """Inverse of `eigenvalues` for a probability vector of length 4."""
        l0, l1, l2, l3 = weights
        return cls(
            float((l2 + l3) - (l0 + l1)),
            float((l1 + l3) - (l0 + l2)),
            float((l1 + l2) - (l0 + l3)),
        )


def bell_diagonal(p: BellDiagonalParams | Sequence[float]) -> DensityMatrix:
    """(I + sum_i c_i sigma_i x sigma_i) / 4."""
    if not isinstance(p, BellDiagonalParams):
        p = BellDiagonalParams(*map(float, p))
    p.check()
    mat = np.eye(4, dtype=complex)
    for c, s in zip((p.c1, p.c2, p.c3), PAULIS):
        mat = mat + c * kron(s, s)
    mat = mat / 4
    return DensityMatrix(mat, (2, 2))


def werner(p: float) -> DensityMatrix:
    """Mixture p |Psi-><Psi-| + (1 - p) I/4, i.e. c = (-p, -p, -p)."""
    return bell_diagonal(BellDiagonalParams(-p, -p, -p))


def bell_state(which: str = "phi+") -> PureState:
    s = 1 / np.sqrt(2)
    amps = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }[which]
    return PureState(np.array(amps, dtype=complex), (2, 2))


def product(*states: DensityMatrix) -> DensityMatrix:
    mat = states[0].mat
    dims = states[0].dims
    for s in states[1:]:
        mat = np.kron(mat, s.mat)
        dims = dims + s.dims
    return DensityMatrix(mat, dims)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure(dims: Sequence[int], seed=None) -> PureState:
    """Haar-random pure state: normalized vector of i.i.d. complex Gaussians."""
    rng = _rng(seed)
    d = int(np.prod(dims))
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(psi / np.linalg.norm(psi), tuple(dims))


def random_density(dim: int, rank: int | None = None, seed=None, dims: Sequence[int] | None = None) -> DensityMatrix:
    """Ginibre state G G^dagger / Tr(G G^dagger) with G of shape dim x rank."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    m /= np.trace(m).real
    return DensityMatrix(m, tuple(dims) if dims is not None else (dim,))


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def partial_transpose(rho: DensityMatrix, sys: int = 1) -> np.ndarray:
    dims = list(rho.dims)
    n = len(dims)
    t = rho.mat.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return t.transpose(axes).reshape(rho.mat.shape)


def negativity(rho: DensityMatrix) -> float:
    """Sum of |negative eigenvalues| of the partial transpose on the second factor."""
    _require_bipartite(rho)
    w = np.linalg.eigvalsh(partial_transpose(rho, 1))
    return float(-np.sum(w[w < 0])) + 0.0  # avoid printing -0.0


def random_uniform_marginal(da: int, db: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Random state whose B marginal is exactly I/dB.

    A Ginibre state is filtered by (I x rho_B^{-1/2}), which keeps the rank and
    makes every measurement on B locally invariant.
    """
    rho = random_density(da * db, rank if rank is not None else da * db, seed, (da, db))
    w, v = np.linalg.eigh(rho.reduce(1).mat)
    if w[0] < 1e-12:
        raise ValueError(f"rank {rank} is too small for a full-rank marginal on B (dB={db})")
    filt = np.kron(np.eye(da), (v / np.sqrt(w)) @ dagger(v))
    mat = filt @ rho.mat @ dagger(filt) / db
    return DensityMatrix(mat / np.trace(mat).real, (da, db))
