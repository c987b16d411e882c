"""Relative-entropy and Hilbert-Schmidt measurement-induced nonlocality.

Both functionals are maxima over the locally invariant measurement family of
`minl.measurement`. When rho_B is non-degenerate the family is a single
measurement and nothing is optimized. Otherwise each degenerate block gets a
unitary that is improved by finite-difference gradient ascent with a matrix
exponential retraction, from several random starts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .config import TOL
from .linalg import DimensionError, PAULIS, hs_norm
from .measurement import (
    InvariantMeasurement,
    SpectralBlocks,
    block_unitary,
    conditional_blocks,
    ensemble,
    hermitian_from_coords,
    realize,
    spectral_blocks,
)
from .qstate import (
    BellDiagonalParams,
    DensityMatrix,
    PureState,
    _require_bipartite,
    entropy,
    shannon_entropy,
)

log = logging.getLogger(__name__)

OBJECTIVES = ("avg-cond-entropy", "hs-distance")


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_iters: int = 200
    step_init: float = 0.1
    grad_eps: float = 1e-5
    conv_tol: float = 1e-9
    seed: int = 0
    cluster_tol: float = TOL.cluster
    record_candidates: bool = False

    def __post_init__(self):
        for name in ("restarts", "max_iters", "step_init", "grad_eps", "conv_tol", "cluster_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"OptimizerConfig.{name} must be positive")
        if self.seed < 0:
            raise ValueError("OptimizerConfig.seed must be non-negative")
        if not self.conv_tol < self.step_init:
            raise ValueError("OptimizerConfig.conv_tol must be smaller than step_init")


@dataclass(eq=False)
class OptimizationReport:
    value: float
    measurement: InvariantMeasurement
    objective: str
    objective_value: float  # raw maximized objective at `measurement`
    objective_trace: list[float] = field(default_factory=list)  # best value per restart
    converged: bool = True
    iterations: int = 0
    optimized: bool = False  # False when the family is a single measurement or the input is pure
    lower_bound_only: bool = False  # a free block of dimension >= 3 was searched
    candidates: list[InvariantMeasurement] = field(default_factory=list)


def avg_conditional_entropy(rho: DensityMatrix, m: InvariantMeasurement) -> float:
    """sum_k p_k S(rho_A^k) over outcomes with nonzero probability."""
    ens = ensemble(rho, m)
    return float(sum(p * entropy(s) for p, s, ok in zip(ens.probs, ens.states, ens.valid) if ok))


class _Family:
    """Fast objective evaluation over the invariant measurements of one state."""

    def __init__(self, rho: DensityMatrix, cluster_tol: float):
        _require_bipartite(rho)
        self.rho = rho
        self.da, self.db = rho.dims
        self.rho4 = rho.mat.reshape(self.da, self.db, self.da, self.db)
        self.blocks: SpectralBlocks = spectral_blocks(rho.reduce(1), cluster_tol)
        self.free = self.blocks.free()
        self.sizes = self.blocks.param_sizes()
        self.base = realize(self.blocks).vectors
        offsets = np.cumsum([0] + [b.size for b in self.blocks.blocks])
        self.slices = [slice(offsets[i], offsets[i + 1]) for i in self.free]

    def vectors(self, unitaries) -> np.ndarray:
        if unitaries is None:
            return self.base
        v = self.base.copy()
        for sl, u in zip(self.slices, unitaries):
            v[:, sl] = self.base[:, sl] @ u
        return v

    def cond_entropy(self, vectors: np.ndarray) -> float:
        mk = conditional_blocks(self.rho4, vectors)
        mu = np.clip(np.linalg.eigvalsh(mk), 0.0, None)
        p = mu.sum(axis=1)
        keep = p > TOL.zero_prob
        mu, p = mu[keep], p[keep]
        mlogm = mu * np.log2(np.maximum(mu, 1e-300))
        return float(max(-mlogm.sum() + np.sum(p * np.log2(p)), 0.0))

    def hs_distance(self, vectors: np.ndarray) -> float:
        mk = conditional_blocks(self.rho4, vectors)
        pinched = np.einsum("kab,ik,jk->aibj", mk, vectors, vectors.conj())
        return hs_norm(self.rho.mat - pinched.reshape(self.rho.mat.shape))

    def evaluate(self, objective: str, vectors: np.ndarray) -> float:
        if objective == "avg-cond-entropy":
            return self.cond_entropy(vectors)
        if objective == "hs-distance":
            return self.hs_distance(vectors)
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")


def _ascend(fam: _Family, objective: str, unitaries: list[np.ndarray], cfg: OptimizerConfig, record):
    """Gradient ascent from one start. Returns (value, unitaries, iterations, converged).

    Only off-diagonal generator coordinates are searched: right-multiplying a
    block unitary by diagonal phases leaves every rank-1 projector unchanged.
    """

    def f(us):
        return fam.evaluate(objective, fam.vectors(us))

    def moved(us, coords, t):
        out, pos = [], 0
        for u, m in zip(us, fam.sizes):
            out.append(u @ expm(1j * t * hermitian_from_coords(coords[pos : pos + m * m], m)))
            pos += m * m
        return out

    # central-difference probes: (block, exp(+i eps G_c), exp(-i eps G_c)) per active coordinate
    probes = []
    for b, m in enumerate(fam.sizes):
        for c in range(m, m * m):
            e = np.zeros(m * m)
            e[c] = cfg.grad_eps
            probes.append((b, expm(1j * hermitian_from_coords(e, m)), expm(-1j * hermitian_from_coords(e, m))))
    offsets = np.cumsum([0] + [m * m for m in fam.sizes])
    index = [offsets[b] + c for b, m in enumerate(fam.sizes) for c in range(m, m * m)]
    n = int(offsets[-1])

    value = f(unitaries)
    record(unitaries)
    t = cfg.step_init / 2
    for it in range(1, cfg.max_iters + 1):
        grad = np.zeros(n)
        for k, (b, plus, minus) in zip(index, probes):
            up, down = list(unitaries), list(unitaries)
            up[b] = unitaries[b] @ plus
            down[b] = unitaries[b] @ minus
            grad[k] = (f(up) - f(down)) / (2 * cfg.grad_eps)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            return value, unitaries, it, True
        direction = grad / gnorm
        # backtracking by halving, restarted from twice the last accepted step
        t = min(cfg.step_init, 2 * t)
        while t > 1e-14:
            trial = moved(unitaries, direction, t)
            trial_value = f(trial)
            if trial_value > value:
                break
            t *= 0.5
        else:
            return value, unitaries, it, True
        gain = trial_value - value
        unitaries, value = trial, trial_value
        record(unitaries)
        if gain < cfg.conv_tol:
            return value, unitaries, it, True
    return value, unitaries, cfg.max_iters, False


def _polish(fam: _Family, objective: str, unitaries: list[np.ndarray], value: float):
    """Quasi-Newton refinement of the best restart in local coordinates.

    First-order ascent crawls when the maximum sits in a nearly flat valley
    (for instance two almost equal Bell-diagonal correlations); BFGS picks up
    the small curvature there.
    """
    active = [np.arange(m, m * m) for m in fam.sizes]
    n = sum(len(a) for a in active)

    def local(x):
        out, pos = [], 0
        for u, m, a in zip(unitaries, fam.sizes, active):
            coords = np.zeros(m * m)
            coords[a] = x[pos : pos + len(a)]
            out.append(u @ expm(1j * hermitian_from_coords(coords, m)))
            pos += len(a)
        return out

    res = minimize(
        lambda x: -fam.evaluate(objective, fam.vectors(local(x))),
        np.zeros(n),
        method="BFGS",
        jac="3-point",
        options={"gtol": 1e-11, "maxiter": 200},
    )
    if -res.fun > value:
        return float(-res.fun), local(res.x)
    return value, unitaries


def maximize(rho: DensityMatrix, objective: str, cfg: OptimizerConfig | None = None) -> OptimizationReport:
    """Maximize `objective` over the invariant measurement family of rho."""
    cfg = cfg or OptimizerConfig()
    fam = _Family(rho, cfg.cluster_tol)
    candidates: list[InvariantMeasurement] = []

    def record(us):
        if cfg.record_candidates:
            candidates.append(realize(fam.blocks, unitaries=us))

    if not fam.free:
        m = realize(fam.blocks)
        if cfg.record_candidates:
            candidates.append(m)
        v = fam.evaluate(objective, m.vectors)
        return OptimizationReport(v, m, objective, v, [v], candidates=candidates)

    best = None
    trace, total_iters, all_converged = [], 0, True
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        start = [block_unitary(rng.normal(scale=np.pi, size=m * m), m) for m in fam.sizes]
        value, us, iters, conv = _ascend(fam, objective, start, cfg, record)
        trace.append(value)
        total_iters += iters
        all_converged &= conv
        if best is None or value > best[0]:
            best = (value, us)
    if not all_converged:
        log.info("ascent hit max_iters=%d in at least one restart", cfg.max_iters)
    value, us = _polish(fam, objective, best[1], best[0])
    record(us)
    m = realize(fam.blocks, unitaries=us)
    return OptimizationReport(
        value,
        m,
        objective,
        value,
        trace,
        converged=all_converged,
        iterations=total_iters,
        optimized=True,
        lower_bound_only=max(fam.sizes) >= 3,
        candidates=candidates,
    )


def n_re(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> OptimizationReport:
    """Relative entropy of nonlocality, in bits.

    Evaluated as S(rho_B) - S(rho_AB) + max sum_k p_k S(rho_A^k); the maximum
    is taken over the invariant family and is a lower bound when optimized.
    """
    cfg = cfg or OptimizerConfig()
    _require_bipartite(rho)
    offset = entropy(rho.reduce(1)) - entropy(rho)
    if rho.is_pure():
        fam = _Family(rho, cfg.cluster_tol)
        m = realize(fam.blocks)
        cond = fam.cond_entropy(m.vectors)
        rep = OptimizationReport(offset + cond, m, "avg-cond-entropy", cond, [cond])
        if cfg.record_candidates:
            rep.candidates.append(m)
        return rep
    rep = maximize(rho, "avg-cond-entropy", cfg)
    rep.value = offset + rep.objective_value
    return rep


def n_geo(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> OptimizationReport:
    """Geometric nonlocality max ||rho - pinch(rho)|| over the invariant family."""
    return maximize(rho, "hs-distance", cfg)


def evaluate_pool(rho: DensityMatrix, pool, objective: str) -> np.ndarray:
    """Objective values of `rho` at each measurement in `pool`."""
    fam = _Family(rho, TOL.cluster)
    return np.array([fam.evaluate(objective, m.vectors) for m in pool])


def n_re_pure(psi: PureState) -> float:
    """S(rho_B) of a bipartite pure state, from its Schmidt coefficients."""
    if len(psi.dims) != 2:
        raise DimensionError(f"expected a bipartite pure state, got dims {list(psi.dims)}")
    s = np.linalg.svd(psi.amplitudes.reshape(psi.dims), compute_uv=False)
    return shannon_entropy(s**2)


def binary_entropy_of_bloch(x: float) -> float:
    """Entropy of a qubit whose Bloch vector has length |x|."""
    return shannon_entropy([(1 + x) / 2, (1 - x) / 2])


def bell_diagonal_entropy_term(p: BellDiagonalParams) -> float:
    """Conditional entropy S(A|B) of a Bell-diagonal state: spectrum entropy minus 1."""
    p.check()
    return shannon_entropy(np.clip(p.eigenvalues(), 0.0, None)) - 1.0


def n_re_bell_diagonal(p: BellDiagonalParams) -> float:
    p.check()
    c_min = min(abs(p.c1), abs(p.c2), abs(p.c3))
    return binary_entropy_of_bloch(c_min) - bell_diagonal_entropy_term(p)


def _eigvalsh_batch(mats: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian matrices; closed form for 2x2."""
    if mats.shape[-1] != 2:
        return np.linalg.eigvalsh(mats)
    a, d = mats[:, 0, 0].real, mats[:, 1, 1].real
    half_gap = np.sqrt(((a - d) / 2) ** 2 + np.abs(mats[:, 0, 1]) ** 2)
    mid = (a + d) / 2
    return np.stack([mid - half_gap, mid + half_gap], axis=1)


def qubit_grid_oracle(
    rho: DensityMatrix,
    objective: str = "avg-cond-entropy",
    resolution: int = 400,
    cluster_tol: float = TOL.cluster,
) -> float:
    """Brute-force maximum over measurement directions on the Bloch sphere of B.

    Only defined when rho_B = I/2, where every projective qubit measurement
    (I +- n.sigma)/2 is locally invariant.
    """
    _require_bipartite(rho)
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    da, db = rho.dims
    if db != 2:
        raise DimensionError("grid oracle needs a qubit on B")
    rho_b = rho.reduce(1).mat
    if np.max(np.abs(rho_b - np.eye(2) / 2)) > cluster_tol:
        raise ValueError("grid oracle needs a maximally mixed (degenerate) qubit marginal on B")

    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.arange(resolution) * (2 * np.pi / resolution)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    n = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)

    # Tr_B[(I x sigma_i) rho] for each Pauli, then M_+- = (rho_A +- n.T) / 2
    r = rho.mat.reshape(da, 2, da, 2)
    rho_a = np.einsum("aibi->ab", r)
    t = np.stack([np.einsum("aibj,ji->ab", r, s) for s in PAULIS])
    nt = np.einsum("gi,iab->gab", n, t)
    m_plus = (rho_a + nt) / 2
    m_minus = (rho_a - nt) / 2

    if objective == "avg-cond-entropy":
        total = np.zeros(len(n))
        for mk in (m_plus, m_minus):
            mu = np.clip(_eigvalsh_batch(mk), 0.0, None)
            p = mu.sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.where(p[:, None] > TOL.zero_prob, mu / p[:, None], 0.0)
                h = -np.sum(np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0), axis=1)
            total += np.where(p > TOL.zero_prob, p * h, 0.0)
        return float(total.max())

    sig = np.stack(PAULIS)
    ns = np.einsum("gi,ijk->gjk", n, sig)
    proj_plus = (np.eye(2) + ns) / 2
    proj_minus = (np.eye(2) - ns) / 2
    pinched = np.einsum("gab,gij->gaibj", m_plus, proj_plus) + np.einsum("gab,gij->gaibj", m_minus, proj_minus)
    diff = rho.mat[None] - pinched.reshape(len(n), da * 2, da * 2)
    return float(np.sqrt(np.max(np.sum(np.abs(diff) ** 2, axis=(1, 2)))))
