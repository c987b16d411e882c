"""Measurement dilation to an apparatus and the side-information trade-offs.

A rank-1 measurement on B is realized by coupling B to an apparatus M of
dimension dB prepared in |0>, with the record unitary
U|b>|0> = sum_k (P_k|b>)|k>. Discarding M gives the pinched state, and the
coherent information S(rho~_AB) - S(rho~_ABM) equals S(rho || rho~).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from .linalg import DimensionError, dagger, partial_trace, permute_subsystems
from .measurement import InvariantMeasurement, _check_measured, pinch
from .nonlocality import OptimizationReport, OptimizerConfig, avg_conditional_entropy, n_re
from .qstate import DensityMatrix, PureState, entropy, purify, relative_entropy


@dataclass(frozen=True, eq=False)
class DilationResult:
    joint_state: DensityMatrix  # on A x B x M
    unitary_bm: np.ndarray


@dataclass(frozen=True, eq=False)
class SideInformation:
    chi: float
    minimizing_measurement: InvariantMeasurement


def record_unitary(m: InvariantMeasurement) -> np.ndarray:
    """Unitary on B x M whose columns |b>|0> are sum_k <v_k|b> |v_k>|k>.

    The remaining columns are an orthonormal completion; they never act on
    an apparatus prepared in |0>.
    """
    v = m.vectors
    db = v.shape[0]
    if v.shape != (db, db):
        raise DimensionError("dilation needs a complete set of rank-1 projectors")
    # defined[(b', k), b] = v_k[b'] * conj(v_k[b])
    defined = np.einsum("pk,bk->pkb", v, v.conj()).reshape(db * db, db)
    rest = null_space(dagger(defined))
    u = np.zeros((db * db, db * db), dtype=complex)
    # column index (b, mu) = b * db + mu; the mu = 0 columns are the defined ones
    zero_cols = np.arange(db) * db
    other_cols = np.setdiff1d(np.arange(db * db), zero_cols)
    u[:, zero_cols] = defined
    u[:, other_cols] = rest
    return u


def dilate(rho: DensityMatrix, m: InvariantMeasurement) -> DilationResult:
    _check_measured(rho, m)
    da, db = rho.dims
    u = record_unitary(m)
    ket0 = np.zeros((db, db))
    ket0[0, 0] = 1.0
    full = np.kron(np.eye(da), u)
    joint = full @ np.kron(rho.mat, ket0) @ dagger(full)
    return DilationResult(DensityMatrix(joint, (da, db, db)), u)


def coherent_info_identity(rho: DensityMatrix, m: InvariantMeasurement) -> tuple[float, float]:
    """(S(rho~_AB) - S(rho~_ABM), S(rho || rho~_AB)) for the measurement m."""
    joint = dilate(rho, m).joint_state
    post = joint.reduce([0, 1])
    lhs = entropy(post) - entropy(joint)
    rhs = relative_entropy(rho, pinch(rho, m))
    return lhs, rhs


def side_information(rho: DensityMatrix, m: InvariantMeasurement) -> float:
    """Holevo quantity chi = S(rho_A) - sum_k p_k S(rho_A^k) of the induced ensemble."""
    return entropy(rho.reduce(0)) - avg_conditional_entropy(rho, m)


def min_side_information(
    rho: DensityMatrix, cfg: OptimizerConfig | None = None, report: OptimizationReport | None = None
) -> SideInformation:
    """S(rho_A) - max sum_k p_k S(rho_A^k); pass an existing `n_re` report to skip the search."""
    rep = report or n_re(rho, cfg)
    return SideInformation(entropy(rho.reduce(0)) - rep.objective_value, rep.measurement)


def missing_information(rho: DensityMatrix, m: InvariantMeasurement) -> float:
    """S(rho_B) - chi: what A lacks about the outcome of m."""
    return entropy(rho.reduce(1)) - side_information(rho, m)


class MissingInformationReport(NamedTuple):
    value: float  # missing information at the n_re-optimal measurement
    n_re: float
    gap: float  # value - n_re, which equals S(rho_AB) - S(rho_A)


def max_missing_information(
    rho: DensityMatrix, cfg: OptimizerConfig | None = None, report: OptimizationReport | None = None
) -> MissingInformationReport:
    """Missing information at the measurement that maximizes sum_k p_k S(rho_A^k).

    That measurement also maximizes the missing information. It coincides
    with the nonlocality only when S(rho_AB) = S(rho_A); `gap` reports the
    difference, S(B|A).
    """
    rep = report or n_re(rho, cfg)
    value = missing_information(rho, rep.measurement)
    return MissingInformationReport(value, rep.value, value - rep.value)


def marginal_cb(rho_abc: DensityMatrix) -> DensityMatrix:
    """rho_CB with C first, so that B is the measured (second) factor."""
    da, db, dc = rho_abc.dims
    rho_bc = partial_trace(rho_abc.mat, rho_abc.dims, [1, 2])
    return DensityMatrix(permute_subsystems(rho_bc, [db, dc], [1, 0]), (dc, db))


class TripartiteTradeoff(NamedTuple):
    n_re_ab: float
    min_chi_cb: float
    s_b: float


def tripartite_tradeoff(psi: PureState, cfg: OptimizerConfig | None = None) -> TripartiteTradeoff:
    """N_RE(rho_AB), minimal chi of the C ensemble and S(rho_B) for a pure ABC state.

    For pure ABC each conditional state on AC is pure, so S(rho_A^k) = S(rho_C^k)
    and one maximization serves both quantities.
    """
    if len(psi.dims) != 3:
        raise DimensionError(f"expected a tripartite pure state, got dims {list(psi.dims)}")
    rho = psi.density()
    rho_ab = rho.reduce([0, 1])
    rep = n_re(rho_ab, cfg)
    rho_cb = marginal_cb(rho)
    chi_cb = side_information(rho_cb, rep.measurement)
    return TripartiteTradeoff(rep.value, chi_cb, entropy(rho_ab.reduce(1)))


class MixedTradeoff(NamedTuple):
    chi_c: float
    chi_cd: float


def tripartite_mixed_inequality(rho: DensityMatrix, m: InvariantMeasurement) -> MixedTradeoff:
    """chi of the C ensemble and of the CD ensemble, D purifying rho_ABC.

    Discarding D cannot increase side information, so chi_c <= chi_cd.
    """
    if len(rho.dims) != 3:
        raise DimensionError(f"expected a tripartite state, got dims {list(rho.dims)}")
    da, db, dc = rho.dims
    psi = purify(rho)
    dd = psi.dims[-1]
    full = psi.density()
    rho_cb = marginal_cb(rho)
    # rho_(CD)B: keep B, C, D then move B last
    rho_bcd = partial_trace(full.mat, full.dims, [1, 2, 3])
    rho_cdb = permute_subsystems(rho_bcd, [db, dc, dd], [1, 2, 0])
    rho_cdb = DensityMatrix(rho_cdb, (dc * dd, db))
    return MixedTradeoff(side_information(rho_cb, m), side_information(rho_cdb, m))
