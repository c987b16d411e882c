"""Numerical tolerances shared by every module and by the test suite."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10  # max entrywise |H - H^dagger| accepted by eigh
    trace: float = 1e-10
    negative_eig: float = 1e-10  # eigenvalues in [-negative_eig, 0) are clipped
    cluster: float = 1e-8  # eigenvalue clustering for spectral blocks
    support: float = 1e-10  # overlap of rho with ker(sigma) that makes S(rho||sigma) infinite
    zero_prob: float = 1e-12  # outcomes at or below this are dropped from averages
    rank: float = 1e-12  # eigenvalues above this count toward the rank in purify
    pure: float = 1e-10  # largest eigenvalue > 1 - pure means the state is pure
    unit_norm: float = 1e-12


TOL = Tolerances()
