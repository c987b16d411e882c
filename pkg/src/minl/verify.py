"""Seeded property suites over random state ensembles.

Every check measures a violation and fails when it exceeds its tolerance.
Sample `i` of a suite uses seed `seed + i`, so any failure can be replayed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import hs_norm
from .measurement import pinch, random_invariant_measurement
from .nonlocality import (
    OptimizerConfig,
    avg_conditional_entropy,
    binary_entropy_of_bloch,
    n_geo,
    n_re,
    n_re_bell_diagonal,
    n_re_pure,
    qubit_grid_oracle,
)
from .qstate import (
    BellDiagonalParams,
    DensityMatrix,
    bell_diagonal,
    conditional_entropy,
    entropy,
    mutual_information,
    negativity,
    product,
    random_density,
    random_pure,
    random_uniform_marginal,
    random_unitary,
    relative_entropy,
)
from .tradeoffs import (
    coherent_info_identity,
    dilate,
    marginal_cb,
    max_missing_information,
    min_side_information,
    missing_information,
    side_information,
    tripartite_mixed_inequality,
    tripartite_tradeoff,
)

PINSKER = 1 / (2 * np.log(2))

# name -> (what it checks, tolerance on the measured violation)
CHECKS: dict[str, tuple[str, float]] = {
    "upper-bound": ("N_RE <= S(rho_B)", 1e-9),
    "entropy-increase": ("N_RE = S(pinched) - S(rho) at the reported measurement", 1e-8),
    "conditional-entropy-form": ("N_RE = sum_k p_k S(rho_A^k) - S(A|B)", 1e-8),
    "relative-entropy-crosscheck": ("N_RE = S(rho || pinched) evaluated directly", 1e-8),
    "commutation": ("||[rho_B, P_k]|| for the reported measurement", 1e-9),
    "pure-state-formula": ("N_RE = S(rho_B) for pure bipartite states", 1e-7),
    "pinsker-per-measurement": ("||rho - pinched||^2 / (2 ln 2) <= S(rho || pinched) per candidate", 1e-9),
    "pinsker-at-maxima": ("N_G^2 / (2 ln 2) <= N_RE over a shared candidate pool", 1e-6),
    "mutual-information-identity": ("N_RE + minimal side information = I(A:B)", 1e-8),
    "side-information-range": ("0 <= chi <= min(S(rho_A), S(rho_B))", 1e-9),
    "missing-information-nonneg": ("S(rho_B) - chi >= 0", 1e-9),
    "missing-information-gap": ("max missing information - N_RE = S(rho_AB) - S(rho_A)", 1e-8),
    "tripartite-pure-tradeoff": ("N_RE(AB) + min chi(CB) = S(rho_B) for pure ABC", 1e-7),
    "side-information-monotonicity": ("chi(C) <= chi(CD) per measurement", 1e-9),
    "mixed-tradeoff-per-measurement": ("S(rho || pinched) + chi(C) <= S(rho_B) per measurement", 1e-9),
    "mixed-tradeoff-at-optimum": ("N_RE(AB) + min chi(CB) <= S(rho_B) for mixed ABC", 1e-9),
    "coherent-information-identity": ("S(pinched_AB) - S(dilated_ABM) = S(rho || pinched)", 1e-8),
    "dilation-round-trip": ("Tr_M dilated = pinched, entrywise", 1e-10),
    "dilation-unitarity": ("U_BM^dagger U_BM = I, entrywise", 1e-10),
    "dilation-entropy-preservation": ("S(dilated_ABM) = S(rho_AB)", 1e-9),
    "product-state-zero": ("N_RE and N_G vanish on product states", 1e-8),
    "local-unitary-invariance": ("N_RE invariant under U x V", 1e-6),
    "entangled-positivity": ("N_RE > 1e-6 when negativity > 1e-3", 0.0),
    "closed-form-vs-numeric": ("Bell-diagonal closed form = optimized N_RE", 1e-6),
    "grid-vs-closed-form": ("grid max of sum_k p_k S(rho_A^k) = f(c_min)", 1e-4),
    "grid-vs-ascent": ("grid maximum = ascent maximum (both objectives)", 1e-4),
}

DEFAULT_SAMPLES = {
    "bounds": 500,
    "pinsker": 200,
    "tradeoffs": 200,
    "dilation": 200,
    "invariance": 100,
    "oracle": 200,
}
SUITES = tuple(DEFAULT_SAMPLES)


@dataclass
class CheckStats:
    evaluations: int = 0
    max_violation: float = float("-inf")


@dataclass
class SuiteReport:
    suite: str
    samples: int
    failures: list[tuple[int, str, float]] = field(default_factory=list)
    elapsed: float = 0.0
    checks: dict[str, CheckStats] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, check: str, seed: int, violation: float) -> None:
        tol = CHECKS[check][1]
        stats = self.checks.setdefault(check, CheckStats())
        stats.evaluations += 1
        violation = float(violation)
        stats.max_violation = max(stats.max_violation, violation)
        if not violation <= tol:
            self.failures.append((seed, check, violation))

    def merge(self, other: "SuiteReport") -> None:
        self.failures.extend(other.failures)
        self.notes.extend(other.notes)
        for name, st in other.checks.items():
            mine = self.checks.setdefault(name, CheckStats())
            mine.evaluations += st.evaluations
            mine.max_violation = max(mine.max_violation, st.max_violation)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "samples": self.samples,
            "elapsed_seconds": round(self.elapsed, 3),
            "passed": self.ok,
            "checks": {
                name: {
                    "anchor": CHECKS[name][0],
                    "tolerance": CHECKS[name][1],
                    "evaluations": st.evaluations,
                    "max_violation": st.max_violation,
                }
                for name, st in self.checks.items()
            },
            "failures": [{"seed": s, "check": c, "violation": v} for s, c, v in self.failures],
            "notes": self.notes,
        }


def _sample_state(kind: int, dims: tuple[int, int], rng: np.random.Generator) -> DensityMatrix:
    """kind 0: Ginibre full rank, 1: uniform B marginal, 2: Bell-diagonal (2x2) or low rank."""
    da, db = dims
    d = da * db
    if kind == 0:
        return random_density(d, d, rng, dims)
    if kind == 1:
        return random_uniform_marginal(da, db, int(rng.integers(max(1, -(-db // da)), d + 1)), rng)
    if dims == (2, 2):
        return bell_diagonal(random_bell_params(rng))
    return random_density(d, int(rng.integers(1, d + 1)), rng, dims)


def random_bell_params(rng: np.random.Generator) -> BellDiagonalParams:
    """Uniform point of the Bell-diagonal tetrahedron (Dirichlet weights)."""
    return BellDiagonalParams.from_weights(rng.dirichlet(np.ones(4)))


def _check_report(rep, rho: DensityMatrix, seed: int, out: SuiteReport) -> None:
    m = rep.measurement
    out.record("upper-bound", seed, rep.value - entropy(rho.reduce(1)))
    post = pinch(rho, m)
    out.record("entropy-increase", seed, abs(entropy(post) - entropy(rho) - rep.value))
    out.record(
        "conditional-entropy-form",
        seed,
        abs(avg_conditional_entropy(rho, m) - conditional_entropy(rho) - rep.value),
    )
    out.record("relative-entropy-crosscheck", seed, abs(relative_entropy(rho, post) - rep.value))
    out.record("commutation", seed, m.commutation_residual(rho.reduce(1)))


def suite_bounds(samples: int, seed: int, dims, cfg: OptimizerConfig) -> SuiteReport:
    out = SuiteReport("bounds", samples)
    shapes = [dims] if dims else [(2, 2), (2, 3), (3, 2), (3, 3)]
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        shape = shapes[i % len(shapes)]
        d = shape[0] * shape[1]
        if i % 5 == 4:
            rho = random_uniform_marginal(*shape, rank=d, seed=rng)
        else:
            rho = random_density(d, 1 + (i // len(shapes)) % d, rng, shape)
        _check_report(n_re(rho, cfg), rho, s, out)

        psi = random_pure(shape, rng)
        s_b = entropy(psi.density().reduce(1))
        out.record("pure-state-formula", s, abs(n_re(psi.density(), cfg).value - s_b))
        out.record("pure-state-formula", s, abs(n_re_pure(psi) - s_b))
    return out


def suite_pinsker(samples: int, seed: int, dims, cfg: OptimizerConfig) -> SuiteReport:
    out = SuiteReport("pinsker", samples)
    shape = dims or (2, 2)
    rcfg = OptimizerConfig(**{**cfg.__dict__, "record_candidates": True})
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        rho = _sample_state(i % 3, shape, rng)
        re_rep = n_re(rho, rcfg)
        geo_rep = n_geo(rho, rcfg)
        best_hs, best_re = geo_rep.value, re_rep.value
        for m in re_rep.candidates + geo_rep.candidates:
            post = pinch(rho, m)
            hs = hs_norm(rho.mat - post.mat)
            re = relative_entropy(rho, post)
            out.record("pinsker-per-measurement", s, PINSKER * hs**2 - re)
            best_hs, best_re = max(best_hs, hs), max(best_re, re)
        out.record("pinsker-at-maxima", s, PINSKER * best_hs**2 - best_re)
    return out


def suite_tradeoffs(samples: int, seed: int, dims, cfg: OptimizerConfig) -> SuiteReport:
    out = SuiteReport("tradeoffs", samples)
    shape = dims or (2, 2)
    literal_misses = 0
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        rho = _sample_state(i % 3, shape, rng)
        rep = n_re(rho, cfg)
        side = min_side_information(rho, report=rep)
        out.record("mutual-information-identity", s, abs(rep.value + side.chi - mutual_information(rho)))
        s_a, s_b = entropy(rho.reduce(0)), entropy(rho.reduce(1))
        m = random_invariant_measurement(rho, rng)
        chi = side_information(rho, m)
        out.record("side-information-range", s, max(-chi, chi - min(s_a, s_b)))
        out.record("missing-information-nonneg", s, -missing_information(rho, m))
        mm = max_missing_information(rho, report=rep)
        out.record("missing-information-gap", s, abs(mm.gap - (entropy(rho) - s_a)))
        literal_misses += abs(mm.gap) > 1e-6

    tri = max(1, samples // 2)
    for i in range(tri):
        s = seed + i
        rng = np.random.default_rng(s)
        t = tripartite_tradeoff(random_pure((2, 2, 2), rng), cfg)
        out.record("tripartite-pure-tradeoff", s, abs(t.n_re_ab + t.min_chi_cb - t.s_b))

        rho = random_density(8, 2, rng, (2, 2, 2))
        rho_ab = rho.reduce([0, 1])
        s_b = entropy(rho.reduce(1))
        rep = n_re(rho_ab, cfg)
        for m in (rep.measurement, random_invariant_measurement(rho_ab, rng)):
            mixed = tripartite_mixed_inequality(rho, m)
            out.record("side-information-monotonicity", s, mixed.chi_c - mixed.chi_cd)
            re = relative_entropy(rho_ab, pinch(rho_ab, m))
            out.record("mixed-tradeoff-per-measurement", s, re + mixed.chi_c - s_b)
        rho_cb = marginal_cb(rho)
        out.record("mixed-tradeoff-at-optimum", s, rep.value + min_side_information(rho_cb, cfg).chi - s_b)
    if literal_misses:
        out.notes.append(
            f"max missing information differed from N_RE by more than 1e-6 on {literal_misses}/{samples} "
            "states; the difference always equals S(rho_AB) - S(rho_A)"
        )
    return out


def suite_dilation(samples: int, seed: int, dims, cfg: OptimizerConfig) -> SuiteReport:
    out = SuiteReport("dilation", samples)
    shape = dims or (2, 2)
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        rho = _sample_state(i % 3, shape, rng)
        m = random_invariant_measurement(rho, rng)
        lhs, rhs = coherent_info_identity(rho, m)
        out.record("coherent-information-identity", s, abs(lhs - rhs))
        dil = dilate(rho, m)
        out.record(
            "dilation-round-trip", s, np.max(np.abs(dil.joint_state.reduce([0, 1]).mat - pinch(rho, m).mat))
        )
        u = dil.unitary_bm
        out.record("dilation-unitarity", s, np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        out.record("dilation-entropy-preservation", s, abs(entropy(dil.joint_state) - entropy(rho)))
    return out


def suite_invariance(samples: int, seed: int, dims, cfg: OptimizerConfig) -> SuiteReport:
    out = SuiteReport("invariance", samples)
    shape = dims or (2, 2)
    da, db = shape
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        rho_a = random_density(da, int(rng.integers(1, da + 1)), rng)
        rho_b = random_density(db, db, rng) if i % 2 else DensityMatrix(np.eye(db) / db)
        prod = product(rho_a, rho_b)
        out.record("product-state-zero", s, max(abs(n_re(prod, cfg).value), n_geo(prod, cfg).value))

        rho = _sample_state(i % 3, shape, rng)
        u = np.kron(random_unitary(da, rng), random_unitary(db, rng))
        moved = DensityMatrix(u @ rho.mat @ u.conj().T, shape)
        out.record("local-unitary-invariance", s, abs(n_re(rho, cfg).value - n_re(moved, cfg).value))

    found, attempt = 0, 0
    while found < samples and attempt < 50 * samples:
        s = seed + attempt
        rng = np.random.default_rng(s)
        rho = _sample_state(attempt % 3, (2, 2), rng)
        attempt += 1
        if negativity(rho) > 1e-3:
            found += 1
            out.record("entangled-positivity", s, 1e-6 - n_re(rho, cfg).value)
    if found < samples:
        out.notes.append(f"only {found} NPT states found in {attempt} draws")
    return out


def suite_oracle(samples: int, seed: int, dims, cfg: OptimizerConfig, resolution: int = 400) -> SuiteReport:
    out = SuiteReport("oracle", samples)
    for i in range(samples):
        s = seed + i
        rng = np.random.default_rng(s)
        p = random_bell_params(rng)
        rho = bell_diagonal(p)
        rep = n_re(rho, cfg)
        out.record("closed-form-vs-numeric", s, abs(rep.value - n_re_bell_diagonal(p)))
        grid = qubit_grid_oracle(rho, "avg-cond-entropy", resolution)
        c_min = min(abs(p.c1), abs(p.c2), abs(p.c3))
        out.record("grid-vs-closed-form", s, abs(grid - binary_entropy_of_bloch(c_min)))
        out.record("grid-vs-ascent", s, abs(grid - rep.objective_value))
        if i % 8 == 0:
            # a generic state with a maximally mixed qubit marginal, both objectives
            other = random_uniform_marginal(2, 2, 4, rng)
            for objective, run in (("avg-cond-entropy", n_re), ("hs-distance", n_geo)):
                asc = run(other, cfg).objective_value
                out.record("grid-vs-ascent", s, abs(qubit_grid_oracle(other, objective, resolution) - asc))
            out.record(
                "grid-vs-ascent", s, abs(qubit_grid_oracle(rho, "hs-distance", resolution) - n_geo(rho, cfg).value)
            )
    return out


_RUNNERS: dict[str, Callable[..., SuiteReport]] = {
    "bounds": suite_bounds,
    "pinsker": suite_pinsker,
    "tradeoffs": suite_tradeoffs,
    "dilation": suite_dilation,
    "invariance": suite_invariance,
    "oracle": suite_oracle,
}


def run_suite(
    suite: str,
    samples: int | None = None,
    seed: int = 0,
    dims: tuple[int, int] | None = None,
    cfg: OptimizerConfig | None = None,
    resolution: int = 400,
) -> SuiteReport:
    """Run one named suite, or every suite for ``"all"``."""
    cfg = cfg or OptimizerConfig(seed=seed)
    if samples is not None and samples < 1:
        raise ValueError("samples must be at least 1")
    start = time.perf_counter()
    if suite == "all":
        total = SuiteReport("all", 0)
        for name in SUITES:
            part = run_suite(name, samples, seed, dims, cfg, resolution)
            total.samples += part.samples
            total.merge(part)
        total.elapsed = time.perf_counter() - start
        return total
    if suite not in _RUNNERS:
        raise KeyError(suite)
    n = samples if samples is not None else DEFAULT_SAMPLES[suite]
    kwargs = {"resolution": resolution} if suite == "oracle" else {}
    report = _RUNNERS[suite](n, seed, dims, cfg, **kwargs)
    report.elapsed = time.perf_counter() - start
    return report
