import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minl.linalg import DimensionError
from minl.measurement import pinch, realize, spectral_blocks
from minl.nonlocality import (
    OptimizerConfig,
    avg_conditional_entropy,
    binary_entropy_of_bloch,
    bell_diagonal_entropy_term,
    evaluate_pool,
    n_geo,
    n_re,
    n_re_bell_diagonal,
    n_re_pure,
    qubit_grid_oracle,
)
from minl.qstate import (
    BellDiagonalParams,
    DensityMatrix,
    PureState,
    StateValidationError,
    bell_diagonal,
    bell_state,
    conditional_entropy,
    entropy,
    negativity,
    product,
    random_density,
    random_pure,
    random_uniform_marginal,
    random_unitary,
    relative_entropy,
    werner,
)


def H(ps):
    return -sum(p * math.log2(p) for p in ps if p > 0)


def f(x):
    return H([(1 + x) / 2, (1 - x) / 2])


def axis_measurement(rho, axis):
    """Eigenbasis of sigma_axis on B, expressed through the I/2 block."""
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    w, v = np.linalg.eigh(paulis[axis])
    blocks = spectral_blocks(rho.reduce(1))
    return realize(blocks, unitaries=[blocks.blocks[0].basis.conj().T @ v])


def valid_sign_patterns(c):
    for s in itertools.product((1, -1), repeat=3):
        p = BellDiagonalParams(s[0] * 1.0, s[1] * c, s[2] * c)
        if p.eigenvalues().min() >= 0:
            yield p


def test_closed_form_helpers():
    assert binary_entropy_of_bloch(0.2) == pytest.approx(f(0.2))
    p = BellDiagonalParams(0.5, 0.3, 0.2)
    assert bell_diagonal_entropy_term(p) == pytest.approx(H([0.25, 0.35, 0.4]) - 1)
    assert n_re_bell_diagonal(p) == pytest.approx(f(0.2) - H([0.25, 0.35, 0.4]) + 1)
    assert n_re_bell_diagonal(BellDiagonalParams(0, 0, 0)) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("c", [0.1, 0.4, 0.5, 0.9])
def test_closed_form_special_line_is_one(c):
    patterns = list(valid_sign_patterns(c))
    assert len(patterns) == 4
    for p in patterns:
        assert n_re_bell_diagonal(p) == pytest.approx(1, abs=1e-12)
    # the unsigned triple (1, c, c) is outside the state space
    with pytest.raises(StateValidationError):
        n_re_bell_diagonal(BellDiagonalParams(1, c, c))


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_werner_closed_form_against_optimizer(p):
    expected = f(p) - (H([(1 + 3 * p) / 4] + [(1 - p) / 4] * 3) - 1)
    assert n_re_bell_diagonal(BellDiagonalParams(-p, -p, -p)) == pytest.approx(expected, abs=1e-12)
    assert n_re(werner(p)).value == pytest.approx(expected, abs=1e-6)


def test_avg_conditional_entropy_examples(rng):
    psi = random_pure((2, 3), rng).density()
    m = realize(spectral_blocks(psi.reduce(1)))
    assert avg_conditional_entropy(psi, m) == pytest.approx(0, abs=1e-10)

    a = random_density(3, 3, rng)
    prod = product(a, random_density(2, 2, rng))
    assert avg_conditional_entropy(prod, realize(spectral_blocks(prod.reduce(1)))) == pytest.approx(entropy(a))

    p = BellDiagonalParams(0.5, 0.3, -0.2)
    rho = bell_diagonal(p)
    for axis, c in enumerate((p.c1, p.c2, p.c3)):
        assert avg_conditional_entropy(rho, axis_measurement(rho, axis)) == pytest.approx(f(abs(c)), abs=1e-12)


def test_n_re_product_is_zero(rng):
    for rho_b in (random_density(3, 3, rng), DensityMatrix(np.eye(3) / 3)):
        prod = product(random_density(2, 2, rng), rho_b)
        assert abs(n_re(prod).value) <= 1e-8


def test_n_re_bell_diagonal_example():
    p = BellDiagonalParams(0.5, 0.3, 0.2)
    rep = n_re(bell_diagonal(p))
    assert rep.optimized
    assert rep.value == pytest.approx(f(0.2) - (H([0.25, 0.35, 0.4]) - 1), abs=1e-6)
    assert rep.objective_value == pytest.approx(f(0.2), abs=1e-6)


@pytest.mark.parametrize("c", [0.1, 0.5, 0.9])
def test_n_re_special_line(c):
    for p in valid_sign_patterns(c):
        assert n_re(bell_diagonal(p)).value == pytest.approx(1, abs=1e-8)


def test_report_consistency(rng):
    for rho in (bell_diagonal((0.5, -0.3, 0.2)), random_uniform_marginal(2, 3, 5, rng), random_density(4, 3, rng, (2, 2))):
        rep = n_re(rho)
        post = pinch(rho, rep.measurement)
        assert avg_conditional_entropy(rho, rep.measurement) == pytest.approx(rep.objective_value, abs=1e-10)
        assert relative_entropy(rho, post) == pytest.approx(rep.value, abs=1e-8)
        assert entropy(post) - entropy(rho) == pytest.approx(rep.value, abs=1e-8)
        assert avg_conditional_entropy(rho, rep.measurement) - conditional_entropy(rho) == pytest.approx(
            rep.value, abs=1e-8
        )
        assert rep.value <= entropy(rho.reduce(1)) + 1e-9
        geo = n_geo(rho)
        post = pinch(rho, geo.measurement)
        assert np.linalg.norm(rho.mat - post.mat) == pytest.approx(geo.value, abs=1e-10)


def test_nondegenerate_marginal_skips_optimization(rng):
    rho = random_density(6, 6, rng, (2, 3))
    rep = n_re(rho)
    assert not rep.optimized
    assert rep.value == pytest.approx(relative_entropy(rho, pinch(rho, rep.measurement)), abs=1e-10)


def test_pure_input_short_circuits(phi_plus):
    rep = n_re(phi_plus)
    assert not rep.optimized
    assert rep.value == pytest.approx(1, abs=1e-12)


def test_n_re_pure_examples():
    assert n_re_pure(PureState(np.array([1, 0, 0, 0]), (2, 2))) == pytest.approx(0, abs=1e-15)
    assert n_re_pure(bell_state()) == pytest.approx(1)
    psi = PureState(np.array([np.sqrt(0.8), 0, 0, np.sqrt(0.2)]), (2, 2))
    assert n_re_pure(psi) == pytest.approx(H([0.8, 0.2]), abs=1e-12)
    assert n_re_pure(psi) == pytest.approx(0.7219280948873623, abs=1e-12)
    assert n_re(psi.density()).value == pytest.approx(n_re_pure(psi), abs=1e-10)
    with pytest.raises(DimensionError):
        n_re_pure(random_pure((2, 2, 2), 0))


def test_n_geo_examples(phi_plus, rng):
    prod = product(random_density(2, 2, rng), DensityMatrix(np.eye(2) / 2))
    assert n_geo(prod).value <= 1e-8
    assert n_geo(phi_plus).value == pytest.approx(1 / np.sqrt(2), abs=1e-8)


def test_grid_oracle_examples(rng):
    rho = bell_diagonal((0.5, 0.3, 0.2))
    assert qubit_grid_oracle(rho, "avg-cond-entropy", 400) == pytest.approx(f(0.2), abs=1e-4)
    prod = product(random_density(2, 2, rng), DensityMatrix(np.eye(2) / 2))
    assert qubit_grid_oracle(prod, "hs-distance", 50) <= 1e-12
    with pytest.raises(ValueError):
        qubit_grid_oracle(random_density(4, 4, rng, (2, 2)))
    with pytest.raises(DimensionError):
        qubit_grid_oracle(DensityMatrix(np.eye(6) / 6, (2, 3)))
    with pytest.raises(ValueError):
        qubit_grid_oracle(rho, "fidelity")


def test_grid_oracle_refines_with_resolution():
    rho = bell_diagonal((0.7, -0.45, 0.3))
    exact = f(0.3)
    coarse = abs(qubit_grid_oracle(rho, resolution=20) - exact)
    fine = abs(qubit_grid_oracle(rho, resolution=400) - exact)
    assert fine <= coarse
    assert fine <= 1e-4


@pytest.mark.parametrize("seed", range(4))
def test_ascent_matches_grid_on_generic_states(seed):
    rho = random_uniform_marginal(2, 2, 4, np.random.default_rng(seed))
    assert n_geo(rho).value == pytest.approx(qubit_grid_oracle(rho, "hs-distance"), abs=1e-4)
    assert n_re(rho).objective_value == pytest.approx(qubit_grid_oracle(rho, "avg-cond-entropy"), abs=1e-4)


def test_candidate_pool_and_pinsker_at_maxima(rng):
    rho = random_uniform_marginal(2, 2, 3, rng)
    cfg = OptimizerConfig(restarts=4, record_candidates=True)
    re_rep, geo_rep = n_re(rho, cfg), n_geo(rho, cfg)
    pool = re_rep.candidates + geo_rep.candidates
    assert len(pool) > 8
    hs = evaluate_pool(rho, pool, "hs-distance")
    cond = evaluate_pool(rho, pool, "avg-cond-entropy")
    assert hs.max() <= geo_rep.value + 1e-12
    assert cond.max() <= re_rep.objective_value + 1e-12
    re_vals = [relative_entropy(rho, pinch(rho, m)) for m in pool]
    assert np.all(hs**2 / (2 * np.log(2)) <= np.array(re_vals) + 1e-9)
    assert max(hs) ** 2 / (2 * np.log(2)) <= max(re_vals) + 1e-6


def test_local_unitary_invariance(rng):
    for rho in (bell_diagonal((0.6, -0.2, 0.1)), random_uniform_marginal(2, 2, 4, rng), random_density(4, 4, rng, (2, 2))):
        u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
        moved = DensityMatrix(u @ rho.mat @ u.conj().T, (2, 2))
        assert n_re(moved).value == pytest.approx(n_re(rho).value, abs=1e-6)


def test_entangled_states_have_positive_nonlocality(rng):
    found = 0
    while found < 10:
        rho = random_uniform_marginal(2, 2, 2, rng)
        if negativity(rho) > 1e-3:
            found += 1
            assert n_re(rho).value > 1e-6


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]), st.integers(0, 2**32 - 1))
def test_upper_bound_on_random_states(dims, seed):
    rng = np.random.default_rng(seed)
    d = dims[0] * dims[1]
    rho = random_density(d, int(rng.integers(1, d + 1)), rng, dims)
    assert n_re(rho).value <= entropy(rho.reduce(1)) + 1e-9


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(step_init=1e-10, conv_tol=1e-9)
    with pytest.raises(ValueError):
        OptimizerConfig(seed=-1)


def test_optimizer_is_deterministic():
    rho = bell_diagonal((0.3, -0.6, 0.1))
    a, b = n_re(rho, OptimizerConfig(seed=5)), n_re(rho, OptimizerConfig(seed=5))
    assert a.value == b.value
    assert a.objective_trace == b.objective_trace
