import math

import numpy as np
import pytest

from minl.linalg import PAULIS, DimensionError, permute_subsystems
from minl.measurement import pinch, random_invariant_measurement, realize, spectral_blocks
from minl.nonlocality import OptimizerConfig, n_re
from minl.qstate import (
    DensityMatrix,
    PureState,
    bell_diagonal,
    conditional_entropy,
    entropy,
    mutual_information,
    product,
    random_density,
    random_pure,
    random_uniform_marginal,
)
from minl.tradeoffs import (
    coherent_info_identity,
    dilate,
    marginal_cb,
    max_missing_information,
    min_side_information,
    missing_information,
    record_unitary,
    side_information,
    tripartite_mixed_inequality,
    tripartite_tradeoff,
)

FAST = OptimizerConfig(restarts=6)


def f(x):
    return -sum(p * math.log2(p) for p in ((1 + x) / 2, (1 - x) / 2) if p > 0)


def computational(rho):
    return realize(spectral_blocks(rho.reduce(1)), unitaries=[np.eye(2)])


def axis_measurement(rho, axis):
    _, v = np.linalg.eigh(PAULIS[axis])
    blocks = spectral_blocks(rho.reduce(1))
    return realize(blocks, unitaries=[blocks.blocks[0].basis.conj().T @ v])


def ghz():
    a = np.zeros(8)
    a[0] = a[7] = 1 / np.sqrt(2)
    return PureState(a, (2, 2, 2))


def test_dilation_of_bell_is_ghz(phi_plus):
    res = dilate(phi_plus, computational(phi_plus))
    assert res.joint_state.dims == (2, 2, 2)
    np.testing.assert_allclose(res.joint_state.mat, ghz().density().mat, atol=1e-12)


def test_dilation_invariants(rng):
    for dims in ((2, 2), (2, 3), (3, 3)):
        rho = random_uniform_marginal(*dims, 3, rng)
        m = random_invariant_measurement(rho, rng)
        res = dilate(rho, m)
        u = res.unitary_bm
        np.testing.assert_allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)
        np.testing.assert_allclose(res.joint_state.reduce([0, 1]).mat, pinch(rho, m).mat, atol=1e-10)
        assert entropy(res.joint_state) == pytest.approx(entropy(rho), abs=1e-9)


def test_record_unitary_acts_as_specified(rng):
    rho = random_uniform_marginal(2, 3, 4, rng)
    m = random_invariant_measurement(rho, rng)
    u, v = record_unitary(m), m.vectors
    for b in range(3):
        col = u[:, b * 3]
        expected = sum(np.conj(v[b, k]) * np.kron(v[:, k], np.eye(3)[k]) for k in range(3))
        np.testing.assert_allclose(col, expected, atol=1e-12)


def test_record_unitary_rejects_incomplete():
    from minl.measurement import InvariantMeasurement

    with pytest.raises(DimensionError):
        record_unitary(InvariantMeasurement(np.eye(3)[:, :2], (0, 0)))


def test_coherent_info_examples(phi_plus, rng):
    assert coherent_info_identity(phi_plus, computational(phi_plus)) == pytest.approx((1, 1), abs=1e-10)
    prod = product(random_density(2, 2, rng), DensityMatrix(np.diag([0.7, 0.3])))
    lhs, rhs = coherent_info_identity(prod, realize(spectral_blocks(prod.reduce(1))))
    assert lhs == pytest.approx(0, abs=1e-10) and rhs == pytest.approx(0, abs=1e-10)
    for _ in range(20):
        rho = random_uniform_marginal(2, 2, 4, rng)
        lhs, rhs = coherent_info_identity(rho, random_invariant_measurement(rho, rng))
        assert abs(lhs - rhs) <= 1e-8


def test_side_information_examples(phi_plus, rng):
    prod = product(random_density(2, 2, rng), DensityMatrix(np.eye(2) / 2))
    m = random_invariant_measurement(prod, rng)
    assert side_information(prod, m) == pytest.approx(0, abs=1e-10)
    assert missing_information(prod, m) == pytest.approx(1, abs=1e-10)
    m = random_invariant_measurement(phi_plus, rng)
    assert side_information(phi_plus, m) == pytest.approx(1, abs=1e-10)
    assert missing_information(phi_plus, m) == pytest.approx(0, abs=1e-10)

    rho = bell_diagonal((0.5, 0.3, -0.2))
    for axis, c in enumerate((0.5, 0.3, -0.2)):
        assert side_information(rho, axis_measurement(rho, axis)) == pytest.approx(1 - f(abs(c)), abs=1e-12)


def test_side_information_range(rng):
    for _ in range(20):
        rho = random_density(6, 4, rng, (3, 2))
        chi = side_information(rho, random_invariant_measurement(rho, rng))
        assert -1e-9 <= chi <= min(entropy(rho.reduce(0)), entropy(rho.reduce(1))) + 1e-9


def test_min_side_information_examples(rng):
    prod = product(random_density(2, 2, rng), DensityMatrix(np.eye(2) / 2))
    assert min_side_information(prod, FAST).chi == pytest.approx(0, abs=1e-8)
    psi = random_pure((2, 3), rng).density()
    assert min_side_information(psi).chi == pytest.approx(entropy(psi.reduce(0)), abs=1e-10)


def test_mutual_information_identity(rng):
    for rho in (bell_diagonal((0.4, -0.3, 0.2)), random_uniform_marginal(2, 2, 3, rng), random_density(6, 6, rng, (2, 3))):
        rep = n_re(rho, FAST)
        chi = min_side_information(rho, report=rep)
        assert rep.value + chi.chi == pytest.approx(mutual_information(rho), abs=1e-8)
        assert chi.minimizing_measurement is rep.measurement


def test_missing_information_gap_is_conditional_entropy(rng):
    for rho in (bell_diagonal((0.4, -0.3, 0.2)), random_uniform_marginal(2, 2, 3, rng)):
        rep = max_missing_information(rho, FAST)
        assert rep.value >= -1e-9
        assert rep.gap == pytest.approx(entropy(rho) - entropy(rho.reduce(0)), abs=1e-8)
        swapped = DensityMatrix(permute_subsystems(rho.mat, rho.dims, [1, 0]), rho.dims[::-1])
        assert rep.gap == pytest.approx(conditional_entropy(swapped), abs=1e-8)


def test_missing_information_equals_nonlocality_when_b_is_determined_by_a():
    # rho = sum_i p_i |ii><ii| has S(AB) = S(A)
    rho = DensityMatrix(np.diag([0.6, 0, 0, 0.4]), (2, 2))
    rep = max_missing_information(rho)
    assert rep.value == pytest.approx(rep.n_re, abs=1e-8)


@pytest.mark.xfail(strict=True, reason="max missing information exceeds N_RE by S(B|A) for generic states")
def test_max_missing_information_equals_n_re_on_random_states():
    rng = np.random.default_rng(0)
    for _ in range(100):
        rho = random_uniform_marginal(2, 2, 4, rng)
        rep = max_missing_information(rho, FAST)
        assert abs(rep.value - rep.n_re) <= 1e-6


def test_tripartite_ghz():
    t = tripartite_tradeoff(ghz())
    assert t.s_b == pytest.approx(1, abs=1e-12)
    assert t.n_re_ab + t.min_chi_cb == pytest.approx(1, abs=1e-7)


def test_tripartite_decoupled_c(rng):
    psi = random_pure((2, 2), rng)
    amps = np.kron(psi.amplitudes, np.array([1, 0]))
    t = tripartite_tradeoff(PureState(amps, (2, 2, 2)))
    assert t.min_chi_cb == pytest.approx(0, abs=1e-10)
    assert t.n_re_ab == pytest.approx(t.s_b, abs=1e-10)


def test_tripartite_random_pure(rng):
    for _ in range(5):
        t = tripartite_tradeoff(random_pure((2, 2, 2), rng), FAST)
        assert t.n_re_ab + t.min_chi_cb == pytest.approx(t.s_b, abs=1e-7)


def test_tripartite_rejects_bipartite(phi_plus):
    with pytest.raises(DimensionError):
        tripartite_tradeoff(random_pure((2, 2), 0))
    with pytest.raises(DimensionError):
        tripartite_mixed_inequality(phi_plus, computational(phi_plus))


def test_marginal_cb_orders_c_first(rng):
    rho_b, rho_c = random_density(2, 2, rng), random_density(3, 3, rng)
    rho = product(random_density(2, 2, rng), rho_b, rho_c)
    np.testing.assert_allclose(marginal_cb(rho).mat, np.kron(rho_c.mat, rho_b.mat), atol=1e-12)
    assert marginal_cb(rho).dims == (3, 2)


def test_mixed_inequality_examples(rng):
    psi = random_pure((2, 2, 2), rng).density()
    m = random_invariant_measurement(psi.reduce([0, 1]), rng)
    mt = tripartite_mixed_inequality(psi, m)
    assert mt.chi_c == pytest.approx(mt.chi_cd, abs=1e-8)

    rho_ab = random_uniform_marginal(2, 2, 3, rng)
    rho = DensityMatrix(np.kron(rho_ab.mat, random_density(2, 2, rng).mat), (2, 2, 2))
    m = random_invariant_measurement(rho_ab, rng)
    mt = tripartite_mixed_inequality(rho, m)
    assert mt.chi_c == pytest.approx(0, abs=1e-10)

    for _ in range(10):
        rho = random_density(8, 2, rng, (2, 2, 2))
        rho_ab = rho.reduce([0, 1])
        m = random_invariant_measurement(rho_ab, rng)
        mt = tripartite_mixed_inequality(rho, m)
        assert mt.chi_c <= mt.chi_cd + 1e-9
        s_rel = entropy(pinch(rho_ab, m)) - entropy(rho_ab)
        assert s_rel + mt.chi_c <= entropy(rho_ab.reduce(1)) + 1e-9
