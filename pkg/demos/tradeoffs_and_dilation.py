"""
Side information, trade-offs and the measurement apparatus
==========================================================

A local measurement on B can be simulated by a unitary that copies B's
outcome into an apparatus M. The disturbance it causes is the coherent
information between AB and M, and it trades off against how much a third
party C learns about the outcome.
"""

import numpy as np

from minl import (
    PureState,
    coherent_info_identity,
    dilate,
    min_side_information,
    mutual_information,
    n_re,
    random_invariant_measurement,
    random_pure,
    tripartite_tradeoff,
)
from minl.qstate import random_uniform_marginal

rng = np.random.default_rng(3)

# a two-qubit state whose B marginal is maximally mixed, so every basis is allowed
rho = random_uniform_marginal(2, 2, 3, rng)
m = random_invariant_measurement(rho, rng)

# the dilated state lives on A x B x M; discarding M gives the measured state
joint = dilate(rho, m).joint_state
print("dilated dims:", joint.dims)
lhs, rhs = coherent_info_identity(rho, m)
print(f"coherent information {lhs:.10f}  relative entropy {rhs:.10f}")

# the nonlocality and the minimal side information add up to the mutual information
rep = n_re(rho)
chi = min_side_information(rho, report=rep).chi
print(f"N_RE + chi = {rep.value + chi:.10f}   I(A:B) = {mutual_information(rho):.10f}")

# for pure ABC the measured system's entropy is split exactly between AB and CB
for _ in range(3):
    t = tripartite_tradeoff(random_pure((2, 2, 2), rng))
    print(f"N_RE(AB) {t.n_re_ab:.6f} + chi(CB) {t.min_chi_cb:.6f} = {t.n_re_ab + t.min_chi_cb:.6f}  S(B) {t.s_b:.6f}")

# GHZ: measuring B in the X basis tells C nothing, so all of S(B) is nonlocality of AB
ghz = PureState(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2), (2, 2, 2))
print("GHZ:", tripartite_tradeoff(ghz))
