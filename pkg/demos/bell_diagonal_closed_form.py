"""
Nonlocality of Bell-diagonal states
===================================

For a Bell-diagonal two-qubit state the relative entropy of nonlocality
has a closed form in the correlation triple c. Here we compare it with the
numerical maximization and with a brute-force grid over measurement axes.
"""

import numpy as np

from minl import BellDiagonalParams, bell_diagonal, n_re, n_re_bell_diagonal, qubit_grid_oracle
from minl.nonlocality import binary_entropy_of_bloch

rng = np.random.default_rng(7)

# draw a few points uniformly from the tetrahedron of valid triples
for _ in range(5):
    p = BellDiagonalParams.from_weights(rng.dirichlet(np.ones(4)))
    rho = bell_diagonal(p)
    exact = n_re_bell_diagonal(p)
    numeric = n_re(rho).value
    print(f"c = ({p.c1:+.3f}, {p.c2:+.3f}, {p.c3:+.3f})  closed form {exact:.9f}  numeric {numeric:.9f}")

# the best measurement axis is the one with the weakest correlation
p = BellDiagonalParams(0.5, 0.3, 0.2)
rho = bell_diagonal(p)
print("grid maximum of the conditional entropy:", qubit_grid_oracle(rho, resolution=400))
print("f(c_min):                              ", binary_entropy_of_bloch(0.2))

# with |c1| = 1 and |c2| = |c3| the state always carries one full bit
for c in (0.1, 0.5, 0.9):
    print(c, n_re(bell_diagonal((1.0, c, -c))).value)
