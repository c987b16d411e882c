"""
Werner states from product to maximally entangled
=================================================

Mixing a singlet with white noise gives the Werner family. Both nonlocality
measures grow monotonically with the singlet weight p, reaching one bit and
1/sqrt(2) at p = 1. The relative entropy measure never exceeds S(rho_B) = 1.
"""

import numpy as np

from minl import n_geo, n_re, werner
from minl.qstate import negativity

print(" p      N_RE       N_G     negativity")
for p in np.linspace(0, 1, 11):
    rho = werner(p)
    print(f"{p:4.1f}  {n_re(rho).value:9.6f}  {n_geo(rho).value:8.6f}  {negativity(rho):8.5f}")

# nonlocality is present even where the state is separable (p <= 1/3)
rho = werner(0.3)
print("p = 0.3: negativity", negativity(rho), "but N_RE", n_re(rho).value)
