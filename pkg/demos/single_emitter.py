"""
A single emitter between two baths
==================================

For one two-level system the tilted generator is 2x2 and the long-time
cumulant-generating function has a closed form.  Here we compare it with the
numerically continued eigenvalue and read off the first few current
cumulants three different ways.
"""

import numpy as np

from dickefcs import (
    ModelParams,
    analytic_cgf_n1,
    analytic_cumulants_n1,
    cross_check_cumulants,
    eigenvalue_scan,
    stationary_cumulants,
)

# A hot source, a slightly warm drain and unequal couplings.
params = ModelParams(N=1, gamma_S=0.5, gamma_D=2.0, n_S=3.0, n_D=0.2)

###############################################################################
# The eigenvalue branch through lambda(0) = 0 against the closed form.
chis = np.linspace(-np.pi, np.pi, 9)
numeric = eigenvalue_scan(params, chis)
closed = analytic_cgf_n1(params, chis)
for chi, a, b in zip(chis, numeric, closed):
    print(f"chi = {chi:+.3f}   lambda = {a.real:+.6f}{a.imag:+.6f}i   |diff| = {abs(a - b):.1e}")

###############################################################################
# Cumulants: perturbative recursion, finite differences, exact series.
rec = stationary_cumulants(params, 4)
fd = cross_check_cumulants(params, 4)
exact = analytic_cumulants_n1(params, 4)
print()
print("k   recursion           finite-diff         series")
for k in range(1, 5):
    print(f"{k}   {rec[k]:.15f}   {fd[k]:.15f}   {exact[k]:.15f}")
