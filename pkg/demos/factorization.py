"""
When does the factorization hold?
=================================

All three closures assume the counted boson number is uncorrelated with the
collective spin.  Propagating the exact tilted populations tests that
assumption directly: it holds close to the ground state and at
equipartition, and fails in between where n_bar is comparable to N.
"""

import numpy as np

from dickefcs import ModelParams, factorization_error

N = 10
print(f"N = {N}, chi = pi, t = 10")
print("n_S          relative error of <e^{in chi} J_z^2> factorization")
for ns in np.geomspace(1e-3, 1e3, 13):
    err = factorization_error(ModelParams(N=N, n_S=ns), np.pi, 10.0, alpha=2)
    print(f"{ns:<12.3g} {err.value:.3e}")
