"""
How the closures scale with system size
=======================================

The three equation-of-motion closures give a CGF of the form F(chi, t)
times an amplitude.  The first closure reproduces the exact mean current
for every N; the other two do not.  At large occupations the second
cumulant of the second closure overshoots the exact value by a factor 3/2.
"""

import numpy as np

from dickefcs import ModelParams, approximate_cumulants, stationary_cumulants

###############################################################################
# Ratio of approximate to exact mean current versus N.
print("N      approx1/ME   approx2/ME   approx3/ME      (n_S = 1)")
for N in (1, 3, 10, 30, 100, 300):
    p = ModelParams(N=N, n_S=1.0)
    me = stationary_cumulants(p, 1)[1]
    ratios = [approximate_cumulants(p, k, 1)[1] / me for k in ("approx1", "approx2", "approx3")]
    print(f"{N:<6d} " + "   ".join(f"{r:10.6f}" for r in ratios))

###############################################################################
# The second cumulant against the source occupation at N = 10.
print()
print("n_S        ME            approx1       approx2       approx3")
for ns in np.geomspace(0.01, 1e4, 7):
    p = ModelParams(N=10, n_S=ns)
    row = [stationary_cumulants(p, 2)[2]]
    row += [approximate_cumulants(p, k, 2)[2] for k in ("approx1", "approx2", "approx3")]
    print(f"{ns:<10.3g} " + "  ".join(f"{v:12.5g}" for v in row))

###############################################################################
# Far above equipartition the approx2 / ME ratio tends to 3/2.
p = ModelParams(N=5, n_S=1e6)
print()
print("approx2 / ME at n_S = 1e6:",
      approximate_cumulants(p, "approx2", 2)[2] / stationary_cumulants(p, 2)[2])
