"""
Counting statistics at finite time
==================================

Propagating the tilted populations on a grid of counting fields and
Fourier inverting gives the probability of n net emissions into the drain.
Its mean grows exactly like t times the stationary current because the
medium starts in its stationary state.
"""

import math

import numpy as np

from dickefcs import ModelParams, counting_distribution, propagate_transient, stationary_cumulants

params = ModelParams(N=5, n_S=1.0)
t = 5.0
n, P = counting_distribution(params, t, 60)

print(f"normalization - 1 = {math.fsum(P) - 1:.1e}")
mean = math.fsum(n * P)
var = math.fsum((n - mean) ** 2 * P)
print(f"mean = {mean:.10f}   t <<I_1>> = {t * stationary_cumulants(params, 1)[1]:.10f}")
print(f"variance = {var:.10f}")

###############################################################################
# A crude text histogram.
for k in range(0, 40, 3):
    print(f"{k:3d} {'#' * int(400 * P[n == k][0])}")

###############################################################################
# ln Z(chi, t) approaches lambda(chi) t; its slope converges quickly.
res = propagate_transient(params, 1.0, 20.0, num=201)
print()
print("late-time slope of ln Z at chi = 1:", res.slope())
