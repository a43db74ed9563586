"""Independent high-precision reference values.

Everything here uses mpmath and dense matrices built entry by entry from the
rate rules, without touching the package's band assembly or solvers.  The
frozen tables at the bottom were produced by the functions above at 40
digits and are checked against them by a slow test.
"""

import mpmath as mp

DPS = 40


def _rates(N, gs, gd, ns, nd, u=0):
    """Dense tilted generator at ``u = i chi`` as an mpmath matrix."""
    gs, gd, ns, nd = (mp.mpf(x) for x in (gs, gd, ns, nd))
    u = mp.mpmathify(u)
    dim = N + 1
    j = mp.mpf(N) / 2
    M = mp.zeros(dim, dim)
    for i in range(dim):
        m = i - j
        up = j * (j + 1) - m * (m + 1)      # m -> m+1
        down = j * (j + 1) - m * (m - 1)    # m -> m-1
        M[i, i] = -((gs * ns + gd * nd) * up + (gs * (1 + ns) + gd * (1 + nd)) * down)
        if i + 1 < dim:
            M[i + 1, i] = (gs * ns + gd * nd * mp.exp(-u)) * up
        if i > 0:
            M[i - 1, i] = (gs * (1 + ns) + gd * (1 + nd) * mp.exp(u)) * down
    return M


def _derivative_parts(N, gs, gd, ns, nd, order):
    """Taylor coefficients ``A_k`` of the generator in ``u``."""
    base = _rates(N, gs, gd, ns, nd)
    gd_, ns_, nd_ = (mp.mpf(x) for x in (gd, ns, nd))
    j = mp.mpf(N) / 2
    parts = [base]
    for k in range(1, order + 1):
        A = mp.zeros(N + 1, N + 1)
        for i in range(N + 1):
            m = i - j
            if i + 1 < N + 1:
                A[i + 1, i] = gd_ * nd_ * (-1) ** k * (j * (j + 1) - m * (m + 1))
            if i > 0:
                A[i - 1, i] = gd_ * (1 + nd_) * (j * (j + 1) - m * (m - 1))
        parts.append(A / mp.factorial(k))
    return parts


def me_cumulants(N, gs, gd, ns, nd, order=4):
    """Stationary cumulants via a bordered Rayleigh-Schroedinger recursion."""
    with mp.workdps(DPS):
        A = _derivative_parts(N, gs, gd, ns, nd, order)
        dim = N + 1
        M = A[0].copy()
        for c in range(dim):
            M[dim - 1, c] = 1
        b = mp.zeros(dim, 1)
        b[dim - 1] = 1
        rho = mp.lu_solve(M, b)
        B = mp.zeros(dim + 1, dim + 1)
        for r in range(dim):
            for c in range(dim):
                B[r, c] = A[0][r, c]
            B[dim, r] = 1
            B[r, dim] = rho[r]
        vecs, lam = [rho], [mp.mpf(0)]
        for n in range(1, order + 1):
            lam.append(sum(sum(A[k] * vecs[n - k]) for k in range(1, n + 1)))
            v = mp.zeros(dim, 1)
            for k in range(1, n + 1):
                v += lam[k] * vecs[n - k] - A[k] * vecs[n - k]
            rhs = mp.zeros(dim + 1, 1)
            for r in range(dim):
                rhs[r] = v[r]
            x = mp.lu_solve(B, rhs)
            vecs.append(mp.matrix([x[r] for r in range(dim)]))
        return [float(mp.factorial(n) * lam[n]) for n in range(1, order + 1)]


def sigma_current(N, gs, gd, ns, nd):
    """First cumulant from the closed thermal-state formula at 50 digits."""
    with mp.workdps(50):
        gs, gd, ns, nd = (mp.mpf(x) for x in (gs, gd, ns, nd))
        nb = (gs * ns + gd * nd) / (gs + gd)
        a, b = (1 + nb) ** (N + 1), nb ** (N + 1)
        sigma = ((N - 2 * nb) * a + b * (2 + N + 2 * nb)) / (a - b)
        return float((ns - nd) * gs * gd / (gs + gd) * sigma)


def dominant_eigenvalue(N, gs, gd, ns, nd, chi):
    """Eigenvalue of the dense tilted matrix with the largest real part."""
    with mp.workdps(DPS):
        ev = mp.eig(_rates(N, gs, gd, ns, nd, 1j * mp.mpf(chi)), left=False, right=False)
        best = max(ev, key=lambda z: mp.re(z))
        return complex(best)


# (N, gamma_S, gamma_D, n_S, n_D) -> cumulants 1..4
ME_CUMULANTS = {
    (1, 1.0, 1.0, 1.0, 0.0): [0.25, 0.21875, 0.16796875, 0.09423828125],
    (2, 1.0, 1.0, 1.0, 0.0): [0.6153846153846154, 0.5716886663632226, 0.48688232743412885, 0.33063194146883185],
    (3, 0.5, 1.0, 0.5, 0.0): [0.445, 0.45906633333333335, 0.4777469206, 0.48526583807375556],
    (5, 1.0, 1.0, 1.0, 0.0): [2.008241758241758, 2.2516566537857745, 2.7003189097762483, 3.3847582316799443],
    (10, 0.2, 1.0, 2.0, 0.5): [2.1254927844114433, 6.8118024038748555, 6.229905942248618, 23.27844918057331],
    (20, 1.0, 1.0, 10.0, 5.0): [20.66996655664268, 478.15886046671085, 209.87588575459853, 4778.013655366809],
    (40, 5.0, 1.0, 0.1, 0.0): [3.3194444444444446, 3.4062709875327677, 3.5867244506656744, 3.9689187571199365],
}

# (N, gamma_S, gamma_D, n_S, n_D, chi) -> lambda_0
EIGENVALUES = {
    (2, 1.0, 1.0, 1.0, 0.0, 0.3): (-0.025614134989767168+0.18242588735903184j),
    (3, 1.0, 2.0, 0.7, 0.2, 1.1): (-0.9919007268194611+0.6756746189636007j),
    (4, 1.0, 1.0, 3.0, 0.0, 2.5): (-4.9483510703828975+1.5758533509039645j),
}

ME_CASES = [
    (1, 1.0, 1.0, 1.0, 0.0),
    (2, 1.0, 1.0, 1.0, 0.0),
    (3, 0.5, 1.0, 0.5, 0.0),
    (5, 1.0, 1.0, 1.0, 0.0),
    (10, 0.2, 1.0, 2.0, 0.5),
    (20, 1.0, 1.0, 10.0, 5.0),
    (40, 5.0, 1.0, 0.1, 0.0),
]

EIG_CASES = [
    (2, 1.0, 1.0, 1.0, 0.0, 0.3),
    (3, 1.0, 2.0, 0.7, 0.2, 1.1),
    (4, 1.0, 1.0, 3.0, 0.0, 2.5),
]

if __name__ == "__main__":
    for case in ME_CASES:
        print(f"    {case}: {me_cumulants(*case)!r},")
    for case in EIG_CASES:
        print(f"    {case}: {dominant_eigenvalue(*case)!r},")
