"""Exact counting statistics of the drain current.

The long-time cumulant-generating function is the eigenvalue ``lambda_0(chi)``
of the tilted generator that is continuously connected to ``lambda_0(0) = 0``.
Current cumulants are its Taylor coefficients in ``u = i chi``; they are
obtained by Rayleigh-Schroedinger recursion at ``chi = 0`` and, independently,
by finite differences of the eigenvalue along the imaginary ``chi`` axis
where the generator is real and symmetrizable.

Per-``chi`` work is independent; grid scans may be farmed out freely.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp
from scipy.signal import lfilter

from .liouvillian import (
    TiltedGenerator,
    build_tilted_generator,
    ladder_weights,
    stationary_state,
    thermal_polarization,
)
from .model import ModelParams, effective_bath

__all__ = [
    "CumulantSet",
    "TransientCGF",
    "BranchTrackingError",
    "AccuracyWarning",
    "AliasingWarning",
    "DENSE_DIM_LIMIT",
    "dominant_eigenvalue",
    "eigenvalue_scan",
    "stationary_cumulants",
    "cross_check_cumulants",
    "first_cumulant_closed_form",
    "analytic_cgf_n1",
    "analytic_cumulants_n1",
    "propagate_transient",
    "propagate_populations",
    "counting_distribution",
]

#: Above this dimension eigenvalues are continued by shifted inverse iteration.
DENSE_DIM_LIMIT = 256
MAX_CUMULANT_ORDER = 6


class BranchTrackingError(RuntimeError):
    """Continuation of ``lambda_0`` met a near-degenerate pair of eigenvalues."""


class AccuracyWarning(RuntimeWarning):
    pass


class AliasingWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class CumulantSet:
    """Stationary current cumulants ``<<I_1>> .. <<I_order>>`` (rates)."""

    values: np.ndarray
    method: str
    errors: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        """1-based access: ``cumulants[2]`` is the second cumulant."""
        if not 1 <= k <= self.order:
            raise IndexError(f"cumulant order {k} outside 1..{self.order}")
        return self.values[k - 1]


@dataclass(frozen=True, eq=False)
class TransientCGF:
    chi: complex
    times: np.ndarray
    values: np.ndarray

    def slope(self, tail: float = 0.25) -> complex:
        """Least-squares slope of ``C(chi, t)`` over the last ``tail`` fraction of times."""
        t = self.times
        keep = t >= t[0] + (1 - tail) * (t[-1] - t[0])
        if keep.sum() < 2:
            keep = np.zeros_like(keep)
            keep[-2:] = True
        coeff_re = np.polyfit(t[keep], self.values[keep].real, 1)[0]
        coeff_im = np.polyfit(t[keep], self.values[keep].imag, 1)[0]
        return complex(coeff_re, coeff_im)


# ---------------------------------------------------------------------------
# dominant eigenvalue
# ---------------------------------------------------------------------------

def _is_imaginary_axis(chi: complex) -> bool:
    return chi.real == 0.0


def _perron_root(params: ModelParams, u: float) -> float:
    """Largest eigenvalue of the real generator at ``chi = -i u``.

    The tilted generator is tridiagonal with positive off-diagonal products,
    hence similar to a real symmetric tridiagonal matrix.
    """
    gen = build_tilted_generator(params, -1j * u)
    d = gen.diag.real
    if gen.dim == 1:
        return float(d[0])
    e = np.sqrt(gen.upper.real * gen.lower.real)
    w = scipy.linalg.eigvalsh_tridiagonal(d, e, select="i",
                                          select_range=(gen.dim - 1, gen.dim - 1))
    return float(w[0])


def _perron_root_precise(params: ModelParams, u: float, dps: int = 30) -> float:
    """Perron root refined by a high-precision Rayleigh quotient.

    The float eigenvector is accurate to ``O(eps)``, so its Rayleigh quotient
    with the matrix built in ``dps``-digit arithmetic is accurate to
    ``O(eps^2)``; the result is free of the ``eps * |L|`` jitter a plain
    float eigensolve carries, which is what high-order finite differences
    need.
    """
    import mpmath as mp

    gen = build_tilted_generator(params, -1j * u)
    dim = gen.dim
    if dim == 1:
        return float(gen.diag[0].real)
    e = np.sqrt(gen.upper.real * gen.lower.real)
    _, v = scipy.linalg.eigh_tridiagonal(gen.diag.real, e, select="i",
                                         select_range=(dim - 1, dim - 1))
    x = [mp.mpf(float(c)) for c in v[:, 0]]
    N = params.N
    with mp.workdps(dps):
        gs, gd, ns, nd = (mp.mpf(c) for c in
                          (params.gamma_S, params.gamma_D, params.n_S, params.n_D))
        uu = mp.mpf(u)
        absorb, emit = gs * ns + gd * nd, gs * (1 + ns) + gd * (1 + nd)
        up_rate = gs * (1 + ns) + gd * (1 + nd) * mp.exp(uu)
        low_rate = gs * ns + gd * nd * mp.exp(-uu)
        num = mp.mpf(0)
        for i in range(dim):
            d_i = -(absorb * (N - i) * (i + 1) + emit * i * (N - i + 1))
            num += d_i * x[i] ** 2
            if i < N:
                off = mp.sqrt(up_rate * (i + 1) * (N - i) * low_rate * (N - i) * (i + 1))
                num += 2 * off * x[i] * x[i + 1]
        den = mp.fsum(c ** 2 for c in x)
        return float(num / den)


def _dense_step(gen, predicted, prev_vec):
    w, v = scipy.linalg.eig(gen.to_dense())
    dist = np.abs(w - predicted)
    order = np.argsort(dist)
    best = order[0]
    if len(w) > 1:
        second = order[1]
        scale = max(np.max(np.abs(gen.diag)), 1.0)
        if dist[second] < 10 * dist[best] + 1e-12 * scale:
            ov = np.abs(v.conj().T @ prev_vec) / np.linalg.norm(v, axis=0)
            if abs(ov[best] - ov[second]) < 0.1:
                raise BranchTrackingError(
                    f"eigenvalues {w[best]:.6g} and {w[second]:.6g} are not separable "
                    f"near chi={gen.chi:.6g}; reduce the continuation step")
            if ov[second] > ov[best]:
                best = second
    vec = v[:, best]
    return complex(w[best]), vec / np.linalg.norm(vec)


def _inverse_iteration_step(gen, predicted, prev_vec, maxiter=60):
    ab = gen.to_banded()
    scale = max(np.max(np.abs(gen.diag)), 1.0)
    sigma = predicted + 1e-10 * scale
    ab[1] -= sigma
    x = prev_vec / np.linalg.norm(prev_vec)
    lam = predicted
    for _ in range(maxiter):
        w = scipy.linalg.solve_banded((1, 1), ab, x)
        denom = np.vdot(x, w)
        if denom == 0:
            break
        new = sigma + 1.0 / denom
        x = w / np.linalg.norm(w)
        if abs(new - lam) <= 1e-15 * scale:
            lam = new
            break
        lam = new
    else:
        raise BranchTrackingError(f"inverse iteration did not converge at chi={gen.chi:.6g}")
    return complex(lam), x


def _continue_branch(params, targets, max_step):
    """Follow ``lambda_0`` from ``chi = 0`` through ``targets`` (already ordered)."""
    dim = params.N + 1
    step_fn = _dense_step if dim <= DENSE_DIM_LIMIT else _inverse_iteration_step
    vec = stationary_state(params).populations.astype(complex)
    vec /= np.linalg.norm(vec)
    lam_prev2, lam_prev = None, 0.0 + 0.0j
    chi_prev2, chi_prev = None, 0.0 + 0.0j
    out = []
    for target in targets:
        n_sub = max(1, int(math.ceil(abs(target - chi_prev) / max_step)))
        start = chi_prev
        for s in range(1, n_sub + 1):
            chi = start + (target - start) * s / n_sub
            if lam_prev2 is None:
                predicted = lam_prev
            else:
                slope = (lam_prev - lam_prev2) / (chi_prev - chi_prev2)
                predicted = lam_prev + slope * (chi - chi_prev)
            gen = build_tilted_generator(params, chi)
            lam, vec = step_fn(gen, predicted, vec)
            lam_prev2, lam_prev = lam_prev, lam
            chi_prev2, chi_prev = chi_prev, chi
        out.append(lam_prev)
    return out


def dominant_eigenvalue(params: ModelParams, chi, *, max_step: float = 0.05) -> complex:
    """Long-time CGF rate ``lambda_0(chi)``.

    On the imaginary axis the Perron root of the real generator is returned.
    Elsewhere the branch is continued from ``chi = 0`` in steps of at most
    ``max_step``, matching eigenvalues to a linear prediction and breaking
    near-ties by eigenvector overlap.  This follows continuity rather than
    "smallest modulus"; the two differ only where branches approach each other.
    For ``N + 1 > DENSE_DIM_LIMIT`` each step is a shifted inverse iteration on
    the tridiagonal bands.
    """
    chi = complex(chi)
    if chi == 0:
        return 0j
    if _is_imaginary_axis(chi):
        return complex(_perron_root(params, -chi.imag))
    return _continue_branch(params, [chi], max_step)[0]


def eigenvalue_scan(params: ModelParams, chis, *, max_step: float = 0.05) -> np.ndarray:
    """``lambda_0`` on a real ``chi`` grid, continued outward from ``chi = 0``."""
    chis = np.asarray(chis, dtype=float)
    out = np.empty(chis.shape, dtype=complex)
    order = np.argsort(chis)
    neg = [i for i in order[::-1] if chis[i] < 0]
    pos = [i for i in order if chis[i] > 0]
    for idx in (neg, pos):
        if idx:
            vals = _continue_branch(params, [complex(chis[i]) for i in idx], max_step)
            out[idx] = vals
    out[chis == 0] = 0.0
    return out


# ---------------------------------------------------------------------------
# cumulants by perturbative recursion
# ---------------------------------------------------------------------------

def _complement_solver(params: ModelParams, rho: np.ndarray):
    """Return ``solve(b)`` for ``L(0) x = b`` with ``sum(x) = 0``.

    ``b`` must have zero sum.  For the birth-death chain ``(L x)_i`` is a
    difference of nearest-neighbour fluxes, so the flux follows from a
    cumulative sum of ``b`` and ``x`` from a first-order recursion with the
    detailed-balance ratio as its (contracting) coefficient.  Equivalent to
    the bordered system ``[[L, rho], [1, 0]]`` in O(N).
    """
    N = params.N
    gs, gd, ns, nd = params.gamma_S, params.gamma_D, params.n_S, params.n_D
    emit = gs * (1 + ns) + gd * (1 + nd)
    absorb = gs * ns + gd * nd
    x_minus, x_plus = ladder_weights(N)
    down = emit * x_plus
    if not np.all(np.isfinite(down)) or np.any(down[1:] <= 0):
        raise np.linalg.LinAlgError("restricted generator is singular")
    ratio = absorb / emit

    def solve(b):
        if N == 0:
            return np.zeros(1)
        flux = -np.cumsum(b)[:-1]
        x = np.zeros(N + 1)
        x[1:] = lfilter([1.0], [1.0, -ratio], -flux / down[1:])
        x -= math.fsum(x) * rho
        return x

    return solve


def stationary_cumulants(params: ModelParams, order: int = 4) -> CumulantSet:
    """Current cumulants from the Taylor expansion of ``lambda_0`` in ``u = i chi``.

    ``L(u) = sum_k A_k u^k`` with ``A_0 = L(0)`` and, for ``k >= 1``,
    ``A_k = (L_+ + (-1)^k L_-) / k!``.  Writing ``lambda = sum l_n u^n`` and
    the right eigenvector ``rho = sum r_n u^n`` with ``sum(r_0) = 1`` and
    ``sum(r_n) = 0`` otherwise::

        l_n = sum_{k=1..n} 1^T A_k r_{n-k}
        A_0 r_n = sum_{k=1..n} (l_k - A_k) r_{n-k}

    The ``n``-th cumulant is ``n! l_n``.
    """
    if int(order) != order or not 1 <= order <= MAX_CUMULANT_ORDER:
        raise ValueError(f"order must be in 1..{MAX_CUMULANT_ORDER}, got {order!r}")
    order = int(order)
    N = params.N
    rho = stationary_state(params).populations
    x_minus, x_plus = ladder_weights(N)
    emit_d = params.gamma_D * (1 + params.n_D) * x_plus
    absorb_d = params.gamma_D * params.n_D * x_minus
    solve = _complement_solver(params, rho)

    def apply_A(k, v):
        out = np.zeros_like(v)
        out[:-1] += emit_d[1:] * v[1:]
        out[1:] += (-1) ** k * absorb_d[:-1] * v[:-1]
        return out / math.factorial(k)

    def trace_A(k, v):
        return (math.fsum(emit_d * v) + (-1) ** k * math.fsum(absorb_d * v)) / math.factorial(k)

    r = [rho]
    lam = [0.0]
    bath = effective_bath(params)
    for n in range(1, order + 1):
        if n == 1 and bath.n_bar > 0:
            # detailed balance turns emission minus absorption into one sum
            bias = params.gamma_S * (params.n_S - params.n_D) / bath.gamma_total
            lam.append(params.gamma_D * bias / bath.n_bar * math.fsum(x_plus * rho))
        else:
            lam.append(math.fsum(trace_A(k, r[n - k]) for k in range(1, n + 1)))
        if n == order:
            break
        rhs = np.zeros(N + 1)
        for k in range(1, n + 1):
            rhs += lam[k] * r[n - k] - apply_A(k, r[n - k])
        r.append(solve(rhs))
    values = np.array([math.factorial(n) * lam[n] for n in range(1, order + 1)])
    return CumulantSet(values=values, method="eigenvalue-recursion")


def first_cumulant_closed_form(params: ModelParams) -> float:
    """Mean stationary current from the closed form for the thermal state.

    ``(n_S - n_D) gamma_S gamma_D / (gamma_S + gamma_D) * sigma_N`` with
    ``sigma_N = -<J_z>``.  The printed ratio of powers of ``n_bar`` and
    ``1 + n_bar`` cancels badly once ``n_bar`` exceeds ``N``; the equivalent
    Brillouin form of :func:`thermal_polarization` is used instead.
    """
    sigma = thermal_polarization(params.N, effective_bath(params).n_bar)
    g = params.gamma_S * params.gamma_D / (params.gamma_S + params.gamma_D)
    return (params.n_S - params.n_D) * g * sigma


# ---------------------------------------------------------------------------
# finite-difference cross-check
# ---------------------------------------------------------------------------

# 5-point central weights on offsets (-2, -1, 0, 1, 2) and leading error order.
_STENCILS = {
    1: (np.array([1, -8, 0, 8, -1]) / 12.0, 4),
    2: (np.array([-1, 16, -30, 16, -1]) / 12.0, 4),
    3: (np.array([-1, 2, 0, -2, 1]) / 2.0, 2),
    4: (np.array([1, -4, 6, -4, 1]) / 1.0, 2),
}


def _fd_derivative(f, k, steps, noise):
    """Romberg table of 5-point central differences over halving ``steps``.

    Returns the entry with the smallest estimated error (truncation from the
    last extrapolation correction, plus roundoff ``noise * sum|w| / h^k``).
    """
    weights, p = _STENCILS[k]
    offsets = np.arange(-2, 3)
    rows = []
    for h in steps:
        raw = float(np.dot(weights, [f(o * h) for o in offsets])) / h ** k
        rows.append(([raw], noise * np.sum(np.abs(weights)) / h ** k))
    best, best_err = rows[0][0][0], np.inf
    for j in range(1, len(rows)):
        row, roundoff = rows[j]
        prev = rows[j - 1][0]
        for m in range(1, j + 1):
            q = 2 ** (p + 2 * (m - 1))
            row.append(row[m - 1] + (row[m - 1] - prev[m - 1]) / (q - 1))
            err = abs(row[m] - row[m - 1]) + abs(row[m] - prev[m - 1]) + 2 * roundoff
            if err < best_err:
                best, best_err = row[m], err
    return best, best_err


def cross_check_cumulants(params: ModelParams, order: int = 4, step: float | None = None,
                          tol: float = 1e-6) -> CumulantSet:
    """Cumulants by finite differences of ``lambda_0`` with Richardson extrapolation.

    Differentiates along the imaginary counting-field axis, ``u = i chi``,
    where ``lambda_0(u)`` is the real Perron root and ``d^k lambda / du^k`` is
    the ``k``-th cumulant directly.  The base step ``h`` (default ``1e-2`` for
    orders 1-2, ``5e-2`` for orders 3-4) is the centre of the geometric
    sequence ``4h, 2h, ..., h/16``; 5-point central differences on that
    sequence are extrapolated in a Romberg table and the entry with the
    smallest estimated truncation-plus-roundoff error is kept.  Warns with
    :class:`AccuracyWarning` when that estimate exceeds ``tol`` relative.
    """
    if int(order) != order or not 1 <= order <= 4:
        raise ValueError("finite-difference cumulants support orders 1..4")
    if step is not None and not step > 0:
        raise ValueError("step must be positive")
    cache: dict[float, float] = {0.0: 0.0}

    def lam(u):
        if u not in cache:
            cache[u] = _perron_root_precise(params, u)
        return cache[u]

    gen0 = build_tilted_generator(params, 0.0)
    noise = 1e-20 * float(np.max(np.abs(gen0.diag)))
    values, errors = [], []
    for k in range(1, int(order) + 1):
        h = step if step is not None else (1e-2 if k <= 2 else 5e-2)
        value, err = _fd_derivative(lam, k, [h * 2.0 ** e for e in range(2, -5, -1)], noise)
        if err > tol * abs(value):
            warnings.warn(f"finite-difference cumulant {k}: estimated error {err:.3g} "
                          f"exceeds tolerance on value {value:.6g}", AccuracyWarning,
                          stacklevel=2)
        values.append(value)
        errors.append(err)
    return CumulantSet(values=np.array(values), method="finite-difference",
                       errors=np.array(errors))


# ---------------------------------------------------------------------------
# N = 1 closed form
# ---------------------------------------------------------------------------

def analytic_cgf_n1(params: ModelParams, chi, t=1.0):
    """Long-time CGF of a single emitter, ``lambda_0(chi) t`` in closed form.

    ``-t/2 [g_S(1+2n_S) + g_D(1+2n_D) - sqrt(R)]`` with
    ``R = 4 g_S g_D [e^{-i chi}(1+n_S) n_D + e^{i chi} n_S (1+n_D)]
    + 2 g_S g_D + (g_S(1+2n_S))^2 + (g_D(1+2n_D))^2``.
    ``Re R > 0`` on the whole real axis, so the principal root is the branch
    through ``lambda_0(0) = 0``.
    """
    if params.N != 1:
        raise ValueError("closed-form single-emitter CGF requires N = 1")
    gs, gd, ns, nd = params.gamma_S, params.gamma_D, params.n_S, params.n_D
    chi = np.asarray(chi, dtype=complex)
    a = gs * (1 + 2 * ns)
    b = gd * (1 + 2 * nd)
    radicand = (4 * gs * gd * (np.exp(-1j * chi) * (1 + ns) * nd + np.exp(1j * chi) * ns * (1 + nd))
                + 2 * gs * gd + a * a + b * b)
    value = -0.5 * t * (a + b - np.sqrt(radicand))
    return complex(value) if value.ndim == 0 else value


def analytic_cumulants_n1(params: ModelParams, order: int = 4) -> CumulantSet:
    """Cumulants of the single-emitter CGF by exact Taylor expansion (sympy)."""
    import sympy as sp

    if params.N != 1:
        raise ValueError("closed-form single-emitter CGF requires N = 1")
    u = sp.symbols("u")
    gs, gd, ns, nd = (sp.nsimplify(v) for v in
                      (params.gamma_S, params.gamma_D, params.n_S, params.n_D))
    a = gs * (1 + 2 * ns)
    b = gd * (1 + 2 * nd)
    radicand = 4 * gs * gd * (sp.exp(-u) * (1 + ns) * nd + sp.exp(u) * ns * (1 + nd)) \
        + 2 * gs * gd + a ** 2 + b ** 2
    lam = -sp.Rational(1, 2) * (a + b - sp.sqrt(radicand))
    series = sp.series(lam, u, 0, order + 1).removeO()
    values = [float(sp.factorial(k) * series.coeff(u, k)) for k in range(1, order + 1)]
    return CumulantSet(values=np.array(values), method="analytic-N1")


# ---------------------------------------------------------------------------
# transient propagation and counting distribution
# ---------------------------------------------------------------------------

def _initial_vector(params, initial):
    if initial is None:
        return stationary_state(params).populations.astype(complex)
    if hasattr(initial, "populations"):
        return np.asarray(initial.populations, dtype=complex)
    p0 = np.asarray(initial, dtype=complex)
    if p0.shape != (params.N + 1,):
        raise ValueError(f"initial vector must have length {params.N + 1}")
    return p0


def propagate_populations(params: ModelParams, chis, times, initial=None, *,
                          rtol: float = 1e-9, atol: float = 1e-13,
                          method: str = "RK45") -> np.ndarray:
    """Integrate ``dp/dt = L(chi) p`` for several ``chi`` at once.

    ``method`` is any explicit :func:`scipy.integrate.solve_ivp` scheme
    (all ``chi`` share one adaptive step sequence) or ``"expm"`` for dense
    matrix exponentials, which is exact and insensitive to stiffness but
    costs ``O(N^3)`` per ``chi``.  Returns an array of shape ``(len(chis), len(times), N + 1)``.
    """
    chis = np.atleast_1d(np.asarray(chis, dtype=complex))
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a nonempty, nondecreasing array of t >= 0")
    p0 = _initial_vector(params, initial)
    gens = [build_tilted_generator(params, c) for c in chis]
    diag = np.stack([g.diag for g in gens])
    upper = np.stack([g.upper for g in gens])
    lower = np.stack([g.lower for g in gens])
    K, dim = diag.shape

    def rhs(_, y):
        p = y.reshape(K, dim)
        out = diag * p
        if dim > 1:
            out[:, :-1] += upper * p[:, 1:]
            out[:, 1:] += lower * p[:, :-1]
        return out.ravel()

    result = np.empty((K, len(times), dim), dtype=complex)
    if method == "expm":
        for k, gen in enumerate(gens):
            dense = gen.to_dense()
            p, t_prev = p0, 0.0
            for j, t in enumerate(times):
                if t > t_prev:
                    p = scipy.linalg.expm(dense * (t - t_prev)) @ p
                    t_prev = t
                result[k, j] = p
        return result
    y0 = np.tile(p0, K)
    start = 0
    if times[0] == 0:
        result[:, 0] = p0
        start = 1
    if start < len(times):
        sol = solve_ivp(rhs, (0.0, float(times[-1])), y0, method=method,
                        t_eval=times[start:], rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(f"transient integration failed: {sol.message}")
        result[:, start:] = sol.y.reshape(K, dim, -1).transpose(0, 2, 1)
    return result


def propagate_transient(params: ModelParams, chi, t_final: float, initial=None, *,
                        num: int = 201, times=None, rtol: float = 1e-9,
                        atol: float = 1e-13, method: str = "RK45") -> TransientCGF:
    """``C(chi, t) = ln sum_m p_m(t)`` from explicit adaptive integration.

    The initial state defaults to the stationary populations.  The vector is
    renormalized at every output time and the logarithms of the norms are
    accumulated, so long times at large ``|chi|`` do not underflow and the
    phase is continuous as long as it advances by less than ``pi`` per
    output interval.
    """
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    if times is None:
        times = np.linspace(0.0, t_final, num)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a nonempty, nondecreasing array of t >= 0")
    # renormalize between output times so the absolute tolerance stays
    # meaningful while the tilted trace decays exponentially
    p = _initial_vector(params, initial)
    log_scale, t_prev = 0.0 + 0.0j, 0.0
    log = np.empty(len(times), dtype=complex)
    for j, t in enumerate(times):
        if t > t_prev:
            p = propagate_populations(params, [chi], [t - t_prev], p, rtol=rtol, atol=atol,
                                      method=method)[0, 0]
            t_prev = t
        trace = p.sum()
        if trace == 0 or (complex(chi).real == 0 and trace.real <= 0):
            raise FloatingPointError("nonpositive trace; tighten the integration tolerance")
        log[j] = log_scale + np.log(trace)
        log_scale += np.log(trace)
        p = p / trace
    return TransientCGF(chi=complex(chi), times=times, values=log)


def counting_distribution(params: ModelParams, t: float, n_max: int, initial=None, *,
                          n_chi: int | None = None, tol: float = 1e-9,
                          rtol: float = 1e-12, atol: float = 1e-15):
    """Probabilities ``P_n(t)`` for ``n = -n_max .. n_max`` net drain emissions.

    The moment-generating function ``M(chi, t) = sum_m p_m(chi, t)`` is
    propagated on a uniform grid of ``n_chi >= 2 n_max + 1`` points in
    ``[0, 2 pi)`` and inverted by a discrete Fourier sum.  Returns
    ``(n, P)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    K = 2 * n_max + 1 if n_chi is None else int(n_chi)
    if K < 2 * n_max + 1:
        raise ValueError("n_chi must be at least 2 n_max + 1")
    chis = 2 * np.pi * np.arange(K) / K
    p = propagate_populations(params, chis, [t], initial, rtol=rtol, atol=atol,
                              method="DOP853")[:, 0]
    mgf = p.sum(axis=1)
    n = np.arange(-n_max, n_max + 1)
    # P_n = 1/K sum_j M_j exp(-i n chi_j); fft index n mod K
    coeffs = np.fft.fft(mgf) / K
    P = coeffs[n % K]
    if np.max(np.abs(P.imag)) > max(tol, 1e3 * np.finfo(float).eps):
        warnings.warn(f"imaginary residue {np.max(np.abs(P.imag)):.3g} in P_n",
                      AccuracyWarning, stacklevel=2)
    P = P.real
    edge = np.abs(P[[0, 1, -2, -1]]).max()
    if edge > tol:
        warnings.warn(f"probability mass {edge:.3g} at |n| = n_max: distribution is "
                      "aliased, increase n_max", AliasingWarning, stacklevel=2)
    return n, P
