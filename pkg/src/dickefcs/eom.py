"""Factorized equation-of-motion approximations to the counting statistics.

Assuming the transferred-boson number is uncorrelated with the collective
spin, ``<e^{in chi} J_z^a> = <e^{in chi}> <J_z^a>``, the CGF grows linearly
with a rate fixed by ``<J_z>`` and ``<J_z^2>`` alone.  Three closures supply
those two moments:

* ``approx1`` -- exact thermal moments;
* ``approx2`` -- the ``<J_z>`` equation with ``<J_z^2> = <J_z>^2``;
* ``approx3`` -- the ``<J_z>`` and ``<J_z^2>`` equations with
  ``<J_z^3> = <J_z> <J_z^2>``.

Every closure solves the stationary ``<J_z>`` balance, which makes the
factorized rate collapse to ``F(chi, t) * amplitude`` with
``amplitude = -<J_z>`` for all drain occupations and all ``chi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fcs import CumulantSet, propagate_populations
from .liouvillian import (
    build_tilted_generator,
    exact_moment,
    jz_eigenvalues,
    stationary_state,
    thermal_polarization,
)
from .model import ModelParams, counting_kernel, effective_bath

__all__ = [
    "ClosureKind",
    "ClosureResult",
    "FactorizationError",
    "factored_cgf_rate",
    "closure_steady_state",
    "closure_amplitude",
    "common_function",
    "approximate_cgf",
    "approximate_cumulants",
    "odd_even_cumulant_rates",
    "thermodynamic_limit",
    "limit_cgf",
    "factorization_error",
]


class ClosureKind(str, enum.Enum):
    APPROX1 = "approx1"
    APPROX2 = "approx2"
    APPROX3 = "approx3"

    @property
    def index(self) -> int:
        return int(self.value[-1])


@dataclass(frozen=True)
class ClosureResult:
    kind: ClosureKind
    jz1: float
    jz2: float
    amplitude: float


def _kind(kind) -> ClosureKind:
    if isinstance(kind, int):
        return ClosureKind(f"approx{kind}")
    return ClosureKind(kind)


def factored_cgf_rate(params: ModelParams, jz1, jz2, chi):
    """``dC/dt`` with the counting variable factored out of spin correlations."""
    f_plus = counting_kernel(chi, params.gamma_D)
    f_minus = counting_kernel(-np.asarray(chi), params.gamma_D)
    J2, nd = params.J2, params.n_D
    return (nd * (f_plus - f_minus) * jz1
            + 0.5 * nd * (f_plus + f_minus) * (J2 - jz2)
            + 0.5 * f_plus * (J2 - jz2 + 2 * jz1))


# ---------------------------------------------------------------------------
# amplitudes
# ---------------------------------------------------------------------------

def closure_amplitude(params: ModelParams, kind) -> float:
    """Scalar multiplying ``F(chi, t)`` in the approximate CGF.

    ``approx1``: ``((n+1)(N-2n) + n r^N (N+2n+2)) / (n (1 - r^N) + 1)`` with
    ``r = n/(1+n)``, evaluated in the equivalent Brillouin form.
    ``approx2``: ``-(2n+1) + sqrt((2n+1)^2 + N(N+2))``.
    ``approx3``: ``-a + sqrt(a^2 + N(N+2))``, ``a = (3 + 6n - 1/(2n+1)) / 2``.
    Differences of square roots are rationalized.
    """
    kind = _kind(kind)
    n_bar = effective_bath(params).n_bar
    J2 = params.J2
    c = 2 * n_bar + 1
    if kind is ClosureKind.APPROX1:
        return thermal_polarization(params.N, n_bar)
    a = c if kind is ClosureKind.APPROX2 else 0.5 * (3 * c - 1 / c)
    return J2 / (a + math.sqrt(a * a + J2))


def closure_steady_state(params: ModelParams, kind) -> ClosureResult:
    """Stationary ``<J_z>``, ``<J_z^2>`` and CGF amplitude of one closure.

    ``approx2`` takes the attracting root of
    ``0 = -(2n+1) a + a^2/2 - J^2/2``, which is the negative one.
    ``approx3`` substitutes ``b = 2(2n+1) a + J^2`` from the first stationary
    equation into the second, leaving ``a^2 + (1/c - 3c) a - J^2 = 0``; the
    negative root is the branch through the ground state ``a = -N`` at
    ``n = 0``.
    """
    kind = _kind(kind)
    n_bar = effective_bath(params).n_bar
    J2 = params.J2
    c = 2 * n_bar + 1
    amplitude = closure_amplitude(params, kind)
    if kind is ClosureKind.APPROX1:
        jz1, jz2 = exact_moment(params, 1), exact_moment(params, 2)
    else:
        jz1 = -amplitude
        jz2 = jz1 * jz1 if kind is ClosureKind.APPROX2 else 2 * c * jz1 + J2
        # both quadratics have root product -J^2
        other = -J2 / jz1
        if -params.N <= other <= params.N:
            raise ArithmeticError(f"{kind.value}: both stationary roots lie in [-N, N]")
    return ClosureResult(kind=kind, jz1=jz1, jz2=jz2, amplitude=amplitude)


def common_function(params: ModelParams, chi, t):
    """``F = g_D t [(e^{i chi}-1)(n_D+1) n + (e^{-i chi}-1) n_D (n+1)]``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be nonnegative")
    n_bar = effective_bath(params).n_bar
    chi = np.asarray(chi, dtype=complex)
    nd = params.n_D
    value = params.gamma_D * np.asarray(t) * (np.expm1(1j * chi) * (nd + 1) * n_bar
                                               + np.expm1(-1j * chi) * nd * (n_bar + 1))
    return complex(value) if np.ndim(value) == 0 else value


def approximate_cgf(params: ModelParams, kind, chi, t):
    return common_function(params, chi, t) * closure_amplitude(params, kind)


def approximate_cumulants(params: ModelParams, kind, order: int = 4) -> CumulantSet:
    """Current cumulants of ``F * amplitude``: ``(-i d/dchi)^k`` acts on ``e^{+-i chi}`` as ``(+-1)^k``."""
    kind = _kind(kind)
    bath = effective_bath(params)
    n_bar = bath.n_bar
    amp = closure_amplitude(params, kind)
    gd, nd = params.gamma_D, params.n_D
    # (nd+1) n - nd (n+1) = n - nd, written without cancellation
    odd = gd * amp * params.gamma_S * (params.n_S - nd) / bath.gamma_total
    even = gd * amp * (n_bar + nd + 2 * nd * n_bar)
    values = np.array([odd if k % 2 else even for k in range(1, order + 1)])
    return CumulantSet(values=values, method=f"eom-closure-{kind.value}")


def odd_even_cumulant_rates(params: ModelParams, jz1, jz2):
    """Growth rates shared by all odd and by all even cumulants under factorization.

    Even-order ``u``-derivatives of the factored rate give
    ``g_D / 2 [(n_D + 1/2)(J^2 - <J_z^2>) + <J_z>]``; the ``<J_z>`` term
    carries weight one, not two, so that the rate vanishes in the ground state.
    """
    J2, nd, gd = params.J2, params.n_D, params.gamma_D
    odd = gd * (nd * jz1 + 0.25 * (J2 - jz2 + 2 * jz1))
    even = 0.5 * gd * ((nd + 0.5) * (J2 - jz2) + jz1)
    return odd, even


# ---------------------------------------------------------------------------
# thermodynamic limits
# ---------------------------------------------------------------------------

_X = {ClosureKind.APPROX1: 6.0, ClosureKind.APPROX2: 4.0, ClosureKind.APPROX3: 6.0}

# validity margins for the three regimes
LINEAR_MAX_NBAR_OVER_N = 1e-2
SUPER_MIN_NBAR_OVER_N = 1e2
LOW_BIAS_MAX_NS = 1e-2


def _check_regime(params, regime):
    n_bar = effective_bath(params).n_bar
    if regime == "linear":
        ok = n_bar <= LINEAR_MAX_NBAR_OVER_N * params.N
        need = "n_bar << N"
    elif regime == "super_transmittance":
        ok = n_bar >= SUPER_MIN_NBAR_OVER_N * params.N
        need = "n_bar >> N"
    elif regime == "low_bias":
        ok = params.n_D == 0 and params.n_S <= LOW_BIAS_MAX_NS
        need = "n_S << 1 and n_D = 0"
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if not ok:
        raise ValueError(f"regime {regime!r} requires {need}")


def thermodynamic_limit(params: ModelParams, kind, regime: str) -> float:
    """Limit coefficient of the approximate CGF.

    ``linear``: ``C / (N F) -> 1`` for every closure.
    ``super_transmittance``: prefactor ``g_D N (N+2) / x`` with ``x = 4`` for
    ``approx2`` and ``x = 6`` otherwise, multiplying
    ``[(e^{i chi}-1)(1+n_D) + (e^{-i chi}-1) n_D] t``.
    ``low_bias``: ``g_S g_D / (g_S + g_D) n_S N`` multiplying
    ``(e^{i chi} - 1) t``.
    """
    kind = _kind(kind)
    _check_regime(params, regime)
    if regime == "linear":
        return 1.0
    if regime == "super_transmittance":
        return params.gamma_D * params.J2 / _X[kind]
    g = params.gamma_S * params.gamma_D / (params.gamma_S + params.gamma_D)
    return g * params.n_S * params.N


def limit_cgf(params: ModelParams, kind, regime: str, chi, t):
    """Evaluate the limiting CGF of ``regime`` at ``(chi, t)``."""
    coeff = thermodynamic_limit(params, kind, regime)
    chi = np.asarray(chi, dtype=complex)
    if regime == "linear":
        value = coeff * params.N * np.asarray(common_function(params, chi, t))
    elif regime == "super_transmittance":
        nd = params.n_D
        value = coeff * (np.expm1(1j * chi) * (1 + nd) + np.expm1(-1j * chi) * nd) * t
    else:
        value = coeff * np.expm1(1j * chi) * t
    return complex(value) if np.ndim(value) == 0 else value


# ---------------------------------------------------------------------------
# factorization diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationError:
    """Deviation of ``<e^{in chi} J_z^a> / <e^{in chi}>`` from ``<J_z^a>``.

    ``relative`` is False when ``<J_z^a>`` vanishes and ``value`` is absolute.
    """

    value: float
    relative: bool
    correlated: complex
    factored: float


FACTORIZATION_MAX_N = 20


def factorization_error(params: ModelParams, chi, t, alpha: int = 2,
                        initial=None) -> FactorizationError:
    """Exact test of the factorization at finite ``chi`` and ``t``.

    Propagates the tilted populations ``p(chi, t)`` (initially stationary)
    with dense matrix exponentials and compares ``sum (2m)^a p_m / sum p_m`` with the untilted moment
    ``<J_z^a>(t)``.
    """
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    if params.N > FACTORIZATION_MAX_N:
        raise ValueError(f"factorization_error uses exact propagation; N <= {FACTORIZATION_MAX_N}")
    if initial is None:
        initial = stationary_state(params)
    jz = jz_eigenvalues(params.N) ** alpha
    p0 = np.asarray(getattr(initial, "populations", initial), dtype=complex)
    gen = build_tilted_generator(params, chi).to_dense()
    # remove the overall decay of the tilted trace; it cancels in the ratio
    shift = np.max(np.linalg.eigvals(gen).real)
    tilted = scipy.linalg.expm((gen - shift * np.eye(len(p0))) * t) @ p0
    plain = propagate_populations(params, [0.0], [t], p0, method="expm")[0, 0].real
    correlated = complex(np.sum(jz * tilted) / np.sum(tilted))
    factored = float(math.fsum(jz * plain) / math.fsum(plain))
    diff = abs(correlated - factored)
    scale = math.fsum(np.abs(jz) * plain) / math.fsum(plain)
    if abs(factored) <= 1e-10 * max(scale, 1.0):
        return FactorizationError(diff, False, correlated, factored)
    return FactorizationError(diff / abs(factored), True, correlated, factored)
