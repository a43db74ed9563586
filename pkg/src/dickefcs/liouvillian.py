"""Tilted generator of the collective populations and its stationary state.

States are indexed by ``i = m + N/2`` in ``0..N`` (``m`` ascending from the
ground state ``m = -N/2``); the ``J_z`` eigenvalue of state ``i`` is
``2m = 2i - N``.  With ``j = N/2`` the squared matrix elements of the ladder
operators are integers::

    x_minus(m) = j(j+1) - m(m+1) = (N - i)(i + 1)     # m -> m+1
    x_plus(m)  = j(j+1) - m(m-1) = i (N - i + 1)      # m -> m-1

Bosons emitted into the drain carry a phase ``exp(+i chi)``, bosons absorbed
from the drain ``exp(-i chi)``.  Probability vectors are columns, so
``dp/dt = L(chi) p`` and at ``chi = 0`` every column of ``L`` sums to zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli

from .model import ModelParams, effective_bath

__all__ = [
    "TiltedGenerator",
    "StationaryState",
    "ladder_weights",
    "build_tilted_generator",
    "generator_parts",
    "stationary_state",
    "exact_moment",
    "apply_generator",
    "jz_eigenvalues",
    "thermal_polarization",
]


def ladder_weights(N: int):
    """Return ``(x_minus, x_plus)`` as float arrays over ``i = 0..N``."""
    i = np.arange(N + 1, dtype=float)
    return (N - i) * (i + 1), i * (N - i + 1)


def jz_eigenvalues(N: int) -> np.ndarray:
    return 2.0 * np.arange(N + 1) - N


@dataclass(frozen=True, eq=False)
class TiltedGenerator:
    """Tridiagonal ``L(chi)`` on the ``N + 1`` populations.

    ``upper[i] = L[i, i+1]`` is the rate ``i+1 -> i`` (emission) and
    ``lower[i] = L[i+1, i]`` the rate ``i -> i+1`` (absorption).
    """

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    chi: complex = 0.0

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag.astype(complex))
        if self.dim > 1:
            out += np.diag(self.upper, 1) + np.diag(self.lower, -1)
        return out

    def to_banded(self) -> np.ndarray:
        """Band storage in the layout expected by :func:`scipy.linalg.solve_banded`."""
        ab = np.zeros((3, self.dim), dtype=complex)
        ab[0, 1:] = self.upper
        ab[1] = self.diag
        ab[2, :-1] = self.lower
        return ab

    def __matmul__(self, p):
        return apply_generator(self, p)

    def to_csv(self, path) -> None:
        """Dump the bands, one row per ``m`` (complex entries as re, im pairs)."""
        N = self.dim - 1
        upper = np.append(self.upper, 0.0)
        lower = np.append(self.lower, 0.0)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "diag_re", "diag_im", "upper_re", "upper_im",
                             "lower_re", "lower_im"])
            for i in range(self.dim):
                d, u, lo = complex(self.diag[i]), complex(upper[i]), complex(lower[i])
                writer.writerow([repr(i - N / 2), repr(d.real), repr(d.imag),
                                 repr(u.real), repr(u.imag),
                                 repr(lo.real), repr(lo.imag)])


@dataclass(frozen=True, eq=False)
class StationaryState:
    populations: np.ndarray

    @property
    def N(self) -> int:
        return self.populations.shape[0] - 1

    def moment(self, k: int) -> float:
        return math.fsum(jz_eigenvalues(self.N) ** k * self.populations)


def _bands(params: ModelParams):
    """Jump-rate bands split by reservoir and direction.

    Returns the untilted loss diagonal together with the source and drain
    parts of the emission (``m -> m-1``) and absorption (``m -> m+1``) rates.
    """
    x_minus, x_plus = ladder_weights(params.N)
    gs, gd, ns, nd = params.gamma_S, params.gamma_D, params.n_S, params.n_D
    absorb = gs * ns + gd * nd
    emit = gs * (1 + ns) + gd * (1 + nd)
    diag = -(absorb * x_minus + emit * x_plus)
    return diag, x_minus, x_plus


def build_tilted_generator(params: ModelParams, chi=0.0) -> TiltedGenerator:
    """Build ``L(chi) = L_0 + exp(i chi) L_+ + exp(-i chi) L_-`` on the populations.

    ``chi`` may be complex; ``chi = -i u`` with real ``u`` gives the real
    (Metzler) generator used for moment-generating expansions.
    """
    diag, x_minus, x_plus = _bands(params)
    gs, gd, ns, nd = params.gamma_S, params.gamma_D, params.n_S, params.n_D
    chi = complex(chi)
    up_phase, down_phase = np.exp(1j * chi), np.exp(-1j * chi)
    upper = (gs * (1 + ns) + gd * (1 + nd) * up_phase) * x_plus[1:]
    lower = (gs * ns + gd * nd * down_phase) * x_minus[:-1]
    return TiltedGenerator(diag=diag.astype(complex), upper=np.asarray(upper, complex),
                           lower=np.asarray(lower, complex), chi=chi)


def generator_parts(params: ModelParams):
    """Return ``(L_0, L_+, L_-)`` as :class:`TiltedGenerator` band triples.

    ``L_+`` holds drain emissions (upper band only), ``L_-`` drain absorptions
    (lower band only); ``L_0`` everything else.
    """
    diag, x_minus, x_plus = _bands(params)
    gs, gd, ns, nd = params.gamma_S, params.gamma_D, params.n_S, params.n_D
    zero = np.zeros(params.N, dtype=complex)
    L0 = TiltedGenerator(diag.astype(complex),
                         (gs * (1 + ns) * x_plus[1:]).astype(complex),
                         (gs * ns * x_minus[:-1]).astype(complex))
    Lp = TiltedGenerator(np.zeros(params.N + 1, complex),
                         (gd * (1 + nd) * x_plus[1:]).astype(complex), zero)
    Lm = TiltedGenerator(np.zeros(params.N + 1, complex), zero,
                         (gd * nd * x_minus[:-1]).astype(complex))
    return L0, Lp, Lm


def apply_generator(gen: TiltedGenerator, p) -> np.ndarray:
    """Tridiagonal matrix-vector product ``L p`` in O(N)."""
    p = np.asarray(p)
    if p.shape[0] != gen.dim:
        raise ValueError(f"vector length {p.shape[0]} does not match generator dim {gen.dim}")
    out = gen.diag * p
    if gen.dim > 1:
        out[:-1] += gen.upper * p[1:]
        out[1:] += gen.lower * p[:-1]
    return out


def stationary_state(params: ModelParams) -> StationaryState:
    """Thermal populations at the rate-weighted occupation ``n_bar``.

    Neighbouring populations stand in the ratio ``n_bar / (1 + n_bar)``; the
    vector is built by running products (no large powers) and normalised with
    a compensated sum.  ``n_bar = 0`` gives the ground state.
    """
    N = params.N
    r = effective_bath(params).ratio
    p = np.zeros(N + 1)
    if r == 0.0:
        p[0] = 1.0
        return StationaryState(p)
    p[0] = 1.0
    p[1:] = np.cumprod(np.full(N, r))
    return StationaryState(p / math.fsum(p))


def exact_moment(params: ModelParams, k: int) -> float:
    """``<J_z^k>`` in the stationary state by direct summation."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return stationary_state(params).moment(int(k))


_COTH_SERIES = [(2 ** (2 * k) * float(b) / math.factorial(2 * k), 2 * k - 1)
                for k, b in enumerate(bernoulli(24)[::2]) if k >= 1]


def _coth_minus_inv(x: float) -> float:
    """``coth(x) - 1/x`` without cancellation for small ``x``."""
    if x > 20:
        return 1.0 - 1.0 / x
    if x < 0.5:
        return math.fsum(c * x ** p for c, p in _COTH_SERIES)
    return 1.0 / math.tanh(x) - 1.0 / x


def thermal_polarization(N: int, n_bar: float) -> float:
    """``-<J_z>`` of the thermal state, stable from ``n_bar = 0`` to ``n_bar -> inf``.

    With ``s = ln(1 + 1/n_bar)`` the populations are ``exp(-s k)`` over the
    symmetric range ``k = -N/2 .. N/2``, giving the Brillouin form
    ``-<J_z> = (N+1) coth((N+1) s/2) - coth(s/2)``.
    """
    if n_bar == 0:
        return float(N)
    s = math.log1p(1.0 / n_bar)
    return (N + 1) * _coth_minus_inv((N + 1) * s / 2) - _coth_minus_inv(s / 2)
