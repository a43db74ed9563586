"""Parameters and bath bookkeeping for the two-reservoir Dicke transport model.

Only the rates ``gamma_S``, ``gamma_D`` and the bath occupations ``n_S``,
``n_D`` enter any counting observable.  The level splitting ``omega`` is kept
on :class:`ModelParams` for completeness but is never read: in the secular
master equation the populations of the collective states ``|j, m>`` evolve
independently of the coherences and of the unitary part, so the dynamics that
the counting statistics see is a classical birth-death chain on ``N + 1``
states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "EffectiveBath",
    "effective_bath",
    "thermal_occupation",
    "counting_kernel",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of the medium and its two reservoirs.

    Parameters
    ----------
    N : int
        Number of two-level systems; the collective spin is ``j = N / 2``.
    gamma_S, gamma_D : float
        Single-emitter emission rates into source and drain.
    n_S, n_D : float
        Bath occupations at the transition frequency.
    omega : float
        Level splitting.  Stored only; it cancels from every counting quantity.
    """

    N: int
    gamma_S: float = 1.0
    gamma_D: float = 1.0
    n_S: float = 0.0
    n_D: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("gamma_S", "gamma_D", "n_S", "n_D"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")
            object.__setattr__(self, name, value)
        if self.gamma_S + self.gamma_D <= 0:
            raise ValueError("gamma_S + gamma_D must be positive (no dynamics otherwise)")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")

    @property
    def j(self) -> float:
        return self.N / 2

    @property
    def J2(self) -> int:
        """Total spin ``J^2 = N (N + 2)`` in the ``J_z = 2m`` convention."""
        return self.N * (self.N + 2)

    def replace(self, **changes) -> "ModelParams":
        fields = dict(N=self.N, gamma_S=self.gamma_S, gamma_D=self.gamma_D,
                      n_S=self.n_S, n_D=self.n_D, omega=self.omega)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class EffectiveBath:
    """The single fictitious reservoir the medium thermalizes with."""

    n_bar: float
    gamma_total: float

    @property
    def ratio(self) -> float:
        """Detailed-balance ratio ``n_bar / (1 + n_bar)`` of neighbouring populations."""
        return self.n_bar / (1.0 + self.n_bar)


def effective_bath(params: ModelParams) -> EffectiveBath:
    """Rate-weighted average occupation of the two reservoirs.

    >>> effective_bath(ModelParams(N=1, gamma_S=2, gamma_D=1, n_S=1, n_D=4)).n_bar
    2.0
    """
    gamma = params.gamma_S + params.gamma_D
    if gamma <= 0:
        raise ValueError("gamma_S = gamma_D = 0: no dynamics")
    n_bar = (params.gamma_S * params.n_S + params.gamma_D * params.n_D) / gamma
    return EffectiveBath(n_bar=n_bar, gamma_total=gamma)


def thermal_occupation(beta, omega) -> float:
    """Bose-Einstein occupation ``1 / (exp(beta * omega) - 1)``."""
    x = float(beta) * float(omega)
    if not x > 0:
        raise ValueError(f"beta * omega must be positive, got {x!r}")
    if math.isinf(x):
        return 0.0
    return 1.0 / math.expm1(x)


def counting_kernel(chi, gamma_D):
    """``f[chi] = gamma_D / 2 * (exp(i chi) - 1)``; accepts arrays and complex ``chi``."""
    value = 0.5 * gamma_D * np.expm1(1j * np.asarray(chi, dtype=complex))
    return complex(value) if value.ndim == 0 else value
