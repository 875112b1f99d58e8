"""Problem parameters and derived exponents for the p-Sobolev setting."""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterDomainError(ValueError):
    """Raised when (N, p) or a derived quantity is outside its admissible range."""


@dataclass(frozen=True)
class Params:
    """Dimension N, gradient exponent p, and everything derived from them.

    pstar is the critical Lebesgue exponent pN/(N-p); pbar = pstar*(p-1)/p is
    the critical remainder exponent; gamma = max(2, p) and zeta = min(2, p)
    are the lower/upper stability orders.  weak_norm_valid marks the regime
    pbar > 1 (equivalently p > 2N/(N+1)) where the averaged weak norm is a
    genuine norm and the extremal function has finite weak norm.
    """

    N: int
    p: float
    pstar: float
    pbar: float
    gamma: float
    zeta: float
    weak_norm_valid: bool

    @property
    def q(self) -> float:
        """Conjugate exponent p/(p-1); the bubble's radial power."""
        return self.p / (self.p - 1.0)

    @property
    def decay(self) -> float:
        """(N-p)/p, the bubble's scaling weight."""
        return (self.N - self.p) / self.p


def derive_params(N: int, p: float) -> Params:
    """Build Params from (N, p), validating 1 < p < N and N >= 2."""
    if not (isinstance(N, int) and N >= 2):
        raise ParameterDomainError(f"dimension N must be an integer >= 2, got {N!r}")
    p = float(p)
    if not p > 1.0:
        raise ParameterDomainError(f"exponent p must satisfy p > 1, got p={p}")
    if not p < N:
        raise ParameterDomainError(f"exponent p must satisfy p < N, got p={p}, N={N}")
    pstar = p * N / (N - p)
    pbar = pstar * (p - 1.0) / p
    return Params(
        N=N,
        p=p,
        pstar=pstar,
        pbar=pbar,
        gamma=max(2.0, p),
        zeta=min(2.0, p),
        weak_norm_valid=pbar > 1.0,
    )


def sphere_measure(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 pi^(N/2) / Gamma(N/2)."""
    if N < 2:
        raise ParameterDomainError(f"dimension N must be >= 2, got {N}")
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def ball_volume(N: int, R: float) -> float:
    """Volume of the centered ball of radius R in R^N."""
    if R == math.inf:
        return math.inf
    return sphere_measure(N) * R**N / N
