"""The radial extremal family c * lam^((N-p)/p) * U(lam r) and its constants.

U(r) = gamma_{N,p} (1 + r^(p/(p-1)))^(-(N-p)/p) is the positive radial
solution of the critical p-Laplace equation
    -div(|grad u|^(p-2) grad u) = u^(p*-1)
on R^N.  The normalization constant is pinned by requiring the radial
residual of that equation to vanish, which forces
    gamma^(p*-p) = N * ((N-p)/(p-1))^(p-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import ParameterDomainError, Params, sphere_measure
from .profiles import DomainBall, RadialProfile
from .quadrature import DEFAULT_RTOL, integrate_radial


@dataclass(frozen=True)
class BubbleSpec:
    """Amplitude and scale (c, lambda) of a radial extremal; center fixed at 0."""

    c: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterDomainError(f"bubble scale lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class BubbleConstants:
    """Normalization, norms, and sharp constant of the unit bubble U."""

    gamma_norm: float
    grad_norm: float  # ||grad U||_p over R^N
    crit_norm: float  # ||U||_{p*} over R^N
    sharp_constant: float  # S(N, p) = grad_norm / crit_norm
    weak_norm: float  # ||U|| in the weak pbar-norm over R^N; inf when pbar <= 1
    sphere: float


def normalization_gamma(params: Params) -> float:
    """The unique gamma > 0 for which the radial residual of U vanishes."""
    base = params.N * ((params.N - params.p) / (params.p - 1.0)) ** (params.p - 1.0)
    return base ** (1.0 / (params.pstar - params.p))


def bubble_value(params: Params, spec: BubbleSpec, r):
    """c * lam^((N-p)/p) * U(lam r)."""
    gamma = normalization_gamma(params)
    s = spec.lam * np.asarray(r, dtype=float)
    out = spec.c * spec.lam**params.decay * gamma * (1.0 + s**params.q) ** (-params.decay)
    return out if np.ndim(out) else float(out)

def bubble_derivative(params: Params, spec: BubbleSpec, r):
    """Exact radial derivative of bubble_value."""
    s = spec.lam * np.asarray(r, dtype=float)
    out = spec.c * spec.lam ** (params.decay + 1.0) * _u_prime(params, s)
    return out if np.ndim(out) else float(out)


def _u_prime(params: Params, s):
    gamma = normalization_gamma(params)
    d, q = params.decay, params.q
    return -gamma * d * q * s ** (q - 1.0) * (1.0 + s**q) ** (-d - 1.0)


def _s_u_second(params: Params, s):
    """s * U''(s); the combination stays regular at s = 0 for every p in (1, N)."""
    gamma = normalization_gamma(params)
    d, q = params.decay, params.q
    one = (q - 1.0) * s ** (q - 1.0) * (1.0 + s**q) ** (-d - 1.0)
    two = (d + 1.0) * q * s ** (2.0 * q - 1.0) * (1.0 + s**q) ** (-d - 2.0)
    return -gamma * d * q * (one - two)


def bubble_profile(params: Params, spec: BubbleSpec = BubbleSpec()) -> RadialProfile:
    return RadialProfile(
        value=lambda r: bubble_value(params, spec, r),
        derivative=lambda r: bubble_derivative(params, spec, r),
        support_radius=math.inf,
        kind="analytic-bubble",
    )


def scale_derivative_profile(params: Params, spec: BubbleSpec) -> RadialProfile:
    """d/d(lambda) of the bubble at spec: the dilation tangent direction.

    value  = c [ (N-p)/p lam^(d-1) U(lam r) + lam^d r U'(lam r) ]
    deriv  = c lam^d [ (d+1) U'(lam r) + lam r U''(lam r) ]
    with d = (N-p)/p; the r U'' combination is evaluated as s U''(s).
    """
    d = params.decay
    gamma = normalization_gamma(params)
    lam, c = spec.lam, spec.c

    def value(r):
        s = lam * np.asarray(r, dtype=float)
        u = gamma * (1.0 + s**params.q) ** (-d)
        out = c * (d * lam ** (d - 1.0) * u + lam ** (d - 1.0) * s * _u_prime(params, s))
        return out if np.ndim(out) else float(out)

    def derivative(r):
        s = lam * np.asarray(r, dtype=float)
        out = c * lam**d * ((d + 1.0) * _u_prime(params, s) + _s_u_second(params, s))
        return out if np.ndim(out) else float(out)

    return RadialProfile(value, derivative, support_radius=math.inf, kind="analytic-bubble")


def bubble_residual(params: Params, spec: BubbleSpec, r: float) -> float:
    """Radial p-Laplace residual -r^(1-N) (r^(N-1) |u'|^(p-2) u')' - u^(p*-1).

    Vanishes for c = 1 and any lambda; for c != 1 it measures the amplitude
    mismatch.  The flux derivative is taken by fourth-order central
    differences on the analytic flux, so the residual is an independent check
    of the normalization constant rather than an algebraic identity.
    """
    r = float(r)
    if r <= 0:
        raise ParameterDomainError(f"residual needs r > 0, got {r}")

    def flux_moment(x):
        du = bubble_derivative(params, spec, x)
        return x ** (params.N - 1) * math.copysign(abs(du) ** (params.p - 1.0), du)

    h = 5e-4 * r
    d_flux = (
        flux_moment(r - 2 * h)
        - 8.0 * flux_moment(r - h)
        + 8.0 * flux_moment(r + h)
        - flux_moment(r + 2 * h)
    ) / (12.0 * h)
    u = bubble_value(params, spec, r)
    rhs = math.copysign(abs(u) ** (params.pstar - 1.0), u)
    return -r ** (1 - params.N) * d_flux - rhs


def tail_integral(params: Params, a: float, rtol: float = DEFAULT_RTOL) -> float:
    """integral_a^inf r^(N-1) (1 + r^(p/(p-1)))^(-N) dr.

    Equals |S^(N-1)|^-1 gamma^(-p*) ||U_{lam,0}||_{p*}^{p*} outside B_R when
    a = lam R.
    """
    if a < 0:
        raise ParameterDomainError(f"tail integral needs a >= 0, got {a}")
    N, q = params.N, params.q

    def integrand(r):
        return r ** (N - 1) / (1.0 + r**q) ** N

    return integrate_radial(integrand, a, math.inf, rtol=rtol)


@lru_cache(maxsize=None)
def bubble_constants(params: Params, rtol: float = DEFAULT_RTOL) -> BubbleConstants:
    """Norms of U by radial quadrature and the sharp constant from them.

    Cached per (N, p); safe for concurrent readers once built.
    """
    from .norms import grad_lp_norm, lq_norm, weak_norm

    profile = bubble_profile(params)
    dom = DomainBall.whole_space(params.N)
    grad = grad_lp_norm(profile, params.p, dom, rtol=rtol)
    crit = lq_norm(profile, params.pstar, dom, rtol=rtol)
    weak = (
        weak_norm(profile, params.pbar, dom, rtol=rtol)
        if params.weak_norm_valid
        else math.inf
    )
    return BubbleConstants(
        gamma_norm=normalization_gamma(params),
        grad_norm=grad,
        crit_norm=crit,
        sharp_constant=grad / crit,
        weak_norm=weak,
        sphere=sphere_measure(params.N),
    )
