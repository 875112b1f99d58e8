"""Projection of a radial profile onto the extremal manifold {c U_lam}.

The distance is inf over (c, lam) of ||grad(u - c U_lam)||_p.  The objective
is evaluated on a fixed trapezoid rule in log r (exponentially accurate for
the algebraically decaying integrands that arise here), with the truncation
tail beyond a finite support handled by an exact one-dimensional quadrature.
A coarse scan over log lam with an inner convex line search in c seeds a
Nelder-Mead refinement; the whole pipeline is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .bubble import BubbleSpec, bubble_constants, bubble_profile, scale_derivative_profile, _u_prime
from .params import ParameterDomainError, Params, sphere_measure
from .profiles import RadialProfile, linear_combination
from .quadrature import DEFAULT_RTOL, integrate_radial

LAMBDA_RANGE = (1e-3, 1e3)


class DegeneratePerturbationError(ValueError):
    """The seed lies entirely in the tangent span; no perturbation direction remains."""


@dataclass(frozen=True)
class ProjectionResult:
    c_opt: float
    lambda_opt: float
    distance: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class Decomposition:
    """u = c U_lam + d w with unit-gradient w; carries its params for reconstruction."""

    params: Params
    bubble: BubbleSpec
    d: float
    w: RadialProfile


class GradientDistance:
    """Callable (c, lam) -> ||grad(u - c U_lam)||_p on the whole space."""

    def __init__(self, u: RadialProfile, params: Params, step: float = 0.01):
        if u.derivative is None:
            raise ParameterDomainError("projection needs a profile with a derivative")
        self.params = params
        self.sphere = sphere_measure(params.N)
        self.support = u.support_radius
        p, N = params.p, params.N
        if math.isfinite(self.support):
            r_lo, r_hi = self.support * 1e-8, self.support
        else:
            # integrand decays like r^(-sigma-1) in log space
            sigma = p * (N - 1) / (p - 1.0) - N
            r_lo, r_hi = 1e-8, min(math.exp(30.0 / sigma), 1e30)
        n = int(math.ceil((math.log(r_hi) - math.log(r_lo)) / step)) + 1
        rho = np.linspace(math.log(r_lo), math.log(r_hi), n)
        self.nodes = np.exp(rho)
        w = np.full(n, rho[1] - rho[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        self.weights = w * self.nodes**N  # trapezoid in log r times r^(N-1) * r
        self.du = np.asarray(u.derivative(self.nodes), dtype=float)
        self.calls = 0
        self._tail_cache: dict[float, float] = {}

    def _grad_tail(self, a: float) -> float:
        """integral_a^inf |U'(s)|^p s^(N-1) ds, scale-invariant truncation tail."""
        got = self._tail_cache.get(a)
        if got is not None:
            return got
        p, N = self.params.p, self.params.N

        def integrand(s):
            return abs(_u_prime(self.params, s)) ** p * s ** (N - 1)

        val = integrate_radial(integrand, a, math.inf, rtol=1e-12)
        self._tail_cache[a] = val
        return val

    def power(self, c: float, lam: float) -> float:
        """E(c, lam)^p."""
        self.calls += 1
        p = self.params.p
        dv = c * lam ** (self.params.decay + 1.0) * _u_prime(self.params, lam * self.nodes)
        total = float(np.dot(self.weights, np.abs(self.du - dv) ** p))
        if math.isfinite(self.support):
            # tail of c U_lam beyond the support; scale-invariant in lam * R
            total += abs(c) ** p * self._grad_tail(lam * self.support)
        return self.sphere * total

    def __call__(self, c: float, lam: float) -> float:
        return self.power(c, lam) ** (1.0 / self.params.p)


def _min_over_c(obj: GradientDistance, lam: float, c_hi: float, tol: float) -> tuple[float, float]:
    """Convex inner minimization of E^p in c at fixed lam."""
    res = optimize.minimize_scalar(
        lambda c: obj.power(c, lam),
        bounds=(-c_hi, c_hi),
        method="bounded",
        options={"xatol": tol},
    )
    return float(res.x), float(res.fun)


def project(
    u: RadialProfile,
    params: Params,
    lam_range: tuple[float, float] = LAMBDA_RANGE,
    coarse: int = 61,
) -> ProjectionResult:
    """Minimize ||grad(u - c U_lam)||_p over amplitude and scale.

    Deterministic: coarse logarithmic scan in lam with a convex line search
    in c, then Nelder-Mead on (c, log lam) to parameter tolerance 1e-8.
    Non-convergence is reported through converged=False, never silently.
    """
    obj = GradientDistance(u, params)
    grad_u = obj(0.0, 1.0)
    if not (math.isfinite(grad_u) and grad_u > 0):
        raise ParameterDomainError("projection needs a finite, nonzero gradient norm")
    c_hi = 4.0 * grad_u / bubble_constants(params).grad_norm

    best = (0.0, 1.0, grad_u**params.p)
    for loglam in np.linspace(math.log(lam_range[0]), math.log(lam_range[1]), coarse):
        lam = math.exp(loglam)
        c, val = _min_over_c(obj, lam, c_hi, tol=1e-6 * c_hi)
        if val < best[2]:
            best = (c, lam, val)

    x0 = np.array([best[0], math.log(best[1])])
    f0 = best[2] ** (2.0 / params.p)

    def merit(theta):
        return obj.power(theta[0], math.exp(theta[1])) ** (2.0 / params.p)

    res = optimize.minimize(
        merit,
        x0,
        method="Nelder-Mead",
        options={
            "xatol": 1e-9,
            "fatol": max(1e-16, 1e-12 * f0),
            "maxfev": 6000,
            "initial_simplex": np.array(
                [x0, x0 + [max(0.05, 0.05 * abs(x0[0])), 0.0], x0 + [0.0, 0.05]]
            ),
        },
    )
    c_opt = float(res.x[0])
    lam_opt = float(math.exp(res.x[1]))
    log_lo, log_hi = math.log(lam_range[0]), math.log(lam_range[1])
    escaped = not (log_lo - 0.1 <= res.x[1] <= log_hi + 0.1)
    return ProjectionResult(
        c_opt=c_opt,
        lambda_opt=lam_opt,
        distance=obj(c_opt, lam_opt),
        evaluations=obj.calls,
        converged=bool(res.success) and not escaped,
    )


def grid_minimum(
    u: RadialProfile,
    params: Params,
    c_values: np.ndarray,
    lam_values: np.ndarray,
) -> tuple[float, float, float]:
    """Brute-force minimum of the projection objective over a (c, lam) grid.

    Returns (distance, c, lam); used as the independent oracle for project.
    """
    obj = GradientDistance(u, params)
    best = (math.inf, 0.0, 0.0)
    p = params.p
    for lam in lam_values:
        dv_unit = lam ** (params.decay + 1.0) * _u_prime(params, lam * obj.nodes)
        tail_unit = obj._grad_tail(lam * obj.support) if math.isfinite(obj.support) else 0.0
        for c in c_values:
            total = float(np.dot(obj.weights, np.abs(obj.du - c * dv_unit) ** p))
            total += abs(c) ** p * tail_unit
            val = obj.sphere * total
            if val < best[0]:
                best = (val, float(c), float(lam))
    return best[0] ** (1.0 / p), best[1], best[2]


def decomposition_profile(dec: Decomposition) -> RadialProfile:
    """Reassemble u = c U_lam + d w."""
    bub = bubble_profile(dec.params, dec.bubble)
    return linear_combination([1.0, dec.d], [bub, dec.w], kind="bubble-plus-perturbation")


def decompose(u: RadialProfile, params: Params, result: ProjectionResult | None = None) -> Decomposition:
    """Split u into its projection c U_lam and the unit-gradient remainder d w."""
    from .norms import grad_lp_norm
    from .profiles import DomainBall

    res = result if result is not None else project(u, params)
    if res.distance <= 0:
        raise ParameterDomainError("decomposition is degenerate at zero distance")
    spec = BubbleSpec(res.c_opt, res.lambda_opt)
    bub = bubble_profile(params, spec)
    w_raw = linear_combination([1.0, -1.0], [u, bub], kind="bubble-plus-perturbation")
    scale = grad_lp_norm(w_raw, params.p, DomainBall.whole_space(params.N))
    w = linear_combination([1.0 / scale], [w_raw], kind="bubble-plus-perturbation")
    return Decomposition(params=params, bubble=spec, d=scale, w=w)


def tangent_basis(params: Params, spec: BubbleSpec) -> list[RadialProfile]:
    """Radial tangent directions of the manifold at c U_lam: {U_lam, d/dlam U_lam}.

    The translation directions are non-radial and stay out of the radial
    pipeline by construction.
    """
    return [
        bubble_profile(params, BubbleSpec(1.0, spec.lam)),
        scale_derivative_profile(params, BubbleSpec(1.0, spec.lam)),
    ]


def _pairing(params: Params, weight: RadialProfile, w: RadialProfile, rtol: float) -> float:
    N = params.N

    def integrand(r):
        return float(weight.value(r)) * float(w.value(r)) * r ** (N - 1)

    return sphere_measure(N) * integrate_radial(
        integrand, 0.0, math.inf, rtol=rtol, breakpoints=w.breakpoints
    )


def _critical_weights(params: Params, spec: BubbleSpec) -> list[RadialProfile]:
    """Weights U_lam^(p*-1) and U_lam^(p*-2) dU_lam/dlam for the two pairings."""
    bub = bubble_profile(params, BubbleSpec(1.0, spec.lam))
    dlam = scale_derivative_profile(params, BubbleSpec(1.0, spec.lam))
    e = params.pstar

    def w0(r):
        return np.asarray(bub.value(r)) ** (e - 1.0)

    def w1(r):
        return np.asarray(bub.value(r)) ** (e - 2.0) * np.asarray(dlam.value(r))

    return [
        RadialProfile(w0, None, kind="analytic-bubble"),
        RadialProfile(w1, None, kind="analytic-bubble"),
    ]


def orthogonality_residuals(dec: Decomposition, rtol: float = DEFAULT_RTOL) -> tuple[float, float]:
    """The two orthogonality integrals for the decomposition's direction w.

    First: integral of |grad U_lam|^(p-2) grad U_lam . grad w; second:
    integral of U_lam^(p*-1) w.  They coincide for any w because U_lam solves
    the critical equation, and both vanish at a true minimizer.
    """
    params = dec.params
    spec = BubbleSpec(1.0, dec.bubble.lam)
    bub = bubble_profile(params, spec)
    N, p = params.N, params.p

    def grad_integrand(r):
        dv = float(bub.derivative(r))
        dw = float(dec.w.derivative(r))
        return math.copysign(abs(dv) ** (p - 1.0), dv) * dw * r ** (N - 1)

    first = sphere_measure(N) * integrate_radial(
        grad_integrand, 0.0, math.inf, rtol=rtol, breakpoints=dec.w.breakpoints
    )
    weight0 = _critical_weights(params, spec)[0]
    second = _pairing(params, weight0, dec.w, rtol)
    return first, second


def make_orthogonal_perturbation(
    seed: RadialProfile, params: Params, spec: BubbleSpec = BubbleSpec(), rtol: float = DEFAULT_RTOL
) -> RadialProfile:
    """Project the tangent components out of seed and normalize the gradient norm.

    Orthogonality is enforced against the critical-power pairing
    w -> integral U_lam^(p*-1) w and its lam-linearized analogue; the
    construction is idempotent and fails loudly when the seed is tangent.
    """
    from .norms import grad_lp_norm
    from .profiles import DomainBall

    basis = tangent_basis(params, spec)
    weights = _critical_weights(params, spec)
    M = np.array([[_pairing(params, wt, b, rtol) for b in basis] for wt in weights])
    rhs = np.array([_pairing(params, wt, seed, rtol) for wt in weights])
    coef = np.linalg.solve(M, rhs)
    w_raw = linear_combination(
        [1.0, -coef[0], -coef[1]], [seed, basis[0], basis[1]], kind="bubble-plus-perturbation"
    )
    dom = DomainBall.whole_space(params.N)
    seed_scale = grad_lp_norm(seed, params.p, dom, rtol=rtol)
    w_scale = grad_lp_norm(w_raw, params.p, dom, rtol=rtol)
    if w_scale < 1e-8 * seed_scale:
        raise DegeneratePerturbationError(
            "seed profile lies in the tangent span of the manifold"
        )
    return linear_combination([1.0 / w_scale], [w_raw], kind="bubble-plus-perturbation")
