"""Lebesgue, gradient, and weak norms of radial profiles by adaptive quadrature.

The weak s-norm is the averaged form
    sup over subsets D of the domain of |D|^(-(s-1)/s) * integral_D |u|,
which for radially nonincreasing u is attained on centered balls (bathtub
principle), so the supremum reduces to a one-dimensional maximization over
the ball radius.  Non-monotone inputs are rearranged first; the weak norm is
invariant under that replacement by equimeasurability.
"""

from __future__ import annotations

import math

import numpy as np

from .params import ParameterDomainError, ball_volume, sphere_measure
from .profiles import DomainBall, RadialProfile
from .quadrature import DEFAULT_RTOL, golden_max, integrate_radial

# Sustained relative growth of the weak-norm objective across this many
# trailing decades of ball radius flags an unbounded supremum.
_GROWTH_DECADES = 6
_GROWTH_FACTOR = 1.02


def _upper_limit(u: RadialProfile, dom: DomainBall) -> float:
    return min(dom.R, u.support_radius)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _piecewise_gauss(fn, knots: tuple[float, ...], hi: float) -> float:
    """Composite 12-point Gauss-Legendre over interpolation intervals up to hi.

    Sampled profiles are piecewise cubics; per-interval Gauss keeps the
    hundreds of C^0 interpolation corners out of any single panel, which
    adaptive quadrature cannot resolve to tight tolerances.
    """
    edges = np.asarray([k for k in knots if k < hi] + [hi], dtype=float)
    a, b = edges[:-1], edges[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * vals))


def lq_integral_norm(
    u: RadialProfile, q: float, dom: DomainBall, rtol: float = DEFAULT_RTOL
) -> float:
    """(integral over the ball of |u|^q)^(1/q) for any q > 0 (quasi-norm below 1)."""
    if not q > 0:
        raise ParameterDomainError(f"integral exponent must be positive, got q={q}")
    hi = _upper_limit(u, dom)
    N = dom.N
    if u.knots is not None and math.isfinite(hi):
        power = sphere_measure(N) * _piecewise_gauss(
            lambda r: np.abs(np.asarray(u.value(r), dtype=float)) ** q * r ** (N - 1),
            u.knots,
            hi,
        )
        return power ** (1.0 / q)

    def integrand(r):
        return abs(float(u.value(r))) ** q * r ** (N - 1)

    power = sphere_measure(N) * integrate_radial(
        integrand, 0.0, hi, rtol=rtol, breakpoints=u.breakpoints
    )
    return power ** (1.0 / q)


def lq_norm(u: RadialProfile, q: float, dom: DomainBall, rtol: float = DEFAULT_RTOL) -> float:
    """The L^q norm on the domain ball; requires q >= 1."""
    if not q >= 1:
        raise ParameterDomainError(f"norm exponent must satisfy q >= 1, got q={q}")
    return lq_integral_norm(u, q, dom, rtol)


def grad_lp_norm(
    u: RadialProfile, p: float, dom: DomainBall, rtol: float = DEFAULT_RTOL
) -> float:
    """The L^p norm of the radial derivative over the domain ball."""
    if u.derivative is None:
        raise ParameterDomainError("profile has no derivative; gradient norm undefined")
    if not p >= 1:
        raise ParameterDomainError(f"gradient exponent must satisfy p >= 1, got p={p}")
    hi = _upper_limit(u, dom)
    N = dom.N
    if u.knots is not None and math.isfinite(hi):
        power = sphere_measure(N) * _piecewise_gauss(
            lambda r: np.abs(np.asarray(u.derivative(r), dtype=float)) ** p * r ** (N - 1),
            u.knots,
            hi,
        )
        return power ** (1.0 / p)

    def integrand(r):
        return abs(float(u.derivative(r))) ** p * r ** (N - 1)

    power = sphere_measure(N) * integrate_radial(
        integrand, 0.0, hi, rtol=rtol, breakpoints=u.breakpoints
    )
    return power ** (1.0 / p)


def _is_nonincreasing(u: RadialProfile, hi: float) -> bool:
    r = np.linspace(0.0, hi, 513)
    v = np.asarray(u.value(r), dtype=float)
    vmax = float(np.max(np.abs(v))) or 1.0
    return bool(np.all(np.diff(v) <= 1e-9 * vmax))


def _check_nonnegative(u: RadialProfile, hi: float) -> None:
    r = np.linspace(0.0, hi, 513)
    v = np.asarray(u.value(r), dtype=float)
    vmax = float(np.max(np.abs(v))) or 1.0
    if float(np.min(v)) < -1e-12 * vmax:
        raise ParameterDomainError("weak norm requires a nonnegative profile")


class _BallAverage:
    """Objective t -> |B_t|^(-(s-1)/s) * integral_{B_t} u with cached cumulative mass."""

    def __init__(self, u: RadialProfile, s: float, N: int, rtol: float):
        self.u = u
        self.s = s
        self.N = N
        self.rtol = rtol
        self.sphere = sphere_measure(N)
        self._knots = [0.0]
        self._mass = [0.0]

    def _segment(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        breaks = tuple(x for x in self.u.breakpoints if a < x < b)
        return self.sphere * integrate_radial(
            lambda r: float(self.u.value(r)) * r ** (self.N - 1),
            a,
            b,
            rtol=self.rtol,
            breakpoints=breaks,
        )

    def mass_at(self, t: float) -> float:
        # extend the cached cumulative integral to t
        if t > self._knots[-1]:
            self._mass.append(self._mass[-1] + self._segment(self._knots[-1], t))
            self._knots.append(t)
            return self._mass[-1]
        idx = int(np.searchsorted(self._knots, t))
        lo = self._knots[idx - 1]
        return self._mass[idx - 1] + self._segment(lo, t)

    def __call__(self, t: float) -> float:
        vol = ball_volume(self.N, t)
        if vol <= 0.0:
            return 0.0
        return vol ** (-(self.s - 1.0) / self.s) * self.mass_at(t)


def weak_norm(
    u: RadialProfile, s: float, dom: DomainBall, rtol: float = DEFAULT_RTOL
) -> float:
    """The averaged weak s-norm over the domain ball; s > 1 required.

    Radially nonincreasing profiles are maximized over centered-ball radii by
    a coarse logarithmic scan followed by golden-section refinement; other
    profiles are rearranged first.  Over the whole space the objective is
    scanned out to 1e8; sustained monotone growth across the trailing decades
    returns math.inf rather than a large float.
    """
    if not s > 1.0:
        raise ParameterDomainError(
            f"weak norm needs s > 1 (it is no norm below that), got s={s}"
        )
    hi = _upper_limit(u, dom)
    scan_hi = hi if math.isfinite(hi) else 1e8
    _check_nonnegative(u, min(scan_hi, hi))
    if not _is_nonincreasing(u, min(scan_hi, 4.0 * _finite_scale(u))):
        from .rearrangement import rearrange

        u = rearrange(u, dom)
        hi = _upper_limit(u, dom)
        scan_hi = hi if math.isfinite(hi) else 1e8

    objective = _BallAverage(u, s, dom.N, rtol)
    scan_lo = scan_hi * 1e-8 if math.isfinite(hi) else 1e-6
    n_per_decade = 32
    n = max(int(math.log10(scan_hi / scan_lo) * n_per_decade) + 1, 64)
    grid = np.geomspace(scan_lo, scan_hi, n)
    vals = np.array([objective(t) for t in grid])

    if not math.isfinite(hi):
        decade_marks = 10.0 ** np.arange(
            math.floor(math.log10(scan_hi)) - _GROWTH_DECADES,
            math.floor(math.log10(scan_hi)) + 1,
        )
        decade_vals = [objective(t) for t in decade_marks]
        ratios = [b / a for a, b in zip(decade_vals, decade_vals[1:]) if a > 0]
        if ratios and all(rat > _GROWTH_FACTOR for rat in ratios):
            return math.inf

    k = int(np.argmax(vals))
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, n - 1)]
    _, best = golden_max(
        lambda x: objective(math.exp(x)), math.log(lo_b), math.log(hi_b), tol=1e-12
    )
    return max(best, float(vals[k]))


def _finite_scale(u: RadialProfile) -> float:
    if math.isfinite(u.support_radius):
        return u.support_radius
    return 1.0


def weak_norm_grid_max(
    u: RadialProfile, s: float, dom: DomainBall, n: int = 10**4, rtol: float = DEFAULT_RTOL
) -> float:
    """Brute-force maximum of the ball objective over n log-spaced radii.

    Independent cross-check for weak_norm on finite domains.
    """
    hi = _upper_limit(u, dom)
    if not math.isfinite(hi):
        raise ParameterDomainError("grid oracle needs a finite domain")
    objective = _BallAverage(u, s, dom.N, rtol)
    grid = np.geomspace(hi * 1e-8, hi, n)
    return max(objective(t) for t in grid)


def weak_norm_holder_bound(
    u: RadialProfile, dom: DomainBall, params, rtol: float = DEFAULT_RTOL
) -> tuple[float, float]:
    """Both sides of weak-pbar norm <= ||u||_{p*} |Omega|^(1/(p pbar))."""
    if not params.weak_norm_valid:
        raise ParameterDomainError(
            f"weak norm bound needs pbar > 1, got pbar={params.pbar}"
        )
    lhs = weak_norm(u, params.pbar, dom, rtol=rtol)
    rhs = lq_norm(u, params.pstar, dom, rtol=rtol) * dom.measure ** (
        1.0 / (params.p * params.pbar)
    )
    return lhs, rhs


def weak_to_strong(
    u: RadialProfile, t: float, s: float, dom: DomainBall, rtol: float = DEFAULT_RTOL
) -> tuple[float, float]:
    """L^t norm and its weak-norm bound (s/(s-t))^(1/t) |Omega|^((s-t)/(st)) ||u||_{s,w}.

    Valid for 0 < t < s, s > 1, finite domain measure.
    """
    if not (0.0 < t < s):
        raise ParameterDomainError(f"need 0 < t < s, got t={t}, s={s}")
    if not s > 1.0:
        raise ParameterDomainError(f"need s > 1, got s={s}")
    if not math.isfinite(dom.measure):
        raise ParameterDomainError("weak-to-strong comparison needs |Omega| < inf")
    lhs = lq_integral_norm(u, t, dom, rtol=rtol)
    rhs = (
        (s / (s - t)) ** (1.0 / t)
        * dom.measure ** ((s - t) / (s * t))
        * weak_norm(u, s, dom, rtol=rtol)
    )
    return lhs, rhs
