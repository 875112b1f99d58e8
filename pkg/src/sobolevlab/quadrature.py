"""Adaptive quadrature helpers for radial integrals on [a, b] with b possibly infinite."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate

DEFAULT_RTOL = 1e-10
# Hard cap on function evaluations per improper integral (adaptive subdivision
# limit; QUADPACK uses 21 evaluations per interval).
_MAX_SUBINTERVALS = 400


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the achieved absolute-error estimate in ``achieved``.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved abs error ~ {achieved:.3e})")
        self.achieved = achieved


def integrate_radial(
    f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = DEFAULT_RTOL,
    breakpoints: tuple[float, ...] = (),
) -> float:
    """Integrate f over (a, b), b may be math.inf.

    Infinite upper endpoints are handled by splitting at a finite pivot and
    substituting r = pivot/t on the tail, which turns algebraic decay into a
    bounded integrand on (0, 1].  Interior breakpoints (support edges, kinks)
    are honoured so the adaptive rule never straddles a discontinuity.
    """
    if b <= a:
        return 0.0
    pts = sorted(x for x in breakpoints if a < x < b and math.isfinite(x))
    if math.isinf(b):
        pivot = max(1.0, 2.0 * a, *(2.0 * x for x in pts)) if (a > 0 or pts) else 1.0
        head = _quad(f, a, pivot, rtol, pts)
        # r = pivot/t maps t in (0,1] to r in [pivot, inf)
        tail = _quad(lambda t: f(pivot / t) * pivot / (t * t), 0.0, 1.0, rtol, [])
        return head + tail
    return _quad(f, a, b, rtol, pts)


def _quad(f, a, b, rtol, pts):
    value, err = integrate.quad(
        f,
        a,
        b,
        epsabs=0.0,
        epsrel=max(rtol, 1e-13),
        limit=_MAX_SUBINTERVALS,
        points=pts if pts else None,
    )
    scale = max(abs(value), 1e-300)
    if err > 10.0 * max(rtol * scale, 1e-15):
        raise QuadratureError(
            f"quadrature did not converge to rtol={rtol:g} on [{a:g}, {b:g}]", err
        )
    return value


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Golden-section search for a maximum of f on [lo, hi].

    Returns (argmax, max).  Assumes f is unimodal on the bracket; callers
    bracket the global maximum with a coarse scan first.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a), abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    if fc > fd:
        return c, fc
    return d, fd


def log_trapezoid_nodes(
    r_min: float, r_max: float, step: float = 0.01
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform trapezoid rule in rho = log r: nodes r_i and weights w_i.

    sum(w_i * g(r_i)) approximates the integral of g(r) dr on [r_min, r_max];
    accurate for integrands that are smooth and decay at both ends in rho.
    """
    lo, hi = math.log(r_min), math.log(r_max)
    n = max(int(math.ceil((hi - lo) / step)) + 1, 9)
    rho = np.linspace(lo, hi, n)
    r = np.exp(rho)
    w = np.full(n, rho[1] - rho[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return r, w * r
