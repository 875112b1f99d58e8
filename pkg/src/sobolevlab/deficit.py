"""Deficit functional, remainder right-hand sides, proof constants, and chain checks.

The deficit of a profile u on a domain is
    ||grad u||_p^p - S^p ||u||_{p*}^p,
nonnegative by the sharp inequality and zero exactly on the extremal
manifold.  The verifiers here evaluate the lower remainder bound with the
weak norm, its Lebesgue-norm corollary, the distance upper cap, the explicit
constants of the weak-norm-versus-distance lemma, and the near-manifold
expansion bounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .bubble import BubbleSpec, bubble_constants, normalization_gamma, tail_integral
from .norms import grad_lp_norm, lq_integral_norm, lq_norm, weak_norm
from .params import ParameterDomainError, Params, sphere_measure
from .profiles import DomainBall, RadialProfile
from .projection import Decomposition, ProjectionResult, decomposition_profile, orthogonality_residuals, project
from .quadrature import DEFAULT_RTOL

logger = logging.getLogger(__name__)

# Operationalization of the small-deficit hypothesis: deficit < SMALLNESS * S^p.
SMALLNESS = 0.1

TAIL_CONSTANT_NOTE = (
    "tail bound bookkeeping: the exact integral of r^(-N/(p-1)-1) from a to "
    "infinity equals (p-1)/N * a^(-N/(p-1)), while the displayed chain "
    "constant carries the factor N/(p-1); the checker uses the exact integral "
    "for the inequality and reports both factors."
)


class HypothesisError(ValueError):
    """A verifier was called on a profile violating the stated hypotheses."""


@dataclass(frozen=True)
class ProofConstants:
    """Explicit constants of the weak-norm-versus-distance chain."""

    c0: float
    C0: float
    rho: float
    C_under: float
    B: float


@dataclass(frozen=True)
class DeficitReport:
    """All functionals of one profile, ready for a CSV row."""

    grad_p: float
    crit: float
    weak: float
    deficit: float
    remainder_weak: float
    remainder_cap: float
    distance: float
    ratios: dict = field(default_factory=dict)


def deficit(u: RadialProfile, dom: DomainBall, params: Params, rtol: float = DEFAULT_RTOL) -> float:
    """||grad u||_p^p - S^p ||u||_{p*}^p, clamped at tiny negative quadrature noise."""
    consts = bubble_constants(params)
    grad = grad_lp_norm(u, params.p, dom, rtol=rtol)
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    value = grad**params.p - consts.sharp_constant**params.p * crit**params.p
    if value < 0.0:
        floor = -1e-10 * grad**params.p
        if value < floor:
            raise HypothesisError(
                f"deficit {value:.3e} is negative beyond quadrature noise ({floor:.3e}); "
                "the sharp inequality must hold"
            )
        logger.debug("clamping tiny negative deficit %.3e to 0", value)
        value = 0.0
    return value


def weak_remainder(
    u: RadialProfile, dom: DomainBall, params: Params, rtol: float = DEFAULT_RTOL
) -> float:
    """|Omega|^(-gamma/(p*(p-1))) * ||u||_{pbar,w}^gamma * ||u||_{p*}^(p-gamma).

    The weak-norm remainder; requires pbar > 1 and a finite domain.
    """
    if not params.weak_norm_valid:
        raise HypothesisError(
            f"weak remainder needs p > 2N/(N+1) = {2 * params.N / (params.N + 1):.6g}, "
            f"got p = {params.p}"
        )
    if not math.isfinite(dom.measure):
        raise HypothesisError("weak remainder needs |Omega| < inf")
    weak = weak_norm(u, params.pbar, dom, rtol=rtol)
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    g = params.gamma
    expo = -g / (params.pstar * (params.p - 1.0))
    return dom.measure**expo * weak**g * crit ** (params.p - g)


def lebesgue_remainder(
    u: RadialProfile, t: float, dom: DomainBall, params: Params, rtol: float = DEFAULT_RTOL
) -> float:
    """|Omega|^(-gamma(p*-t)/(t p*)) * ||u||_t^gamma * ||u||_{p*}^(p-gamma) for 0 < t < pbar."""
    if not 0.0 < t < params.pbar:
        raise ParameterDomainError(
            f"Lebesgue remainder needs 0 < t < pbar = {params.pbar:.6g}, got t={t}"
        )
    if not math.isfinite(dom.measure):
        raise HypothesisError("Lebesgue remainder needs |Omega| < inf")
    lt = lq_integral_norm(u, t, dom, rtol=rtol)
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    g = params.gamma
    expo = -g * (params.pstar - t) / (t * params.pstar)
    return dom.measure**expo * lt**g * crit ** (params.p - g)


def stability_functionals(
    u: RadialProfile,
    params: Params,
    result: ProjectionResult | None = None,
    rtol: float = DEFAULT_RTOL,
) -> tuple[float, float, float, float]:
    """Both whole-space stability functionals built from the manifold distance.

    Returns (gap, gap_bound, deficit_value, deficit_bound) where
      gap          = ||grad u||/||u||_{p*} - S,
      gap_bound    = (d / ||grad u||)^gamma    (lower bound without its constant),
      deficit_value = ||grad u||^p - S^p ||u||^p,
      deficit_bound = d^gamma ||grad u||^(p-gamma).
    Ratios are undefined at d = 0; callers filter manifold points.
    """
    dom = DomainBall.whole_space(params.N)
    consts = bubble_constants(params)
    grad = grad_lp_norm(u, params.p, dom, rtol=rtol)
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    res = result if result is not None else project(u, params)
    d = res.distance
    gap = grad / crit - consts.sharp_constant
    g = params.gamma
    return gap, (d / grad) ** g, deficit(u, dom, params, rtol=rtol), d**g * grad ** (params.p - g)


def distance_cap(
    u: RadialProfile,
    params: Params,
    result: ProjectionResult | None = None,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """d^zeta * ||grad u||^(p-zeta): the upper-bound cap without its constant."""
    dom = DomainBall.whole_space(params.N)
    res = result if result is not None else project(u, params)
    grad = grad_lp_norm(u, params.p, dom, rtol=rtol)
    return res.distance**params.zeta * grad ** (params.p - params.zeta)


def proof_constants(params: Params, c0: float, C0: float, rtol: float = DEFAULT_RTOL) -> ProofConstants:
    """The explicit chain constants rho, C_under, B from the gradient-norm window [c0, C0].

    rho solves  rho ||grad U|| / ((c0 - rho) S) = gamma_norm (|S^(N-1)| T(1))^(1/p*)
    in closed form rho = c0 K / (1 + K); C_under and B follow their displayed
    formulas.  The window endpoints are the min/max gradient norms of the
    family under test.
    """
    if not 0.0 < c0 <= C0:
        raise ParameterDomainError(f"need 0 < c0 <= C0, got c0={c0}, C0={C0}")
    if not params.weak_norm_valid:
        raise HypothesisError("the chain constants need the weak norm of U finite (pbar > 1)")
    consts = bubble_constants(params)
    sm = sphere_measure(params.N)
    gamma = normalization_gamma(params)
    S = consts.sharp_constant
    K = S * gamma * (sm * tail_integral(params, 1.0, rtol=rtol)) ** (1.0 / params.pstar) / consts.grad_norm
    rho = c0 * K / (1.0 + K)
    c_under = (
        (c0 - rho)
        * S
        * gamma
        / consts.grad_norm
        * (2.0 ** (-params.N) * sm * params.N / (params.p - 1.0)) ** (1.0 / params.pstar)
    )
    b = (C0 + rho) * consts.weak_norm / (
        c_under
        * sm ** (1.0 / (params.pstar * (params.p - 1.0)))
        * S ** (params.pstar / (params.pstar - params.p))
    ) + 1.0 / S
    return ProofConstants(c0=c0, C0=C0, rho=rho, C_under=c_under, B=b)


def weak_norm_distance_check(
    u: RadialProfile,
    dom: DomainBall,
    params: Params,
    consts: ProofConstants,
    rtol: float = DEFAULT_RTOL,
    result: ProjectionResult | None = None,
) -> tuple[float, float, bool]:
    """Check ||u||_{pbar,w} <= B |B_R|^(1/(p*(p-1))) * distance(u) on its hypothesis class.

    Hypotheses: u nonnegative, radially nonincreasing, supported in the ball,
    unit critical norm, deficit < SMALLNESS * S^p.  Violations raise
    HypothesisError naming the failed condition.
    """
    if not math.isfinite(dom.measure):
        raise HypothesisError("the weak-norm-versus-distance bound needs a finite ball")
    if u.support_radius > dom.R * (1.0 + 1e-12):
        raise HypothesisError("profile must be supported in the closed ball")
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    if abs(crit - 1.0) > 1e-6:
        raise HypothesisError(f"profile must have unit critical norm, got {crit:.8f}")
    sharp = bubble_constants(params).sharp_constant
    small = deficit(u, dom, params, rtol=rtol)
    if not small < SMALLNESS * sharp**params.p:
        raise HypothesisError(
            f"deficit {small:.4e} violates the smallness condition "
            f"< {SMALLNESS:.2f} * S^p = {SMALLNESS * sharp ** params.p:.4e}"
        )
    lhs = weak_norm(u, params.pbar, dom, rtol=rtol)
    res = result if result is not None else project(u, params)
    expo = 1.0 / (params.pstar * (params.p - 1.0))
    rhs = consts.B * dom.measure**expo * res.distance
    return lhs, rhs, bool(lhs <= rhs)


def tail_lower_bound_check(
    params: Params, lam: float, R: float, rtol: float = DEFAULT_RTOL
) -> tuple[float, float, bool]:
    """Exact critical-norm tail of U_lam outside B_R against its power lower bound.

    Returns (exact, bound, hypothesis_ok) where
      exact = gamma^p* |S^(N-1)| T(lam R)   (the tail of ||U_lam||_{p*}^{p*}),
      bound = 2^-N gamma^p* |S^(N-1)| * (p-1)/N * (lam R)^(-N/(p-1)),
    using the closed-form integral of r^(-N/(p-1)-1); see TAIL_CONSTANT_NOTE.
    Requires lam * R >= 1 (the bound's integrand comparison needs r >= 1).
    """
    a = lam * R
    if not a >= 1.0:
        raise HypothesisError(f"tail bound needs lam * R >= 1, got {a}")
    gamma = normalization_gamma(params)
    sm = sphere_measure(params.N)
    scale = gamma**params.pstar * sm
    exact = scale * tail_integral(params, a, rtol=rtol)
    closed = (params.p - 1.0) / params.N * a ** (-params.N / (params.p - 1.0))
    bound = 2.0 ** (-params.N) * scale * closed
    return exact, bound, True


def unit_lower_bound_crit(dec: Decomposition, rtol: float = DEFAULT_RTOL) -> tuple[float, float]:
    """||u||_{p*}^p >= |c|^p ||U||_{p*}^p for an orthogonal decomposition."""
    params = dec.params
    u = decomposition_profile(dec)
    dom = DomainBall.whole_space(params.N)
    lhs = lq_norm(u, params.pstar, dom, rtol=rtol) ** params.p
    rhs = (abs(dec.bubble.c) * bubble_constants(params).crit_norm) ** params.p
    return lhs, rhs


def upper_expansion_bound(
    dec: Decomposition, rtol: float = DEFAULT_RTOL, residual_tol: float = 1e-4
) -> tuple[float, float]:
    """Deficit of c U_lam + d w against the near-manifold expansion bound.

    For p >= 2 the bound is p(p-1)/2 * 2^((p-1)(p-2)/p) *
    (|c|^p ||grad U||^p + d^p)^((p-2)/p) * d^2 (cross term killed by
    orthogonality); for 1 < p < 2 it is gamma_p d^p with the estimated
    constant.  Requires the orthogonality residuals below residual_tol.
    """
    params = dec.params
    r1, r2 = orthogonality_residuals(dec, rtol=rtol)
    if max(abs(r1), abs(r2)) > residual_tol:
        raise HypothesisError(
            f"decomposition direction is not orthogonal (residuals {r1:.2e}, {r2:.2e})"
        )
    u = decomposition_profile(dec)
    dom = DomainBall.whole_space(params.N)
    value = deficit(u, dom, params, rtol=rtol)
    consts = bubble_constants(params)
    c, d, p = dec.bubble.c, dec.d, params.p
    if p >= 2.0:
        base = abs(c) ** p * consts.grad_norm**p + d**p
        bound = 0.5 * p * (p - 1.0) * 2.0 ** ((p - 1.0) * (p - 2.0) / p) * base ** ((p - 2.0) / p) * d**2
    else:
        from .pointwise import estimate_taylor_upper_const

        bound = estimate_taylor_upper_const(p).value * d**p
    return value, bound


def build_report(
    u: RadialProfile,
    dom: DomainBall,
    params: Params,
    rtol: float = DEFAULT_RTOL,
    with_projection: bool = True,
) -> DeficitReport:
    """Evaluate every functional of one profile; entries that do not apply are nan."""
    grad = grad_lp_norm(u, params.p, dom, rtol=rtol)
    crit = lq_norm(u, params.pstar, dom, rtol=rtol)
    value = deficit(u, dom, params, rtol=rtol)
    weak = math.nan
    rem = math.nan
    ratios: dict = {}
    if params.weak_norm_valid and math.isfinite(dom.measure):
        weak = weak_norm(u, params.pbar, dom, rtol=rtol)
        rem = weak_remainder(u, dom, params, rtol=rtol)
        if rem > 0:
            ratios["weak_remainder"] = value / rem
    distance = math.nan
    cap = math.nan
    if with_projection:
        res = project(u, params)
        distance = res.distance
        cap = distance**params.zeta * grad ** (params.p - params.zeta)
        if cap > 0:
            ratios["distance_cap"] = value / cap
        bound = distance**params.gamma * grad ** (params.p - params.gamma)
        if bound > 0:
            ratios["distance_floor"] = value / bound
    return DeficitReport(
        grad_p=grad,
        crit=crit,
        weak=weak,
        deficit=value,
        remainder_weak=rem,
        remainder_cap=cap,
        distance=distance,
        ratios=ratios,
    )
