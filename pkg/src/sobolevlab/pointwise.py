"""Algebraic vector inequalities behind the expansion bounds, with constant estimators.

Everything is reduced to the three rotation-invariant coordinates
(|x|, |y|, x.y) and evaluated in batch; estimators sweep a stratified
deterministic grid (log-spaced magnitude ratios plus adversarial corners)
and a seeded random cloud, because extremizers of these inequalities sit at
degenerate configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import ParameterDomainError


class SingularInputError(ValueError):
    """x = 0 with an exponent below 2 makes |x|^(r-2) undefined."""


class EstimationFailureError(RuntimeError):
    """A constant estimate came out nonpositive; signals a sampling or formula bug."""


@dataclass(frozen=True)
class VectorSample:
    x: tuple[float, ...]
    y: tuple[float, ...]
    r_or_p: float
    kappa: float | None = None


@dataclass(frozen=True)
class ConstantEstimate:
    name: str
    exponent: float
    kappa: float | None
    value: float
    samples: int
    worst_sample: VectorSample


def _norms(x, y):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    nx = np.linalg.norm(x, axis=-1)
    ny = np.linalg.norm(y, axis=-1)
    dot = np.sum(x * y, axis=-1)
    nxy = np.linalg.norm(x + y, axis=-1)
    return nx, ny, dot, nxy


def _pow_times(base, expo, factor):
    """base**expo * factor with the 0 * inf convention resolved to 0 for factor 0."""
    out = np.zeros_like(base)
    mask = base > 0
    out[mask] = base[mask] ** expo * factor[mask]
    if expo >= 0:
        zero = ~mask
        out[zero] = (0.0 if expo > 0 else 1.0) * factor[zero]
    return out


def taylor_upper_margin(x, y, p: float):
    """Margin of |x+y|^p <= |x|^p + p|x|^(p-2) x.y + p(p-1)/2 (|x|+|y|)^(p-2) |y|^2.

    Valid for p >= 2; returns RHS - LHS (nonnegative up to roundoff; exactly
    zero at p = 2).
    """
    if not p >= 2:
        raise ParameterDomainError(f"upper expansion bound needs p >= 2, got p={p}")
    nx, ny, dot, nxy = _norms(x, y)
    rhs = (
        nx**p
        + p * _pow_times(nx, p - 2.0, dot)
        + 0.5 * p * (p - 1.0) * (nx + ny) ** (p - 2.0) * ny**2
    )
    out = rhs - nxy**p
    return out if out.shape[0] > 1 else float(out[0])


def scalar_lower_margin(a, b, r: float):
    """Margin of |a+b|^r >= |a|^r + r|a|^(r-2) a b for scalars, r > 1."""
    if not r > 1:
        raise ParameterDomainError(f"scalar bound needs r > 1, got r={r}")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if r < 2 and np.any(a == 0.0):
        raise SingularInputError("a = 0 with r < 2 leaves |a|^(r-2) undefined")
    na = np.abs(a)
    out = np.abs(a + b) ** r - na**r - r * _pow_times(na, r - 2.0, a * b)
    return out if out.shape[0] > 1 else float(out[0])


def _omega_bar_pow(nx, nxy, r):
    """|omega_bar|^(r-2) for r > 2: |x+y|^(r-1)/|x| on {|x+y| <= |x|}, else |x|^(r-2)."""
    small = nxy <= nx
    out = np.where(small, nxy ** (r - 1.0) / np.where(nx > 0, nx, 1.0), nx ** (r - 2.0))
    return np.where(nx > 0, out, 0.0)


def _omega_tilde_pow(nx, nxy, r):
    """|omega_tilde|^(r-2) for 1 < r < 2 (x != 0)."""
    grow = nx < nxy
    denom = (2.0 - r) * nxy + (r - 1.0) * nx
    ratio = np.where(grow, nxy / np.where(denom > 0, denom, 1.0), 1.0)
    return nx ** (r - 2.0) * ratio


def quadratic_lower_margin(x, y, r: float, kappa: float, c1: float):
    """Margin (LHS - RHS) of the expansion lower bound with remainder constant c1.

    For r >= 2 the remainder term is c1 |y|^r; for 1 < r < 2 it is
    c1 min(|y|^r, |x|^(r-2)|y|^2).  r = 2 is handled as exact algebra, where
    both branches coincide and the margin is (kappa - c1) |y|^2.
    """
    if not r > 1:
        raise ParameterDomainError(f"lower expansion bound needs r > 1, got r={r}")
    if not 0.0 < kappa < 1.0:
        raise ParameterDomainError(f"kappa must lie in (0, 1), got {kappa}")
    nx, ny, dot, nxy = _norms(x, y)
    if r < 2 and np.any(nx == 0.0):
        raise SingularInputError("x = 0 with r < 2 leaves |x|^(r-2) undefined")
    lin = nx**r + r * _pow_times(nx, r - 2.0, dot)
    if abs(r - 2.0) < 1e-14:
        quad = 0.5 * (1.0 - kappa) * 2.0 * ny**2
        remainder = c1 * ny**2
        out = nxy**2 - lin - quad - remainder
        return out if out.shape[0] > 1 else float(out[0])
    if r > 2:
        wpow = _omega_bar_pow(nx, nxy, r)
        remainder = c1 * ny**r
    else:
        wpow = _omega_tilde_pow(nx, nxy, r)
        remainder = c1 * np.minimum(ny**r, nx ** (r - 2.0) * ny**2)
    quad = (
        0.5
        * (1.0 - kappa)
        * (r * _pow_times(nx, r - 2.0, ny**2) + r * (r - 2.0) * wpow * (nx - nxy) ** 2)
    )
    out = nxy**r - lin - quad - remainder
    return out if out.shape[0] > 1 else float(out[0])


def _reduced_cloud(rng: np.random.Generator, n: int):
    """Random (|y|/|x|, angle) pairs stratified over magnitude decades."""
    t = 10.0 ** rng.uniform(-4.0, 4.0, size=n)
    cos = rng.uniform(-1.0, 1.0, size=n)
    return t, cos


def _reduced_grid():
    t = np.geomspace(1e-4, 1e4, 601)
    cos = np.cos(np.linspace(0.0, math.pi, 181))
    tt, cc = np.meshgrid(t, cos)
    # adversarial corners: y close to -x, y close to -2x, |y| >> |x|
    t_adv = np.concatenate(
        [np.linspace(0.5, 2.5, 401), np.linspace(0.9, 1.1, 201), np.geomspace(2.0, 50.0, 201)]
    )
    tt = np.concatenate([tt.ravel(), t_adv])
    cc = np.concatenate([cc.ravel(), np.full(t_adv.shape, -1.0)])
    return tt, cc


def _pairs_from_reduced(t, cos):
    """Vectors x = (1, 0), y = t (cos, sin); every (x, y) reduces to this by rotation."""
    sin = np.sqrt(np.clip(1.0 - cos**2, 0.0, 1.0))
    x = np.stack([np.ones_like(t), np.zeros_like(t)], axis=-1)
    y = np.stack([t * cos, t * sin], axis=-1)
    return x, y


@lru_cache(maxsize=64)
def estimate_taylor_upper_const(
    p: float, n_samples: int = 10**6, seed: int = 0
) -> ConstantEstimate:
    """Least admissible gamma_p for |x+y|^p <= |x|^p + p|x|^(p-2) x.y + gamma_p |y|^p.

    1 < p < 2.  Supremum of the defect ratio over the deterministic grid and a
    seeded random cloud, returned with a +0.1% safety margin.
    """
    if not 1.0 < p < 2.0:
        raise ParameterDomainError(f"gamma_p estimation needs 1 < p < 2, got p={p}")
    rng = np.random.default_rng(seed)
    tg, cg = _reduced_grid()
    tr, cr = _reduced_cloud(rng, n_samples)
    t = np.concatenate([tg, tr])
    cos = np.concatenate([cg, cr])
    x, y = _pairs_from_reduced(t, cos)
    nx, ny, dot, nxy = _norms(x, y)
    ratio = (nxy**p - nx**p - p * _pow_times(nx, p - 2.0, dot)) / ny**p
    k = int(np.argmax(ratio))
    worst = VectorSample(x=tuple(x[k]), y=tuple(y[k]), r_or_p=p)
    return ConstantEstimate(
        name="gamma_p",
        exponent=p,
        kappa=None,
        value=float(ratio[k]) * (1.0 + 1e-3),
        samples=int(t.size),
        worst_sample=worst,
    )


@lru_cache(maxsize=256)
def estimate_quadratic_lower_const(
    r: float, kappa: float, n_samples: int = 10**6, seed: int = 0
) -> ConstantEstimate:
    """Largest safe remainder constant C1(r, kappa) for the expansion lower bound.

    Infimum over the sample cloud of the slack left after the quadratic terms,
    divided by the branch's remainder denominator, shaved by 0.1%.  The
    underlying inequality guarantees positivity; a nonpositive estimate is an
    error, not a value.
    """
    if not r > 1:
        raise ParameterDomainError(f"C1 estimation needs r > 1, got r={r}")
    if not 0.0 < kappa < 1.0:
        raise ParameterDomainError(f"kappa must lie in (0, 1), got {kappa}")
    rng = np.random.default_rng(seed)
    tg, cg = _reduced_grid()
    tr, cr = _reduced_cloud(rng, n_samples)
    t = np.concatenate([tg, tr])
    cos = np.concatenate([cg, cr])
    x, y = _pairs_from_reduced(t, cos)
    slack = quadratic_lower_margin(x, y, r, kappa, 0.0)
    nx, ny, _, _ = _norms(x, y)
    if abs(r - 2.0) < 1e-14:
        denom = ny**2
    elif r > 2:
        denom = ny**r
    else:
        denom = np.minimum(ny**r, nx ** (r - 2.0) * ny**2)
    ratio = slack / denom
    k = int(np.argmin(ratio))
    value = float(ratio[k]) * (1.0 - 1e-3)
    if not value > 0.0:
        raise EstimationFailureError(
            f"estimated C1({r}, {kappa}) = {value:.3e} is not positive; "
            "the lower bound guarantees a positive constant"
        )
    worst = VectorSample(x=tuple(x[k]), y=tuple(y[k]), r_or_p=r, kappa=kappa)
    return ConstantEstimate(
        name="C1",
        exponent=r,
        kappa=kappa,
        value=value,
        samples=int(t.size),
        worst_sample=worst,
    )


def random_vector_pairs(rng: np.random.Generator, n: int, dim: int):
    """Gaussian sample pairs for sweep verification."""
    return rng.standard_normal((n, dim)), rng.standard_normal((n, dim))
