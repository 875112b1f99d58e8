"""Radial profiles on [0, inf): the universal function representation.

A profile is an evaluable value map, an optional derivative map, a support
radius, and a kind tag.  Analytic profiles wrap closed-form callables;
sampled profiles interpolate a strictly increasing radius grid with a
monotone-preserving (PCHIP) interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .params import ParameterDomainError, ball_volume


@dataclass(frozen=True)
class DomainBall:
    """Centered ball B_R in R^N; R = inf means the whole space."""

    N: int
    R: float

    def __post_init__(self):
        if not (self.R > 0):
            raise ParameterDomainError(f"ball radius must be positive, got {self.R}")

    @property
    def measure(self) -> float:
        return ball_volume(self.N, self.R)

    @classmethod
    def whole_space(cls, N: int) -> "DomainBall":
        return cls(N=N, R=math.inf)


@dataclass(frozen=True)
class RadialProfile:
    """Nonnegative-or-signed radial function r -> value(r) with derivative.

    value and derivative accept scalars or numpy arrays.  value(r) must be 0
    for r >= support_radius when the support is finite; breakpoints list radii
    where the profile (or its derivative) is allowed to be non-smooth, so that
    quadrature never straddles a kink.
    """

    value: Callable
    derivative: Callable | None
    support_radius: float = math.inf
    kind: str = "analytic-bubble"
    breakpoints: tuple[float, ...] = field(default=())
    # interpolation grid of sampled profiles; norm integrals go piecewise over it
    knots: tuple[float, ...] | None = None

    def __call__(self, r):
        return self.value(r)

    def with_kind(self, kind: str) -> "RadialProfile":
        return replace(self, kind=kind)


def sampled_profile(
    radii: Sequence[float], values: Sequence[float], derivs: Sequence[float] | None = None
) -> RadialProfile:
    """Build a sampled profile from a strictly increasing radius grid.

    Interpolation is PCHIP (continuous, monotone-preserving on monotone data).
    The profile is clamped to values[0] below the grid and to 0 beyond the
    last radius.
    """
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0):
        raise ValueError("sampled profiles need a strictly increasing radius grid")
    if v.shape != r.shape:
        raise ValueError("radius and value arrays must have equal length")
    interp = PchipInterpolator(r, v, extrapolate=False)
    dinterp = (
        PchipInterpolator(r, np.asarray(derivs, dtype=float), extrapolate=False)
        if derivs is not None
        else interp.derivative()
    )
    r_lo, r_hi = float(r[0]), float(r[-1])
    v_lo = float(v[0])

    def value(x):
        x = np.asarray(x, dtype=float)
        out = interp(np.clip(x, r_lo, r_hi))
        out = np.where(x < r_lo, v_lo, out)
        out = np.where(x > r_hi, 0.0, out)
        return out if out.ndim else float(out)

    def derivative(x):
        x = np.asarray(x, dtype=float)
        out = dinterp(np.clip(x, r_lo, r_hi))
        out = np.where((x < r_lo) | (x > r_hi), 0.0, out)
        return out if out.ndim else float(out)

    return RadialProfile(
        value=value,
        derivative=derivative,
        support_radius=r_hi,
        kind="sampled",
        breakpoints=(r_hi,),
        knots=tuple(float(x) for x in r),
    )


def constant_profile(level: float, R: float) -> RadialProfile:
    """level on [0, R), zero beyond."""

    def value(r):
        r = np.asarray(r, dtype=float)
        out = np.where(r < R, level, 0.0)
        return out if out.ndim else float(out)

    def derivative(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        return out if out.ndim else float(out)

    return RadialProfile(value, derivative, support_radius=R, kind="sampled", breakpoints=(R,))


def bump_profile(a: float, b: float, height: float = 1.0) -> RadialProfile:
    """Smooth bump supported on the annulus a < r < b, all derivatives vanish at edges."""
    if not 0 <= a < b:
        raise ValueError("bump needs 0 <= a < b")
    mid = (a + b) / 2.0
    peak = math.exp(-1.0 / ((mid - a) * (b - mid)))

    def value(r):
        r = np.asarray(r, dtype=float)
        inside = (r > a) & (r < b)
        phi = np.where(inside, (r - a) * (b - r), 1.0)
        out = np.where(inside, np.exp(-1.0 / phi), 0.0) * (height / peak)
        return out if out.ndim else float(out)

    def derivative(r):
        r = np.asarray(r, dtype=float)
        inside = (r > a) & (r < b)
        phi = np.where(inside, (r - a) * (b - r), 1.0)
        dphi = a + b - 2.0 * r
        out = np.where(inside, np.exp(-1.0 / phi) * dphi / phi**2, 0.0) * (height / peak)
        return out if out.ndim else float(out)

    return RadialProfile(value, derivative, support_radius=b, kind="sampled", breakpoints=(a, b))


def plateau_profile(height: float, a: float, R: float) -> RadialProfile:
    """height on [0, a], smooth monotone decay to 0 at R (C^inf transition)."""
    if not 0 < a < R:
        raise ValueError("plateau needs 0 < a < R")

    def _sig(t):
        # exp(-1/t) extended by 0 at t <= 0
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        return np.where(t > 0, np.exp(-1.0 / safe), 0.0)

    def value(r):
        r = np.asarray(r, dtype=float)
        t = (r - a) / (R - a)
        s0, s1 = _sig(1.0 - t), _sig(t)
        out = height * s0 / (s0 + s1 + 1e-300)
        out = np.where(r <= a, height, out)
        out = np.where(r >= R, 0.0, out)
        return out if out.ndim else float(out)

    def derivative(r):
        r = np.asarray(r, dtype=float)
        t = (r - a) / (R - a)
        inside = (t > 0) & (t < 1)
        ts = np.where(inside, t, 0.5)
        s0, s1 = _sig(1.0 - ts), _sig(ts)
        ds1 = s1 / ts**2
        ds0 = -s0 / (1.0 - ts) ** 2
        tot = s0 + s1
        out = height * (ds0 * tot - s0 * (ds0 + ds1)) / tot**2 / (R - a)
        out = np.where(inside, out, 0.0)
        return out if out.ndim else float(out)

    return RadialProfile(value, derivative, support_radius=R, kind="sampled", breakpoints=(a, R))


def linear_combination(
    coeffs: Sequence[float], profiles: Sequence[RadialProfile], kind: str = "bubble-plus-perturbation"
) -> RadialProfile:
    """Pointwise sum(c_i * u_i) with the induced derivative and support."""
    coeffs = [float(c) for c in coeffs]
    if len(coeffs) != len(profiles):
        raise ValueError("one coefficient per profile required")

    def value(r):
        return sum(c * u.value(r) for c, u in zip(coeffs, profiles))

    derivative = None
    if all(u.derivative is not None for u in profiles):

        def derivative(r):
            return sum(c * u.derivative(r) for c, u in zip(coeffs, profiles))

    support = max(u.support_radius for u in profiles)
    breaks = tuple(sorted({b for u in profiles for b in u.breakpoints}))
    return RadialProfile(value, derivative, support_radius=support, kind=kind, breakpoints=breaks)


def scale_profile(alpha: float, u: RadialProfile) -> RadialProfile:
    return linear_combination([alpha], [u], kind=u.kind)


def save_profile_csv(
    path: str,
    profile: RadialProfile,
    N: int,
    p: float,
    R: float,
    radii: Sequence[float] | None = None,
    with_derivative: bool = True,
) -> None:
    """Write a profile as CSV rows radius,value[,derivative] under a `# N= p= R=` header."""
    if radii is None:
        r_max = R if math.isfinite(R) else min(profile.support_radius, 1e3)
        if not math.isfinite(r_max):
            raise ValueError("need a finite radius range to sample the profile")
        radii = np.linspace(0.0, r_max, 2049)
    radii = np.asarray(radii, dtype=float)
    vals = np.asarray(profile.value(radii), dtype=float)
    lines = [f"# N={N} p={p:.17g} R={R:.17g}"]
    if with_derivative and profile.derivative is not None:
        dvals = np.asarray(profile.derivative(radii), dtype=float)
        for r, v, dv in zip(radii, vals, dvals):
            lines.append(f"{r:.17e},{v:.17e},{dv:.17e}")
    else:
        for r, v in zip(radii, vals):
            lines.append(f"{r:.17e},{v:.17e}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def load_profile_csv(path: str) -> tuple[RadialProfile, dict]:
    """Read a profile written by save_profile_csv; returns (profile, header meta)."""
    meta: dict = {}
    radii: list[float] = []
    vals: list[float] = []
    derivs: list[float] = []
    has_deriv = None
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        key, _, raw = tok.partition("=")
                        meta[key] = int(raw) if key == "N" else float(raw)
                continue
            parts = line.split(",")
            if has_deriv is None:
                has_deriv = len(parts) >= 3
            radii.append(float(parts[0]))
            vals.append(float(parts[1]))
            if has_deriv:
                derivs.append(float(parts[2]))
    profile = sampled_profile(radii, vals, derivs if has_deriv else None)
    return profile, meta
