"""Profile family generators for the experiment sweeps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .bubble import BubbleSpec, bubble_profile, bubble_value
from .norms import lq_norm
from .params import ParameterDomainError, Params
from .profiles import (
    DomainBall,
    RadialProfile,
    bump_profile,
    linear_combination,
    load_profile_csv,
    plateau_profile,
)
from .projection import make_orthogonal_perturbation
from .quadrature import DEFAULT_RTOL

logger = logging.getLogger(__name__)

KINDS = ("truncated-bubble", "perturbed-bubble", "plateau", "custom-csv")


@dataclass(frozen=True)
class FamilySpec:
    """A family kind, its parameter grid, and the problem parameters.

    Grid entries are mappings: truncated-bubble wants {lam, R}; perturbed-
    bubble wants {eps}; plateau wants {a, R}; custom-csv wants {path}.
    """

    kind: str
    params: Params
    grid: tuple
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterDomainError(f"unknown family kind {self.kind!r}; choose from {KINDS}")
        if not self.grid:
            raise ParameterDomainError("family grid must be nonempty")


@dataclass(frozen=True)
class FamilyMember:
    label: Mapping[str, float]
    profile: RadialProfile
    domain: DomainBall


@dataclass(frozen=True)
class GenerationResult:
    members: tuple[FamilyMember, ...]
    filtered: tuple[tuple[Mapping, str], ...] = field(default=())


def truncated_bubble(params: Params, lam: float, R: float, rtol: float = DEFAULT_RTOL) -> RadialProfile:
    """(U_lam - U_lam(R))_+ on B_R, renormalized to unit critical norm."""
    spec = BubbleSpec(1.0, lam)
    offset = bubble_value(params, spec, R)

    def raw_value(r):
        import numpy as np

        r = np.asarray(r, dtype=float)
        out = np.where(r < R, bubble_value(params, spec, r) - offset, 0.0)
        out = np.maximum(out, 0.0)
        return out if out.ndim else float(out)

    def raw_derivative(r):
        import numpy as np

        r = np.asarray(r, dtype=float)
        bub = bubble_profile(params, spec)
        out = np.where(r < R, bub.derivative(r), 0.0)
        return out if out.ndim else float(out)

    raw = RadialProfile(raw_value, raw_derivative, support_radius=R, kind="truncated-bubble", breakpoints=(R,))
    norm = lq_norm(raw, params.pstar, DomainBall(params.N, R), rtol=rtol)
    return RadialProfile(
        value=lambda r: raw_value(r) / norm,
        derivative=lambda r: raw_derivative(r) / norm,
        support_radius=R,
        kind="truncated-bubble",
        breakpoints=(R,),
    )


@lru_cache(maxsize=32)
def perturbation_direction(
    params: Params, inner: float = 1.0, outer: float = 2.0, rtol: float = DEFAULT_RTOL
) -> RadialProfile:
    """Unit-gradient direction orthogonal to the manifold tangent at U, from an annular bump."""
    seed = bump_profile(inner, outer)
    return make_orthogonal_perturbation(seed, params, BubbleSpec(), rtol=rtol)


def perturbed_bubble(params: Params, eps: float, rtol: float = DEFAULT_RTOL) -> RadialProfile:
    w = perturbation_direction(params, rtol=rtol)
    bub = bubble_profile(params)
    return linear_combination([1.0, eps], [bub, w], kind="bubble-plus-perturbation")


def generate_family(spec: FamilySpec, rtol: float = DEFAULT_RTOL) -> GenerationResult:
    """Instantiate every grid point; structurally invalid points are filtered with a reason."""
    members: list[FamilyMember] = []
    filtered: list[tuple[Mapping, str]] = []
    params = spec.params
    for point in spec.grid:
        try:
            if spec.kind == "truncated-bubble":
                lam, R = float(point["lam"]), float(point["R"])
                profile = truncated_bubble(params, lam, R, rtol=rtol)
                dom = DomainBall(params.N, R)
            elif spec.kind == "perturbed-bubble":
                eps = float(point["eps"])
                profile = perturbed_bubble(params, eps, rtol=rtol)
                dom = DomainBall.whole_space(params.N)
            elif spec.kind == "plateau":
                a, R = float(point["a"]), float(point["R"])
                profile = plateau_profile(float(point.get("height", 1.0)), a, R)
                dom = DomainBall(params.N, R)
            else:
                profile, meta = load_profile_csv(str(point["path"]))
                R = float(meta.get("R", profile.support_radius))
                dom = DomainBall(params.N, R if math.isfinite(R) else math.inf)
        except (ParameterDomainError, KeyError, OSError, ValueError) as exc:
            reason = f"{type(exc).__name__}: {exc}"
            logger.warning("filtered family point %s: %s", dict(point), reason)
            filtered.append((point, reason))
            continue
        members.append(FamilyMember(label=dict(point), profile=profile, domain=dom))
    return GenerationResult(members=tuple(members), filtered=tuple(filtered))


def grid_of(pairs: Sequence[Mapping[str, float]]) -> tuple:
    return tuple(dict(p) for p in pairs)
