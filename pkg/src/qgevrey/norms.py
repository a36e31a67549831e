"""Weighted sup-norm estimation on sector and disc grids, and
factorial-envelope fits of the resulting order-by-order values.

The outer norm measures a coefficient on a tau-sector outside its
shrinking outer radius against the log-squared weight
``exp(-M log^2(1 + |tau|/delta1))``; the inner norm measures it on the
closed disc inside its inner radius with the same weight times
``|eps|^K0``.  Both walk a radial-by-angular grid, optionally skip
points near known poles, and sharpen the running maximum with a few
local refinement rounds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EmptyGridError, ValidationError
from .recursion import eval_W

__all__ = [
    "GridPlan",
    "NormEstimate",
    "GrowthFit",
    "outer_norm",
    "inner_norm",
    "envelope_fit",
    "fit_growth",
]


@dataclass(frozen=True)
class GridPlan:
    radial: int = 48
    angular: int = 16
    refine_limit: int = 2

    def __post_init__(self):
        if self.radial < 2 or self.angular < 2 or self.refine_limit < 0:
            raise ValidationError("grid plan needs radial, angular >= 2 "
                                  "and refine_limit >= 0")


DEFAULT_PLAN = GridPlan()


@dataclass(frozen=True)
class NormEstimate:
    value: float
    argmax: complex
    refinements: int
    skipped: int


def _weight(norms, s):
    return np.exp(-norms.M * np.log1p(s / norms.delta1) ** 2)


def _net_tau_degree(coef):
    deg = 0
    for t in coef.terms:
        d = t.tau_power
        if t.leaf is not None:
            d += max(rt.tau_power
                     for rt in coef.problem.initial_data[t.leaf])
        deg = max(deg, d)
    return deg


def _grid_sup(coef, eps, radii, angles, weight_of, exclusion):
    """Weighted sup over the outer product grid.

    Returns (value, argmax, radius, angle, skipped); value is -inf when
    every point was excluded.
    """
    tau = radii[:, None] * np.exp(1j * angles)[None, :]
    flat = tau.ravel()
    keep = np.ones(flat.shape, dtype=bool)
    if exclusion is not None:
        for p in coef.singularities:
            keep &= np.abs(flat - p) >= exclusion
    skipped = int(np.size(flat) - np.count_nonzero(keep))
    if not keep.any():
        return -math.inf, 0j, 0.0, 0.0, skipped
    pts = flat[keep]
    vals = np.abs(eval_W(coef, eps, pts)) * weight_of(np.abs(pts))
    i = int(np.argmax(vals))
    best = pts[i]
    return float(vals[i]), complex(best), float(abs(best)), \
        float(np.angle(best)), skipped


def _refined_sup(coef, eps, radii, angles, weight_of, exclusion, plan,
                 r_bounds, log_radial):
    """Grid sup plus local refinement rounds around the running argmax."""
    value, argmax, r_best, a_best, skipped = _grid_sup(
        coef, eps, radii, angles, weight_of, exclusion)
    if value == -math.inf:
        raise EmptyGridError("every grid point fell inside an exclusion disc")
    if log_radial:
        dr = (math.log(radii[-1]) - math.log(radii[0])) / (len(radii) - 1)
    else:
        dr = (radii[-1] - radii[0]) / (len(radii) - 1)
    da = (angles[-1] - angles[0]) / (len(angles) - 1) if len(angles) > 1 \
        else 0.1
    a_lo, a_hi = float(angles[0]), float(angles[-1])
    refinements = 0
    for _ in range(plan.refine_limit):
        if log_radial:
            lo = max(math.log(r_bounds[0]), math.log(max(r_best, 1e-300)) - dr)
            hi = min(math.log(r_bounds[1]), math.log(max(r_best, 1e-300)) + dr)
            local_r = np.exp(np.linspace(lo, hi, 9))
        else:
            lo = max(r_bounds[0], r_best - dr)
            hi = min(r_bounds[1], r_best + dr)
            local_r = np.linspace(lo, hi, 9)
        local_a = np.linspace(max(a_lo, a_best - da),
                              min(a_hi, a_best + da), 9)
        v, am, rb, ab, sk = _grid_sup(coef, eps, local_r, local_a,
                                      weight_of, exclusion)
        skipped += sk
        refinements += 1
        if v > value:
            value, argmax, r_best, a_best = v, am, rb, ab
            dr /= 2
            da /= 2
        else:
            break
    return NormEstimate(value=value, argmax=argmax, refinements=refinements,
                        skipped=skipped)


def outer_norm(coef, eps, norms, sched, sector, plan=None, exclusion=None):
    """Weighted sup of a coefficient on the sector outside its outer radius.

    The radial grid is log-spaced from the outer radius of the
    coefficient's order out to where the weight has crushed any possible
    polynomial growth of the term list.
    """
    plan = plan or DEFAULT_PLAN
    r_lo = sched.outer(coef.beta)
    d_net = _net_tau_degree(coef)
    l_max = max(8.0, d_net / (2 * norms.M) + math.sqrt(60.0 / norms.M))
    r_hi = math.exp(l_max)
    radii = np.geomspace(r_lo, r_hi, plan.radial)
    angles = np.linspace(sector.lo, sector.hi, plan.angular)
    if not coef.terms:
        return NormEstimate(value=0.0, argmax=0j, refinements=0, skipped=0)
    return _refined_sup(coef, eps, radii, angles,
                        lambda s: _weight(norms, s), exclusion, plan,
                        (r_lo, r_hi), log_radial=True)


def inner_norm(coef, eps, norms, sched, plan=None):
    """Weighted sup of a coefficient on the disc inside its inner radius,
    carrying the ``|eps|^K0`` factor of the refined estimates."""
    plan = plan or DEFAULT_PLAN
    r_hi = sched.inner(coef.beta)
    radii = np.linspace(0.0, r_hi, plan.radial)
    angles = np.linspace(0.0, 2 * math.pi, plan.angular, endpoint=False)
    if not coef.terms:
        return NormEstimate(value=0.0, argmax=0j, refinements=0, skipped=0)
    eps_factor = abs(eps) ** norms.K0
    return _refined_sup(coef, eps, radii, angles,
                        lambda s: eps_factor * _weight(norms, s), None, plan,
                        (0.0, r_hi), log_radial=False)


def envelope_fit(pairs, delta):
    """Fit ``v_beta <= c * cp^beta * beta! * delta^-beta`` tightly.

    Works on ``y = log v - log beta! + beta log delta``: a Theil-Sen
    median slope gives the rate ``cp`` robustly, then the intercept is
    pushed down onto the data so the fit is an envelope.  Returns
    ``(c, cp, slacks)`` with ``slacks = fitted - y >= 0``.
    """
    if len(pairs) < 2:
        raise ValidationError("envelope fit needs at least two points")
    betas = np.array([float(b) for b, _ in pairs])
    ys = np.array([math.log(v) - math.lgamma(b + 1) + b * math.log(delta)
                   for b, v in pairs])
    slopes = [(ys[j] - ys[i]) / (betas[j] - betas[i])
              for i in range(len(pairs)) for j in range(i + 1, len(pairs))]
    slope = float(np.median(slopes))
    intercept = float(np.max(ys - slope * betas))
    slacks = tuple(float(intercept + slope * b - y)
                   for b, y in zip(betas, ys))
    return math.exp(intercept), math.exp(slope), slacks


@dataclass(frozen=True)
class GrowthFit:
    degenerate: bool
    C13: float
    C14: float
    C23: float
    C24: float
    dropped: int
    outer_slacks: tuple
    inner_slacks: tuple


def fit_growth(outer_pairs, inner_pairs, norms):
    """Envelope constants for the outer and inner norm sequences.

    Zero values (identically vanishing coefficients) are dropped and
    counted; if either sequence loses too many points the fit degenerates
    to unit constants rather than extrapolating from nothing.
    """
    for side in (outer_pairs, inner_pairs):
        if len(side) < 5:
            raise ValidationError("growth fit needs at least five orders")
        if any(v < 0 for _, v in side):
            raise DataError("norm values cannot be negative")
    outer_nz = [(b, v) for b, v in outer_pairs if v > 0]
    inner_nz = [(b, v) for b, v in inner_pairs if v > 0]
    dropped = (len(outer_pairs) - len(outer_nz)
               + len(inner_pairs) - len(inner_nz))
    if len(outer_nz) < 2 or len(inner_nz) < 2:
        return GrowthFit(degenerate=True, C13=1.0, C14=1.0, C23=1.0,
                         C24=1.0, dropped=dropped, outer_slacks=(),
                         inner_slacks=())
    c13, c14, outer_slacks = envelope_fit(outer_nz, norms.delta_series)
    c23, c24, inner_slacks = envelope_fit(inner_nz, norms.delta_series)
    return GrowthFit(degenerate=False, C13=c13, C14=c14, C23=c23, C24=c24,
                     dropped=dropped, outer_slacks=outer_slacks,
                     inner_slacks=inner_slacks)
