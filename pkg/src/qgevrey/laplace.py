"""Ray Laplace summation and the sectorial solutions built from it.

``laplace_ray`` integrates ``f(tau) exp(-tau t / eps)`` along a ray from
the origin with panel quadrature, choosing the ray length adaptively
from the kernel's decay rate.  On top of it sit the per-sector solution
objects (truncated series of coefficient transforms in the space
variable), the equation-residual check, and the log-squared decay fit
used to compare neighbouring sectors.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergenceError,
    HypothesisError,
    TruncationError,
    ValidationError,
)
from .model import poly_eval, validate_geometry
from .quadrature import panel_quad
from .recursion import BorelFamily, eval_W

__all__ = [
    "QuadraturePlan",
    "LaplaceResult",
    "laplace_ray",
    "laplace_derivative_check",
    "SectorSolution",
    "build_solution",
    "pde_residual",
    "fit_log_square_decay",
    "cocycle_difference",
]

TAIL_TOL = 1e-16
TRUNCATION_TOL = 1e-9


@dataclass(frozen=True)
class QuadraturePlan:
    t_max: float
    panels: int


@dataclass(frozen=True)
class LaplaceResult:
    value: complex
    error: float
    plan: QuadraturePlan


def _ray_edges(t_max, panels):
    """Geometric edges [0, t_max 2^(1-panels), ..., t_max/2, t_max]."""
    return np.concatenate((
        [0.0], t_max * 2.0 ** np.arange(1 - panels, 1, dtype=float)))


def laplace_ray(f, gamma, t, eps, plan=None):
    """Transform of ``f`` along the ray of direction ``gamma``.

    Computes ``integral_0^inf f(s e^(i gamma)) e^(-s e^(i gamma) t/eps)
    e^(i gamma) ds``.  Raises ``DivergenceError`` when the kernel does
    not decay along the ray.  Without an explicit plan the ray is cut
    where the kernel has decayed by e^-80 and stretched until the
    estimated tail is negligible against the accumulated value.
    """
    ray = cmath.exp(1j * gamma)
    rate = (ray * t / eps).real
    if rate <= 0.0:
        raise DivergenceError(
            f"kernel does not decay along the ray gamma={gamma}")

    def compute(t_max, panels):
        edges = _ray_edges(t_max, panels)
        value, err = panel_quad(
            lambda s: f(s.astype(complex) * ray)
            * np.exp(-s * (ray * t / eps)) * ray, edges)
        f_end = np.atleast_1d(f(np.array([t_max * ray], dtype=complex)))[0]
        tail = abs(f_end) * math.exp(-rate * t_max) / rate
        return value, err, tail

    if plan is not None:
        value, err, tail = compute(plan.t_max, plan.panels)
        return LaplaceResult(value=value, error=err + tail, plan=plan)

    t_max = 80.0 / rate
    panels = 23
    value, err, tail = compute(t_max, panels)
    for _ in range(6):
        if tail <= TAIL_TOL * (1.0 + abs(value)):
            break
        t_max *= 2
        panels += 1
        value, err, tail = compute(t_max, panels)
    return LaplaceResult(value=value, error=err + tail,
                         plan=QuadraturePlan(t_max=t_max, panels=panels))


@dataclass(frozen=True)
class DerivativeCheck:
    passed: bool
    transform_value: complex
    gap: float
    tol: float


def laplace_derivative_check(f, gamma, t, eps):
    """Cross-check derivative transport through the transform.

    One route multiplies by ``-tau/eps`` before transforming; the other
    differentiates the transform itself by central differences.  The two
    must agree to finite-difference accuracy.
    """
    borel = laplace_ray(lambda tau: (-tau / eps) * f(tau), gamma, t, eps)
    h = 1e-5 * max(1.0, abs(t))
    plus = laplace_ray(f, gamma, t + h, eps)
    minus = laplace_ray(f, gamma, t - h, eps)
    fd = (plus.value - minus.value) / (2 * h)
    gap = abs(borel.value - fd)
    tol = 1e-6 * max(1.0, abs(borel.value)) \
        + 10 * (borel.error + plus.error + minus.error)
    return DerivativeCheck(passed=gap <= tol, transform_value=borel.value,
                           gap=gap, tol=tol)


class SectorSolution:
    """Truncated sectorial solution: coefficient transforms along one
    summation ray, combined as a series in the space variable.

    Transforms are cached by (order, t-derivative order, eps, t); the
    cache key depends only on values, so rebuilding the same solution
    reproduces identical numbers.
    """

    def __init__(self, spec, norms, sched, geom, sector_index, B_max,
                 family):
        self.spec = spec
        self.norms = norms
        self.sched = sched
        self.geom = geom
        self.sector_index = sector_index
        self.B_max = B_max
        self.family = family
        self.gamma = geom.gammas[sector_index]
        self._transforms = {}

    def coeff_transform(self, beta, eps, t, dt_order=0):
        key = (beta, dt_order, complex(eps), complex(t))
        if key not in self._transforms:
            coef = self.family.coefficient(beta)
            if not coef.terms:
                self._transforms[key] = 0.0 + 0.0j
            else:
                if dt_order:
                    def f(tau, _c=coef, _e=eps, _k=dt_order):
                        return (-tau / _e) ** _k * eval_W(_c, _e, tau)
                else:
                    def f(tau, _c=coef, _e=eps):
                        return eval_W(_c, _e, tau)
                self._transforms[key] = laplace_ray(f, self.gamma, t,
                                                    eps).value
        return self._transforms[key]

    def eval(self, eps, t, z):
        z = complex(z)
        total = 0.0 + 0.0j
        for beta in range(self.B_max):
            total += (self.coeff_transform(beta, eps, t)
                      * z ** beta / math.factorial(beta))
        return total


def build_solution(spec, norms, sched, geom, sector_index, B_max,
                   family=None):
    """Sectorial solution on the given covering sector, after checking
    that the summation geometry is actually admissible there."""
    if B_max < 1:
        raise ValidationError("B_max must be at least 1")
    validate_geometry(spec, geom, (sector_index,))
    if family is None:
        family = BorelFamily(spec)
    return SectorSolution(spec, norms, sched, geom, sector_index, B_max,
                          family)


@dataclass(frozen=True)
class PdeResidualReport:
    max_rel: float
    rows: tuple


def pde_residual(sol, samples):
    """Relative residual of the equation at the given (eps, t, z) points.

    Both sides are evaluated from the cached coefficient transforms:
    t-derivatives transport to a ``-tau/eps`` multiplier in the
    convolution plane, z-derivatives shift the series.  Raises
    ``TruncationError`` when the truncated series cannot resolve the
    residual at the requested points.
    """
    spec = sol.spec
    S = spec.S
    a = complex(spec.a)
    q = spec.q
    if sol.B_max - 1 < S:
        raise TruncationError(
            f"B_max={sol.B_max} leaves no room above the main order {S}")
    rows = []
    for eps, t, z in samples:
        z = complex(z)
        # estimated relative weight of the last retained series term
        mags = [abs(sol.coeff_transform(b + S, eps, t))
                * abs(z) ** b / math.factorial(b)
                for b in range(sol.B_max - S)]
        scale = sum(mags)
        if mags[-1] > TRUNCATION_TOL * max(scale, 1e-300):
            raise TruncationError(
                f"series tail at order {sol.B_max - 1} still carries "
                f"relative weight {mags[-1] / max(scale, 1e-300):.2e}")
        lhs = 0.0 + 0.0j
        for b in range(sol.B_max - S):
            xb = sol.coeff_transform(b + S, eps, t)
            dxb = sol.coeff_transform(b + S, eps, t, dt_order=1)
            lhs += (eps * dxb + a * xb) * z ** b / math.factorial(b)
        rhs = 0.0 + 0.0j
        for rt in spec.rhs_terms:
            tt = q ** rt.t_shift * t
            zz = q ** rt.z_shift * z
            series = 0.0 + 0.0j
            for b in range(sol.B_max - rt.dz_order):
                series += (sol.coeff_transform(b + rt.dz_order, eps, tt,
                                               dt_order=rt.dt_order)
                           * zz ** b / math.factorial(b))
            bval = sum(poly_eval(coeffs, eps) * z ** s
                       for s, coeffs in rt.z_coeffs)
            rhs += bval * series
        rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
        rows.append((complex(eps), complex(t), z, float(rel)))
    return PdeResidualReport(max_rel=max(r[3] for r in rows),
                             rows=tuple(rows))


def fit_log_square_decay(eps_values, values):
    """Least-squares fit of ``log v = -c log^2 eps + b``; returns (c, b)."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    design = np.column_stack([-x ** 2, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coef[0]), float(coef[1])


@dataclass(frozen=True)
class CocycleFit:
    c_required: float
    passed: bool
    c_hat: float
    intercept: float
    points: tuple
    dropped_underflow: int


def cocycle_difference(sol0, sol1, eps_grid, t_vals, z_vals, norms,
                       Delta=1.1):
    """Decay fit of the difference of two sectorial solutions.

    The sup over the given (t, z) probes is collected per eps and fitted
    against ``exp(-c log^2 eps)``; the fitted rate must reach the floor
    ``A1 / (2 d2^2 Delta log(1/q))`` implied by the norm parameters.
    Differences too small to carry log information are dropped; if fewer
    than three points survive the difference is flat to working
    precision and the check passes vacuously.
    """
    if Delta <= 1.0:
        raise HypothesisError("Delta must exceed 1")
    lam = -math.log(sol0.spec.q)
    d2 = sol0.sched.d2
    c_required = norms.A1 / (2 * d2 ** 2 * Delta * lam)
    points = []
    dropped = 0
    for eps in eps_grid:
        diff = max(abs(sol0.eval(eps, t, z) - sol1.eval(eps, t, z))
                   for t in t_vals for z in z_vals)
        if diff < 1e-280:
            dropped += 1
        else:
            points.append((float(eps), float(diff)))
    if len(points) < 3:
        return CocycleFit(c_required=c_required, passed=True,
                          c_hat=math.inf, intercept=None,
                          points=tuple(points), dropped_underflow=dropped)
    c_hat, intercept = fit_log_square_decay([e for e, _ in points],
                                            [d for _, d in points])
    return CocycleFit(c_required=c_required,
                      passed=c_hat >= 0.9 * c_required,
                      c_hat=c_hat, intercept=intercept,
                      points=tuple(points), dropped_underflow=dropped)
