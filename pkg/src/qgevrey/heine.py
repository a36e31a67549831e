"""Cauchy-Heine reconstruction from a flat cocycle on radial segments.

A cocycle here is a family of jump functions, one per outward ray, each
flat at the origin (log-Gaussian profile).  The contour integral of the
jumps produces one analytic primitive per sector between consecutive
rays; crossing a ray changes the primitive by exactly that ray's jump.
From the same data one reads off the Taylor-like moment coefficients,
whose growth is capped by a q-Gaussian envelope, and reconstructs the
common asymptotic expansion shared by all sector functions.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import FlatnessError, ValidationError, WrongSectorError
from .quadrature import geometric_edges, panel_quad

__all__ = [
    "FlatCocycle",
    "flat_cocycle",
    "heine_primitive",
    "CoboundaryReport",
    "coboundary_check",
    "TaylorReport",
    "taylor_coefficients",
    "ReconstructionReport",
    "reconstruct_expansion",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FlatCocycle:
    """Jumps ``amp_l * exp(-Log(xi e^{-i theta_l})^2 / (2 lam L))`` on the
    rays ``theta_l``, each supported on a segment of the given length."""

    directions: tuple
    length: float
    flat_type: float
    q: float
    amplitudes: tuple

    def jump(self, l, xi):
        if not 0 <= l < len(self.directions):
            raise ValidationError("segment index out of range")
        lam_l = -math.log(self.q) * self.flat_type
        z = np.asarray(xi, dtype=complex) * cmath.exp(-1j * self.directions[l])
        out = self.amplitudes[l] * np.exp(-np.log(z) ** 2 / (2.0 * lam_l))
        return out if out.shape else complex(out)


def flat_cocycle(directions, length, flat_type, q, amplitudes=None):
    directions = tuple(float(d) for d in directions)
    if len(directions) < 2:
        raise ValidationError("a cocycle needs at least two segments")
    if length <= 0 or flat_type <= 0:
        raise ValidationError("length and flat_type must be positive")
    if not 0.0 < q < 1.0:
        raise ValidationError("q must lie strictly between 0 and 1")
    if amplitudes is None:
        amplitudes = (1.0,) * len(directions)
    amplitudes = tuple(complex(a) for a in amplitudes)
    if len(amplitudes) != len(directions):
        raise ValidationError("one amplitude per segment is required")
    return FlatCocycle(directions=directions, length=float(length),
                       flat_type=float(flat_type), q=float(q),
                       amplitudes=amplitudes)


def _sector_bounds(coc, l):
    """Sector l is the ccw arc from ray l-1 to ray l."""
    n = len(coc.directions)
    lo = coc.directions[(l - 1) % n]
    width = (coc.directions[l] - lo) % TWO_PI
    if width == 0.0:
        width = TWO_PI
    return lo, width


def _in_sector(coc, l, eps):
    if eps == 0:
        return False
    lo, width = _sector_bounds(coc, l)
    rel = (cmath.phase(eps) - lo) % TWO_PI
    return 0.0 < rel < width


def _ray_integral(coc, h, eps):
    """integral over segment h of jump(xi) / (xi - eps), outward."""
    u = cmath.exp(1j * coc.directions[h])
    edges = geometric_edges(coc.length * 2.0 ** -45, coc.length)
    value, _ = panel_quad(lambda s: coc.jump(h, s * u) * u / (s * u - eps),
                          edges)
    return value


def heine_primitive(coc, l, eps):
    """The sector-l primitive ``(1/2 pi i) sum_h int jump_h/(xi - eps)``.

    ``eps`` must lie strictly inside sector l; on or beyond the bounding
    rays the defining contour is crossed and the value would belong to a
    different branch.
    """
    n = len(coc.directions)
    if not 0 <= l < n:
        raise ValidationError("sector index out of range")
    if not _in_sector(coc, l, eps):
        raise WrongSectorError(
            f"eps with phase {cmath.phase(eps):.3f} is not in sector {l}")
    total = sum(_ray_integral(coc, h, eps) for h in range(n))
    return total / (2j * math.pi)


def _bent_pieces(coc, l, eps):
    """Segment-l integral with the contour bent around eps on either
    side: shared radial parts plus the two half-circle detours."""
    rho = abs(eps)
    theta = coc.directions[l]
    u = cmath.exp(1j * theta)
    a4 = rho / 4.0

    inner, _ = panel_quad(
        lambda s: coc.jump(l, s * u) * u / (s * u - eps),
        geometric_edges(0.75 * rho * 2.0 ** -45, 0.75 * rho))
    outer, _ = panel_quad(
        lambda s: coc.jump(l, s * u) * u / (s * u - eps),
        np.geomspace(1.25 * rho, coc.length, 17))

    arc = lambda phi: 1j * coc.jump(l, eps + a4 * np.exp(1j * phi))
    below, _ = panel_quad(arc, np.linspace(theta + math.pi,
                                           theta + TWO_PI, 9))
    above, _ = panel_quad(arc, np.linspace(theta, theta + math.pi, 9))
    radial = inner + outer
    return radial + below, radial - above


@dataclass(frozen=True)
class CoboundaryReport:
    gaps: np.ndarray
    max_gap: float
    passed: bool


def coboundary_check(coc, n_points=9):
    """Verify that consecutive sector primitives differ by the jump.

    On each ray the two neighbouring primitives are continued onto the
    ray by bending the local contour to the opposite side; the detours
    differ by a full loop around eps, so the continuation gap must equal
    the jump there.
    """
    n = len(coc.directions)
    radii = np.geomspace(0.02 * coc.length, 0.5 * coc.length, n_points)
    gaps = np.empty((n, n_points))
    for l in range(n):
        u = cmath.exp(1j * coc.directions[l])
        for j, rho in enumerate(radii):
            eps = rho * u
            common = sum(_ray_integral(coc, h, eps)
                         for h in range(n) if h != l)
            bent_ccw, bent_cw = _bent_pieces(coc, l, eps)
            psi_ccw = (common + bent_ccw) / (2j * math.pi)
            psi_cw = (common + bent_cw) / (2j * math.pi)
            gaps[l, j] = abs(psi_ccw - psi_cw - coc.jump(l, eps))
    max_gap = float(gaps.max())
    return CoboundaryReport(gaps=gaps, max_gap=max_gap,
                            passed=max_gap < 1e-6)


def _check_flat(coc):
    """Reject jumps that fail to vanish to all orders at the origin."""
    lam_l = -math.log(coc.q) * coc.flat_type
    depth = math.sqrt(2.0 * lam_l * math.log(1e16))
    for l in range(len(coc.directions)):
        u = cmath.exp(1j * coc.directions[l])
        ref = max(abs(complex(np.asarray(coc.jump(l, c * coc.length * u))
                              .reshape(-1)[0]))
                  for c in (1.0, 0.5, 0.25))
        probe = abs(complex(np.asarray(
            coc.jump(l, coc.length * math.exp(-depth) * u)).reshape(-1)[0]))
        if probe > 1e-10 * ref + 1e-280:
            raise FlatnessError(
                f"segment {l} jump does not decay flatly at the origin")


@dataclass(frozen=True)
class TaylorReport:
    alphas: tuple
    envelopes: tuple
    ratios: tuple
    max_ratio: float


def taylor_coefficients(coc, count):
    """Moment coefficients ``alpha_m`` of the primitives' shared
    expansion, with the q-Gaussian envelope they must stay under."""
    if count < 1:
        raise ValidationError("count must be at least 1")
    _check_flat(coc)
    lam_l = -math.log(coc.q) * coc.flat_type
    amp_total = sum(abs(a) for a in coc.amplitudes)
    alphas = []
    envelopes = []
    ratios = []
    for m in range(count):
        s_lo = min(math.exp(-lam_l * m - math.sqrt(1400.0 * lam_l)),
                   0.5 * coc.length)
        s_lo = max(s_lo, math.exp(-690.0 / (m + 1)))
        edges = geometric_edges(s_lo, coc.length)
        total = 0j
        for l, theta in enumerate(coc.directions):
            u = cmath.exp(1j * theta)
            moment, _ = panel_quad(
                lambda s: coc.jump(l, s * u) * s ** (-(m + 1.0)), edges)
            total += cmath.exp(-1j * m * theta) * moment
        alpha = total / (2j * math.pi)
        envelope = (amp_total * math.sqrt(lam_l / (2.0 * math.pi))
                    * math.exp(lam_l * m * m / 2.0))
        alphas.append(alpha)
        envelopes.append(envelope)
        ratios.append(abs(alpha) / envelope if envelope > 0 else 0.0)
    return TaylorReport(alphas=tuple(alphas), envelopes=tuple(envelopes),
                        ratios=tuple(ratios), max_ratio=max(ratios))


@dataclass(frozen=True)
class ReconstructionReport:
    phi: tuple
    max_phi_gap: float
    remainder_type: float
    feasible: bool


def _extract_coefficients(eps, values, count, lam_flat):
    """One weighted least-squares polynomial fit per sector, with two
    guard orders beyond the requested count.  Each point deviates from
    the polynomial model by roughly its flat remainder
    ``exp(-log^2 rho / (2 lam L))``, so points are weighted by the
    reciprocal of that scale (floored at quadrature noise): the small
    radii pin the low coefficients and the large radii only inform the
    guard orders."""
    degree = min(count + 2, len(eps) - 1)
    if degree < count - 1:
        raise ValidationError("eps grid too small for requested count")
    x = np.asarray(eps)
    y = np.asarray(values, dtype=complex)
    rho = np.abs(x)
    sigma = np.exp(-np.log(rho) ** 2 / (2.0 * lam_flat)) + 1e-13
    scale = float(np.max(rho))
    design = np.column_stack([(x / scale) ** k for k in range(degree + 1)])
    coef, *_ = np.linalg.lstsq(design / sigma[:, None], y / sigma,
                               rcond=None)
    return [complex(coef[k]) / scale ** k for k in range(count)]


def reconstruct_expansion(cocycle, convergent, count, gevrey_type,
                          eps_grid=None):
    """Recover the expansion shared by ``poly(convergent) + primitive``
    across all sectors and judge whether its remainder flatness is
    consistent with the claimed q-Gevrey type.
    """
    if count < 1:
        raise ValidationError("count must be at least 1")
    if eps_grid is None:
        eps_grid = np.logspace(-3.0, math.log10(5e-2), 12)
    grid = np.sort(np.asarray(eps_grid, dtype=float))
    n = len(cocycle.directions)
    lam_flat = -math.log(cocycle.q) * cocycle.flat_type

    sector_phis = []
    for l in range(n):
        lo, width = _sector_bounds(cocycle, l)
        bearing = cmath.exp(1j * (lo + width / 2.0))
        eps = grid * bearing
        values = np.array([
            sum(c * e ** k for k, c in enumerate(convergent))
            + heine_primitive(cocycle, l, e) for e in eps])
        sector_phis.append(_extract_coefficients(eps, values, count,
                                                 lam_flat))

    phi = []
    max_gap = 0.0
    for m in range(count):
        col = [phis[m] for phis in sector_phis]
        mean = sum(col) / n
        spread = max(abs(c - mean) for c in col)
        max_gap = max(max_gap, spread / max(1.0, abs(mean)))
        phi.append(mean)

    s_grid = cocycle.length * np.logspace(-4.0, math.log10(0.3), 14)
    pooled = []
    for l, theta in enumerate(cocycle.directions):
        u = cmath.exp(1j * theta)
        vals = np.abs(np.asarray(cocycle.jump(l, s_grid * u)))
        pooled.extend((float(s), float(v)) for s, v in zip(s_grid, vals)
                      if v > 0.0)
    if pooled:
        from .asymptotics import fit_flat_type
        remainder_type = fit_flat_type(pooled, cocycle.q).fitted_type
    else:
        remainder_type = 0.0
    return ReconstructionReport(phi=tuple(phi), max_phi_gap=max_gap,
                                remainder_type=remainder_type,
                                feasible=remainder_type <= gevrey_type)
