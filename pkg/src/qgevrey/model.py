"""Problem data and parameter hygiene.

Holds the dataclasses describing a singularly perturbed Cauchy problem
with contracted arguments (a main derivative order, right-hand-side
terms carrying derivative orders and argument contractions, rational
initial slices), the norm/radius parameters used by the estimates, and
the checks that the parameters actually satisfy the standing smallness
and non-crossing conditions before any numerics run.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainTooSmallError,
    GeometryError,
    SingularityError,
    ValidationError,
)

TWO_PI = 2.0 * math.pi

__all__ = [
    "RationalTerm",
    "RhsTerm",
    "ProblemSpec",
    "NormParams",
    "RadiusSchedule",
    "Sector",
    "TimeDomain",
    "SectorGeometry",
    "AssumptionRow",
    "AssumptionReport",
    "CoveringReport",
    "GeometryReport",
    "poly_eval",
    "eval_initial",
    "radius",
    "check_assumption_A",
    "check_assumption_B",
    "check_good_covering",
    "validate_geometry",
]


def poly_eval(coeffs, x):
    """Evaluate a coefficient tuple as a polynomial at ``x`` (Horner)."""
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class RationalTerm:
    """One summand ``coeff * eps^ep * tau^tp / (a - tau)^po`` of an
    initial slice in the convolution plane."""

    coeff: complex
    eps_power: int
    tau_power: int
    pole_order: int

    def __post_init__(self):
        if self.tau_power < 0 or self.pole_order < 0:
            raise ValidationError("tau_power and pole_order must be >= 0")


@dataclass(frozen=True)
class RhsTerm:
    """A right-hand-side term: mixed derivative orders, argument
    contraction exponents, and a z-polynomial coefficient whose entries
    are polynomials in the perturbation parameter."""

    dt_order: int
    dz_order: int
    t_shift: int
    z_shift: int
    z_coeffs: tuple  # ((power, (c0, c1, ...)), ...) sorted by power

    @classmethod
    def make(cls, dt_order, dz_order, t_shift, z_shift, z_coeffs):
        if dt_order < 0 or dz_order < 1:
            raise ValidationError(
                "derivative orders must satisfy dt >= 0 and dz >= 1")
        if t_shift < 0 or z_shift < 0:
            raise ValidationError("contraction shifts must be >= 0")
        if not z_coeffs:
            raise ValidationError("a right-hand-side term needs coefficients")
        packed = []
        for power in sorted(z_coeffs):
            if power < 0:
                raise ValidationError("z powers must be >= 0")
            coeffs = tuple(complex(c) for c in z_coeffs[power])
            packed.append((int(power), coeffs))
        return cls(int(dt_order), int(dz_order), int(t_shift), int(z_shift),
                   tuple(packed))

    @property
    def support(self):
        """The z-powers carried by this term's coefficient."""
        return tuple(p for p, _ in self.z_coeffs)


@dataclass(frozen=True)
class ProblemSpec:
    """The full Cauchy problem: main order, base point, contraction base,
    right-hand-side terms, a radius for the data, and the initial slices."""

    S: int
    a: complex
    q: float
    rhs_terms: tuple
    r0: float
    initial_data: tuple  # S tuples of RationalTerm

    def __post_init__(self):
        if self.S < 1:
            raise ValidationError("main derivative order S must be >= 1")
        a = complex(self.a)
        if a == 0 or (a.imag == 0.0 and a.real > 0.0):
            raise ValidationError(
                "the base point a must avoid the closed positive real axis")
        if not 0.0 < self.q < 1.0:
            raise ValidationError("q must lie strictly between 0 and 1")
        if self.r0 <= 0.0:
            raise ValidationError("r0 must be positive")
        for term in self.rhs_terms:
            if not 1 <= term.dz_order < self.S:
                raise ValidationError(
                    "each z-derivative order must satisfy 1 <= order < S")
        if len(self.initial_data) != self.S:
            raise ValidationError(
                f"need exactly S={self.S} initial slices, "
                f"got {len(self.initial_data)}")

    @property
    def max_dt_order(self):
        return max((t.dt_order for t in self.rhs_terms), default=0)

    @property
    def max_shift(self):
        return max((max(t.t_shift, t.z_shift) for t in self.rhs_terms),
                   default=0)


def eval_initial(spec, j, eps, tau):
    """Evaluate the j-th initial slice at ``(eps, tau)``.

    Vectorizes over ``tau``.  Raises ``SingularityError`` if ``tau`` comes
    within a relative guard distance of the slice's pole at ``a``.
    """
    a = complex(spec.a)
    tau_arr = np.asarray(tau, dtype=complex)
    scalar = tau_arr.ndim == 0
    tau_arr = np.atleast_1d(tau_arr)
    denom = a - tau_arr
    has_pole = any(t.pole_order > 0 for t in spec.initial_data[j])
    if has_pole and np.min(np.abs(denom)) < 1e-9 * abs(a):
        raise SingularityError(
            f"initial slice {j} evaluated too close to its pole", pole=a)
    acc = np.zeros_like(tau_arr)
    for term in spec.initial_data[j]:
        val = term.coeff * eps ** term.eps_power * tau_arr ** term.tau_power
        if term.pole_order:
            val = val / denom ** term.pole_order
        acc += val
    return complex(acc[0]) if scalar else acc


@dataclass(frozen=True)
class NormParams:
    """Constants steering the weighted sup-norm estimates."""

    M: float
    A1: float
    C: float
    delta1: float
    M_tilde: float
    K0: int
    Delta_ic: float
    delta_series: float

    def __post_init__(self):
        for name in ("M", "A1", "C", "delta1", "M_tilde", "Delta_ic"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.M_tilde >= self.M:
            raise ValidationError("M_tilde must be smaller than M")
        if self.K0 < 0:
            raise ValidationError("K0 must be >= 0")
        if not 0.0 < self.delta_series < 1.0:
            raise ValidationError(
                "delta_series must lie strictly between 0 and 1")


@dataclass(frozen=True)
class RadiusSchedule:
    """Shrinking outer radii d1*q^(d2*beta) paired with inner disc radii
    that plateau at Rhat0 below order S and then follow dhat1*q^(dhat2*beta).

    The constructor rejects schedules whose outer radius would ever cross
    the inner one.
    """

    q: float
    d1: float
    d2: float
    dhat1: float
    dhat2: float
    Rhat0: float
    S: int

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValidationError("q must lie strictly between 0 and 1")
        for name in ("d1", "d2", "dhat1", "dhat2", "Rhat0"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.S < 1:
            raise ValidationError("S must be >= 1")
        if self.d1 >= self.Rhat0:
            raise ValidationError(
                "d1 must stay below the plateau radius Rhat0")
        # non-crossing for beta >= S; below S the plateau handles it
        if self.dhat2 > self.d2:
            raise ValidationError(
                "inner radii decay faster than outer ones: they would cross")
        if self.dhat2 == self.d2:
            if self.d1 >= self.dhat1:
                raise ValidationError("outer radii would cross inner radii")
        else:
            if self.outer(self.S) >= self.inner(self.S):
                raise ValidationError(
                    "outer radius meets the inner radius at order S")

    def outer(self, beta):
        return self.d1 * self.q ** (self.d2 * beta)

    def inner(self, beta):
        if beta < self.S:
            return self.Rhat0
        return self.dhat1 * self.q ** (self.dhat2 * beta)


def radius(beta, sched):
    """Outer and inner radii at order ``beta`` as a pair."""
    return sched.outer(beta), sched.inner(beta)


def _angle_diff(theta, center):
    """Signed angular distance from ``center`` to ``theta`` in (-pi, pi]."""
    d = (theta - center) % TWO_PI
    if d > math.pi:
        d -= TWO_PI
    return d


@dataclass(frozen=True)
class Sector:
    """An angular sector around ``direction`` with the given opening;
    ``radius=None`` means unbounded."""

    direction: float
    opening: float
    radius: float = None

    def __post_init__(self):
        if self.opening <= 0:
            raise ValidationError("sector opening must be positive")
        if self.radius is not None and self.radius <= 0:
            raise ValidationError("sector radius must be positive")
        object.__setattr__(self, "direction", self.direction % TWO_PI)

    def contains_angle(self, theta):
        return abs(_angle_diff(theta, self.direction)) <= self.opening / 2

    def contains(self, point):
        point = complex(point)
        if point == 0:
            return False
        if self.radius is not None and abs(point) > self.radius:
            return False
        return self.contains_angle(cmath.phase(point))

    @property
    def lo(self):
        return self.direction - self.opening / 2

    @property
    def hi(self):
        return self.direction + self.opening / 2


@dataclass(frozen=True)
class TimeDomain:
    """An unbounded sector in the time variable, kept away from 0."""

    direction: float
    opening: float
    inner_radius: float

    def __post_init__(self):
        if self.opening <= 0 or self.inner_radius <= 0:
            raise ValidationError(
                "time domain needs positive opening and inner radius")
        object.__setattr__(self, "direction", self.direction % TWO_PI)

    def contains(self, t):
        t = complex(t)
        if abs(t) < self.inner_radius:
            return False
        return abs(_angle_diff(cmath.phase(t), self.direction)) \
            <= self.opening / 2


@dataclass(frozen=True)
class SectorGeometry:
    """Covering sectors in the perturbation parameter, the matching
    quotient sectors for t/eps, the time domain, one summation ray per
    sector, and the two margin constants used by the decay estimates."""

    covering: tuple
    assoc_sectors: tuple
    t_domain: TimeDomain
    gammas: tuple
    delta2: float
    delta3: float

    def __post_init__(self):
        n = len(self.covering)
        if not (len(self.assoc_sectors) == len(self.gammas) == n):
            raise ValidationError(
                "covering, quotient sectors and rays must have equal length")
        if not 0.0 < self.delta2 < 1.0:
            raise ValidationError("delta2 must lie strictly between 0 and 1")
        if self.delta3 <= 0:
            raise ValidationError("delta3 must be positive")


@dataclass(frozen=True)
class AssumptionRow:
    family: str
    kappa: int
    s: int
    beta: int
    slack: float
    passed: bool


@dataclass(frozen=True)
class AssumptionReport:
    rows: tuple
    passed: bool
    vacuous: bool
    passed_prime: bool = None


def check_assumption_A(spec, norms, sched):
    """Slack rows for the smallness conditions tying derivative orders,
    contraction shifts and norm constants together, plus the weaker
    variant rows used by the refined estimates.

    Cross-checks that ``norms.K0`` equals the largest t-derivative order
    on the right-hand side before computing anything.
    """
    max_dt = spec.max_dt_order
    if norms.K0 != max_dt:
        raise ValidationError(
            f"K0={norms.K0} does not match the largest t-derivative "
            f"order {max_dt}")
    lam = -math.log(spec.q)
    rows = []
    for idx, term in enumerate(spec.rhs_terms):
        for s in term.support:
            sigma = spec.S - term.dz_order + s
            first = norms.C * sigma - term.dt_order \
                - 2 * term.t_shift * norms.M * lam
            second = (term.z_shift - 2 * norms.A1 * sigma
                      - term.t_shift * norms.C) - first * sched.d2
            rows.append(AssumptionRow("A1", idx, s, None, first,
                                      first >= 0.0))
            rows.append(AssumptionRow("A2", idx, s, None, second,
                                      second > 0.0))
            first_p = norms.C * sigma - term.dt_order
            second_p = term.z_shift - 2 * norms.A1 * sigma
            rows.append(AssumptionRow("A'1", idx, s, None, first_p,
                                      first_p >= 0.0))
            rows.append(AssumptionRow("A'2", idx, s, None, second_p,
                                      second_p > 0.0))
    if not rows:
        return AssumptionReport(rows=(), passed=True, vacuous=True,
                                passed_prime=True)
    passed = all(r.passed for r in rows if r.family in ("A1", "A2"))
    passed_prime = all(r.passed for r in rows if r.family in ("A'1", "A'2"))
    return AssumptionReport(rows=tuple(rows), passed=passed, vacuous=False,
                            passed_prime=passed_prime)


def check_assumption_B(spec, sched, B_max):
    """Radius-compatibility rows: the outer radii must survive the
    argument contraction order by order, the inner ones must shrink at
    least as fast, and the inner boundary at order S must clear the
    contracted plateau.  Reports both the per-order loop rows and the
    closed-form exponent rows so they can be cross-checked.
    """
    if B_max <= 0:
        raise DomainTooSmallError("B_max must be at least 1")
    rows = []
    for idx, term in enumerate(spec.rhs_terms):
        m1 = term.t_shift
        qm1 = spec.q ** m1
        for s in term.support:
            drop = term.dz_order + s
            # outer: R_beta >= q^m1 R_(beta-drop), closed form d2*drop <= m1
            closed_outer = m1 - sched.d2 * drop
            rows.append(AssumptionRow("B", idx, s, None, closed_outer,
                                      closed_outer >= 0.0))
            for beta in range(drop, B_max + 1):
                slack = sched.outer(beta) - qm1 * sched.outer(beta - drop)
                rows.append(AssumptionRow("B", idx, s, beta, slack,
                                          slack >= 0.0))
            # inner: Rhat_beta <= q^m1 Rhat_(beta-drop) once both orders
            # are past the plateau; closed form dhat2*drop >= m1
            closed_inner = sched.dhat2 * drop - m1
            rows.append(AssumptionRow("B'", idx, s, None, closed_inner,
                                      closed_inner >= 0.0))
            for beta in range(max(spec.S, drop), B_max + 1):
                slack = qm1 * sched.inner(beta - drop) - sched.inner(beta)
                rows.append(AssumptionRow("B'", idx, s, beta, slack,
                                          slack >= 0.0))
        # boundary of the plateau: the first geometric inner radius must
        # clear the contracted plateau value
        bnd = qm1 * sched.Rhat0 - sched.inner(spec.S)
        rows.append(AssumptionRow("B'boundary", idx, 0, None, bnd,
                                  bnd >= 0.0))
    if not rows:
        return AssumptionReport(rows=(), passed=True, vacuous=True)
    return AssumptionReport(rows=tuple(rows),
                            passed=all(r.passed for r in rows),
                            vacuous=False)


@dataclass(frozen=True)
class CoveringReport:
    passed: bool
    coverage_ok: bool
    pairwise_ok: bool
    nu0: float
    seam_overlaps: tuple
    gap_witness: float = None


def check_good_covering(covering):
    """Check that the sectors cover the full circle, that only cyclically
    adjacent sectors overlap, and report the smallest radius."""
    n = len(covering)
    if n < 2:
        raise ValidationError("a good covering needs at least two sectors")
    order = sorted(range(n), key=lambda k: covering[k].direction)
    sectors = [covering[k] for k in order]

    # elementary arcs between all interval endpoints (mod 2pi)
    cuts = sorted({(s.lo % TWO_PI) for s in sectors}
                  | {(s.hi % TWO_PI) for s in sectors})
    arcs = []
    for i, lo in enumerate(cuts):
        hi = cuts[(i + 1) % len(cuts)]
        if (i + 1) == len(cuts):
            hi += TWO_PI
        if hi - lo < 1e-12:
            continue
        arcs.append((lo, hi))

    coverage_ok = True
    pairwise_ok = True
    gap_witness = None
    for lo, hi in arcs:
        midpoint = (lo + hi) / 2
        owners = [i for i, s in enumerate(sectors)
                  if s.contains_angle(midpoint)]
        if not owners:
            coverage_ok = False
            if gap_witness is None:
                gap_witness = midpoint % TWO_PI
        elif len(owners) > 2:
            pairwise_ok = False
        elif len(owners) == 2:
            i, j = owners
            if (j - i) % n not in (1, n - 1):
                pairwise_ok = False

    seam_overlaps = []
    for i in range(n):
        s, t = sectors[i], sectors[(i + 1) % n]
        gap = (t.direction - s.direction) % TWO_PI
        seam_overlaps.append(gap < (s.opening + t.opening) / 2)

    nu0 = min(s.radius for s in sectors if s.radius is not None) \
        if any(s.radius is not None for s in sectors) else math.inf
    passed = coverage_ok and pairwise_ok and all(seam_overlaps)
    return CoveringReport(passed=passed, coverage_ok=coverage_ok,
                          pairwise_ok=pairwise_ok, nu0=nu0,
                          seam_overlaps=tuple(seam_overlaps),
                          gap_witness=gap_witness)


@dataclass(frozen=True)
class GeometryReport:
    passed: bool
    min_a_distance: float


def _ray_distance(point, gamma):
    """Distance from ``point`` to the ray {s e^(i gamma), s >= 0}."""
    u = point * cmath.exp(-1j * gamma)
    if u.real <= 0.0:
        return abs(point)
    return abs(u.imag)


def validate_geometry(spec, geom, sectors):
    """Check the summation geometry for the listed sector indices.

    For each index the summation ray must lie inside the quotient sector,
    the kernel decay margin delta2 must hold across the whole quotient
    angle range, the quotient range generated by the time domain and the
    covering sector must fit inside the declared quotient sector, and the
    ray must keep distance delta3 from the base point a.  Violations
    raise ``GeometryError``; on success the report carries the smallest
    ray-to-a distance encountered.
    """
    min_dist = math.inf
    t_dom = geom.t_domain
    for l in sectors:
        if not 0 <= l < len(geom.covering):
            raise ValidationError(f"sector index {l} out of range")
        cov = geom.covering[l]
        assoc = geom.assoc_sectors[l]
        gamma = geom.gammas[l]

        # quotient angle range: arg t - arg eps over the two domains
        lo = (t_dom.direction - t_dom.opening / 2) - \
            (cov.direction + cov.opening / 2)
        hi = (t_dom.direction + t_dom.opening / 2) - \
            (cov.direction - cov.opening / 2)
        center = (lo + hi) / 2
        halfwidth = (hi - lo) / 2

        off = _angle_diff(center, assoc.direction)
        if abs(off) + halfwidth > assoc.opening / 2 + 1e-12:
            raise GeometryError(
                f"quotient angles of sector {l} spill out of its "
                f"quotient sector")
        if not assoc.contains_angle(gamma):
            raise GeometryError(
                f"summation ray of sector {l} lies outside its "
                f"quotient sector")
        # worst-case kernel decay over the quotient range
        g_off = _angle_diff(gamma, 0.0)
        worst = max(abs(_angle_diff(g_off + lo, 0.0)),
                    abs(_angle_diff(g_off + hi, 0.0)))
        if math.cos(worst) < geom.delta2:
            raise GeometryError(
                f"kernel decay margin delta2={geom.delta2} fails on "
                f"sector {l}")
        dist = _ray_distance(complex(spec.a), gamma)
        if dist < geom.delta3:
            raise GeometryError(
                f"summation ray of sector {l} passes within delta3 of the "
                f"base point")
        min_dist = min(min_dist, dist)
    return GeometryReport(passed=True, min_a_distance=min_dist)
