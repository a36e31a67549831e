"""Dirichlet-type sums, expansion remainder checks, and flat-decay fits.

The central object is the series ``sum_b D1^b q^(A1 b^2)
exp(-D2 q^(d2 b) / eps)``: a direct summation with an honest tail bound,
an Euler-Maclaurin evaluation that crosses the exponential wall by
summing the head exactly and applying the correction terms only past it,
and the envelope check that the sum decays like ``exp(-c log^2 eps)`` at
the predicted rate.  Alongside live the tools for q-Gevrey expansion
remainders: per-order remainder-versus-bound rows, envelope fits of the
constants, a feasibility drift diagnostic, and least-squares fits of the
flat decay type, plus the finite Laplace-kernel integral used to show
that flat decay survives integration.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError, ValidationError
from .quadrature import geometric_edges, panel_quad

__all__ = [
    "DirichletParams",
    "dirichlet_direct",
    "dirichlet_euler_maclaurin",
    "dirichlet_bound_check",
    "envelope_constant",
    "FlatFit",
    "fit_flat_type",
    "check_expansion",
    "watson_integral",
    "watson_transfer",
]

# B_2 .. B_18, enough for the correction terms to hit roundoff once the
# summand's log-derivative is of order one
_BERNOULLI = {
    2: 1.0 / 6.0,
    4: -1.0 / 30.0,
    6: 1.0 / 42.0,
    8: -1.0 / 30.0,
    10: 5.0 / 66.0,
    12: -691.0 / 2730.0,
    14: 7.0 / 6.0,
    16: -3617.0 / 510.0,
    18: 43867.0 / 798.0,
}

WALL_THRESHOLD = 0.05


@dataclass(frozen=True)
class DirichletParams:
    D1: float
    D2: float
    A1: float
    d2: float
    q: float

    def __post_init__(self):
        if self.D1 <= 0 or self.D2 <= 0 or self.A1 <= 0 or self.d2 <= 0:
            raise ValidationError("Dirichlet parameters must be positive")
        if not 0.0 < self.q < 1.0:
            raise ValidationError("q must lie strictly between 0 and 1")


def _summand(p, eps, t):
    """The series term as a function of a real (possibly non-integer) index."""
    t = np.asarray(t, dtype=float)
    return (p.D1 ** t * p.q ** (p.A1 * t * t)
            * np.exp(-p.D2 * p.q ** (p.d2 * t) / eps))


@dataclass(frozen=True)
class DirectSum:
    value: float
    terms_used: int
    tail_bound: float


def dirichlet_direct(p, eps):
    """Sum the series term by term until the q-Gaussian envelope makes
    everything beyond provably negligible; the reported tail bound is a
    true bound on what was dropped."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    total = 0.0
    b = 0
    while True:
        total += float(_summand(p, eps, b))
        b += 1
        next_env = p.D1 ** b * p.q ** (p.A1 * b * b)
        ratio = p.D1 * p.q ** (p.A1 * (2 * b + 1))
        if (next_env <= 1e-18 * max(total, 1e-300) and ratio <= 0.5) \
                or b >= 10000:
            break
    return DirectSum(value=total, terms_used=b, tail_bound=2.0 * next_env)


def _log_deriv_chain(p, eps, t, count):
    """g', g'', ... at index t for g = log(summand)."""
    lq = math.log(p.q)
    x = p.D2 / eps * p.q ** (p.d2 * t)
    g = [0.0] * (count + 1)
    if count >= 1:
        g[1] = math.log(p.D1) + 2 * p.A1 * t * lq - x * p.d2 * lq
    if count >= 2:
        g[2] = 2 * p.A1 * lq - x * (p.d2 * lq) ** 2
    for n in range(3, count + 1):
        g[n] = -x * (p.d2 * lq) ** n
    return g


def _summand_derivatives(p, eps, t, count):
    """f, f', ..., f^(count) at t via the Bell-polynomial recurrence
    f^(n) = f * Y_n built from the derivatives of log f."""
    g = _log_deriv_chain(p, eps, t, count)
    y = [1.0]
    for n in range(1, count + 1):
        y.append(sum(math.comb(n - 1, k) * y[n - 1 - k] * g[k + 1]
                     for k in range(n)))
    f0 = float(_summand(p, eps, t))
    return [f0 * yn for yn in y]


def _graded_edges(p, eps, t_lo, t_hi):
    """Panel edges refined where the wall factor exp(-x) still moves."""
    edges = [float(t_lo)]
    t = float(t_lo)
    while t < t_hi - 1e-12:
        x = p.D2 / eps * p.q ** (p.d2 * t)
        step = 0.15 if 1e-4 <= x <= 200.0 else 0.5
        t = min(float(t_hi), t + step)
        edges.append(t)
    return np.asarray(edges)


@dataclass(frozen=True)
class EulerMaclaurin:
    value: float
    cutoff: float
    correction: float


def dirichlet_euler_maclaurin(p, eps):
    """Evaluate the series by head summation plus tail Euler-Maclaurin.

    The correction terms only converge once the wall factor has opened
    up, so the head indices (where ``D2 q^(d2 b)/eps`` is still large)
    are summed directly and the integral-plus-derivatives machinery is
    anchored at the first index past the wall.  ``correction`` reports
    the gap between the returned value and the plain integral of the
    summand from 0 to ``cutoff``.
    """
    if eps <= 0:
        raise ValidationError("eps must be positive")
    lam = -math.log(p.q)
    b0 = 0
    while p.D2 / eps * p.q ** (p.d2 * b0) > WALL_THRESHOLD:
        b0 += 1
    cutoff = b0 + math.sqrt(60.0 / (p.A1 * lam)) \
        + 2.0 * abs(math.log(p.D1)) / (p.A1 * lam)
    head = sum(float(_summand(p, eps, b)) for b in range(b0))
    tail_integral, _ = panel_quad(lambda t: _summand(p, eps, t),
                                  _graded_edges(p, eps, b0, cutoff))
    derivs = _summand_derivatives(p, eps, b0, 17)
    em_terms = sum(_BERNOULLI[2 * j] / math.factorial(2 * j)
                   * derivs[2 * j - 1] for j in range(1, 10))
    value = head + tail_integral + derivs[0] / 2.0 - em_terms
    if b0 > 0:
        head_integral, _ = panel_quad(lambda t: _summand(p, eps, t),
                                      _graded_edges(p, eps, 0.0, b0))
    else:
        head_integral = 0.0
    correction = value - (head_integral + tail_integral)
    return EulerMaclaurin(value=float(value), cutoff=float(cutoff),
                          correction=float(correction))


def envelope_constant(p, rate, grid):
    """Smallest constant E with ``sum(eps) <= E exp(-rate log^2 eps)``
    over the grid, computed as the sup of the compensated product."""
    best = 0.0
    for eps in np.asarray(grid, dtype=float):
        s = dirichlet_direct(p, eps).value
        best = max(best, s * math.exp(rate * math.log(eps) ** 2))
    return best


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    rel_change: float
    E1: float


def dirichlet_bound_check(p, Delta, grid):
    """Check that the compensated envelope constant at the predicted
    decay rate is finite and stable under grid refinement."""
    if Delta <= 1.0:
        raise HypothesisError("Delta must exceed 1")
    if p.D2 <= 1.0:
        raise HypothesisError("the bound needs D2 > 1")
    grid = np.asarray(grid, dtype=float)
    if grid.size < 10:
        raise ValidationError("bound check needs at least 10 grid points")
    if np.any(grid <= 0.0) or np.any(grid > 0.5):
        raise ValidationError("grid points must lie in (0, 0.5]")
    lam = -math.log(p.q)
    rate = p.A1 / (2 * p.d2 ** 2 * Delta * lam)
    e1 = envelope_constant(p, rate, grid)
    fine = np.geomspace(grid.min(), grid.max(), 2 * grid.size)
    e1_fine = envelope_constant(p, rate, fine)
    rel_change = abs(e1_fine - e1) / e1
    return BoundCheck(passed=rel_change < 0.1, rel_change=rel_change, E1=e1)


@dataclass(frozen=True)
class FlatFit:
    fitted_type: float
    dropped: int


def fit_flat_type(samples, q, min_count=8):
    """Fit ``v ~ exp(-log^2 eps / (2 log(1/q) L))`` and return L.

    Zero values are dropped (and counted); a non-decaying sequence comes
    back with infinite type.
    """
    kept = [(e, v) for e, v in samples if v > 0]
    dropped = len(samples) - len(kept)
    if len(kept) < min_count:
        raise ValidationError(
            f"flat-type fit needs at least {min_count} nonzero samples")
    lam = -math.log(q)
    x = np.array([math.log(e) ** 2 for e, _ in kept])
    y = np.array([math.log(v) for _, v in kept])
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope = float(coef[0])
    if slope >= 0.0:
        return FlatFit(fitted_type=math.inf, dropped=dropped)
    return FlatFit(fitted_type=-1.0 / (2.0 * lam * slope), dropped=dropped)


@dataclass(frozen=True)
class ExpansionRow:
    order: int
    remainder: float
    bound: float
    passed: bool
    eps: float


@dataclass(frozen=True)
class ExpansionReport:
    rows: tuple
    C1_fit: float
    H_fit: float
    drift: float
    feasible: bool
    skipped: int


def check_expansion(samples, coeffs, q, gevrey_type, C1=None, H=None,
                    noise_floor=None):
    """Per-order remainder rows against the q-Gevrey bound
    ``C1 H^N q^(-A N^2/2) |eps|^(N+1) / (N+1)!``.

    Each row is judged at its own worst grid point (the argmax of
    remainder over bound).  Rows whose remainder never rises above the
    noise floor are skipped rather than spuriously passed.  The report
    also carries envelope fits of (C1, H) from the data and a drift
    diagnostic: if the factorial-free envelope of the remainders keeps
    steepening across orders, no constants can make the claimed type
    work, and the expansion is flagged infeasible.
    """
    lam = -math.log(q)
    a_type = gevrey_type
    eps = np.array([e for e, _ in samples], dtype=float)
    vals = np.array([v for _, v in samples], dtype=complex)
    fmax = float(np.max(np.abs(vals))) if len(samples) else 0.0
    floor = 1e-14 * fmax if noise_floor is None else noise_floor
    log_eps = np.log(eps)

    rows = []
    checked = []
    skipped = 0
    partial = np.zeros_like(vals)
    power = np.ones_like(eps)
    for order, c in enumerate(coeffs):
        partial = partial + c * power
        power = power * eps
        rem = np.abs(vals - partial)
        rmax = float(np.max(rem))
        if rmax <= floor:
            rows.append(ExpansionRow(order=order, remainder=rmax, bound=None,
                                     passed=None, eps=None))
            skipped += 1
            continue
        pos = rem > 0
        m = float(np.max(np.log(rem[pos]) - (order + 1) * log_eps[pos]))
        checked.append((order, m))
        if C1 is not None and H is not None:
            bound = (C1 * H ** order * q ** (-a_type * order ** 2 / 2.0)
                     * eps ** (order + 1) / math.factorial(order + 1))
            i = int(np.argmax(rem / bound))
            rows.append(ExpansionRow(
                order=order, remainder=float(rem[i]), bound=float(bound[i]),
                passed=bool(rem[i] <= bound[i] * (1 + 1e-9)),
                eps=float(eps[i])))
        else:
            rows.append(ExpansionRow(order=order, remainder=rmax, bound=None,
                                     passed=None, eps=None))

    c1_fit = h_fit = None
    if len(checked) >= 2:
        orders = np.array([n for n, _ in checked], dtype=float)
        ys = np.array([m + math.lgamma(n + 2) - a_type * lam * n ** 2 / 2.0
                       for n, m in checked])
        slopes = [(ys[j] - ys[i]) / (orders[j] - orders[i])
                  for i in range(len(ys)) for j in range(i + 1, len(ys))]
        slope = float(np.median(slopes))
        intercept = float(np.max(ys - slope * orders))
        c1_fit = math.exp(intercept)
        h_fit = math.exp(slope)

    if len(checked) >= 6:
        orders = np.array([n for n, _ in checked], dtype=float)
        zs = np.array([m - a_type * lam * n ** 2 / 2.0 for n, m in checked])
        half = len(checked) // 2
        s1 = float(np.polyfit(orders[:half], zs[:half], 1)[0])
        s2 = float(np.polyfit(orders[half:], zs[half:], 1)[0])
        drift = s2 - s1
    else:
        drift = 0.0
    feasible = drift <= 0.5 * lam
    return ExpansionReport(rows=tuple(rows), C1_fit=c1_fit, H_fit=h_fit,
                           drift=drift, feasible=feasible, skipped=skipped)


def watson_integral(f, b, x):
    """``integral_0^b f(s) exp(-s/x) ds`` with panels graded toward 0."""
    if b <= 0 or x <= 0:
        raise ValidationError("watson_integral needs b > 0 and x > 0")
    edges = geometric_edges(min(x, b) * 1e-6, b)
    value, _ = panel_quad(lambda s: np.asarray(f(s)) * np.exp(-s / x), edges)
    return float(value)


@dataclass(frozen=True)
class TransferReport:
    f_fit: FlatFit
    i_fit: FlatFit
    passed: bool


def watson_transfer(f, b, q, x_grid=None):
    """Compare the flat type of ``f`` with the flat type of its kernel
    integral: integration must not lose flatness (one-sided check)."""
    if x_grid is None:
        x_grid = np.logspace(-4.0, math.log10(0.3), 14)
    f_fit = fit_flat_type([(float(s), float(f(s))) for s in x_grid], q)
    i_fit = fit_flat_type([(float(x), watson_integral(f, b, x))
                           for x in x_grid], q)
    return TransferReport(f_fit=f_fit, i_fit=i_fit,
                          passed=i_fit.fitted_type
                          >= 0.85 * f_fit.fitted_type)
