"""Order-by-order coefficient recursion in the convolution plane.

Each series coefficient is kept as a closed-form list of terms: a
polynomial-in-eps prefactor times powers of tau and eps, a product of
simple pole factors at dilated copies of the base point, and optionally
a reference to one of the initial slices evaluated at a dilated
argument.  Deriving the coefficient of order ``beta`` substitutes the
contracted argument into lower-order coefficients, shifts every pole
index by the contraction amount, and appends the fresh pole factor
coming from inverting the symbol of the left-hand side.

Keeping references to the initial slices as opaque leaves (instead of
expanding their rational structure) is what keeps the single-branch
problems at one term per order.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError, SingularityError
from .model import eval_initial, poly_eval

DEFAULT_TERM_CAP = 200_000

__all__ = [
    "Term",
    "BorelCoefficient",
    "BorelFamily",
    "build_coefficient",
    "eval_W",
    "singularity_ledger",
    "substitution_residual",
]


@dataclass(frozen=True)
class Term:
    """``poly(coeff, eps) * tau^tp * eps^ep * prod_k (a - q^-k tau)^-1``
    times the ``leaf``-th initial slice at ``q^-dilation tau`` (if set)."""

    coeff: tuple
    tau_power: int
    eps_power: int
    poles: tuple
    dilation: int
    leaf: int = None

    def key(self):
        return (-1 if self.leaf is None else self.leaf, self.dilation,
                self.tau_power, self.eps_power, self.poles)


@dataclass(frozen=True)
class BorelCoefficient:
    problem: object
    beta: int
    terms: tuple
    singularities: tuple


def _poly_scale(p, s):
    return tuple(c * s for c in p)


def _poly_mul(p, r):
    out = [0j] * (len(p) + len(r) - 1)
    for i, ci in enumerate(p):
        for j, cj in enumerate(r):
            out[i + j] += ci * cj
    return tuple(out)


def _poly_add(p, r):
    n = max(len(p), len(r))
    p = p + (0j,) * (n - len(p))
    r = r + (0j,) * (n - len(r))
    return tuple(a + b for a, b in zip(p, r))


def _poly_trim(p):
    n = len(p)
    while n and p[n - 1] == 0:
        n -= 1
    return p[:n]


def _base_terms(spec, beta):
    terms = []
    for rt in spec.initial_data[beta]:
        terms.append(Term(coeff=(complex(rt.coeff),),
                          tau_power=rt.tau_power,
                          eps_power=rt.eps_power,
                          poles=(0,) * rt.pole_order,
                          dilation=0, leaf=None))
    return tuple(sorted(terms, key=Term.key))


def _substitute(term, m1, q):
    """Replace tau by q^-m1 tau inside the term."""
    if m1 == 0:
        return term
    return Term(coeff=_poly_scale(term.coeff, q ** (-m1 * term.tau_power)),
                tau_power=term.tau_power,
                eps_power=term.eps_power,
                poles=tuple(k + m1 for k in term.poles),
                dilation=term.dilation + m1,
                leaf=term.leaf)


def _merge(raw_terms):
    acc = {}
    for t in raw_terms:
        k = t.key()
        if k in acc:
            acc[k] = _poly_add(acc[k], t.coeff)
        else:
            acc[k] = t.coeff
    merged = []
    for k in sorted(acc):
        coeff = _poly_trim(acc[k])
        if not coeff:
            continue
        leaf, dilation, tau_power, eps_power, poles = k
        merged.append(Term(coeff=coeff, tau_power=tau_power,
                           eps_power=eps_power, poles=poles,
                           dilation=dilation,
                           leaf=None if leaf < 0 else leaf))
    return tuple(merged)


def _derive_terms(spec, beta, lower, term_cap):
    """One recursion step: the term list of order ``beta`` from below."""
    h = beta - spec.S
    q = spec.q
    raw = []
    for rhs in spec.rhs_terms:
        k0, k1 = rhs.dt_order, rhs.dz_order
        m1, m2 = rhs.t_shift, rhs.z_shift
        for h1, bpoly in rhs.z_coeffs:
            if h1 > h:
                continue
            h2 = h - h1
            scalar = (math.perm(h, h1)
                      * q ** (m2 * h2 - m1 * (k0 + 1)) * (-1) ** k0)
            ref = h2 + k1
            if ref < spec.S:
                ref_terms = (Term(coeff=(1.0 + 0.0j,), tau_power=0,
                                  eps_power=0, poles=(), dilation=0,
                                  leaf=ref),)
            else:
                ref_terms = lower[ref]
            for rt in ref_terms:
                sub = _substitute(rt, m1, q)
                raw.append(Term(
                    coeff=_poly_mul(_poly_scale(sub.coeff, scalar), bpoly),
                    tau_power=sub.tau_power + k0,
                    eps_power=sub.eps_power - k0,
                    poles=tuple(sorted(sub.poles + (0,))),
                    dilation=sub.dilation,
                    leaf=sub.leaf))
    terms = _merge(raw)
    if len(terms) > term_cap:
        raise ResourceError(
            f"coefficient of order {beta} explodes to {len(terms)} terms "
            f"(cap {term_cap})")
    return terms


def _collect_singularities(spec, terms):
    a = complex(spec.a)
    q = spec.q
    pts = set()
    for t in terms:
        for k in t.poles:
            pts.add(a * q ** k)
        if t.leaf is not None and any(rt.pole_order > 0
                                      for rt in spec.initial_data[t.leaf]):
            pts.add(a * q ** t.dilation)
    return tuple(sorted(pts, key=lambda p: (abs(p),
                                            math.atan2(p.imag, p.real))))


def build_coefficient(spec, beta, term_cap=DEFAULT_TERM_CAP):
    """Build the order-``beta`` coefficient bottom-up."""
    lower = {}
    for b in range(min(beta, spec.S - 1) + 1):
        lower[b] = _base_terms(spec, b)
    for b in range(spec.S, beta + 1):
        lower[b] = _derive_terms(spec, b, lower, term_cap)
    terms = lower[beta]
    return BorelCoefficient(problem=spec, beta=beta, terms=terms,
                            singularities=_collect_singularities(spec, terms))


class BorelFamily:
    """Memoizing view of the coefficient sequence of one problem."""

    def __init__(self, spec, term_cap=DEFAULT_TERM_CAP):
        self.spec = spec
        self.term_cap = term_cap
        self._cache = {}

    def coefficient(self, beta):
        if beta not in self._cache:
            self._cache[beta] = build_coefficient(self.spec, beta,
                                                  term_cap=self.term_cap)
        return self._cache[beta]


def singularity_ledger(spec, beta, term_cap=DEFAULT_TERM_CAP):
    """All poles of the order-``beta`` coefficient, sorted by modulus."""
    return build_coefficient(spec, beta, term_cap=term_cap).singularities


def eval_W(coef, eps, tau):
    """Evaluate a coefficient at scalar ``eps`` and scalar or array ``tau``.

    Raises ``SingularityError`` when any evaluation point comes within a
    relative guard distance of one of the coefficient's poles; the
    exception carries the offending pole location in the tau plane.
    """
    spec = coef.problem
    a = complex(spec.a)
    q = spec.q
    tau_arr = np.asarray(tau, dtype=complex)
    scalar = tau_arr.ndim == 0
    tau_arr = np.atleast_1d(tau_arr)
    total = np.zeros(tau_arr.shape, dtype=complex)
    guard = 1e-9 * abs(a)
    for t in coef.terms:
        val = poly_eval(t.coeff, eps) * np.ones_like(tau_arr)
        if t.eps_power:
            val = val * eps ** t.eps_power
        if t.tau_power:
            val = val * tau_arr ** t.tau_power
        for k in t.poles:
            denom = a - q ** (-k) * tau_arr
            if np.min(np.abs(denom)) < guard:
                raise SingularityError(
                    f"evaluation point too close to the pole at a*q^{k}",
                    pole=a * q ** k)
            val = val / denom
        if t.leaf is not None:
            u = q ** (-t.dilation) * tau_arr
            try:
                leaf_val = eval_initial(spec, t.leaf, eps, u)
            except SingularityError as exc:
                raise SingularityError(
                    f"evaluation point too close to the dilated pole of "
                    f"initial slice {t.leaf}",
                    pole=exc.pole * q ** t.dilation) from None
            val = val * leaf_val
        total += val
    return complex(total[0]) if scalar else total


def substitution_residual(spec, fam, order, eps, tau):
    """Relative gap in the defining identity at one evaluation point.

    The left side evaluates the symbolically derived coefficient of
    order ``order + S``; the right side recombines the lower-order
    coefficients numerically with the contraction substituted into the
    argument.  Both sides agree to rounding when the recursion is
    implemented correctly.
    """
    S = spec.S
    a = complex(spec.a)
    q = spec.q
    lhs = eval_W(fam.coefficient(order + S), eps, tau)
    rhs = 0j
    for rhs_term in spec.rhs_terms:
        k0, k1 = rhs_term.dt_order, rhs_term.dz_order
        m1, m2 = rhs_term.t_shift, rhs_term.z_shift
        for h1, bpoly in rhs_term.z_coeffs:
            if h1 > order:
                continue
            h2 = order - h1
            scalar = (math.perm(order, h1)
                      * q ** (m2 * h2 - m1 * (k0 + 1)) * (-1) ** k0)
            w = eval_W(fam.coefficient(h2 + k1), eps, q ** (-m1) * tau)
            rhs += (scalar * poly_eval(bpoly, eps)
                    * tau ** k0 * eps ** (-k0) / (a - tau) * w)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
