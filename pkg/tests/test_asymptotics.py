"""Dirichlet-type series, flat-decay type fits, expansion remainder bounds,
and the integral transfer of flatness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammainc

from qgevrey.asymptotics import (
    DirichletParams,
    check_expansion,
    dirichlet_bound_check,
    dirichlet_direct,
    dirichlet_euler_maclaurin,
    envelope_constant,
    fit_flat_type,
    watson_integral,
    watson_transfer,
)
from qgevrey.errors import HypothesisError, ValidationError
from qgevrey.quadrature import gaussian_moment

LN2 = math.log(2.0)


def test_gaussian_moment_closed_form():
    # completing the square: integral of exp(-x^2 - a x) is exp(a^2/4) sqrt(pi)
    for a in (0.0, 1.0, -1.0, 2.0, -2.0):
        oracle = math.exp(a * a / 4.0) * math.sqrt(math.pi)
        assert abs(gaussian_moment(a) - oracle) <= 1e-10 * oracle


@pytest.fixture(scope="module")
def params():
    return DirichletParams(D1=1.0, D2=2.0, A1=1.0, d2=1.0, q=0.5)


def long_sum(p, eps, n=200):
    return sum(p.D1 ** b * p.q ** (p.A1 * b * b)
               * math.exp(-p.D2 * p.q ** (p.d2 * b) / eps)
               for b in range(n))


def test_direct_sum_against_long_partial_sum(params):
    for eps in (0.05, 0.2, 1.0):
        oracle = long_sum(params, eps)
        got = dirichlet_direct(params, eps)
        assert got.value == pytest.approx(oracle, rel=1e-13)
        assert got.terms_used < 200
        assert abs(got.value - oracle) <= got.tail_bound + 1e-16 * oracle


def test_direct_sum_dominated_by_first_term():
    p = DirichletParams(D1=1.0, D2=2.0, A1=80.0, d2=1.0, q=0.5)
    for eps in (0.1, 0.5):
        assert dirichlet_direct(p, eps).value == pytest.approx(
            math.exp(-2.0 / eps), rel=1e-10)


def test_euler_maclaurin_matches_direct(params):
    for d1 in (0.7, 1.3):
        p = DirichletParams(D1=d1, D2=1.5, A1=0.05, d2=1.0, q=0.5)
        for eps in (0.03, 0.1, 0.3):
            d = dirichlet_direct(p, eps).value
            em = dirichlet_euler_maclaurin(p, eps).value
            assert abs(em - d) <= 1e-8 * (1.0 + abs(d))


def test_euler_maclaurin_correction_bounded(params):
    # the sawtooth weight is at most 1/2 in modulus, so the correction is
    # bounded by half the total variation of the summand
    p = DirichletParams(D1=1.2, D2=1.5, A1=0.05, d2=1.0, q=0.5)
    eps = 0.1
    em = dirichlet_euler_maclaurin(p, eps)
    lam = math.log(2.0)
    ts = np.arange(0.0, em.cutoff + 1e-9, 0.001)
    f = (p.D1 ** ts * p.q ** (p.A1 * ts * ts)
         * np.exp(-p.D2 * p.q ** (p.d2 * ts) / eps))
    fp = f * (math.log(p.D1) + 2 * p.A1 * ts * math.log(p.q)
              - p.D2 * p.d2 * math.log(p.q) / eps * p.q ** (p.d2 * ts))
    total_variation = np.trapezoid(np.abs(fp), ts)
    assert abs(em.correction) <= 0.5 * total_variation * 1.02


def test_bound_check_stable_and_hypothesis_guard():
    p = DirichletParams(D1=1.2, D2=1.5, A1=0.05, d2=1.0, q=0.5)
    grid = np.logspace(-3, math.log10(0.3), 12)
    rep = dirichlet_bound_check(p, 1.1, grid)
    assert rep.passed
    assert rep.rel_change < 0.1
    assert rep.E1 > 0 and math.isfinite(rep.E1)

    with pytest.raises(HypothesisError, match="Delta must exceed 1"):
        dirichlet_bound_check(p, 0.9, grid)
    bad = DirichletParams(D1=1.2, D2=0.8, A1=0.05, d2=1.0, q=0.5)
    with pytest.raises(HypothesisError):
        dirichlet_bound_check(bad, 1.1, grid)
    with pytest.raises(ValidationError):
        dirichlet_bound_check(p, 1.1, grid[:4])


def test_bound_constant_monotone_in_delta():
    p = DirichletParams(D1=1.2, D2=1.5, A1=0.05, d2=1.0, q=0.5)
    grid = np.logspace(-3, math.log10(0.3), 12)
    e_tight = dirichlet_bound_check(p, 1.1, grid).E1
    e_loose = dirichlet_bound_check(p, 3.0, grid).E1
    assert e_loose <= e_tight


def test_envelope_constant_negative_control():
    # a rate faster than the true decay cannot be matched by any constant:
    # extending the grid toward 0 must blow the envelope up
    p = DirichletParams(D1=1.2, D2=1.5, A1=0.05, d2=1.0, q=0.5)
    lam = LN2
    true_rate = p.A1 / (p.d2 ** 2 * lam)
    near = envelope_constant(p, 1.3 * true_rate, np.logspace(-3, -0.5, 12))
    far = envelope_constant(p, 1.3 * true_rate, np.logspace(-6, -0.5, 24))
    assert far > 2.0 * near
    # the lemma's own rate stays put under the same extension
    lemma_rate = p.A1 / (2 * p.d2 ** 2 * 1.1 * lam)
    base = envelope_constant(p, lemma_rate, np.logspace(-3, -0.5, 12))
    ext = envelope_constant(p, lemma_rate, np.logspace(-6, -0.5, 24))
    assert ext <= base * 1.05


def flat_samples(type_a, lo=-4.0, hi=math.log10(0.3), n=14):
    eps = np.logspace(lo, hi, n)
    return [(e, math.exp(-math.log(e) ** 2 / (2 * LN2 * type_a)))
            for e in eps]


def test_fit_flat_type_exact():
    fit = fit_flat_type(flat_samples(3.0), 0.5)
    assert fit.fitted_type == pytest.approx(3.0, abs=1e-9)
    assert fit.dropped == 0


def test_fit_flat_type_round_trip_ten_percent():
    for a in (0.5, 1.0, 2.0):
        fit = fit_flat_type(flat_samples(a), 0.5)
        assert abs(fit.fitted_type - a) <= 0.1 * a


def test_fit_flat_type_envelope_round_trip():
    # sample the coefficient-family envelope min_n q^(-A n^2/2) x^n and
    # check the recovered type stays within ten percent
    for a in (0.5, 1.0, 2.0):
        xs = np.logspace(-4, math.log10(0.3), 14)
        samples = []
        for x in xs:
            ns = np.arange(0, 80)
            env = ns * math.log(x) + a * LN2 * ns * ns / 2.0
            samples.append((x, math.exp(env.min())))
        fit = fit_flat_type(samples, 0.5)
        assert abs(fit.fitted_type - a) <= 0.1 * a


def test_fit_flat_type_constant_is_infinite():
    samples = [(e, 0.7) for e in np.logspace(-4, -1, 10)]
    fit = fit_flat_type(samples, 0.5)
    assert math.isinf(fit.fitted_type)


def test_fit_flat_type_convergent_data_drifts_up():
    shallow = [(e, e ** 2) for e in np.logspace(-2, -1, 10)]
    deep = [(e, e ** 2) for e in np.logspace(-6, -1, 10)]
    t1 = fit_flat_type(shallow, 0.5).fitted_type
    t2 = fit_flat_type(deep, 0.5).fitted_type
    assert t2 > 1.5 * t1


def test_fit_flat_type_drops_zeros_and_needs_samples():
    samples = flat_samples(1.0)
    samples[3] = (samples[3][0], 0.0)
    fit = fit_flat_type(samples, 0.5)
    assert fit.dropped == 1
    with pytest.raises(ValidationError):
        fit_flat_type(samples[:6], 0.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_fit_flat_type_scale_invariant(c):
    base = flat_samples(1.5)
    scaled = [(e, c * v) for e, v in base]
    f0 = fit_flat_type(base, 0.5)
    f1 = fit_flat_type(scaled, 0.5)
    assert f1.fitted_type == pytest.approx(f0.fitted_type, rel=1e-9)


def test_check_expansion_polynomial():
    f = lambda e: 2.0 - e + 3.0 * e ** 3
    eps = np.linspace(0.05, 0.25, 12)
    samples = [(e, f(e)) for e in eps]
    rep = check_expansion(samples, (2.0, -1.0, 0.0, 3.0), q=0.5,
                          gevrey_type=1.0, C1=6.0, H=1.0)
    checked = [r for r in rep.rows if r.passed is not None]
    assert checked and all(r.passed for r in checked)
    assert rep.skipped >= 1  # the exact order is pure roundoff
    assert rep.feasible


def test_check_expansion_geometric_series():
    # f = 1/(1-e) on |e| <= 1/4: remainder is exactly e^(N+1)/(1-e), and the
    # pair (2, 1) dominates at type 1; order 2 is an exact-equality edge
    eps = np.linspace(0.05, 0.25, 9)
    samples = [(e, 1.0 / (1.0 - e)) for e in eps]
    rep = check_expansion(samples, (1.0,) * 7, q=0.5, gevrey_type=1.0,
                          C1=2.0, H=1.0)
    checked = [r for r in rep.rows if r.passed is not None]
    assert len(checked) == 7
    assert all(r.passed for r in checked)
    assert rep.feasible
    # the N=2 row really is the tight one
    row2 = rep.rows[2]
    assert row2.remainder == pytest.approx(row2.bound, rel=1e-9)


def test_check_expansion_feasibility_controls():
    lam = LN2
    eps = np.logspace(-4, math.log10(0.3), 16)
    samples = [(e, math.exp(-math.log(e) ** 2 / (2 * lam))) for e in eps]
    null = (0.0,) * 13
    loose = check_expansion(samples, null, q=0.5, gevrey_type=1.1)
    tight = check_expansion(samples, null, q=0.5, gevrey_type=0.5)
    assert loose.feasible
    assert not tight.feasible
    assert tight.drift > loose.drift


def test_watson_integral_against_incomplete_gamma():
    # for f = s^k the transform is k! x^(k+1) P(k+1, b/x) with P the
    # regularized lower incomplete gamma function
    b = 1.0
    for k in range(5):
        f = lambda s, k=k: s ** k
        for x in (0.05, 0.11, 0.3):
            got = watson_integral(f, b, x)
            oracle = math.factorial(k) * x ** (k + 1) * gammainc(k + 1, b / x)
            assert got == pytest.approx(oracle, rel=1e-8)


def test_watson_transfer_preserves_type_one_sided():
    lam = LN2
    f = lambda s: np.exp(-np.log(s) ** 2 / (2 * lam))
    rep = watson_transfer(f, 1.0, q=0.5)
    assert rep.f_fit.fitted_type == pytest.approx(1.0, rel=1e-2)
    assert rep.passed
    assert rep.i_fit.fitted_type >= 0.85 * rep.f_fit.fitted_type
