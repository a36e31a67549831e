"""End-to-end checks for the whole laboratory, each with an explicit
tolerance and a wall-clock budget, reported as one visible line apiece."""

import cmath
import math
import shutil
import subprocess
import sys
import time
from importlib import resources

import numpy as np
import pytest

from qgevrey.asymptotics import (
    DirichletParams,
    dirichlet_bound_check,
    dirichlet_direct,
    dirichlet_euler_maclaurin,
    fit_flat_type,
    watson_transfer,
)
from qgevrey.heine import coboundary_check, flat_cocycle, taylor_coefficients
from qgevrey.laplace import build_solution, cocycle_difference, laplace_ray, \
    pde_residual
from qgevrey.quadrature import gaussian_moment
from qgevrey.recursion import BorelFamily, singularity_ledger, \
    substitution_residual

LAM = math.log(2.0)


@pytest.fixture
def report(capsys, request):
    t0 = time.perf_counter()

    def finish(ok, budget, detail=""):
        elapsed = time.perf_counter() - t0
        in_time = elapsed <= budget
        status = "PASS" if (ok and in_time) else "FAIL"
        name = request.node.name.replace("test_", "", 1)
        with capsys.disabled():
            print(f"[{status}] {name}: {elapsed:.2f}s of {budget:.0f}s"
                  + (f"  {detail}" if detail else ""))
        assert ok, detail
        assert in_time, f"over budget: {elapsed:.2f}s > {budget}s"

    return finish


def test_monomial_transform_identity(report):
    # transform of tau^m along an admissible ray is m! (eps/t)^(m+1)
    ts = [r * cmath.exp(1j * th) for r in (0.8, 1.0, 1.3, 1.7, 2.2)
          for th in (0.25, -0.45)]
    assert len(ts) == 10 and all(math.cos(cmath.phase(t)) >= 0.5 for t in ts)
    worst = 0.0
    for m in range(9):
        f = lambda tau, m=m: tau ** m
        for t in ts:
            oracle = math.factorial(m) / t ** (m + 1)
            got = laplace_ray(f, 0.0, t, 1.0).value
            worst = max(worst, abs(got - oracle) / abs(oracle))
    report(worst <= 1e-8, 5.0, f"max rel err {worst:.2e}")


def test_substitution_identity_random_points(report, bundle):
    fam = BorelFamily(bundle.spec)
    led = set()
    for b in range(13):
        led.update(singularity_ledger(bundle.spec, b))
    rng = np.random.default_rng(20260815)
    points = []
    while len(points) < 27:
        eps = 10 ** rng.uniform(-3, -1)
        tau = 0.35 * (rng.random() - 0.5 + 1j * (rng.random() - 0.5))
        if all(abs(tau - p) > 0.02 for p in led):
            points.append((eps, tau))
    worst = 0.0
    for eps, tau in points:
        for order in range(11):
            worst = max(worst,
                        substitution_residual(bundle.spec, fam, order, eps,
                                              tau))
    report(worst < 1e-10, 10.0, f"max residual {worst:.2e}")


def test_ledger_clears_inner_radii(report, bundle):
    ok = True
    for beta in range(41):
        led = singularity_ledger(bundle.spec, beta)
        if not led:
            continue
        if min(abs(p) for p in led) < bundle.sched.inner(beta):
            ok = False
    report(ok, 5.0)


def test_equation_residual_small(report, bundle):
    sol = build_solution(bundle.spec, bundle.norms, bundle.sched,
                         bundle.geom, 0, B_max=12)
    samples = [(eps, t, z)
               for eps in (0.02, 0.05, 0.09)
               for t in (1.0, 1.2 * cmath.exp(0.01j),
                         1.45 * cmath.exp(-0.015j))
               for z in (0.12, 0.25 * cmath.exp(0.4j), 0.4)]
    assert len(samples) == 27
    rep = pde_residual(sol, samples)
    report(rep.max_rel < 1e-6, 60.0, f"max rel residual {rep.max_rel:.2e}")


def test_cocycle_decay_rate(report, bundle):
    fam = BorelFamily(bundle.spec)
    sol0 = build_solution(bundle.spec, bundle.norms, bundle.sched,
                          bundle.geom, 0, B_max=12, family=fam)
    sol1 = build_solution(bundle.spec, bundle.norms, bundle.sched,
                          bundle.geom, 1, B_max=12, family=fam)
    eps_grid = np.logspace(-3, -1, 12)
    fit = cocycle_difference(sol0, sol1, eps_grid, (1.0, 1.3), (0.25, 0.4),
                             bundle.norms, Delta=1.1)
    floor = bundle.norms.A1 / (2 * bundle.sched.d2 ** 2 * 1.1 * LAM)
    ok = fit.passed and fit.c_hat >= 0.9 * floor
    report(ok, 120.0, f"c_hat {fit.c_hat:.4f} vs 0.9*floor "
                      f"{0.9 * floor:.4f}")


def test_dirichlet_sum_routes_agree(report):
    p = DirichletParams(D1=1.2, D2=1.5, A1=0.05, d2=1.0, q=0.5)
    grid = np.logspace(-3, math.log10(0.3), 12)
    worst = 0.0
    for eps in grid:
        d = dirichlet_direct(p, eps).value
        em = dirichlet_euler_maclaurin(p, eps).value
        worst = max(worst, abs(em - d) / (1.0 + abs(d)))
    chk = dirichlet_bound_check(p, 1.1, grid)
    ok = worst <= 1e-8 and chk.passed and chk.rel_change < 0.1
    report(ok, 10.0, f"max rel gap {worst:.2e}, "
                     f"refinement change {chk.rel_change:.3f}")


def test_gaussian_moment_identity(report):
    worst = 0.0
    for a in (0.0, 1.0, -1.0, 2.0, -2.0):
        oracle = math.exp(a * a / 4.0) * math.sqrt(math.pi)
        worst = max(worst, abs(gaussian_moment(a) - oracle) / oracle)
    report(worst <= 1e-10, 1.0, f"max rel err {worst:.2e}")


def test_coboundary_jump_gap(report):
    coc = flat_cocycle(directions=(0.0, math.pi), length=1.0, flat_type=1.0,
                       q=0.5)
    rep = coboundary_check(coc, n_points=9)
    report(rep.max_gap < 1e-6, 30.0, f"max gap {rep.max_gap:.2e}")


def test_taylor_envelope_ratios(report):
    coc = flat_cocycle(directions=(0.0, math.pi), length=1.0, flat_type=1.0,
                       q=0.5)
    rep = taylor_coefficients(coc, count=13)
    report(rep.max_ratio <= 1.05, 30.0, f"max ratio {rep.max_ratio:.3f}")


def test_flat_type_round_trip(report):
    ok = True
    detail = []
    xs = np.logspace(-4, math.log10(0.3), 14)
    for a in (0.5, 1.0, 2.0):
        direct = [(x, math.exp(-math.log(x) ** 2 / (2 * LAM * a)))
                  for x in xs]
        fitted = fit_flat_type(direct, 0.5).fitted_type
        ok = ok and abs(fitted - a) <= 0.1 * a
        ns = np.arange(0, 80)
        env = [(x, math.exp((ns * math.log(x)
                             + a * LAM * ns * ns / 2.0).min())) for x in xs]
        fitted_env = fit_flat_type(env, 0.5).fitted_type
        ok = ok and abs(fitted_env - a) <= 0.1 * a
        detail.append(f"{a}->{fitted:.3f}/{fitted_env:.3f}")
    wat = watson_transfer(
        lambda s: np.exp(-np.log(s) ** 2 / (2 * LAM)), 1.0, q=0.5)
    ok = ok and wat.i_fit.fitted_type >= 0.85 * wat.f_fit.fitted_type
    report(ok, 20.0, " ".join(detail)
           + f"  transfer {wat.i_fit.fitted_type:.3f}"
             f"/{wat.f_fit.fitted_type:.3f}")


def test_cli_runs_bit_identical(report, tmp_path):
    src = resources.files("qgevrey") / "data" / "example_s2.toml"
    cfg = tmp_path / "example_s2.toml"
    cfg.write_text(src.read_text())
    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        proc = subprocess.run(
            [sys.executable, "-m", "qgevrey", "run", str(cfg),
             "--out", str(out)],
            capture_output=True, text=True, timeout=560)
        assert proc.returncode == 0, proc.stderr
    names = sorted(p.name for p in outs[0].iterdir() if p.is_file())
    assert names == sorted(p.name for p in outs[1].iterdir() if p.is_file())
    same = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes()
               for n in names)
    report(same and len(names) > 1, 600.0,
           f"{len(names)} files compared")
