"""Shared fixtures: the bundled example problem and small helper specs.

The bundled problem is a second-order equation with a single first-order
right-hand-side term, contraction shifts (1, 1), constant coefficient 1 and
both initial slices equal to 1/(a - tau).  Every derived quantity used in
assertions below (assumption slacks, radius values, pole positions) was
computed by hand from these parameters.
"""

import math
from types import SimpleNamespace

import pytest

from qgevrey.model import (
    NormParams,
    ProblemSpec,
    RadiusSchedule,
    RationalTerm,
    RhsTerm,
    Sector,
    SectorGeometry,
    TimeDomain,
)


def make_bundle():
    spec = ProblemSpec(
        S=2,
        a=-1.0 + 0.0j,
        q=0.5,
        rhs_terms=(
            RhsTerm.make(dt_order=0, dz_order=1, t_shift=1, z_shift=1,
                         z_coeffs={0: (1.0,)}),
        ),
        r0=0.15,
        initial_data=(
            (RationalTerm(1.0 + 0.0j, 0, 0, 1),),
            (RationalTerm(1.0 + 0.0j, 0, 0, 1),),
        ),
    )
    norms = NormParams(M=0.25, A1=0.05, C=0.5, delta1=1.0, M_tilde=0.1,
                       K0=0, Delta_ic=2.2, delta_series=0.5)
    sched = RadiusSchedule(q=0.5, d1=0.1, d2=1.0, dhat1=0.25, dhat2=1.0,
                           Rhat0=0.5, S=2)
    covering = tuple(
        Sector(direction=(2 * k - 1) * math.pi / 8, opening=math.pi / 4 + 0.15,
               radius=0.15)
        for k in range(8)
    )
    assoc = tuple(
        Sector(direction=-(2 * k - 1) * math.pi / 8, opening=math.pi / 4 + 0.22)
        for k in range(8)
    )
    gammas = (math.pi / 12, -math.pi / 12) + tuple(
        -(2 * k - 1) * math.pi / 8 for k in range(2, 8)
    )
    geom = SectorGeometry(
        covering=covering,
        assoc_sectors=assoc,
        t_domain=TimeDomain(direction=0.0, opening=0.05, inner_radius=1.0),
        gammas=gammas,
        delta2=0.35,
        delta3=0.9,
    )
    return SimpleNamespace(spec=spec, norms=norms, sched=sched, geom=geom)


@pytest.fixture(scope="session")
def bundle():
    return make_bundle()


@pytest.fixture(scope="session")
def unit_initial():
    """One-slice problem whose only coefficient is identically 1."""
    spec = ProblemSpec(
        S=1, a=-1.0 + 0.0j, q=0.5, rhs_terms=(), r0=0.15,
        initial_data=((RationalTerm(1.0 + 0.0j, 0, 0, 0),),),
    )
    norms = NormParams(M=1.0, A1=0.05, C=0.5, delta1=1.0, M_tilde=0.5,
                       K0=0, Delta_ic=2.2, delta_series=0.5)
    sched = RadiusSchedule(q=0.5, d1=0.1, d2=1.0, dhat1=0.25, dhat2=1.0,
                           Rhat0=0.5, S=1)
    return SimpleNamespace(spec=spec, norms=norms, sched=sched)


@pytest.fixture(scope="session")
def poly_initial():
    """Homogeneous two-slice problem with polynomial data: W0 = 1, W1 = tau."""
    spec = ProblemSpec(
        S=2, a=-1.0 + 0.0j, q=0.5, rhs_terms=(), r0=0.15,
        initial_data=(
            (RationalTerm(1.0 + 0.0j, 0, 0, 0),),
            (RationalTerm(1.0 + 0.0j, 0, 1, 0),),
        ),
    )
    return spec
