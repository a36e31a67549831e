"""Scenario files: TOML on disk -> model objects plus a run plan.

A scenario bundles one Cauchy problem with its norm parameters, radius
schedule and sector geometry, followed by an ordered list of ``[[run]]``
blocks naming the pipeline stages to execute.  Every loading error is
reported as a :class:`ConfigError` carrying the dotted location of the
offending key, so the command line can point at it.
"""

import hashlib
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError, ValidationError
from .model import (
    NormParams,
    ProblemSpec,
    RadiusSchedule,
    RationalTerm,
    RhsTerm,
    Sector,
    SectorGeometry,
    TimeDomain,
)

BLOCK_NAMES = (
    "assumptions",
    "borel",
    "norms",
    "solve",
    "residual",
    "cocycle",
    "dirichlet",
    "asymptotics",
    "cauchy-heine",
)


def get(table, key, loc):
    if key not in table:
        raise ConfigError("missing required field", f"{loc}.{key}")
    return table[key]


def as_number(value, loc):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", loc)
    return float(value)


def as_int(value, loc):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("expected an integer", loc)
    return value


def as_complex(value, loc):
    """Scalars stay real; a two-element array is read as [re, im]."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(as_number(value[0], loc), as_number(value[1], loc))
    raise ConfigError("expected a number or an [re, im] pair", loc)


def as_table(value, loc):
    if not isinstance(value, dict):
        raise ConfigError("expected a table", loc)
    return value


def as_array(value, loc):
    if not isinstance(value, list):
        raise ConfigError("expected an array", loc)
    return value


def number_field(table, key, loc, default=None):
    if default is not None and key not in table:
        return default
    return as_number(get(table, key, loc), f"{loc}.{key}")


def int_field(table, key, loc, default=None):
    if default is not None and key not in table:
        return default
    return as_int(get(table, key, loc), f"{loc}.{key}")


def number_list(table, key, loc):
    arr = as_array(get(table, key, loc), f"{loc}.{key}")
    return [as_number(v, f"{loc}.{key}[{i}]") for i, v in enumerate(arr)]


def int_list(table, key, loc):
    arr = as_array(get(table, key, loc), f"{loc}.{key}")
    return [as_int(v, f"{loc}.{key}[{i}]") for i, v in enumerate(arr)]


def _build(loc, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except ValidationError as exc:
        raise ConfigError(str(exc), loc) from exc


def _load_problem(data):
    loc = "problem"
    table = as_table(get(data, "problem", "config"), loc)
    rhs = []
    for i, raw in enumerate(as_array(table.get("rhs", []), f"{loc}.rhs")):
        tloc = f"{loc}.rhs[{i}]"
        t = as_table(raw, tloc)
        coeffs = {}
        for j, entry in enumerate(as_array(get(t, "z_coeffs", tloc),
                                           f"{tloc}.z_coeffs")):
            eloc = f"{tloc}.z_coeffs[{j}]"
            pair = as_array(entry, eloc)
            if len(pair) != 2:
                raise ConfigError("expected [power, [c0, c1, ...]]", eloc)
            power = as_int(pair[0], f"{eloc}[0]")
            poly = [as_complex(c, f"{eloc}[1][{k}]")
                    for k, c in enumerate(as_array(pair[1], f"{eloc}[1]"))]
            coeffs[power] = tuple(poly)
        rhs.append(_build(tloc, RhsTerm.make,
                          dt_order=int_field(t, "dt", tloc),
                          dz_order=int_field(t, "dz", tloc),
                          t_shift=int_field(t, "t_shift", tloc),
                          z_shift=int_field(t, "z_shift", tloc),
                          z_coeffs=coeffs))
    initial = []
    for i, raw in enumerate(as_array(get(table, "initial", loc),
                                     f"{loc}.initial")):
        sloc = f"{loc}.initial[{i}]"
        slice_table = as_table(raw, sloc)
        terms = []
        for j, entry in enumerate(as_array(get(slice_table, "terms", sloc),
                                           f"{sloc}.terms")):
            eloc = f"{sloc}.terms[{j}]"
            quad = as_array(entry, eloc)
            if len(quad) != 4:
                raise ConfigError(
                    "expected [coeff, eps_power, tau_power, pole_order]",
                    eloc)
            terms.append(_build(
                eloc, RationalTerm,
                coeff=as_complex(quad[0], f"{eloc}[0]"),
                eps_power=as_int(quad[1], f"{eloc}[1]"),
                tau_power=as_int(quad[2], f"{eloc}[2]"),
                pole_order=as_int(quad[3], f"{eloc}[3]")))
        initial.append(tuple(terms))
    return _build(loc, ProblemSpec,
                  S=as_int(get(table, "S", loc), f"{loc}.S"),
                  a=as_complex(get(table, "a", loc), f"{loc}.a"),
                  q=number_field(table, "q", loc),
                  rhs_terms=tuple(rhs),
                  r0=number_field(table, "r0", loc),
                  initial_data=tuple(initial))


def _load_norms(data):
    loc = "norms"
    t = as_table(get(data, "norms", "config"), loc)
    return _build(loc, NormParams,
                  M=number_field(t, "M", loc),
                  A1=number_field(t, "A1", loc),
                  C=number_field(t, "C", loc),
                  delta1=number_field(t, "delta1", loc),
                  M_tilde=number_field(t, "M_tilde", loc),
                  K0=int_field(t, "K0", loc),
                  Delta_ic=number_field(t, "Delta_ic", loc),
                  delta_series=number_field(t, "delta_series", loc))


def _load_schedule(data, spec):
    loc = "schedule"
    t = as_table(get(data, "schedule", "config"), loc)
    return _build(loc, RadiusSchedule,
                  q=spec.q,
                  d1=number_field(t, "d1", loc),
                  d2=number_field(t, "d2", loc),
                  dhat1=number_field(t, "dhat1", loc),
                  dhat2=number_field(t, "dhat2", loc),
                  Rhat0=number_field(t, "Rhat0", loc),
                  S=spec.S)


def _load_sector(raw, loc, need_radius):
    t = as_table(raw, loc)
    radius = None
    if need_radius or "radius" in t:
        radius = number_field(t, "radius", loc)
    return _build(loc, Sector,
                  direction=number_field(t, "direction", loc),
                  opening=number_field(t, "opening", loc),
                  radius=radius)


def _load_geometry(data):
    loc = "geometry"
    t = as_table(get(data, "geometry", "config"), loc)
    covering = tuple(
        _load_sector(raw, f"{loc}.covering[{i}]", need_radius=True)
        for i, raw in enumerate(as_array(get(t, "covering", loc),
                                         f"{loc}.covering")))
    assoc = tuple(
        _load_sector(raw, f"{loc}.assoc[{i}]", need_radius=False)
        for i, raw in enumerate(as_array(get(t, "assoc", loc),
                                         f"{loc}.assoc")))
    dom_loc = f"{loc}.t_domain"
    dom = as_table(get(t, "t_domain", loc), dom_loc)
    t_domain = _build(dom_loc, TimeDomain,
                      direction=number_field(dom, "direction", dom_loc),
                      opening=number_field(dom, "opening", dom_loc),
                      inner_radius=number_field(dom, "inner_radius", dom_loc))
    gammas = tuple(number_list(t, "gammas", loc))
    return _build(loc, SectorGeometry,
                  covering=covering,
                  assoc_sectors=assoc,
                  t_domain=t_domain,
                  gammas=gammas,
                  delta2=number_field(t, "delta2", loc),
                  delta3=number_field(t, "delta3", loc))


@dataclass(frozen=True)
class RunStep:
    """One pipeline stage to execute, with its raw parameter table."""

    block: str
    params: dict
    loc: str


@dataclass(frozen=True)
class Scenario:
    spec: ProblemSpec
    norms: NormParams
    sched: RadiusSchedule
    geom: SectorGeometry
    runs: tuple
    digest: str


def load_scenario(path):
    """Read and validate a scenario file; all failures are ConfigErrors."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc

    spec = _load_problem(data)
    norms = _load_norms(data)
    sched = _load_schedule(data, spec)
    geom = _load_geometry(data)

    runs = []
    for i, raw_step in enumerate(as_array(data.get("run", []), "run")):
        loc = f"run[{i}]"
        t = as_table(raw_step, loc)
        block = get(t, "block", loc)
        if block not in BLOCK_NAMES:
            raise ConfigError(f"unknown block '{block}'", f"{loc}.block")
        params = {k: v for k, v in t.items() if k != "block"}
        runs.append(RunStep(block=block, params=params, loc=loc))

    return Scenario(spec=spec, norms=norms, sched=sched, geom=geom,
                    runs=tuple(runs),
                    digest=hashlib.sha256(raw).hexdigest())
