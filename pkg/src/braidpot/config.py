"""Run configuration: line-oriented `key = value` files with dotted sections.

Radians and consistent length units only; unknown keys are rejected so a
typo cannot silently fall back to a default.
"""

from __future__ import annotations

from dataclasses import dataclass

from .charges import ChargeModel, DnaParams, dna_model, single_helix
from .geometry import BraidState, GeometryError
from .params import PhysicalParams, Truncation


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


_KNOWN_KEYS = {
    "physical.kappa_D": float,
    "physical.energy_scale": float,
    "physical.omega_xi": float,
    "geometry.R": float,
    "geometry.a": float,
    "geometry.eta": float,
    "geometry.omega_A2": float,
    "geometry.omega_A3": float,
    "geometry.deta_ds": float,
    "geometry.xi1": float,
    "geometry.xi2": float,
    "geometry.dxi1_ds": float,
    "geometry.dxi2_ds": float,
    "charge.model": str,
    "charge.theta": float,
    "charge.f1": float,
    "charge.f2": float,
    "charge.phi_s": float,
    "charge.n_max": int,
    "truncation.n_max": int,
    "truncation.m_max": int,
    "truncation.j_max": int,
    "truncation.l_max": int,
    "truncation.np_img": int,
    "truncation.np_max": int,
    "truncation.mp_max": int,
    "truncation.abs_tol": float,
    "sweep.parameter": str,
    "sweep.min": float,
    "sweep.max": float,
    "sweep.count": int,
    "run.approx_level": str,
    "run.output_dir": str,
    "oracle.ds": float,
    "oracle.periods": int,
    "oracle.edge": float,
}

SWEEP_PARAMETERS = ("eta", "R", "kappa_D", "omega_A3", "xi_phase")
APPROX_LEVELS = ("full", "diagonal", "small_angle")


@dataclass
class RunConfig:
    raw: dict
    physical: PhysicalParams
    truncation: Truncation
    charge: ChargeModel
    sweep_parameter: str
    sweep_values: list
    approx_level: str
    output_dir: str
    text: str = ""

    def geometry_value(self, key, default=0.0):
        return float(self.raw.get(f"geometry.{key}", default))

    def state_at(self, value) -> BraidState:
        """BraidState with the swept parameter set to `value`."""
        kw = dict(
            R=self.geometry_value("R"),
            a=self.geometry_value("a"),
            eta=self.geometry_value("eta"),
            omega_A2=self.geometry_value("omega_A2"),
            omega_A3=self.geometry_value("omega_A3"),
            deta_ds=self.geometry_value("deta_ds"),
            xi1=self.geometry_value("xi1"),
            xi2=self.geometry_value("xi2"),
            dxi1_ds=self.geometry_value("dxi1_ds", self.physical.omega_xi),
            dxi2_ds=self.geometry_value("dxi2_ds", self.physical.omega_xi),
        )
        if self.sweep_parameter == "eta":
            kw["eta"] = value
        elif self.sweep_parameter == "R":
            kw["R"] = value
        elif self.sweep_parameter == "omega_A3":
            kw["omega_A3"] = value
        elif self.sweep_parameter == "xi_phase":
            kw["xi1"] = kw["xi1"] + value
        return BraidState.make(**kw)

    def physical_at(self, value) -> PhysicalParams:
        if self.sweep_parameter == "kappa_D":
            return PhysicalParams(value, self.physical.energy_scale, self.physical.omega_xi)
        return self.physical


def _parse_lines(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, val = body.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        caster = _KNOWN_KEYS[key]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return values


def _build_charge(values):
    model = values.get("charge.model", "single_helix")
    n_max = int(values.get("charge.n_max", 8))
    if model == "single_helix":
        return single_helix(n_max)
    if model == "dna":
        try:
            p = DnaParams(
                theta=float(values.get("charge.theta", 0.0)),
                f1=float(values.get("charge.f1", 0.0)),
                f2=float(values.get("charge.f2", 0.0)),
                phi_s=float(values.get("charge.phi_s", 0.0)),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid DNA charge parameters: {exc}") from exc
        return dna_model(p, n_max)
    raise ConfigError(f"unknown charge model {model!r}")


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text)


def parse_config(text) -> RunConfig:
    values = _parse_lines(text)
    for required in ("physical.kappa_D", "geometry.R", "geometry.a"):
        if required not in values:
            raise ConfigError(f"missing required key {required}")
    try:
        phys = PhysicalParams(
            kappa_D=values["physical.kappa_D"],
            energy_scale=values.get("physical.energy_scale", 1.0),
            omega_xi=values.get("physical.omega_xi", 0.0),
        )
        trunc = Truncation(
            n_max=values.get("truncation.n_max", 8),
            m_max=values.get("truncation.m_max", 6),
            j_max=values.get("truncation.j_max", 6),
            l_max=values.get("truncation.l_max", 6),
            np_img=values.get("truncation.np_img", 12),
            np_max=values.get("truncation.np_max", 14),
            mp_max=values.get("truncation.mp_max", 10),
            abs_tol=values.get("truncation.abs_tol", 1e-12),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    charge = _build_charge(values)

    param = values.get("sweep.parameter", "eta")
    if param not in SWEEP_PARAMETERS:
        raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}")
    base = {
        "eta": values.get("geometry.eta", 0.0),
        "R": values["geometry.R"],
        "kappa_D": values["physical.kappa_D"],
        "omega_A3": values.get("geometry.omega_A3", 0.0),
        "xi_phase": 0.0,
    }[param]
    lo = values.get("sweep.min", base)
    hi = values.get("sweep.max", lo)
    count = values.get("sweep.count", 1)
    if count < 1:
        raise ConfigError("sweep.count must be >= 1")
    if count == 1:
        sweep_values = [lo]
    else:
        step = (hi - lo) / (count - 1)
        sweep_values = [lo + i * step for i in range(count)]

    level = values.get("run.approx_level", "small_angle")
    if level not in APPROX_LEVELS:
        raise ConfigError(f"run.approx_level must be one of {APPROX_LEVELS}")

    cfg = RunConfig(
        raw=values,
        physical=phys,
        truncation=trunc,
        charge=charge,
        sweep_parameter=param,
        sweep_values=sweep_values,
        approx_level=level,
        output_dir=values.get("run.output_dir", "runs"),
        text=text,
    )
    # validate every sweep point against the geometric invariants
    for v in sweep_values:
        try:
            cfg.state_at(v)
            cfg.physical_at(v)
        except (GeometryError, ValueError) as exc:
            raise ConfigError(f"sweep point {param}={v:g} invalid: {exc}") from exc
    return cfg
