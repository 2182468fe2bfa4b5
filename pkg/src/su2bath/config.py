"""Flat ``key = value`` run configuration.

Recognised keys::

    omega1, omega2                 oscillator frequencies (default 2, 1)
    beta | nbar0                   exactly one
    gamma | lambda, form_factor, omega_c
                                   exactly one of the two groups
    delta_omega1, delta_omega2     optional frequency shifts
    scenario                       equilibrium | evolve | example1 | example2 | coherent
    N                              equilibrium, coherent
    a, ratio [, nmax]              example1, example2 (nmax default 32)
    theta, phi                     coherent
    tmax, nsteps                   every time-evolving scenario
    seed_state                     evolve (or pass --seed-state)
    n_max_cap                      largest allowed N (default 64)
    xmin, xmax, grid_steps         render (default -6, 6, 241)

Blank lines and text after ``#`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bath import FormFactor, ModelParams, decay_rate, renorm_shifts

SCENARIOS = ("equilibrium", "evolve", "example1", "example2", "coherent")

_FLOAT_KEYS = {"omega1", "omega2", "beta", "nbar0", "gamma", "lambda", "omega_c",
               "delta_omega1", "delta_omega2", "a", "ratio", "theta", "phi", "tmax",
               "xmin", "xmax"}
_INT_KEYS = {"N", "nmax", "nsteps", "n_max_cap", "grid_steps"}
_STR_KEYS = {"scenario", "form_factor", "seed_state"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

_REQUIRED = {
    "equilibrium": ("N",),
    "evolve": ("tmax", "nsteps"),
    "example1": ("a", "ratio", "tmax", "nsteps"),
    "example2": ("a", "ratio", "tmax", "nsteps"),
    "coherent": ("N", "theta", "phi", "tmax", "nsteps"),
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass
class RunConfig:
    params: ModelParams
    scenario: str
    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def n_max_cap(self) -> int:
        return int(self.values.get("n_max_cap", 64))


def parse_lines(text: str) -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno} is not of the form key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in out:
            raise ConfigError(key, "given more than once")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(val)
            elif key in _INT_KEYS:
                out[key] = int(val)
            else:
                out[key] = val
        except ValueError:
            raise ConfigError(key, f"cannot parse value {val!r}") from None
    return out


def _check(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(key, msg)


def build_config(values: dict) -> RunConfig:
    v = dict(values)
    scenario = v.get("scenario", "equilibrium")
    _check(scenario in SCENARIOS, "scenario", f"must be one of {SCENARIOS}")
    for key in _REQUIRED[scenario]:
        _check(key in v, key, f"required for scenario {scenario!r}")

    _check(("beta" in v) != ("nbar0" in v), "beta", "give exactly one of beta / nbar0")
    ff_keys = [k for k in ("lambda", "form_factor", "omega_c") if k in v]
    _check(("gamma" in v) != bool(ff_keys), "gamma",
           "give exactly one of gamma / (lambda, form_factor, omega_c)")
    if ff_keys:
        for k in ("lambda", "form_factor", "omega_c"):
            _check(k in v, k, "required when gamma is derived from a form factor")

    omega1, omega2 = v.get("omega1", 2.0), v.get("omega2", 1.0)
    _check(omega2 > 0, "omega2", "must be positive")
    _check(omega1 > omega2, "omega1", "must exceed omega2")
    if "nbar0" in v:
        _check(v["nbar0"] >= 0, "nbar0", "must be non-negative")
        base = ModelParams.from_nbar0(v["nbar0"], omega1=omega1, omega2=omega2)
    else:
        _check(v["beta"] > 0, "beta", "must be positive (use inf for zero temperature)")
        base = ModelParams(omega1=omega1, omega2=omega2, beta=v["beta"])

    d1, d2 = v.get("delta_omega1"), v.get("delta_omega2")
    if "gamma" in v:
        _check(v["gamma"] > 0, "gamma", "must be positive")
        gamma = v["gamma"]
    else:
        try:
            ff = FormFactor(kind=v["form_factor"], lam=v["lambda"], omega_c=v["omega_c"])
        except ValueError as exc:
            raise ConfigError("form_factor", str(exc)) from None
        gamma = decay_rate(ff, base.omega0)
        _check(gamma > 0, "lambda", "gives a zero decay rate")
        if d1 is None or d2 is None:
            try:
                s1, s2 = renorm_shifts(ff, base)
            except ValueError as exc:
                raise ConfigError("form_factor", str(exc)) from None
            d1 = s1 if d1 is None else d1
            d2 = s2 if d2 is None else d2
    params = ModelParams(omega1=omega1, omega2=omega2, beta=base.beta, gamma=gamma,
                         delta_omega1=d1 or 0.0, delta_omega2=d2 or 0.0)

    if "N" in v:
        _check(v["N"] >= 0, "N", "must be non-negative")
    if "nsteps" in v:
        _check(v["nsteps"] >= 2, "nsteps", "must be at least 2")
    if "tmax" in v:
        _check(v["tmax"] > 0 and math.isfinite(v["tmax"]), "tmax", "must be positive and finite")
    if "nmax" in v:
        _check(v["nmax"] >= 0, "nmax", "must be non-negative")
    if "ratio" in v:
        _check(v["ratio"] > 0, "ratio", "must be positive")
    if "grid_steps" in v:
        _check(v["grid_steps"] >= 2, "grid_steps", "must be at least 2")
    if "n_max_cap" in v:
        _check(v["n_max_cap"] >= 0, "n_max_cap", "must be non-negative")
    if v.get("xmin", -6.0) >= v.get("xmax", 6.0):
        raise ConfigError("xmin", "must be smaller than xmax")
    return RunConfig(params, scenario, v)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return build_config(parse_lines(text))
