"""System parameters, derived couplings, and JSON config handling.

Every rate and frequency is expressed in units of the vibrational
frequency (omega_m == 1 internally).  The only exception is ``omega_m``
itself, which is stored in SI rad/s because the thermal phonon
occupation needs the absolute scale.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Optional

from scipy.constants import hbar, k as k_B

from .errors import ParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """All physical inputs of the model.

    Attributes
    ----------
    omega_m : float
        Vibrational angular frequency in SI rad/s.  Sets the unit of
        every other rate; used directly only for the thermal occupation.
    g_m : float
        Single-molecule optomechanical coupling (units of omega_m).
    kappa_a, kappa_c : float
        Cavity 1 / cavity 2 decay rates (units of omega_m).
    delta_a, delta_c : float
        Bare drive detunings of the two cavities (units of omega_m).
    gamma_1, gamma_2 : float
        Collective vibrational decay rates (units of omega_m).
    drive_a, drive_c : float
        Driving amplitudes of the two cavities (units of omega_m).
    j_1, j_2 : float
        Nonreciprocal inter-cavity couplings (units of omega_m).
    lambda_opa : float
        Parametric-amplifier gain (units of omega_m).
    theta : float
        Parametric-amplifier pump phase in radians.
    n_total : int
        Total molecule count N.
    m_split : int
        Number of molecules assigned to the first collective mode.
    temperature : float
        Vibrational bath temperature in Kelvin.
    delta_c_eff : float, optional
        When set, the effective cavity-2 detuning is pinned to this value
        and the mean-field solver skips its self-consistency loop (the
        bare delta_c is then implied rather than prescribed).  Used for
        sweeps whose natural axis is the effective detuning.
    """

    omega_m: float = TWO_PI * 30e12
    g_m: float = 1e-3
    kappa_a: float = 0.3
    kappa_c: float = 0.3
    delta_a: float = 1.0
    delta_c: float = 1.0
    gamma_1: float = 1e-4
    gamma_2: float = 1e-4
    drive_a: float = 16.0
    drive_c: float = 16.0
    j_1: float = 0.9
    j_2: float = 0.3
    lambda_opa: float = 0.2
    theta: float = math.pi / 2
    n_total: int = 100
    m_split: int = 50
    temperature: float = 312.0
    delta_c_eff: Optional[float] = None


@dataclass(frozen=True)
class DerivedCouplings:
    """Collective couplings and thermal occupation derived from SystemParams."""

    g_1: float
    g_2: float
    n_th: float


DEFAULTS = SystemParams()

INT_FIELDS = frozenset({"n_total", "m_split"})
FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SystemParams))


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises ParameterError naming the first violated field.
    """
    if not params.omega_m > 0:
        raise ParameterError("omega_m", "omega_m must be positive")
    for name in ("kappa_a", "kappa_c", "gamma_1", "gamma_2"):
        if not getattr(params, name) > 0:
            raise ParameterError(name, f"{name} must be positive")
    if params.g_m < 0:
        raise ParameterError("g_m", "g_m must be non-negative")
    if params.lambda_opa < 0:
        raise ParameterError("lambda_opa", "lambda_opa must be non-negative")
    if params.temperature < 0:
        raise ParameterError("temperature", "temperature must be non-negative")
    if params.n_total < 0:
        raise ParameterError("n_total", "n_total must be non-negative")
    if params.m_split < 0:
        raise ParameterError("m_split", "m_split must be non-negative")
    if params.m_split > params.n_total:
        raise ParameterError("m_split", "m_split exceeds n_total")
    for name in FIELD_NAMES:
        value = getattr(params, name)
        if value is not None and not math.isfinite(value):
            raise ParameterError(name, f"{name} must be finite")
    return params


def collective_couplings(params: SystemParams) -> tuple[float, float]:
    """Couplings of the two collective vibrational modes.

    The first mode collects m_split molecules, the second the remaining
    n_total - m_split, so g_1 = g_m sqrt(M) and g_2 = g_m sqrt(N - M).
    m_split = 0 decouples the first mode exactly.
    """
    g_1 = params.g_m * math.sqrt(params.m_split)
    g_2 = params.g_m * math.sqrt(params.n_total - params.m_split)
    return g_1, g_2


def thermal_occupation(omega_m_si: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar w / kB T) - 1).

    Returns the T -> 0 limit (exactly 0) instead of dividing by zero.
    """
    if temperature == 0.0:
        return 0.0
    x = hbar * omega_m_si / (k_B * temperature)
    if x > 700.0:  # exp would overflow; occupation is below 1e-300 anyway
        return 0.0
    return 1.0 / math.expm1(x)


def derived_couplings(params: SystemParams) -> DerivedCouplings:
    g_1, g_2 = collective_couplings(params)
    return DerivedCouplings(g_1, g_2, thermal_occupation(params.omega_m, params.temperature))


def _coerce(name: str, value):
    if name == "delta_c_eff":
        if value is None or (isinstance(value, str) and value.lower() in ("none", "null", "")):
            return None
        return float(value)
    if name in INT_FIELDS:
        ivalue = int(value)
        if float(ivalue) != float(value):
            raise ParameterError(name, f"{name} must be an integer, got {value!r}")
        return ivalue
    return float(value)


def apply_overrides(params: SystemParams, overrides: dict) -> SystemParams:
    """Apply a dict of field -> value on top of ``params``.

    The pseudo-field ``drive`` sets drive_a and drive_c together; explicit
    drive_a / drive_c keys win over it.
    """
    updates = {}
    if "drive" in overrides:
        drive = _coerce("drive_a", overrides["drive"])
        updates["drive_a"] = drive
        updates["drive_c"] = drive
    for name, value in overrides.items():
        if name == "drive":
            continue
        if name not in FIELD_NAMES:
            raise ParameterError(name, f"unknown parameter {name!r}")
        updates[name] = _coerce(name, value)
    return dataclasses.replace(params, **updates)


def parse_override(text: str) -> tuple[str, str]:
    """Split a command-line 'field=value' assignment."""
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise ParameterError(text, f"override {text!r} is not of the form field=value")
    return name.strip(), value.strip()


def from_dict(config: dict) -> SystemParams:
    """Build a validated SystemParams from a config dict; missing keys take defaults."""
    return validate(apply_overrides(DEFAULTS, config))


def load_config(path) -> SystemParams:
    """Load a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ParameterError("config", "config file must contain a JSON object")
    return from_dict(config)


def to_canonical_json(params: SystemParams) -> str:
    """Serialize with sorted keys; floats round-trip exactly via repr."""
    return json.dumps(dataclasses.asdict(params), sort_keys=True)
