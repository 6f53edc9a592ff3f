"""Run configuration: TOML files mapped onto SystemParams and SweepSpec.

All frequencies are MHz. Complex Rabi frequencies are written as
``rabi_mhz = [magnitude, phase_degrees]``.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .model import (
    Case,
    FieldDrive,
    FieldId,
    PhysicalConstants,
    SystemId,
    SystemParams,
    make_scheme,
)
from .sweep import SweepSpec

_CANONICAL_TRANSITIONS = {
    FieldId.PROBE: ("1", "3"),
    FieldId.COUPLING: ("2", "3"),
    FieldId.SIGNAL: ("2", "4"),
    FieldId.WEAK_SIGNAL_23: ("2", "3"),
    FieldId.WEAK_SIGNAL_24: ("2", "4"),
    FieldId.FIELD_A: ("1", "2"),
    FieldId.FIELD_C: ("2", "3"),
    FieldId.FIELD_D: ("1", "3"),
}


def _rabi_from_entry(entry: Any) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        mag, phase_deg = entry
        return complex(mag) * complex(
            math.cos(math.radians(phase_deg)), math.sin(math.radians(phase_deg))
        )
    raise ConfigError(f"rabi_mhz must be a number or [magnitude, phase_degrees]: {entry!r}")


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None


def params_from_config(cfg: dict, overrides: Optional[dict] = None) -> SystemParams:
    """Build SystemParams from a parsed config dict (flags win over file)."""
    merged = dict(cfg)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})

    system_raw = merged.get("system", 1)
    sid = {1: SystemId.SYSTEM1, 2: SystemId.SYSTEM2, 3: SystemId.SYSTEM3}.get(
        system_raw, None
    )
    if sid is None:
        try:
            sid = SystemId(str(system_raw))
        except ValueError:
            raise ConfigError(f"unknown system: {system_raw!r}") from None
    case = Case(str(merged.get("case", "eit")).lower())

    sch = merged.get("scheme", {})
    scheme = make_scheme(
        sid,
        gamma2=float(sch.get("gamma2_mhz", 6.0)),
        gamma3=float(sch.get("gamma3_mhz", 6.0)),
        gamma4=float(sch.get("gamma4_mhz", 6.0)),
        splitting_mhz=float(sch.get("splitting_mhz", 121.0)),
        branching_3_to_1=float(sch.get("branching_3_to_1", 0.5)),
    )

    phys_cfg = merged.get("physical", {})
    physical = PhysicalConstants(
        atom_density=float(phys_cfg.get("atom_density", 1.0)),
        dimensionless=bool(phys_cfg.get("dimensionless", True)),
    )

    fields_cfg = merged.get("fields", [])
    if not fields_cfg:
        raise ConfigError("config declares no [[fields]]")
    fields = []
    for entry in fields_cfg:
        try:
            fid = FieldId(entry["id"])
        except (KeyError, ValueError):
            raise ConfigError(f"field entry needs a valid id: {entry!r}") from None
        transition = tuple(entry.get("transition", _CANONICAL_TRANSITIONS[fid]))
        fields.append(
            FieldDrive(
                fid,
                _rabi_from_entry(entry.get("rabi_mhz", 0.0)),
                float(entry.get("detuning_mhz", 0.0)),
                transition,  # type: ignore[arg-type]
            )
        )
    return SystemParams(scheme, tuple(fields), case, physical)


def sweep_from_config(cfg: dict, params: SystemParams, overrides: Optional[dict] = None) -> SweepSpec:
    sw = dict(cfg.get("sweep", {}))
    if overrides:
        sw.update({k: v for k, v in overrides.items() if v is not None})
    axis = sw.get("axis", "coupling")
    rng = sw.get("range_mhz", [-20.0, 20.0])
    points = int(sw.get("points", 401))
    methods = tuple(sw.get("methods", ["analytic", "oracle"]))
    fields = tuple(FieldId(f) for f in sw.get("fields", ["coupling", "signal"]))
    return SweepSpec(
        base=params,
        axis=axis,
        start=float(rng[0]),
        stop=float(rng[1]),
        points=points,
        lock_signal_to_coupling=bool(sw.get("lock_signal_to_coupling", True)),
        fields=fields,
        methods=methods,
    )
