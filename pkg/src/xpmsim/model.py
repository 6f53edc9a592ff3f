"""Domain model: level schemes, laser drives, and steady-state RWA matrices.

Three atom-laser systems are supported:

* ``System1`` is a four-level N scheme. A weak probe drives |1>-|3>, a
  coupling beam drives |2>-|3> (forming EIT with the probe), and a signal
  beam drives |2>-|4>. The two excited states |3>, |4> are split by
  ``splitting_mhz`` (121 MHz by default).
* ``System2`` is an effective three-level scheme in which an intermediate
  level has been adiabatically eliminated. The |1>-|2> drive is the
  composite of two physical fields (a and b) and carries a single complex
  Rabi frequency. Decay enters through complex detunings only. The three
  drives close a frequency loop, so the |2>-|3> detuning is fixed by the
  other two (d_c = d_d - d_ab); the steady-state equations contain only
  the |1>-|2> and |1>-|3> detunings.
* ``System3`` is System1 plus two weak perturbing beams on the |2>-|3> and
  |2>-|4> transitions; the steady state is expanded to first order in the
  weak amplitudes around the System1 solution.

Conventions used throughout the package:

* All rates, Rabi frequencies and detunings are homogeneous angular
  frequency quantities in MHz. No 2*pi convention is imposed because every
  expression is ratio homogeneous.
* ``FieldDrive.detuning`` is laser frequency minus transition frequency.
* For System1 the complex half-width symbols are ``A = dp - i*G3/2`` and
  ``B = (ds + dp - dc) - i*G4/2`` where dp, dc, ds are the probe, coupling
  and signal detunings. The real part of B is the rotating-frame offset of
  level |4>, which is the signal detuning plus the two-photon detuning;
  the two coincide at two-photon resonance. This is forced by frame
  consistency: the |4> coherence oscillates at dp - dc + ds regardless of
  how the signal beam alone is tuned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import CaseError, ConfigError

DEFAULT_GAMMA = 6.0          # MHz, typical alkali D2 linewidth
DEFAULT_SPLITTING = 121.0    # MHz between the two excited states


class SystemId(str, enum.Enum):
    SYSTEM1 = "system1"
    SYSTEM2 = "system2"
    SYSTEM3 = "system3"


class Case(str, enum.Enum):
    EIT = "eit"    # all population in |1>, b1*b1 = 1
    CPT = "cpt"    # probe and coupling comparable, |b1|^2 + |b2|^2 = 1


class FieldId(str, enum.Enum):
    PROBE = "probe"
    COUPLING = "coupling"
    SIGNAL = "signal"
    WEAK_SIGNAL_23 = "weak23"
    WEAK_SIGNAL_24 = "weak24"
    FIELD_A = "field_a"    # with FIELD_B, the composite |1>-|2> two-photon pair
    FIELD_B = "field_b"    # appears in photon signatures only, never as a drive
    FIELD_C = "field_c"
    FIELD_D = "field_d"


class Role(str, enum.Enum):
    GROUND = "ground"
    EXCITED = "excited"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class DecayChannel:
    source: str
    target: str
    rate: float  # MHz


@dataclass(frozen=True)
class LevelScheme:
    """Level structure, decay channels and the excited-state splitting."""

    system_id: SystemId
    levels: tuple[tuple[str, Role], ...]
    splitting_mhz: float = DEFAULT_SPLITTING
    decay_channels: tuple[DecayChannel, ...] = ()

    def __post_init__(self):
        labels = [lab for lab, _ in self.levels]
        if len(set(labels)) != len(labels):
            raise ConfigError("duplicate level labels")
        expected = 3 if self.system_id is SystemId.SYSTEM2 else 4
        if len(labels) != expected:
            raise ConfigError(
                f"{self.system_id.value} needs {expected} levels, got {len(labels)}"
            )
        if self.splitting_mhz <= 0:
            raise ConfigError("excited-state splitting must be positive")
        roles = dict(self.levels)
        order = {lab: i for i, lab in enumerate(labels)}
        for ch in self.decay_channels:
            if ch.source not in roles or ch.target not in roles:
                raise ConfigError(f"decay channel {ch} uses unknown levels")
            if ch.rate < 0:
                raise ConfigError(f"negative decay rate on {ch.source}->{ch.target}")
            if roles[ch.source] is Role.GROUND:
                raise ConfigError(f"decay out of ground level {ch.source}")
            if order[ch.target] >= order[ch.source]:
                raise ConfigError(
                    f"decay {ch.source}->{ch.target} must go to a lower level"
                )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.levels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def role(self, label: str) -> Role:
        return dict(self.levels)[label]

    def total_decay(self, label: str) -> float:
        """Total decay rate out of a level (sum over its channels)."""
        return sum(ch.rate for ch in self.decay_channels if ch.source == label)


@dataclass(frozen=True)
class FieldDrive:
    """One laser field acting on a single transition.

    ``rabi`` is the complex Rabi frequency in MHz, ``detuning`` is laser
    frequency minus transition frequency in MHz, and ``transition`` is the
    (lower, upper) pair of level labels.
    """

    field_id: FieldId
    rabi: complex
    detuning: float
    transition: tuple[str, str]

    def __post_init__(self):
        if not np.isfinite(self.rabi):
            raise ConfigError(f"{self.field_id.value}: non-finite Rabi frequency")
        if not np.isfinite(self.detuning):
            raise ConfigError(f"{self.field_id.value}: non-finite detuning")


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system. The dimensionless default sets N = mu = hbar = eps0 = 1."""

    atom_density: float = 1.0
    dipoles: Mapping[tuple[str, str], complex] = field(default_factory=dict)
    hbar: float = 1.0
    epsilon0: float = 1.0
    dimensionless: bool = True

    def dipole(self, transition: tuple[str, str]) -> complex:
        if transition in self.dipoles:
            return self.dipoles[transition]
        rev = (transition[1], transition[0])
        if rev in self.dipoles:
            return np.conj(self.dipoles[rev])
        return 1.0


DIMENSIONLESS = PhysicalConstants()


@dataclass(frozen=True)
class SystemParams:
    """A level scheme plus the laser fields driving it."""

    scheme: LevelScheme
    fields: tuple[FieldDrive, ...]
    case: Case = Case.EIT
    physical: PhysicalConstants = DIMENSIONLESS

    def __post_init__(self):
        labels = set(self.scheme.labels)
        seen = set()
        for f in self.fields:
            if f.field_id in seen:
                raise ConfigError(f"duplicate field {f.field_id.value}")
            seen.add(f.field_id)
            if f.transition[0] not in labels or f.transition[1] not in labels:
                raise ConfigError(
                    f"{f.field_id.value} drives unknown transition {f.transition}"
                )
        required = _REQUIRED_FIELDS[self.scheme.system_id]
        missing = [fid.value for fid in required if fid not in seen]
        if missing:
            raise ConfigError(
                f"{self.scheme.system_id.value} requires fields: {', '.join(missing)}"
            )
        if self.case is Case.CPT:
            if self.scheme.system_id is not SystemId.SYSTEM1:
                raise CaseError("the CPT case is defined for System1 only")
            if self.two_photon_detuning != 0.0:
                raise CaseError(
                    "CPT requires exact two-photon resonance "
                    f"(probe minus coupling detuning = {self.two_photon_detuning!r})"
                )

    def field(self, field_id: FieldId) -> FieldDrive:
        for f in self.fields:
            if f.field_id is field_id:
                return f
        raise KeyError(field_id)

    def has_field(self, field_id: FieldId) -> bool:
        return any(f.field_id is field_id for f in self.fields)

    def with_fields(self, **overrides: FieldDrive) -> "SystemParams":
        """Copy with some fields replaced, keyed by FieldId value."""
        by_id = {f.field_id: f for f in self.fields}
        for key, f in overrides.items():
            by_id[FieldId(key)] = f
        return replace(self, fields=tuple(by_id.values()))

    # -- System1/System3 shorthand -------------------------------------

    @property
    def two_photon_detuning(self) -> float:
        """Raman detuning of the |1>-|2> ground coherence (probe minus coupling)."""
        return self.field(FieldId.PROBE).detuning - self.field(FieldId.COUPLING).detuning

    @property
    def half_width_a(self) -> complex:
        """A: probe detuning minus i*Gamma3/2."""
        g3 = self.scheme.total_decay("3")
        return self.field(FieldId.PROBE).detuning - 0.5j * g3

    @property
    def half_width_b(self) -> complex:
        """B: rotating-frame offset of |4> minus i*Gamma4/2.

        The offset is signal detuning plus two-photon detuning, which is the
        frequency at which the |2>-|4> coherence actually oscillates.
        """
        g4 = self.scheme.total_decay("4")
        return (
            self.field(FieldId.SIGNAL).detuning
            + self.two_photon_detuning
            - 0.5j * g4
        )

    # -- System2 shorthand ----------------------------------------------

    def complex_detunings(self) -> dict[str, complex]:
        """Complex detunings for the effective three-level scheme.

        Each excited level contributes -i*Gamma/2 to its detuning symbol.
        """
        if self.scheme.system_id is not SystemId.SYSTEM2:
            raise CaseError("complex detunings are a System2 construct")
        g2 = self.scheme.total_decay("2")
        g3 = self.scheme.total_decay("3")
        return {
            "w21": self.field(FieldId.FIELD_A).detuning - 0.5j * g2,
            "w31": self.field(FieldId.FIELD_D).detuning - 0.5j * g3,
        }


_REQUIRED_FIELDS: dict[SystemId, tuple[FieldId, ...]] = {
    SystemId.SYSTEM1: (FieldId.PROBE, FieldId.COUPLING, FieldId.SIGNAL),
    SystemId.SYSTEM2: (FieldId.FIELD_A, FieldId.FIELD_C, FieldId.FIELD_D),
    SystemId.SYSTEM3: (
        FieldId.PROBE,
        FieldId.COUPLING,
        FieldId.SIGNAL,
        FieldId.WEAK_SIGNAL_23,
        FieldId.WEAK_SIGNAL_24,
    ),
}


def make_scheme(
    system_id: SystemId | str,
    *,
    gamma2: float = DEFAULT_GAMMA,
    gamma3: float = DEFAULT_GAMMA,
    gamma4: float = DEFAULT_GAMMA,
    splitting_mhz: float = DEFAULT_SPLITTING,
    branching_3_to_1: float = 0.5,
) -> LevelScheme:
    """Build one of the three canonical level schemes.

    Defaults: Gamma3 = Gamma4 = 6 MHz, 121 MHz excited splitting. Level |3>
    decays to |1> and |2> with branching ratio ``branching_3_to_1`` (half
    each by default); |4> decays entirely to |2>, its only dipole partner.
    System2 uses gamma2/gamma3 on its two broadened levels, decaying to |1>.
    """
    try:
        sid = SystemId(system_id)
    except ValueError:
        raise ConfigError(f"unknown system id: {system_id!r}") from None
    for name, g in (("gamma2", gamma2), ("gamma3", gamma3), ("gamma4", gamma4)):
        if g < 0:
            raise ConfigError(f"{name} must be >= 0, got {g}")
    if not 0.0 <= branching_3_to_1 <= 1.0:
        raise ConfigError("branching_3_to_1 must lie in [0, 1]")

    if sid is SystemId.SYSTEM2:
        levels = (("1", Role.GROUND), ("2", Role.EXCITED), ("3", Role.EXCITED))
        channels = (
            DecayChannel("2", "1", gamma2),
            DecayChannel("3", "1", gamma3),
        )
        return LevelScheme(sid, levels, splitting_mhz, channels)

    levels = (
        ("1", Role.GROUND),
        ("2", Role.GROUND),
        ("3", Role.EXCITED),
        ("4", Role.EXCITED),
    )
    channels = (
        DecayChannel("3", "1", branching_3_to_1 * gamma3),
        DecayChannel("3", "2", (1.0 - branching_3_to_1) * gamma3),
        DecayChannel("4", "2", gamma4),
    )
    return LevelScheme(sid, levels, splitting_mhz, channels)


def make_params(
    system_id: SystemId | str,
    *,
    case: Case | str = Case.EIT,
    scheme: Optional[LevelScheme] = None,
    physical: PhysicalConstants = DIMENSIONLESS,
    **rabi_and_detuning,
) -> SystemParams:
    """Convenience constructor with canonical transitions per system.

    Keyword arguments name the fields: ``probe=(rabi, detuning)`` etc. A bare
    complex is accepted as a zero-detuned Rabi frequency.
    """
    sid = SystemId(system_id)
    scheme = scheme or make_scheme(sid)
    transitions = {
        FieldId.PROBE: ("1", "3"),
        FieldId.COUPLING: ("2", "3"),
        FieldId.SIGNAL: ("2", "4"),
        FieldId.WEAK_SIGNAL_23: ("2", "3"),
        FieldId.WEAK_SIGNAL_24: ("2", "4"),
        FieldId.FIELD_A: ("1", "2"),
        FieldId.FIELD_C: ("2", "3"),
        FieldId.FIELD_D: ("1", "3"),
    }
    fields = []
    for key, val in rabi_and_detuning.items():
        fid = FieldId(key)
        if isinstance(val, tuple):
            rabi, det = val
        else:
            rabi, det = val, 0.0
        fields.append(FieldDrive(fid, complex(rabi), float(det), transitions[fid]))
    return SystemParams(scheme, tuple(fields), Case(case), physical)


@dataclass(frozen=True)
class RwaSystem:
    """Linear steady-state system M b = rhs for the slow amplitudes.

    ``rhs`` holds the negated source terms (drives acting on the known
    amplitude b1 = 1, or on the unperturbed amplitudes for System3).
    ``singular_hint`` flags constructions that are rank deficient by
    inspection (all drives zero); the solver decides how to fail.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    unknowns: tuple[str, ...]
    singular_hint: bool = False


def rwa_matrix(
    params: SystemParams,
    *,
    unperturbed: Optional[np.ndarray] = None,
) -> RwaSystem:
    """Coefficient matrix of the steady-state amplitude equations.

    For System1 the unknowns are (b2, b3, b4) with b1 = 1 as the source.
    For System2 the unknowns are (b2, b3) with b1 = 1. For System3 the
    unknowns are the weak-field perturbations (db2, db3, db4); the
    ``unperturbed`` System1 amplitudes (b1, b2, b3, b4) must be supplied
    and db1 is eliminated through the normalization constraint
    b1* db1 + b2* db2 = 0.
    """
    sid = params.scheme.system_id
    if sid is SystemId.SYSTEM1:
        return _rwa_system1(params)
    if sid is SystemId.SYSTEM2:
        return _rwa_system2(params)
    if unperturbed is None:
        raise CaseError("System3 needs the unperturbed System1 amplitudes")
    return _rwa_system3(params, np.asarray(unperturbed, dtype=complex))


def _rwa_system1(params: SystemParams) -> RwaSystem:
    op = params.field(FieldId.PROBE).rabi
    oc = params.field(FieldId.COUPLING).rabi
    os_ = params.field(FieldId.SIGNAL).rabi
    d21 = params.two_photon_detuning
    a = params.half_width_a
    b = params.half_width_b
    m = np.array(
        [
            [-2.0 * d21, oc, os_],
            [np.conj(oc), -2.0 * a, 0.0],
            [np.conj(os_), 0.0, -2.0 * b],
        ],
        dtype=complex,
    )
    rhs = np.array([0.0, -np.conj(op), 0.0], dtype=complex)
    hint = op == 0 and oc == 0 and os_ == 0
    return RwaSystem(m, rhs, ("b2", "b3", "b4"), hint)


def _rwa_system2(params: SystemParams) -> RwaSystem:
    oab = params.field(FieldId.FIELD_A).rabi
    od = params.field(FieldId.FIELD_D).rabi
    oc = params.field(FieldId.FIELD_C).rabi
    w = params.complex_detunings()
    m = np.array(
        [
            [-2.0 * w["w21"], oc],
            [np.conj(oc), -2.0 * w["w31"]],
        ],
        dtype=complex,
    )
    rhs = np.array([-np.conj(oab), -np.conj(od)], dtype=complex)
    hint = oab == 0 and od == 0 and oc == 0
    return RwaSystem(m, rhs, ("b2", "b3"), hint)


def _rwa_system3(params: SystemParams, unperturbed: np.ndarray) -> RwaSystem:
    if len(unperturbed) != 4:
        raise ConfigError("unperturbed amplitudes must be (b1, b2, b3, b4)")
    b1, b2, b3, b4 = unperturbed
    op = params.field(FieldId.PROBE).rabi
    oc = params.field(FieldId.COUPLING).rabi
    os_ = params.field(FieldId.SIGNAL).rabi
    w23 = params.field(FieldId.WEAK_SIGNAL_23).rabi
    w24 = params.field(FieldId.WEAK_SIGNAL_24).rabi
    d21 = params.two_photon_detuning
    a = params.half_width_a
    b = params.half_width_b
    # db1 = -(b2*/b1*) db2 from the norm constraint, substituted into the
    # db3 row, which is the only row that couples to db1.
    ratio = np.conj(b2) / np.conj(b1)
    m = np.array(
        [
            [-2.0 * d21, oc, os_],
            [np.conj(oc) - np.conj(op) * ratio, -2.0 * a, 0.0],
            [np.conj(os_), 0.0, -2.0 * b],
        ],
        dtype=complex,
    )
    rhs = np.array(
        [
            -w23 * b3 - w24 * b4,
            -np.conj(w23) * b2,
            -np.conj(w24) * b2,
        ],
        dtype=complex,
    )
    hint = oc == 0 and os_ == 0 and op == 0
    return RwaSystem(m, rhs, ("db2", "db3", "db4"), hint)
