"""Detuning sweeps, analytic-vs-simulation comparison, and tabular export.

Sweep conventions
-----------------
The swept value is always the detuning of the swept laser measured from its
own transition. With the signal lock active (the signal beam shares the
coupling laser's frequency) the signal detuning tracks the coupling detuning
minus the excited-state splitting. A probe-axis sweep with the coupling
parked at +splitting therefore puts the two-photon feature at a probe
detuning equal to the splitting.

Rows carry Re and Im of the coherence product per (axis point, field,
method). Poles and solver failures become gap rows (empty values), never
NaN.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ._version import __version__ as _pkg_version
from .analytic import (
    ORACLE_BRANCH,
    SIMULATION_BRANCH,
    coupling_coherence_s1,
    probe_coherence_s1,
    signal_coherence_s1,
    signal_coherence_s1_cpt,
    steady_amplitudes_cpt,
)
from .errors import (
    ConfigError,
    DegenerateSteadyStateError,
    GridMismatchError,
    NonConvergenceError,
    PoleError,
    SingularMatrixError,
)
from .model import Case, FieldDrive, FieldId, SystemParams, rwa_matrix
from .steady import liouvillian_for, solve_amplitudes, steady_state

AXES = ("coupling", "probe")
METHODS = ("analytic", "lindblad", "oracle")

PAIR_FOR_FIELD = {
    FieldId.PROBE: ("1", "3"),
    FieldId.COUPLING: ("2", "3"),
    FieldId.SIGNAL: ("2", "4"),
}


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis: str = "coupling"
    start: float = -20.0
    stop: float = 20.0
    points: int = 401
    lock_signal_to_coupling: bool = True
    fields: tuple[FieldId, ...] = (FieldId.COUPLING, FieldId.SIGNAL)
    methods: tuple[str, ...] = ("analytic", "oracle")

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}")
        if self.points < 2:
            raise ConfigError("a sweep needs at least 2 points")
        if not self.start < self.stop:
            raise ConfigError("sweep range must have start < stop")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods: {bad}")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepRow:
    axis_mhz: float
    field: FieldId
    method: str
    branch: int
    re: Optional[float]
    im: Optional[float]

    @property
    def is_gap(self) -> bool:
        return self.re is None or self.im is None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    metadata: dict

    def trace(self, fid: FieldId, method: str) -> tuple[np.ndarray, np.ndarray]:
        """(axis, complex values) for one field/method; gaps become NaN
        for plotting convenience only, they are never serialized as NaN."""
        xs, vs = [], []
        for r in self.rows:
            if r.field is fid and r.method == method:
                xs.append(r.axis_mhz)
                vs.append(
                    complex(r.re, r.im) if not r.is_gap else complex(np.nan, np.nan)
                )
        return np.asarray(xs), np.asarray(vs)

    def methods(self) -> tuple[str, ...]:
        return tuple(sorted({r.method for r in self.rows}))


def point_params(spec: SweepSpec, x: float) -> SystemParams:
    """Base parameters with the swept detuning substituted at axis value x.

    A CPT coupling-axis sweep moves the trapping condition itself, so the
    probe co-tracks the coupling and the trapping forms hold at every point.
    A CPT probe-axis sweep is the ramping protocol: the probe crosses the
    two-photon condition, and points away from exact resonance carry the EIT
    case label because the trapping closed forms do not apply there (their
    rows become gaps); the density-matrix method is case independent.
    """
    base = spec.base
    splitting = base.scheme.splitting_mhz
    updates: dict[str, FieldDrive] = {}
    if spec.axis == "coupling":
        updates["coupling"] = replace(base.field(FieldId.COUPLING), detuning=float(x))
        if base.case is Case.CPT:
            updates["probe"] = replace(base.field(FieldId.PROBE), detuning=float(x))
        if spec.lock_signal_to_coupling:
            updates["signal"] = replace(
                base.field(FieldId.SIGNAL), detuning=float(x) - splitting
            )
    else:
        updates["probe"] = replace(base.field(FieldId.PROBE), detuning=float(x))
        if spec.lock_signal_to_coupling:
            dc = base.field(FieldId.COUPLING).detuning
            updates["signal"] = replace(
                base.field(FieldId.SIGNAL), detuning=dc - splitting
            )
    by_id = {f.field_id: f for f in base.fields}
    for key, f in updates.items():
        by_id[FieldId(key)] = f
    case = base.case
    if base.case is Case.CPT:
        d21 = by_id[FieldId.PROBE].detuning - by_id[FieldId.COUPLING].detuning
        if d21 != 0.0:
            case = Case.EIT
    return replace(base, fields=tuple(by_id.values()), case=case)


_GAP_ERRORS = (
    PoleError,
    SingularMatrixError,
    DegenerateSteadyStateError,
    NonConvergenceError,
    ZeroDivisionError,
)


def _analytic_value(params: SystemParams, fid: FieldId, branch: int) -> complex:
    if params.case is Case.CPT:
        if fid is FieldId.SIGNAL:
            return signal_coherence_s1_cpt(params, branch).total
        amps = steady_amplitudes_cpt(params, branch)
        a, b = PAIR_FOR_FIELD[fid]
        idx = {"1": 0, "2": 1, "3": 2, "4": 3}
        return complex(np.conj(amps[idx[a]]) * amps[idx[b]])
    fn = {
        FieldId.PROBE: probe_coherence_s1,
        FieldId.COUPLING: coupling_coherence_s1,
        FieldId.SIGNAL: signal_coherence_s1,
    }[fid]
    return fn(params).total


def _oracle_value(params: SystemParams, fid: FieldId, cpt_normalize: bool) -> complex:
    sys_ = rwa_matrix(params)
    if sys_.singular_hint:
        raise SingularMatrixError("all drives are zero")
    b2, b3, b4 = solve_amplitudes(sys_)
    amps = {"1": 1.0 + 0j, "2": b2, "3": b3, "4": b4}
    if cpt_normalize:
        scale = 1.0 / np.sqrt(1.0 + abs(b2) ** 2)
        amps = {k: v * scale for k, v in amps.items()}
    a, b = PAIR_FOR_FIELD[fid]
    return complex(np.conj(amps[a]) * amps[b])


def _point_values(spec: SweepSpec, x: float) -> dict:
    """Raw values per (field, method) at one axis point; CPT analytic values
    come back for both branches so selection can happen at trace level."""
    params = point_params(spec, x)
    out: dict = {}

    lindblad_vals: dict[FieldId, complex] = {}
    if "lindblad" in spec.methods:
        try:
            state = steady_state(liouvillian_for(params))
            for fid in spec.fields:
                lindblad_vals[fid] = state.coherence(PAIR_FOR_FIELD[fid])
        except _GAP_ERRORS:
            lindblad_vals = {}

    cpt_base = spec.base.case is Case.CPT
    for fid in spec.fields:
        for method in spec.methods:
            try:
                if method == "analytic":
                    if cpt_base:
                        if params.case is not Case.CPT:
                            # off the two-photon condition the trapping
                            # closed forms do not apply
                            value = None
                        else:
                            value = {}
                            for br in (ORACLE_BRANCH, SIMULATION_BRANCH):
                                try:
                                    value[br] = _analytic_value(params, fid, br)
                                except _GAP_ERRORS:
                                    value[br] = None
                            if all(v is None for v in value.values()):
                                value = None
                    else:
                        value = _analytic_value(params, fid, ORACLE_BRANCH)
                elif method == "oracle":
                    value = _oracle_value(params, fid, cpt_normalize=cpt_base)
                else:
                    if fid not in lindblad_vals:
                        raise DegenerateSteadyStateError(0, "no converged state")
                    value = lindblad_vals[fid]
            except _GAP_ERRORS:
                value = None
            out[(fid, method)] = value
    return out


def _select_cpt_branch(per_point: list[dict], fid: FieldId) -> int:
    """Branch whose analytic trace best matches the simulated trace in shape.

    The comparison is scale free (both traces normalized to unit L2) because
    overlay figures live in arbitrary units and the absolute mixed-state
    level sits between the two pure-state branches.
    """
    lind = np.array(
        [
            np.nan if vals.get((fid, "lindblad")) is None else vals[(fid, "lindblad")]
            for vals in per_point
        ],
        dtype=complex,
    )
    if not np.any(np.isfinite(lind)):
        return SIMULATION_BRANCH
    errors = {}
    for br in (ORACLE_BRANCH, SIMULATION_BRANCH):
        ana_list = []
        for vals in per_point:
            v = vals.get((fid, "analytic"))
            if isinstance(v, dict):
                v = v.get(br)
            ana_list.append(np.nan if v is None else v)
        ana = np.asarray(ana_list, dtype=complex)
        mask = np.isfinite(ana) & np.isfinite(lind)
        if not np.any(mask):
            continue
        na = np.linalg.norm(ana[mask])
        nl = np.linalg.norm(lind[mask])
        if na == 0 or nl == 0:
            errors[br] = np.inf
            continue
        errors[br] = float(np.linalg.norm(ana[mask] / na - lind[mask] / nl))
    if not errors:
        return SIMULATION_BRANCH
    return min(errors, key=errors.get)


def _assemble_rows(
    spec: SweepSpec,
    grid,
    per_point: list[dict],
    branch_for: dict,
) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for x, vals in zip(grid, per_point):
        for fid in spec.fields:
            for method in spec.methods:
                value = vals[(fid, method)]
                branch = ORACLE_BRANCH
                if method == "analytic" and isinstance(value, dict):
                    branch = branch_for.get(fid, SIMULATION_BRANCH)
                    value = value.get(branch)
                    if value is None:
                        other = (
                            SIMULATION_BRANCH if branch == ORACLE_BRANCH else ORACLE_BRANCH
                        )
                        if vals[(fid, method)].get(other) is not None:
                            branch, value = other, vals[(fid, method)][other]
                if value is None:
                    rows.append(SweepRow(float(x), fid, method, branch, None, None))
                else:
                    rows.append(
                        SweepRow(
                            float(x), fid, method, branch,
                            float(np.real(value)), float(np.imag(value)),
                        )
                    )
    return rows


def max_workers_from_env() -> int:
    raw = os.environ.get("XPM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(spec: SweepSpec, *, max_workers: Optional[int] = None) -> SweepResult:
    """Evaluate the sweep on its grid; rows come back in deterministic order
    (axis point, field, method) whatever the worker count.

    For CPT sweeps the analytic branch is selected once per field by shape
    agreement with the simulated trace (when available); a per-point rule is
    degenerate because the mixed-state level sits between the two pure-state
    branches.
    """
    workers = max_workers if max_workers is not None else max_workers_from_env()
    grid = spec.grid
    if workers <= 1:
        per_point = [_point_values(spec, x) for x in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(lambda x: _point_values(spec, x), grid))

    branch_for: dict[FieldId, int] = {}
    if spec.base.case is Case.CPT and "analytic" in spec.methods:
        for fid in spec.fields:
            if "lindblad" in spec.methods:
                branch_for[fid] = _select_cpt_branch(per_point, fid)
            else:
                branch_for[fid] = SIMULATION_BRANCH

    rows = _assemble_rows(spec, grid, per_point, branch_for)
    # log branch crossings on analytic traces (fallbacks at pole gaps)
    crossings: list[float] = []
    last_branch: dict[FieldId, int] = {}
    for r in rows:
        if r.method != "analytic":
            continue
        prev = last_branch.get(r.field)
        if prev is not None and prev != r.branch:
            crossings.append(r.axis_mhz)
        last_branch[r.field] = r.branch

    base = spec.base
    metadata = {
        "version": _pkg_version,
        "system": base.scheme.system_id.value,
        "case": base.case.value,
        "axis": spec.axis,
        "range_mhz": [spec.start, spec.stop],
        "points": spec.points,
        "lock_signal_to_coupling": spec.lock_signal_to_coupling,
        "fields": [f.value for f in spec.fields],
        "methods": list(spec.methods),
        "branch_crossings_mhz": crossings,
        "drives": {
            f.field_id.value: {
                "rabi_re": float(np.real(f.rabi)),
                "rabi_im": float(np.imag(f.rabi)),
                "detuning_mhz": f.detuning,
                "transition": list(f.transition),
            }
            for f in base.fields
        },
    }
    return SweepResult(tuple(rows), metadata)


# --------------------------------------------------------------------------
# Comparison
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Policy:
    """Background handling when comparing pure-state and mixed-state traces."""

    kind: str = "raw"  # raw | subtract-linear-background | exclude-window
    center: float = 0.0
    width: float = 0.0

    def __post_init__(self):
        if self.kind not in ("raw", "subtract-linear-background", "exclude-window"):
            raise ConfigError(f"unknown comparison policy {self.kind!r}")


@dataclass(frozen=True)
class ComparisonMetrics:
    rel_l2: dict[tuple[str, str], float]
    rel_l2_common: dict[tuple[str, str], float]
    max_abs: dict[tuple[str, str], float]
    points_used: dict[str, int]

    def worst_rel_l2(self) -> float:
        return max(self.rel_l2.values()) if self.rel_l2 else 0.0

    def worst_rel_l2_common(self) -> float:
        return max(self.rel_l2_common.values()) if self.rel_l2_common else 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "rel_l2": {f"{f}/{c}": v for (f, c), v in self.rel_l2.items()},
                "rel_l2_common": {
                    f"{f}/{c}": v for (f, c), v in self.rel_l2_common.items()
                },
                "max_abs": {f"{f}/{c}": v for (f, c), v in self.max_abs.items()},
                "points_used": self.points_used,
            },
            indent=2,
            sort_keys=True,
        )


def _single_method(result: SweepResult) -> str:
    methods = result.methods()
    if len(methods) != 1:
        raise GridMismatchError(
            f"comparison input must hold one method, found {methods}"
        )
    return methods[0]


def select_method(result: SweepResult, method: str) -> SweepResult:
    rows = tuple(r for r in result.rows if r.method == method)
    if not rows:
        raise GridMismatchError(f"no rows with method {method!r}")
    return SweepResult(rows, dict(result.metadata))


def compare(a: SweepResult, b: SweepResult, policy: Policy = Policy()) -> ComparisonMetrics:
    """Relative L2 and max-abs distance between two single-method sweeps.

    ``rel_l2`` normalizes each component (Re or Im) by its own scale;
    ``rel_l2_common`` normalizes by the complex trace scale, which is the
    right yardstick when absorption and dispersion share one axis in
    arbitrary units. Gap points on either side are dropped. The
    exclude-window policy drops |x - center| < width/2; the
    linear-background policy subtracts each trace's least-squares line.
    """
    ma, mb = _single_method(a), _single_method(b)
    fields = sorted(
        {r.field for r in a.rows} & {r.field for r in b.rows}, key=lambda f: f.value
    )
    if not fields:
        raise GridMismatchError("no common fields to compare")

    rel_l2: dict[tuple[str, str], float] = {}
    rel_common: dict[tuple[str, str], float] = {}
    max_abs: dict[tuple[str, str], float] = {}
    used: dict[str, int] = {}
    for fid in fields:
        xa, va = a.trace(fid, ma)
        xb, vb = b.trace(fid, mb)
        if len(xa) != len(xb) or not np.allclose(xa, xb, rtol=0, atol=1e-12):
            raise GridMismatchError(f"axis grids differ for field {fid.value}")
        mask = np.isfinite(va) & np.isfinite(vb)
        if policy.kind == "exclude-window":
            mask &= np.abs(xa - policy.center) >= policy.width / 2.0
        x, ya, yb = xa[mask], va[mask], vb[mask]
        used[fid.value] = int(mask.sum())
        if len(x) == 0:
            raise GridMismatchError(f"no comparable points for field {fid.value}")
        common_scale = max(np.linalg.norm(ya), np.linalg.norm(yb), 1e-300)
        for comp, fa, fb in (
            ("re", ya.real, yb.real),
            ("im", ya.imag, yb.imag),
        ):
            if policy.kind == "subtract-linear-background":
                fa = fa - np.polyval(np.polyfit(x, fa, 1), x)
                fb = fb - np.polyval(np.polyfit(x, fb, 1), x)
            scale = max(np.linalg.norm(fa), np.linalg.norm(fb), 1e-300)
            diff = float(np.linalg.norm(fa - fb))
            rel_l2[(fid.value, comp)] = diff / scale
            rel_common[(fid.value, comp)] = diff / common_scale
            max_abs[(fid.value, comp)] = float(np.max(np.abs(fa - fb)))
    return ComparisonMetrics(rel_l2, rel_common, max_abs, used)


# --------------------------------------------------------------------------
# Export
# --------------------------------------------------------------------------

CSV_COLUMNS = ("axis_mhz", "field", "method", "branch", "re", "im")


def _sorted_rows(result: SweepResult) -> list[SweepRow]:
    return sorted(
        result.rows, key=lambda r: (r.axis_mhz, r.field.value, r.method)
    )


def emit(result: SweepResult, fmt: str, path) -> None:
    """Write rows to CSV or JSON. Gap rows serialize with empty re/im cells
    (CSV) or nulls (JSON); row order is (axis, field, method)."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in _sorted_rows(result):
                w.writerow(
                    [
                        repr(r.axis_mhz),
                        r.field.value,
                        r.method,
                        r.branch,
                        "" if r.re is None else repr(r.re),
                        "" if r.im is None else repr(r.im),
                    ]
                )
    elif fmt == "json":
        payload = {
            "metadata": result.metadata,
            "rows": [
                {
                    "axis_mhz": r.axis_mhz,
                    "field": r.field.value,
                    "method": r.method,
                    "branch": r.branch,
                    "re": r.re,
                    "im": r.im,
                }
                for r in _sorted_rows(result)
            ],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown export format {fmt!r}")


def parse_csv(path) -> SweepResult:
    """Read back an emitted CSV; finite values round-trip bit exactly."""
    rows: list[SweepRow] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV header {header}")
        for rec in reader:
            axis, fid, method, branch, re_s, im_s = rec
            rows.append(
                SweepRow(
                    float(axis),
                    FieldId(fid),
                    method,
                    int(branch),
                    float(re_s) if re_s else None,
                    float(im_s) if im_s else None,
                )
            )
    return SweepResult(tuple(rows), {"source": str(path)})
