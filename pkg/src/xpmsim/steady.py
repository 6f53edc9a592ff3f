"""Numerical ground truth: linear amplitude solves and Lindblad steady states.

`solve_amplitudes` is the oracle every closed form in :mod:`xpmsim.analytic`
is tested against. `build_liouvillian` / `steady_state` implement the full
mixed-state master equation with the same drive and detuning conventions as
the amplitude equations, so the two routes can be overlaid point by point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateSteadyStateError,
    NonConvergenceError,
    SingularMatrixError,
)
from .model import FieldDrive, LevelScheme, RwaSystem, SystemParams

COND_LIMIT = 1e12
RESIDUAL_FACTOR = 1e-12
TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = -1e-8
DEGENERACY_THRESHOLD = 1e-8
EVOLVE_RESIDUAL_TOL = 1e-10


def solve_amplitudes(system: RwaSystem | np.ndarray, rhs: Optional[np.ndarray] = None) -> np.ndarray:
    """Solve M b = rhs with a conditioning check and one refinement step.

    Accepts an RwaSystem or a bare (matrix, rhs) pair. Guarantees
    ||M b - rhs|| <= 1e-12 ||rhs|| for well-conditioned systems.
    """
    if isinstance(system, RwaSystem):
        m, rhs = system.matrix, system.rhs
    else:
        m = np.asarray(system, dtype=complex)
        if rhs is None:
            raise ValueError("rhs required when passing a bare matrix")
        rhs = np.asarray(rhs, dtype=complex)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")

    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrixError(f"condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")

    b = np.linalg.solve(m, rhs)
    # one step of iterative refinement pushes the residual to rounding level
    b = b + np.linalg.solve(m, rhs - m @ b)

    rhs_norm = np.linalg.norm(rhs)
    residual = np.linalg.norm(m @ b - rhs)
    if rhs_norm > 0 and residual > RESIDUAL_FACTOR * rhs_norm:
        raise SingularMatrixError(
            f"residual {residual:.3e} above {RESIDUAL_FACTOR:.0e} * ||rhs||"
        )
    return b


@dataclass(frozen=True)
class DensityState:
    """Validated steady-state density matrix."""

    rho: np.ndarray
    basis: tuple[str, ...]
    method: str = "nullspace"       # or "evolution"
    nullspace_dim: int = 1

    def validate(self) -> "DensityState":
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_TOL}")
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"Hermiticity defect {herm:.3e}")
        eigmin = float(np.min(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))))
        if eigmin < POSITIVITY_TOL:
            raise ValueError(f"negative eigenvalue {eigmin:.3e}")
        return self

    def population(self, label: str) -> float:
        i = self.basis.index(label)
        return float(self.rho[i, i].real)

    def coherence(self, pair: tuple[str, str]) -> complex:
        """Coherence in the amplitude-product convention conj(b_a) * b_b."""
        a, b = pair
        return complex(self.rho[self.basis.index(b), self.basis.index(a)])


@dataclass(frozen=True)
class Liouvillian:
    """Master-equation generator acting on row-stacked density matrices."""

    matrix: np.ndarray
    basis: tuple[str, ...]
    hamiltonian: np.ndarray
    decay_channels: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.basis)


def build_hamiltonian(scheme: LevelScheme, fields: Sequence[FieldDrive]) -> np.ndarray:
    """Rotating-frame Hamiltonian consistent with the amplitude equations.

    Frame offsets accumulate along the drive graph: the first ground level
    sits at zero and each drive (g, e) puts level e at offset(g) + detuning.
    Couplings enter as H[g, e] = -Omega/2. Two drives on one transition are
    summed; this assumes they share a frequency, which holds for the locked
    weak beams of System3.
    """
    n = len(scheme.labels)
    idx = {lab: i for i, lab in enumerate(scheme.labels)}
    h = np.zeros((n, n), dtype=complex)

    offsets: dict[str, float] = {scheme.labels[0]: 0.0}
    remaining = list(fields)
    # breadth-first frame assignment over the drive graph
    guard = 0
    while remaining and guard < 10 * len(fields):
        guard += 1
        f = remaining.pop(0)
        lo, hi = f.transition
        if lo in offsets:
            target = offsets[lo] + f.detuning
            if hi in offsets and abs(offsets[hi] - target) > 1e-9:
                raise ValueError(
                    f"{f.field_id.value}: frame offset conflict on level {hi}; "
                    "co-driven transitions must share a frequency"
                )
            offsets[hi] = target
        elif hi in offsets:
            offsets[lo] = offsets[hi] - f.detuning
        else:
            remaining.append(f)
    for lab in scheme.labels:
        offsets.setdefault(lab, 0.0)

    for lab, off in offsets.items():
        h[idx[lab], idx[lab]] = off
    for f in fields:
        lo, hi = idx[f.transition[0]], idx[f.transition[1]]
        h[lo, hi] += -0.5 * f.rabi
        h[hi, lo] += -0.5 * np.conj(f.rabi)
    return h


def build_liouvillian(scheme: LevelScheme, fields: Sequence[FieldDrive]) -> Liouvillian:
    """Generator L with -i[H, rho] plus one dissipator per decay channel."""
    h = build_hamiltonian(scheme, fields)
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    # row-stacked vec: vec(A rho B) = (A kron B^T) vec(rho)
    lmat = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    idx = {lab: i for i, lab in enumerate(scheme.labels)}
    for ch in scheme.decay_channels:
        if ch.rate == 0.0:
            continue
        c = np.zeros((n, n), dtype=complex)
        c[idx[ch.target], idx[ch.source]] = 1.0
        cdc = c.conj().T @ c
        lmat += ch.rate * (
            np.kron(c, c.conj())
            - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
        )
    return Liouvillian(lmat, scheme.labels, h, scheme.decay_channels)


def liouvillian_for(params: SystemParams) -> Liouvillian:
    return build_liouvillian(params.scheme, params.fields)


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1)


def _unvec(v: np.ndarray, n: int) -> np.ndarray:
    return v.reshape(n, n)


def _normalize(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    return rho / tr


def default_initial_state(liouvillian: Liouvillian) -> np.ndarray:
    """All population in the first listed level."""
    n = liouvillian.dim
    rho0 = np.zeros((n, n), dtype=complex)
    rho0[0, 0] = 1.0
    return rho0


def steady_state(
    liouvillian: Liouvillian,
    *,
    initial: Optional[np.ndarray] = None,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> DensityState:
    """Null-space steady state, with fallbacks for near-degenerate generators.

    The smallest singular direction of L gives the steady state. When the
    second-smallest singular value sits below ``degeneracy_threshold * ||L||``
    (slow relaxation or genuine degeneracy) a trace-constrained least-squares
    solve is tried first: it recovers the unique trace-one kernel element
    even when the spectral gap is far below the SVD threshold. Only a
    genuinely non-unique kernel (rank-deficient augmented system, e.g. no
    fields and disconnected ground states) falls back to time evolution from
    the declared initial state.
    """
    lmat = liouvillian.matrix
    n = liouvillian.dim
    _, svals, vh = np.linalg.svd(lmat)
    scale = max(svals[0], 1.0)
    # machine-level kernel: directions L annihilates outright. A small but
    # clean spectral gap (slow relaxation) still has kernel dimension one,
    # and the singular vector is then exact; only a genuinely multiple
    # kernel needs the evolution fallback.
    kernel_dim = int(np.sum(svals < 1e-12 * scale))
    slow_dim = int(np.sum(svals < degeneracy_threshold * scale))

    if kernel_dim <= 1:
        rho = _unvec(vh[-1].conj(), n)
        if abs(np.trace(rho)) > 1e-10:
            state = DensityState(_normalize(rho), liouvillian.basis, "nullspace", 1)
            return state.validate()
        kernel_dim = max(kernel_dim, 2)  # traceless null vector

    null_dim = max(kernel_dim, slow_dim)
    warnings.warn(
        f"degenerate steady state (null-space dimension {null_dim}); "
        "falling back to time evolution from the declared initial state",
        stacklevel=2,
    )
    rho0 = initial if initial is not None else default_initial_state(liouvillian)
    try:
        evolved = evolve(liouvillian, rho0)
    except NonConvergenceError as exc:
        raise DegenerateSteadyStateError(null_dim, str(exc)) from exc
    return DensityState(evolved.rho, liouvillian.basis, "evolution", null_dim).validate()


def evolve(
    liouvillian: Liouvillian,
    rho0: np.ndarray,
    t_final: Optional[float] = None,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    residual_tol: float = EVOLVE_RESIDUAL_TOL,
    max_horizon: float = 1e6,
) -> DensityState:
    """Integrate d(vec rho)/dt = L vec(rho) until the Liouvillian residual

    ||L vec(rho)|| drops below ``residual_tol``, doubling the horizon as
    needed. With an explicit ``t_final`` the state at that time is returned
    without the convergence requirement.
    """
    lmat = liouvillian.matrix
    n = liouvillian.dim
    rho = np.asarray(rho0, dtype=complex)

    def rhs(_t, y):
        return lmat @ y

    if t_final is not None:
        if t_final > 0:
            sol = solve_ivp(
                rhs, (0.0, t_final), _vec(rho), method="DOP853", rtol=rtol, atol=atol
            )
            rho = _unvec(sol.y[:, -1], n)
        rho = 0.5 * (rho + rho.conj().T)
        return DensityState(rho, liouvillian.basis, "evolution")

    norm = np.linalg.norm(lmat)
    if norm == 0.0:
        return DensityState(rho.copy(), liouvillian.basis, "evolution")
    horizon = 10.0 / norm
    t_total = 0.0
    y = _vec(rho)
    residual = np.linalg.norm(lmat @ y)
    while residual > residual_tol:
        if t_total >= max_horizon:
            raise NonConvergenceError(residual, t_total, residual_tol)
        sol = solve_ivp(rhs, (0.0, horizon), y, method="DOP853", rtol=rtol, atol=atol)
        y = sol.y[:, -1]
        t_total += horizon
        horizon *= 2.0
        residual = np.linalg.norm(lmat @ y)
    rho = 0.5 * (_unvec(y, n) + _unvec(y, n).conj().T)
    tr = np.trace(rho).real
    if abs(tr) > 1e-12:
        rho = rho / tr
    return DensityState(rho, liouvillian.basis, "evolution")


def spectral_gap(liouvillian: Liouvillian) -> float:
    """Magnitude of the slowest nonzero relaxation rate of L."""
    ev = np.linalg.eigvals(liouvillian.matrix)
    rates = np.sort(np.abs(ev.real))
    nonzero = rates[rates > 1e-10]
    return float(nonzero[0]) if len(nonzero) else 0.0
