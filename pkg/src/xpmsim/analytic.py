"""Closed-form steady-state coherences and their multiphoton decompositions.

Every operation here has an independent numerical twin: solving the linear
amplitude system from :mod:`xpmsim.model` with :func:`xpmsim.steady.solve_amplitudes`
must reproduce each closed form to better than 1e-9 relative error. The test
suite enforces that equivalence on randomized parameter sets.

Coherence products follow the convention ``value(pair=(a, b)) = conj(b_a) * b_b``,
the pure-state analogue of the density-matrix element rho[b, a].

System1, Case I (all population in |1>), with D the shared denominator
``D = 4*d21*A - |Os|^2*A/B - |Oc|^2``:

* amplitudes:  b2 = Oc*conj(Op)/D,  b3 = conj(Op)*(4*B*d21 - |Os|^2)/(2*B*D),
  b4 = conj(Os)*Oc*conj(Op)/(2*B*D)
* probe    b1*.b3: two fifth-order terms at two-photon resonance
* coupling b2*.b3: a fifth-order term plus a Raman term proportional to d21
* signal   b2*.b4: a single fifth-order term

The fifth-order terms of the coupling and signal beams share one photon
signature (absorb and emit one photon from each of the three fields); their
unit-amplitude susceptibilities have equal |Im| parts, which is the symmetry
probed by :mod:`xpmsim.symmetry`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CaseError, PoleError
from .model import (
    Case,
    FieldId,
    PhysicalConstants,
    SystemId,
    SystemParams,
)

EPS_POLE = 1e-9  # MHz-units pole guard on closed-form denominators

ORACLE_BRANCH = 0  # CPT branch consistent with the normalized linear solve
SIMULATION_BRANCH = 1  # CPT branch that best matches the mixed-state simulation


Signature = tuple[tuple[FieldId, int], ...]


@dataclass(frozen=True)
class MultiphotonTerm:
    """One labeled contribution to a coherence product.

    ``signature`` lists every photon of the process as (field, sign) with
    absorption +1 and emission -1; the first ``n_observed`` entries are the
    photons of the observed polarization and carry no field-amplitude
    factor. ``monomial`` is the product of drive amplitudes appearing in
    the term (conjugated factors for emission); dividing it out yields the
    unit-amplitude susceptibility. ``degrees`` gives the exponent of each
    field amplitude under real rescaling, used by the scaling tests.
    """

    value: complex
    signature: Signature
    monomial: complex = 1.0 + 0j
    label: str = ""
    n_observed: int = 1
    degrees: dict[FieldId, int] = field(default_factory=dict)
    pole_powers: dict[str, int] = field(default_factory=dict)

    @property
    def order(self) -> int:
        """Nonlinearity order: photon count minus the observed slot."""
        return len(self.signature) - 1

    def susceptibility(self) -> complex:
        """Term value with all drive-amplitude factors divided out."""
        if abs(self.monomial) == 0.0:
            if abs(self.value) == 0.0:
                return 0.0 + 0j
            raise PoleError("monomial", 0.0, EPS_POLE)
        return self.value / self.monomial

    def conjugate(self) -> "MultiphotonTerm":
        sig = tuple((fid, -s) for fid, s in self.signature)
        return MultiphotonTerm(
            np.conj(self.value),
            sig,
            np.conj(self.monomial),
            self.label,
            self.n_observed,
            dict(self.degrees),
            dict(self.pole_powers),
        )


@dataclass(frozen=True)
class CoherenceResult:
    """A coherence product decomposed into labeled multiphoton terms."""

    pair: tuple[str, str]
    terms: tuple[MultiphotonTerm, ...]
    branch_id: int = 0

    @property
    def total(self) -> complex:
        return complex(sum(t.value for t in self.terms))

    def term(self, label: str) -> MultiphotonTerm:
        for t in self.terms:
            if t.label == label:
                return t
        raise KeyError(label)

    def conjugate(self) -> "CoherenceResult":
        return CoherenceResult(
            (self.pair[1], self.pair[0]),
            tuple(t.conjugate() for t in self.terms),
            self.branch_id,
        )


def _guard(name: str, value: complex, guard: float = EPS_POLE) -> complex:
    if abs(value) < guard:
        raise PoleError(name, abs(value), guard)
    return value


def _s1_drives(params: SystemParams):
    op = params.field(FieldId.PROBE).rabi
    oc = params.field(FieldId.COUPLING).rabi
    os_ = params.field(FieldId.SIGNAL).rabi
    return op, oc, os_


def _require_case(params: SystemParams, case: Case, what: str) -> None:
    if params.case is not case:
        raise CaseError(f"{what} is defined for the {case.value.upper()} case")


def d_factor(params: SystemParams) -> complex:
    """Shared resonance denominator D = 4*d21*A - |Os|^2*A/B - |Oc|^2."""
    _, oc, os_ = _s1_drives(params)
    a = params.half_width_a
    b = _guard("B", params.half_width_b)
    return (
        4.0 * params.two_photon_detuning * a
        - abs(os_) ** 2 * a / b
        - abs(oc) ** 2
    )


def steady_amplitudes_s1(params: SystemParams) -> np.ndarray:
    """Case I amplitudes (b1, b2, b3, b4) with b1 = 1, in closed form."""
    _require_case(params, Case.EIT, "the b1 = 1 amplitude solution")
    op, oc, os_ = _s1_drives(params)
    a = params.half_width_a
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    d21 = params.two_photon_detuning
    b2 = oc * np.conj(op) / d
    b3 = np.conj(op) * (4.0 * b * d21 - abs(os_) ** 2) / (2.0 * b * d)
    b4 = np.conj(os_) * oc * np.conj(op) / (2.0 * b * d)
    return np.array([1.0, b2, b3, b4], dtype=complex)


# photon bookkeeping helpers ------------------------------------------------

def _pm(fid: FieldId, n: int) -> list[tuple[FieldId, int]]:
    """n absorb/emit pairs of one field, as in |Omega|^(2n) factors."""
    out: list[tuple[FieldId, int]] = []
    for _ in range(n):
        out.extend([(fid, +1), (fid, -1)])
    return out


def probe_coherence_s1(params: SystemParams) -> CoherenceResult:
    """Probe-beam coherence b1*.b3 for Case I.

    At two-photon resonance the result splits into exactly two fifth-order
    terms, with field monomials conj(Op)*|Os|^4 and conj(Op)*|Os|^2*|Oc|^2.
    Away from resonance it splits into a Raman term proportional to the
    two-photon detuning and the cross-modulation remainder.
    """
    _require_case(params, Case.EIT, "probe_coherence_s1")
    op, oc, os_ = _s1_drives(params)
    a = params.half_width_a
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    d21 = params.two_photon_detuning
    opc = np.conj(op)

    if d21 == 0.0:
        # rationalize 1/(2BD) against its conjugate; 2BD = -(2|Os|^2 A + 2|Oc|^2 B)
        den = abs(2.0 * b * d) ** 2
        t_sig = MultiphotonTerm(
            value=2.0 * opc * abs(os_) ** 4 * np.conj(a) / den,
            signature=((FieldId.PROBE, +1), (FieldId.PROBE, -1), *_pm(FieldId.SIGNAL, 2)),
            monomial=opc * abs(os_) ** 4,
            label="chi5_signal_quartic",
            degrees={FieldId.PROBE: 1, FieldId.SIGNAL: 4},
        )
        t_mix = MultiphotonTerm(
            value=2.0 * opc * abs(os_) ** 2 * abs(oc) ** 2 * np.conj(b) / den,
            signature=(
                (FieldId.PROBE, +1),
                (FieldId.PROBE, -1),
                *_pm(FieldId.SIGNAL, 1),
                *_pm(FieldId.COUPLING, 1),
            ),
            monomial=opc * abs(os_) ** 2 * abs(oc) ** 2,
            label="chi5_signal_coupling",
            degrees={FieldId.PROBE: 1, FieldId.SIGNAL: 2, FieldId.COUPLING: 2},
        )
        return CoherenceResult(("1", "3"), (t_sig, t_mix))

    t_raman = MultiphotonTerm(
        value=2.0 * d21 * opc / d,
        signature=((FieldId.PROBE, +1), (FieldId.PROBE, -1)),
        monomial=opc,
        label="raman",
        degrees={FieldId.PROBE: 1},
    )
    t_x = MultiphotonTerm(
        value=-opc * abs(os_) ** 2 / (2.0 * b * d),
        signature=((FieldId.PROBE, +1), (FieldId.PROBE, -1), *_pm(FieldId.SIGNAL, 1)),
        monomial=opc * abs(os_) ** 2,
        label="cross_modulation",
        degrees={FieldId.PROBE: 1, FieldId.SIGNAL: 2},
    )
    return CoherenceResult(("1", "3"), (t_raman, t_x))


_SHARED_CHI5_SIG_COUPLING: Signature = (
    (FieldId.COUPLING, +1),
    (FieldId.COUPLING, -1),
    *_pm(FieldId.PROBE, 1),
    *_pm(FieldId.SIGNAL, 1),
)

_SHARED_CHI5_SIG_SIGNAL: Signature = (
    (FieldId.SIGNAL, +1),
    (FieldId.SIGNAL, -1),
    *_pm(FieldId.PROBE, 1),
    *_pm(FieldId.COUPLING, 1),
)


def coupling_coherence_s1(params: SystemParams) -> CoherenceResult:
    """Coupling-beam coherence b2*.b3 for Case I.

    term1 = -conj(Oc)*|Op|^2*|Os|^2*conj(B) / (2*|B|^2*|D|^2) carries the
    symmetric one-photon-per-field signature. term2 is the Raman residue,
    2*d21*conj(Oc)*|Op|^2 / |D|^2, and vanishes at two-photon resonance.
    """
    _require_case(params, Case.EIT, "coupling_coherence_s1")
    op, oc, os_ = _s1_drives(params)
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    d21 = params.two_photon_detuning
    den = 2.0 * abs(b) ** 2 * abs(d) ** 2

    t1 = MultiphotonTerm(
        value=-np.conj(oc) * abs(op) ** 2 * abs(os_) ** 2 * np.conj(b) / den,
        signature=_SHARED_CHI5_SIG_COUPLING,
        monomial=np.conj(oc) * abs(op) ** 2 * abs(os_) ** 2,
        label="chi5_symmetric",
        degrees={FieldId.PROBE: 2, FieldId.COUPLING: 1, FieldId.SIGNAL: 2},
    )
    t2 = MultiphotonTerm(
        value=2.0 * d21 * np.conj(oc) * abs(op) ** 2 / abs(d) ** 2,
        signature=(
            (FieldId.COUPLING, +1),
            (FieldId.COUPLING, -1),
            *_pm(FieldId.PROBE, 1),
        ),
        monomial=np.conj(oc) * abs(op) ** 2,
        label="raman_residue",
        degrees={FieldId.PROBE: 2, FieldId.COUPLING: 1},
    )
    return CoherenceResult(("2", "3"), (t1, t2))


def signal_coherence_s1(params: SystemParams) -> CoherenceResult:
    """Signal-beam coherence b2*.b4 for Case I: a single fifth-order term,

    |Oc|^2*|Op|^2*conj(Os)*conj(B) / (2*|B|^2*|D|^2).
    """
    _require_case(params, Case.EIT, "signal_coherence_s1")
    op, oc, os_ = _s1_drives(params)
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    den = 2.0 * abs(b) ** 2 * abs(d) ** 2
    t1 = MultiphotonTerm(
        value=abs(oc) ** 2 * abs(op) ** 2 * np.conj(os_) * np.conj(b) / den,
        signature=_SHARED_CHI5_SIG_SIGNAL,
        monomial=abs(oc) ** 2 * abs(op) ** 2 * np.conj(os_),
        label="chi5_symmetric",
        degrees={FieldId.PROBE: 2, FieldId.COUPLING: 2, FieldId.SIGNAL: 1},
    )
    return CoherenceResult(("2", "4"), (t1,))


def cpt_population_weight(params: SystemParams, branch: int) -> float:
    """|b2|^2 under the CPT normalization |b1|^2 + |b2|^2 = 1.

    Branch 0 follows the linear solve: |b2|^2 weight |B*Oc*Op|^2 against
    |G|^2 with G = conj(B*D). Branch 1 is the swapped-weight solution that
    matches the mixed-state simulation; it puts the weight |G|^2 on |b2|^2
    and is the branch whose signal term carries conj(Os)*|Os|^4.
    """
    op, oc, _ = _s1_drives(params)
    b = _guard("B", params.half_width_b)
    d0 = _guard("D", d_factor(params))
    g2 = abs(b * d0) ** 2
    w2 = abs(b) ** 2 * abs(oc) ** 2 * abs(op) ** 2
    total = _guard("G^2 + |B Oc Op|^2", g2 + w2)
    return (w2 if branch == ORACLE_BRANCH else g2) / abs(total)


def steady_amplitudes_cpt(params: SystemParams, branch: int = ORACLE_BRANCH) -> np.ndarray:
    """CPT amplitudes (b1, b2, b3, b4), normalized to |b1|^2 + |b2|^2 = 1.

    Branch 0 fixes relative phases through the amplitude equations and is
    exactly the rescaled linear solve. Branch 1 keeps the same excited-state
    relations b3(b2), b4(b2) but the swapped population weight; its b1 is
    only defined up to the unused phase and is set through the same row
    relation.
    """
    _require_case(params, Case.CPT, "steady_amplitudes_cpt")
    op, oc, os_ = _s1_drives(params)
    b = _guard("B", params.half_width_b)
    d0 = _guard("D", d_factor(params))
    w2 = cpt_population_weight(params, branch)
    # phase convention: b1 real and positive; arg(b2/b1) from the amplitude rows
    gstar = b * d0  # conj(G)
    ratio = b * oc * np.conj(op) / gstar  # b2/b1 from the amplitude rows
    b1 = complex(np.sqrt(1.0 - w2))
    if branch == ORACLE_BRANCH:
        b2 = b1 * ratio
    else:
        phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0 + 0j
        b2 = np.sqrt(w2) * phase
    b4 = np.conj(os_) * b2 / (2.0 * b)
    b3 = -abs(os_) ** 2 * b2 / (2.0 * b * _guard("Oc", oc))
    return np.array([b1, b2, b3, b4], dtype=complex)


def signal_coherence_s1_cpt(
    params: SystemParams, branch: int = SIMULATION_BRANCH
) -> CoherenceResult:
    """Signal-beam coherence b2*.b4 under CPT (two-photon resonance exact).

    Both branches share b4 = conj(Os)*b2/(2B), so the product is
    conj(Os)*conj(B)*|b2|^2 / (2|B|^2) and only the population weight |b2|^2
    differs. On the simulation-matched branch the weight expands into three
    terms; the dominant one carries conj(Os)*|Os|^4 and is the candidate
    source of squeezing (five photons of the observed field). The coexisting
    terms carry the coupling amplitude and stay comparatively small.
    """
    if params.case is not Case.CPT:
        raise CaseError("signal_coherence_s1_cpt requires the CPT case")
    if params.two_photon_detuning != 0.0:
        raise CaseError("CPT coherences are defined at exact two-photon resonance")
    op, oc, os_ = _s1_drives(params)
    a = params.half_width_a
    b = _guard("B", params.half_width_b)
    d0 = _guard("D", d_factor(params))
    osc = np.conj(os_)
    bc = np.conj(b)

    g2 = abs(b * d0) ** 2
    w2 = abs(b) ** 2 * abs(oc) ** 2 * abs(op) ** 2
    den = 2.0 * abs(b) ** 2 * (g2 + w2)

    if branch == ORACLE_BRANCH:
        t = MultiphotonTerm(
            value=osc * bc * abs(b) ** 2 * abs(oc) ** 2 * abs(op) ** 2 / den,
            signature=(
                (FieldId.SIGNAL, +1),
                (FieldId.SIGNAL, -1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=osc * abs(oc) ** 2 * abs(op) ** 2,
            label="cpt_linear_like",
            degrees={FieldId.PROBE: 2, FieldId.COUPLING: 2, FieldId.SIGNAL: 1},
        )
        return CoherenceResult(("2", "4"), (t,), branch_id=ORACLE_BRANCH)

    # |G|^2 = |Os|^4|A|^2 + 2 Re(conj(A) B)|Os|^2|Oc|^2 + |Oc|^4|B|^2
    t_dom = MultiphotonTerm(
        value=osc * abs(os_) ** 4 * abs(a) ** 2 * bc / den,
        signature=(
            (FieldId.SIGNAL, +1),
            (FieldId.SIGNAL, -1),
            *_pm(FieldId.SIGNAL, 2),
        ),
        monomial=osc * abs(os_) ** 4,
        label="squeezing_dominant",
        degrees={FieldId.SIGNAL: 5},
    )
    t_cross = MultiphotonTerm(
        value=2.0 * np.real(np.conj(a) * b) * abs(os_) ** 2 * abs(oc) ** 2 * osc * bc / den,
        signature=(
            (FieldId.SIGNAL, +1),
            (FieldId.SIGNAL, -1),
            *_pm(FieldId.SIGNAL, 1),
            *_pm(FieldId.COUPLING, 1),
        ),
        monomial=osc * abs(os_) ** 2 * abs(oc) ** 2,
        label="coexisting_cross",
        degrees={FieldId.SIGNAL: 3, FieldId.COUPLING: 2},
    )
    t_cpl = MultiphotonTerm(
        value=abs(oc) ** 4 * abs(b) ** 2 * osc * bc / den,
        signature=(
            (FieldId.SIGNAL, +1),
            (FieldId.SIGNAL, -1),
            *_pm(FieldId.COUPLING, 2),
        ),
        monomial=osc * abs(oc) ** 4,
        label="coexisting_coupling",
        degrees={FieldId.SIGNAL: 1, FieldId.COUPLING: 4},
    )
    return CoherenceResult(("2", "4"), (t_dom, t_cross, t_cpl), branch_id=SIMULATION_BRANCH)


def chi5_symmetric_magnitude(params: SystemParams) -> float:
    """|Im chi5| shared by the coupling and signal beams,

    |mu23|^2 * |mu13|^2 * |mu24|^2 * (Gamma4/2) / |2*B*B**D*D*|.
    """
    _require_case(params, Case.EIT, "chi5_symmetric_magnitude")
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    g4 = params.scheme.total_decay("4")
    mu = params.physical
    mu2 = (
        abs(mu.dipole(("2", "3"))) ** 2
        * abs(mu.dipole(("1", "3"))) ** 2
        * abs(mu.dipole(("2", "4"))) ** 2
    )
    return float(mu2 * (g4 / 2.0) / (2.0 * abs(b) ** 2 * abs(d) ** 2))


# --------------------------------------------------------------------------
# System2: effective three-level ladder
# --------------------------------------------------------------------------

def _s2_inputs(params: SystemParams):
    oab = params.field(FieldId.FIELD_A).rabi
    od = params.field(FieldId.FIELD_D).rabi
    oc = params.field(FieldId.FIELD_C).rabi
    w = params.complex_detunings()
    q = 4.0 * w["w31"] * w["w21"] - abs(oc) ** 2
    return oab, od, oc, w["w21"], w["w31"], _guard("Q", q)


def coherences_s2(
    params: SystemParams,
) -> tuple[CoherenceResult, CoherenceResult, CoherenceResult]:
    """The three coherence products (b1*.b3, b1*.b2, b2*.b3) of System2.

    Each result has a nonlinear first term (the third-order process, one
    photon exchanged with every field) and a linear remainder. The b2*.b3
    first term is written with the ratio conj(Oc)/Oc, so its monomial keeps
    that pure phase factor; at Oc = 0 the term is zero because the process
    needs a photon of that field.
    """
    oab, od, oc, w21, w31, q = _s2_inputs(params)
    q2 = abs(q) ** 2
    qc = np.conj(q)

    # field d observes b1*.b3
    d_t1 = MultiphotonTerm(
        value=np.conj(oc) * np.conj(oab) * qc / q2,
        signature=(
            (FieldId.FIELD_D, +1),
            (FieldId.FIELD_A, -1),
            (FieldId.FIELD_B, -1),
            (FieldId.FIELD_C, -1),
        ),
        monomial=np.conj(oc) * np.conj(oab),
        label="chi3_process",
        degrees={FieldId.FIELD_A: 1, FieldId.FIELD_C: 1},
    )
    d_t2 = MultiphotonTerm(
        value=2.0 * w21 * np.conj(od) / q,
        signature=((FieldId.FIELD_D, +1), (FieldId.FIELD_D, -1)),
        monomial=np.conj(od),
        label="linear",
        degrees={FieldId.FIELD_D: 1},
    )
    c13 = CoherenceResult(("1", "3"), (d_t1, d_t2))

    # the composite a+b pair observes b1*.b2; two observed photons
    ab_t1 = MultiphotonTerm(
        value=np.conj(od) * oc * qc / q2,
        signature=(
            (FieldId.FIELD_A, -1),
            (FieldId.FIELD_B, -1),
            (FieldId.FIELD_D, +1),
            (FieldId.FIELD_C, -1),
        ),
        monomial=np.conj(od) * oc,
        label="chi3_process",
        n_observed=2,
        degrees={FieldId.FIELD_D: 1, FieldId.FIELD_C: 1},
    )
    ab_t2 = MultiphotonTerm(
        value=2.0 * w31 * np.conj(oab) / q,
        signature=(
            (FieldId.FIELD_A, +1),
            (FieldId.FIELD_B, +1),
            (FieldId.FIELD_A, -1),
            (FieldId.FIELD_B, -1),
        ),
        monomial=np.conj(oab),
        label="linear",
        n_observed=2,
        degrees={FieldId.FIELD_A: 1},
    )
    c12 = CoherenceResult(("1", "2"), (ab_t1, ab_t2))

    # field c observes b2*.b3; total assembled from the amplitude product,
    # which stays regular at Oc = 0 even though the split terms do not
    b2 = (2.0 * w31 * np.conj(oab) + oc * np.conj(od)) / q
    b3 = (2.0 * w21 * np.conj(od) + np.conj(oc) * np.conj(oab)) / q
    total = np.conj(b2) * b3
    if abs(oc) == 0.0:
        c_t1_value = 0.0 + 0j
        c_t1_monomial = 0.0 + 0j
    else:
        c_t1_value = -np.conj(oab) * np.conj(oc) * od * q / (oc * q2)
        c_t1_monomial = np.conj(oab) * od * np.conj(oc) / oc
    c_t1 = MultiphotonTerm(
        value=c_t1_value,
        signature=(
            (FieldId.FIELD_C, +1),
            (FieldId.FIELD_A, +1),
            (FieldId.FIELD_B, +1),
            (FieldId.FIELD_D, -1),
        ),
        monomial=c_t1_monomial,
        label="chi3_process",
        degrees={FieldId.FIELD_A: 1, FieldId.FIELD_D: 1},
    )
    c_t2 = MultiphotonTerm(
        value=total - c_t1_value,
        signature=((FieldId.FIELD_C, +1), (FieldId.FIELD_C, -1)),
        monomial=1.0 + 0j,
        label="linear",
        degrees={},
    )
    c23 = CoherenceResult(("2", "3"), (c_t1, c_t2))
    return c13, c12, c23


def chi3_s2(params: SystemParams) -> complex:
    """The shared third-order susceptibility of System2,

    mu23* * mu12* * mu13 * Q / |Q|^2 with Q = 4*w31*w21 - |Oc|^2.

    Its |Im| equals the |Im| of the unit-amplitude first term of each of
    the three coherences; note the b2*.b3 product pairs with mu23, not
    mu23*, for this to hold.
    """
    *_, q = _s2_inputs(params)
    mu = params.physical
    mus = (
        np.conj(mu.dipole(("2", "3")))
        * np.conj(mu.dipole(("1", "2")))
        * mu.dipole(("1", "3"))
    )
    return mus * q / abs(q) ** 2


# --------------------------------------------------------------------------
# System3: ninth-order perturbative coherences
# --------------------------------------------------------------------------

def _s3_inputs(params: SystemParams):
    if params.scheme.system_id is not SystemId.SYSTEM3:
        raise CaseError("perturbed coherences are a System3 construct")
    if params.two_photon_detuning != 0.0:
        raise CaseError("System3 closed forms hold at zero two-photon detuning")
    op, oc, os_ = _s1_drives(params)
    w23 = params.field(FieldId.WEAK_SIGNAL_23).rabi
    w24 = params.field(FieldId.WEAK_SIGNAL_24).rabi
    strong = min(abs(oc), abs(os_)) or max(abs(oc), abs(os_))
    if strong and max(abs(w23), abs(w24)) > 0.1 * strong:
        warnings.warn(
            "weak fields are not small against the strong drives; "
            "first-order perturbation theory is strained",
            stacklevel=3,
        )
    return op, oc, os_, w23, w24


def perturbed_coherences_s3(
    params: SystemParams,
    unperturbed: Optional[np.ndarray] = None,
) -> tuple[CoherenceResult, CoherenceResult]:
    """First-order coherences (b2*.db4, b4*.db2) of the doubly driven scheme.

    Every term carries at least one weak-field amplitude, so both products
    vanish when the weak beams are off. The common bracket is
    2*B*(|Op|^2|Oc|^2 + |D|^2) (times conj(B) for the second product).
    The conj(w24)*|Oc|^4*|Op|^4 term of the first product is the ninth-order
    resonance; the paired same-conjugation signal photons in the remaining
    terms always ride with a weak-field counterpart.
    """
    op, oc, os_, w23, w24 = _s3_inputs(params)
    a = params.half_width_a
    b = _guard("B", params.half_width_b)
    # D at zero two-photon detuning, matching the unperturbed solution
    d = _guard("D", -abs(os_) ** 2 * a / b - abs(oc) ** 2)
    if unperturbed is not None:
        # the closed forms embed the Case-I solution; a supplied one must agree
        b2_ref = oc * np.conj(op) / d
        if abs(unperturbed[1] - b2_ref) > 1e-9 * max(abs(b2_ref), 1e-300):
            raise CaseError(
                "supplied unperturbed amplitudes do not solve the strong-field "
                "steady state at zero two-photon detuning"
            )

    p2 = abs(op) ** 2
    c2 = abs(oc) ** 2
    s2 = abs(os_) ** 2
    opc, occ, osc = np.conj(op), np.conj(oc), np.conj(os_)
    w23c, w24c = np.conj(w23), np.conj(w24)

    bracket = 2.0 * b * (p2 * c2 + abs(d) ** 2)
    _guard("bracket", bracket)

    obs24_abs = ((FieldId.WEAK_SIGNAL_24, +1),)
    obs24_emi = ((FieldId.WEAK_SIGNAL_24, -1),)

    t25 = (
        MultiphotonTerm(
            value=osc * w23c * oc * c2 * p2 / d / bracket,
            signature=(
                *obs24_abs,
                (FieldId.SIGNAL, -1),
                (FieldId.WEAK_SIGNAL_23, -1),
                (FieldId.COUPLING, +1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=osc * w23c * oc * c2 * p2,
            label="w23_exchange",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 3,
                FieldId.SIGNAL: 1,
                FieldId.WEAK_SIGNAL_23: 1,
            },
            pole_powers={"D": -1},
        ),
        MultiphotonTerm(
            value=w24c * c2 ** 2 * p2 ** 2 / abs(d) ** 2 / bracket,
            signature=(
                *obs24_abs,
                (FieldId.WEAK_SIGNAL_24, -1),
                *_pm(FieldId.COUPLING, 2),
                *_pm(FieldId.PROBE, 2),
            ),
            monomial=w24c * c2 ** 2 * p2 ** 2,
            label="chi9_resonance",
            degrees={
                FieldId.PROBE: 4,
                FieldId.COUPLING: 4,
                FieldId.WEAK_SIGNAL_24: 1,
            },
            pole_powers={"D": -1, "Dc": -1},
        ),
        MultiphotonTerm(
            value=osc ** 2 * w24 * c2 * p2 * a / (b * d) / bracket,
            signature=(
                *obs24_abs,
                (FieldId.SIGNAL, -1),
                (FieldId.SIGNAL, -1),
                (FieldId.WEAK_SIGNAL_24, +1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=osc ** 2 * w24 * c2 * p2,
            label="paired_signal_emission",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 2,
                FieldId.SIGNAL: 2,
                FieldId.WEAK_SIGNAL_24: 1,
            },
            pole_powers={"A": 1, "B": -1, "D": -1},
        ),
        MultiphotonTerm(
            value=-osc * occ * w23 * s2 * p2 * a / (b * d) / bracket,
            signature=(
                *obs24_abs,
                (FieldId.SIGNAL, -1),
                (FieldId.COUPLING, -1),
                (FieldId.WEAK_SIGNAL_23, +1),
                *_pm(FieldId.SIGNAL, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=osc * occ * w23 * s2 * p2,
            label="w23_counter",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 1,
                FieldId.SIGNAL: 3,
                FieldId.WEAK_SIGNAL_23: 1,
            },
            pole_powers={"A": 1, "B": -1, "D": -1},
        ),
        MultiphotonTerm(
            value=-w24c * c2 ** 2 * p2 / d / bracket,
            signature=(
                *obs24_abs,
                (FieldId.WEAK_SIGNAL_24, -1),
                *_pm(FieldId.COUPLING, 2),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=w24c * c2 ** 2 * p2,
            label="w24_linear_like",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 4,
                FieldId.WEAK_SIGNAL_24: 1,
            },
            pole_powers={"D": -1},
        ),
    )
    r25 = CoherenceResult(("2", "4"), t25)

    bracket_c = np.conj(b) * bracket
    t26 = (
        MultiphotonTerm(
            value=os_ ** 2 * w24c * c2 * p2 * a / d / bracket_c,
            signature=(
                *obs24_emi,
                (FieldId.SIGNAL, +1),
                (FieldId.SIGNAL, +1),
                (FieldId.WEAK_SIGNAL_24, -1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=os_ ** 2 * w24c * c2 * p2,
            label="paired_signal_absorption",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 2,
                FieldId.SIGNAL: 2,
                FieldId.WEAK_SIGNAL_24: 1,
            },
            pole_powers={"A": 1, "D": -1},
        ),
        MultiphotonTerm(
            value=os_ * oc * w23c * c2 * p2 * b / d / bracket_c,
            signature=(
                *obs24_emi,
                (FieldId.SIGNAL, +1),
                (FieldId.COUPLING, +1),
                (FieldId.WEAK_SIGNAL_23, -1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=os_ * oc * w23c * c2 * p2,
            label="w23_exchange",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 3,
                FieldId.SIGNAL: 1,
                FieldId.WEAK_SIGNAL_23: 1,
            },
            pole_powers={"B": 1, "D": -1},
        ),
        MultiphotonTerm(
            value=-os_ * s2 * occ * w23 * p2 * a / d / bracket_c,
            signature=(
                *obs24_emi,
                (FieldId.SIGNAL, +1),
                (FieldId.COUPLING, -1),
                (FieldId.WEAK_SIGNAL_23, +1),
                *_pm(FieldId.SIGNAL, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=os_ * s2 * occ * w23 * p2,
            label="w23_counter",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 1,
                FieldId.SIGNAL: 3,
                FieldId.WEAK_SIGNAL_23: 1,
            },
            pole_powers={"A": 1, "D": -1},
        ),
        MultiphotonTerm(
            value=s2 * c2 * w24 * p2 * a / d / bracket_c,
            signature=(
                *obs24_emi,
                (FieldId.WEAK_SIGNAL_24, +1),
                *_pm(FieldId.SIGNAL, 1),
                *_pm(FieldId.COUPLING, 1),
                *_pm(FieldId.PROBE, 1),
            ),
            monomial=s2 * c2 * w24 * p2,
            label="w24_exchange",
            degrees={
                FieldId.PROBE: 2,
                FieldId.COUPLING: 2,
                FieldId.SIGNAL: 2,
                FieldId.WEAK_SIGNAL_24: 1,
            },
            pole_powers={"A": 1, "D": -1},
        ),
    )
    r26 = CoherenceResult(("4", "2"), t26)
    return r25, r26


# --------------------------------------------------------------------------
# Photon flux
# --------------------------------------------------------------------------

def photon_flux(
    coherence,
    field,
    physical: Optional[PhysicalConstants] = None,
    *,
    pair: Optional[tuple[str, str]] = None,
) -> float:
    """Photon absorption rate of one field attributed to a coherence term.

    n = (N/2) * Im[Omega_f * v] where v is the coherence oriented as
    (lower, upper) of the driven transition; positive n means photons leave
    the beam. Accepts a CoherenceResult (its total and pair) or a single
    MultiphotonTerm together with an explicit ``pair``.
    """
    if isinstance(coherence, CoherenceResult):
        value = coherence.total
        pair = coherence.pair
    elif isinstance(coherence, MultiphotonTerm):
        if pair is None:
            raise ValueError("a bare term needs an explicit pair orientation")
        value = coherence.value
    else:
        value = complex(coherence)
        if pair is None:
            raise ValueError("a bare value needs an explicit pair orientation")

    lo, hi = field.transition
    if pair == (lo, hi):
        oriented = value
    elif pair == (hi, lo):
        oriented = np.conj(value)
    else:
        raise ValueError(
            f"coherence pair {pair} does not match the {field.field_id.value} "
            f"transition {field.transition}"
        )
    n_density = physical.atom_density if physical is not None else 1.0
    return float(0.5 * n_density * np.imag(field.rabi * oriented))


def flux_closed_form_s1(params: SystemParams) -> float:
    """Magnitude of the shared photon flux of the coupling and signal beams,

    |N * |Oc|^2 * |Op|^2 * |Os|^2 * (Gamma4/2) / (4*B*B**D*D*)|.
    """
    op, oc, os_ = _s1_drives(params)
    b = _guard("B", params.half_width_b)
    d = _guard("D", d_factor(params))
    g4 = params.scheme.total_decay("4")
    n = params.physical.atom_density
    return float(
        abs(
            n
            * abs(oc) ** 2
            * abs(op) ** 2
            * abs(os_) ** 2
            * (g4 / 2.0)
            / (4.0 * abs(b) ** 2 * abs(d) ** 2)
        )
    )
