"""Executable symmetry checks and multiphoton-process classification.

A single multiphoton "species" is a multiset of (field, sign) photons. When
one species is visible in several fields, the unit-amplitude
susceptibilities seen by those fields have equal |Im| parts, and the photon
flux drawn from (or emitted into) each field is equal in magnitude. Those
two equalities are necessary conditions for the process to be of Type1
(one process, simultaneously visible in several beams); they are checked
here, never asserted as sufficient.

Type2 and Type3 both describe processes visible in one field only. The
structural cue separating them: Type3 comes with a simultaneous reverse
process (the conjugate species present at the same polarization), Type2
does not. That cue is conjecture-level and the classifier says so in its
rationale.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .analytic import (
    CoherenceResult,
    MultiphotonTerm,
    coherences_s2,
    coupling_coherence_s1,
    photon_flux,
    signal_coherence_s1,
)
from .errors import SignatureMismatch
from .model import Case, FieldId, SystemId, SystemParams

ANALYTIC_TOL = 1e-9      # default for closed-form inputs
SIMULATION_TOL = 1e-3    # default for simulation-derived inputs


class Verdict(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class ProcessLabel(str, enum.Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"
    MIXED = "mixed"


def _species(term: MultiphotonTerm) -> Counter:
    """Photon multiset of a term, observed slot included."""
    return Counter(term.signature)


def _same_species(a: Counter, b: Counter) -> bool:
    """A process and its reverse (all signs flipped) are one species; the
    conjugate value carries the opposite Im sign, which is why magnitudes
    are compared in absolute value."""
    if a == b:
        return True
    reversed_b = Counter({(fid, -s): n for (fid, s), n in b.items()})
    return a == reversed_b


@dataclass(frozen=True)
class SymmetryReport:
    field_pairs: tuple[tuple[FieldId, FieldId], ...]
    im_magnitudes: dict[FieldId, float]
    flux: dict[FieldId, float]
    equal_within: float
    verdicts: dict[tuple[FieldId, FieldId], Verdict]

    @property
    def all_symmetric(self) -> bool:
        return all(v is Verdict.SYMMETRIC for v in self.verdicts.values())

    def to_json(self) -> str:
        payload = {
            "pairs": [[a.value, b.value] for a, b in self.field_pairs],
            "im_magnitudes": {k.value: v for k, v in self.im_magnitudes.items()},
            "flux": {k.value: v for k, v in self.flux.items()},
            "equal_within": self.equal_within,
            "verdicts": {
                f"{a.value}/{b.value}": v.value for (a, b), v in self.verdicts.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def check_field_symmetry(
    params: SystemParams,
    terms: Mapping[FieldId, MultiphotonTerm],
    tol: float = ANALYTIC_TOL,
) -> SymmetryReport:
    """Compare one process species across the fields it is visible in.

    All supplied terms must share a photon multiset (the observed slot only
    moves between fields). The comparison runs on unit-amplitude
    susceptibilities, |Im chi|, and on photon-flux magnitudes.
    """
    fids = list(terms)
    if len(fids) < 2:
        raise SignatureMismatch("need at least two fields to compare")
    ref = _species(terms[fids[0]])
    for fid in fids[1:]:
        if not _same_species(_species(terms[fid]), ref):
            raise SignatureMismatch(
                f"{fid.value} term has photon multiset {sorted(_species(terms[fid]))},"
                f" expected {sorted(ref)} (or its reverse)"
            )

    ims: dict[FieldId, float] = {}
    flux: dict[FieldId, float] = {}
    for fid, term in terms.items():
        ims[fid] = abs(float(np.imag(term.susceptibility())))
        drive = params.field(fid)
        flux[fid] = photon_flux(term, drive, params.physical, pair=drive.transition)

    pairs = tuple((fids[i], fids[j]) for i in range(len(fids)) for j in range(i + 1, len(fids)))
    verdicts: dict[tuple[FieldId, FieldId], Verdict] = {}
    for a, b in pairs:
        im_ok = abs(ims[a] - ims[b]) <= tol * max(ims[a], ims[b], 1e-300)
        fl_ok = abs(abs(flux[a]) - abs(flux[b])) <= tol * max(abs(flux[a]), abs(flux[b]), 1e-300)
        verdicts[(a, b)] = Verdict.SYMMETRIC if (im_ok and fl_ok) else Verdict.ASYMMETRIC
    return SymmetryReport(pairs, ims, flux, tol, verdicts)


def shared_species_terms_s1(params: SystemParams) -> dict[FieldId, MultiphotonTerm]:
    """The one-photon-per-field fifth-order terms of the coupling and signal."""
    return {
        FieldId.COUPLING: coupling_coherence_s1(params).term("chi5_symmetric"),
        FieldId.SIGNAL: signal_coherence_s1(params).term("chi5_symmetric"),
    }


def flux_balance(
    params: SystemParams,
    field_ids: Optional[Sequence[FieldId]] = None,
) -> dict[FieldId, float]:
    """Signed photon flux per field for the shared multiphoton species.

    For System1 Case I these are the coupling/signal fifth-order terms; the
    magnitudes agree with the closed-form flux expression. For System2 the
    three third-order first terms are used.
    """
    sid = params.scheme.system_id
    if sid is SystemId.SYSTEM1:
        if params.case is not Case.EIT:
            raise SignatureMismatch("flux balance applies to the Case I configuration")
        terms = shared_species_terms_s1(params)
    elif sid is SystemId.SYSTEM2:
        c13, c12, c23 = coherences_s2(params)
        terms = {
            FieldId.FIELD_D: c13.term("chi3_process"),
            FieldId.FIELD_A: c12.term("chi3_process"),
            FieldId.FIELD_C: c23.term("chi3_process"),
        }
    else:
        raise SignatureMismatch("flux balance is defined for System1/System2")
    if field_ids is not None:
        terms = {fid: terms[fid] for fid in field_ids}
    pair_for = {
        FieldId.COUPLING: ("2", "3"),
        FieldId.SIGNAL: ("2", "4"),
        FieldId.FIELD_D: ("1", "3"),
        FieldId.FIELD_A: ("1", "2"),
        FieldId.FIELD_C: ("2", "3"),
    }
    return {
        fid: photon_flux(term, params.field(fid), params.physical, pair=pair_for[fid])
        for fid, term in terms.items()
    }


def flux_equal(params: SystemParams, tol: float = 1e-12) -> bool:
    flux = flux_balance(params)
    mags = [abs(v) for v in flux.values()]
    return max(mags) - min(mags) <= tol * max(max(mags), 1e-300)


@dataclass(frozen=True)
class ClassifyContext:
    """What the classifier is allowed to know beyond the report."""

    system_id: SystemId
    reverse_process_present: bool = False


@dataclass(frozen=True)
class ProcessHypothesis:
    label: ProcessLabel
    symmetric_part: dict[FieldId, complex] = field(default_factory=dict)
    asymmetric_part: dict[FieldId, complex] = field(default_factory=dict)
    rationale: str = ""

    def to_json(self) -> str:
        def enc(z: complex) -> list[float]:
            return [float(np.real(z)), float(np.imag(z))]

        return json.dumps(
            {
                "label": self.label.value,
                "symmetric_part": {k.value: enc(v) for k, v in self.symmetric_part.items()},
                "asymmetric_part": {k.value: enc(v) for k, v in self.asymmetric_part.items()},
                "rationale": self.rationale,
            },
            indent=2,
            sort_keys=True,
        )


def classify_process(
    report: SymmetryReport,
    context: ClassifyContext,
    values: Optional[Mapping[FieldId, complex]] = None,
) -> ProcessHypothesis:
    """Hypothesis about the process type behind a symmetry report.

    Full symmetry yields a Type1 candidate; the symmetry is a necessary
    condition only, so the rationale records that sufficiency stays open.
    Asymmetric reports are Type3 when a simultaneous reverse process is
    present and Type2 otherwise. When per-field complex values are given
    and share a common component, the result is Mixed and each value is
    split exactly into that common (symmetric) part plus a remainder.
    """
    if report.all_symmetric:
        vals = dict(values) if values else {}
        return ProcessHypothesis(
            ProcessLabel.TYPE1,
            symmetric_part=vals,
            asymmetric_part={k: 0.0 + 0j for k in vals},
            rationale=(
                "equal |Im chi| and equal photon flux across fields: the "
                "necessary condition for a single process visible in several "
                "beams holds (Type1 candidate; sufficiency is an open question)"
            ),
        )

    if values:
        # common component: a value whose |Im| recurs in at least two fields
        ims = {k: report.im_magnitudes.get(k, abs(np.imag(v))) for k, v in values.items()}
        tol = report.equal_within
        common = None
        keys = list(values)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                if abs(ims[a] - ims[b]) <= tol * max(ims[a], ims[b], 1e-300):
                    common = values[a]
                    break
            if common is not None:
                break
        if common is not None:
            sym = {k: common for k in values}
            asym = {k: v - common for k, v in values.items()}
            if any(
                abs(r) > tol * max(abs(v), 1e-300)
                for r, v in zip(asym.values(), values.values())
            ):
                return ProcessHypothesis(
                    ProcessLabel.MIXED,
                    symmetric_part=sym,
                    asymmetric_part=asym,
                    rationale=(
                        "a symmetric component is shared across fields with "
                        "field-specific remainders on top; the asymmetric case "
                        "decomposes as symmetric part plus remainder"
                    ),
                )

    if context.reverse_process_present:
        return ProcessHypothesis(
            ProcessLabel.TYPE3,
            rationale=(
                "asymmetric susceptibilities with a simultaneous reverse "
                "process at the same polarization: the reverse process renders "
                "the forward one invisible in the other beams (Type3; the "
                "structural cue is conjecture-level)"
            ),
        )
    return ProcessHypothesis(
        ProcessLabel.TYPE2,
        rationale=(
            "asymmetric susceptibilities without a reverse-process partner: "
            "photons absorbed from the other beams are replaced exactly by "
            "stimulated emission, hiding the process there (Type2; "
            "conjecture-level)"
        ),
    )


def reverse_process_present(
    forward: CoherenceResult, backward: CoherenceResult
) -> bool:
    """True when some species of ``forward`` recurs conjugated in ``backward``.

    The backward product contributes to the same polarization through its
    conjugate, so a match between a forward species and a conjugated
    backward species means the process and its reverse coexist.
    """
    backward_species = [_species(t.conjugate()) for t in backward.terms]
    return any(_species(t) in backward_species for t in forward.terms)


def squeezing_capability(
    signature_or_term, observed_field: Optional[FieldId] = None
) -> bool:
    """Whether a term's Im part can squeeze the observed field.

    The criterion is the own-photon exponent x of the observed field in the
    polarization monomial (photon count in the signature minus the observed
    slots): intensity-dependent self-scaling needs x >= 2.
    """
    if isinstance(signature_or_term, MultiphotonTerm):
        term = signature_or_term
        if observed_field is None:
            if not term.signature:
                return False
            observed_field = term.signature[0][0]
        sig = term.signature
        n_obs = sum(
            1 for fid, _ in sig[: term.n_observed] if fid is observed_field
        )
    else:
        sig = tuple(signature_or_term)
        if not sig:
            return False
        if observed_field is None:
            observed_field = sig[0][0]
        n_obs = 1
    own = sum(1 for fid, _ in sig if fid is observed_field)
    return (own - n_obs) >= 2
