"""The central symmetry: one multiphoton process, two beams, equal response.

The fifth-order terms of the coupling and signal beams share a photon
signature (absorb and emit one photon from each field). Their unit-amplitude
susceptibilities carry equal |Im| parts, and the photon fluxes drawn from the
two beams are equal in magnitude and opposite in sign: the chain absorbs from
one beam exactly what it returns to the other by stimulated emission, and the
decay from the top level carries the balance away.
"""


import xpmsim as x

params = x.make_params(
    "system1", probe=(0.1, 0.0), coupling=(3.55, 0.0), signal=(5.0, -121.0)
)

terms = x.shared_species_terms_s1(params)
print("photon signature (coupling term):")
print("  ", [(fid.value, s) for fid, s in terms[x.FieldId.COUPLING].signature])
print()

report = x.check_field_symmetry(params, terms, tol=1e-12)
print(report.to_json())
print()

flux = x.flux_balance(params)
n_c, n_s = flux[x.FieldId.COUPLING], flux[x.FieldId.SIGNAL]
print(f"photon flux, coupling beam: {n_c:+.6e}  (negative: the beam gains)")
print(f"photon flux, signal beam:   {n_s:+.6e}  (positive: the beam absorbs)")
print(f"closed-form magnitude:      {x.flux_closed_form_s1(params):.6e}")
print(f"shared |Im chi5|:           {x.chi5_symmetric_magnitude(params):.6e}")
print()

hyp = x.classify_process(report, x.ClassifyContext(x.SystemId.SYSTEM1))
print(f"classification: {hyp.label.value}")
print(f"rationale: {hyp.rationale}")
