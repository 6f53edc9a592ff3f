"""Two weak beams on a driven four-level scheme: ninth-order response.

The weak-field perturbations of the steady state carry terms up to ninth
order, including one whose monomial is conj(w24) |Oc|^4 |Op|^4: nine photons
feed the resonance observed in the weak |2>-|4> beam. Terms with two
same-conjugation signal photons always ride with a weak-field counterpart,
and each forward species has its reverse present at the same polarization,
which is what confines the visibility to the weak beam.
"""


import xpmsim as x

params = x.make_params(
    "system3",
    probe=(2.0, 0.0),
    coupling=(2.0, 0.0),
    signal=(2.0, 1.0),
    weak23=(0.05, 0.0),
    weak24=(0.05, 1.0),
)

fwd, bwd = x.perturbed_coherences_s3(params)

print("forward product b2*.db4:")
for t in fwd.terms:
    degs = {k.value: v for k, v in t.degrees.items()}
    print(f"  {t.label:<24} order {t.order}  value {t.value:+.3e}  degrees {degs}")
print(f"  total: {fwd.total:+.6e}")
print()
print("backward product b4*.db2:")
for t in bwd.terms:
    print(f"  {t.label:<24} order {t.order}  value {t.value:+.3e}")
print()

chi9 = fwd.term("chi9_resonance")
print(f"ninth-order term: order {chi9.order}, "
      f"{len(chi9.signature)} photons in its signature")
print()

print("reverse-process check:", x.reverse_process_present(fwd, bwd))
print("so the process classifies as visible in the weak beam only; with the")
print("weak beams off, both products vanish:")
off = params.with_fields(
    weak23=x.FieldDrive(x.FieldId.WEAK_SIGNAL_23, 0.0, 0.0, ("2", "3")),
    weak24=x.FieldDrive(x.FieldId.WEAK_SIGNAL_24, 0.0, 1.0, ("2", "4")),
)
fwd0, bwd0 = x.perturbed_coherences_s3(off)
print(f"  {fwd0.total}, {bwd0.total}")
