"""Three beams, one third-order process, three equal |Im chi| values.

In the effective three-level scheme every field sees the same third-order
process: one photon exchanged with each beam. The first term of each
coherence, normalized to unit drive amplitudes, carries the same |Im| part;
the |2>-|3> product must pair with the un-conjugated dipole for the identity
to hold. The second terms are the linear responses and differ field by field:
an asymmetric total is a symmetric part plus a remainder.
"""


import xpmsim as x

params = x.make_params(
    "system2",
    field_a=(1.2, 0.5),    # composite two-photon drive on |1>-|2>
    field_c=(2.0, -1.5),   # |2>-|3>; detuning fixed by the frequency loop
    field_d=(0.8, -1.0),   # |1>-|3>
)

c13, c12, c23 = x.coherences_s2(params)
shared = x.chi3_s2(params)
print(f"shared chi3 = {shared:.6e},  |Im| = {abs(shared.imag):.6e}")
print()
print(f"{'coherence':<10}{'first-term chi':>28}{'|Im chi|':>14}")
for name, res in (("b1*.b3", c13), ("b1*.b2", c12), ("b2*.b3", c23)):
    chi = res.term("chi3_process").susceptibility()
    print(f"{name:<10}{chi:>28.6e}{abs(chi.imag):>14.6e}")

print()
print("linear (field-specific) parts:")
for name, res in (("b1*.b3", c13), ("b1*.b2", c12), ("b2*.b3", c23)):
    print(f"  {name}: {res.term('linear').value:.6e}")

print()
print("conjugating a coherence reverses every photon in the process:")
fwd = c13.term("chi3_process").signature
rev = c13.conjugate().term("chi3_process").signature
print("  forward:", [(f.value, s) for f, s in fwd])
print("  reverse:", [(f.value, s) for f, s in rev])
