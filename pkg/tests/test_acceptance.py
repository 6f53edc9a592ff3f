"""Acceptance suite.

Each test implements one acceptance criterion at its stated tolerance and
prints a PASS/FAIL line (run with ``pytest -s`` to see them all). Tolerances
are pinned here, not deferred:

1. closed forms vs linear solve, 100 random draws per system, rel 1e-9
2. |Im chi5| equality coupling/signal, 1000 draws, rel 1e-12
3. flux equality and two-route agreement, 1000 draws, rel 1e-12
4. three-level chi3 triple equality, 1000 draws, rel 1e-12
5. analytic vs mixed-state overlay, 401 points, rel L2 < 0.05
6. CPT signal absorption within 10x of the probe linear peak at 121 MHz
7. ninth-order term scaling: exact per-field exponents at 1e-12
8. mixed-state invariants + cross-method agreement on 50 random draws
"""

import time

import numpy as np
import pytest

import xpmsim as x
from xpmsim.steady import default_initial_state, spectral_gap
from conftest import (
    random_complex,
    random_s1_params,
    random_s2_params,
    random_s3_params,
)
from test_analytic import s3_tail_and_bracket, s3_oracle


def report(number: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(101)
    t0 = time.monotonic()
    worst = 0.0

    def track(closed, oracle):
        nonlocal worst
        worst = max(worst, abs(closed - oracle) / max(abs(oracle), 1e-300))

    for _ in range(100):
        p = random_s1_params(rng)
        b2, b3, b4 = x.solve_amplitudes(x.rwa_matrix(p))
        track(x.probe_coherence_s1(p).total, b3)
        track(x.coupling_coherence_s1(p).total, np.conj(b2) * b3)
        track(x.signal_coherence_s1(p).total, np.conj(b2) * b4)

        pc = random_s1_params(rng, case=x.Case.CPT)
        b2, b3, b4 = x.solve_amplitudes(x.rwa_matrix(pc))
        s = 1.0 / np.sqrt(1.0 + abs(b2) ** 2)
        track(
            x.signal_coherence_s1_cpt(pc, x.ORACLE_BRANCH).total,
            np.conj(b2 * s) * (b4 * s),
        )

        p2 = random_s2_params(rng)
        b2, b3 = x.solve_amplitudes(x.rwa_matrix(p2))
        c13, c12, c23 = x.coherences_s2(p2)
        track(c13.total, b3)
        track(c12.total, b2)
        track(c23.total, np.conj(b2) * b3)

        p3 = random_s3_params(rng)
        amps, db = s3_oracle(p3)
        r25, r26 = x.perturbed_coherences_s3(p3, amps)
        track(r25.total, np.conj(amps[1]) * db[2])
        track(r26.total, np.conj(amps[3]) * db[0])

    elapsed = time.monotonic() - t0
    ok = worst < 1e-9 and elapsed < 10.0
    report(1, ok, f"oracle equivalence, worst rel {worst:.2e}, {elapsed:.1f} s")


def test_criterion_2_chi5_symmetry():
    """The magnitude equality lives at the susceptibility level: each term is
    normalized by its drive-amplitude monomial before comparing, which is
    what makes the statement phase invariant for complex Rabi frequencies."""
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(1000):
        p = random_s1_params(rng)
        im_c = abs(np.imag(x.coupling_coherence_s1(p).term("chi5_symmetric").susceptibility()))
        im_s = abs(np.imag(x.signal_coherence_s1(p).term("chi5_symmetric").susceptibility()))
        worst = max(worst, abs(im_c - im_s) / max(im_c, im_s, 1e-300))
    ok = worst < 1e-12
    report(2, ok, f"|Im chi5| coupling vs signal, worst rel {worst:.2e}, 1000 draws")


def test_criterion_3_flux_balance():
    rng = np.random.default_rng(103)
    worst_pair = 0.0
    worst_route = 0.0
    for _ in range(1000):
        p = random_s1_params(rng)
        flux = x.flux_balance(p)
        n_c = abs(flux[x.FieldId.COUPLING])
        n_s = abs(flux[x.FieldId.SIGNAL])
        closed = x.flux_closed_form_s1(p)
        worst_pair = max(worst_pair, abs(n_c - n_s) / max(n_c, n_s, 1e-300))
        worst_route = max(worst_route, abs(n_s - closed) / max(closed, 1e-300))
    ok = worst_pair < 1e-12 and worst_route < 1e-12
    report(
        3, ok,
        f"flux equality {worst_pair:.2e}, polarization-vs-closed-form {worst_route:.2e}",
    )


def test_criterion_4_chi3_triple_equality():
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(1000):
        p = random_s2_params(rng)
        mag = abs(np.imag(x.chi3_s2(p)))
        c13, c12, c23 = x.coherences_s2(p)
        for res in (c13, c12, c23):
            chi = abs(np.imag(res.term("chi3_process").susceptibility()))
            worst = max(worst, abs(chi - mag) / max(chi, mag, 1e-300))
    ok = worst < 1e-12
    report(4, ok, f"chi3 triple equality, worst rel {worst:.2e}, 1000 draws")


def test_criterion_5_overlay_reproduction():
    """Analytic vs mixed-state traces at the reference working point (probe
    0.1, coupling 3.55, signal 5 MHz, Gamma 6 MHz).

    The decay model recycles |3> through |1> only: any |3> -> |2> branch
    shelves population and adds incoherent response the pure-state forms
    cannot contain. Deviations are measured against the complex trace norm
    per field, the yardstick of an overlay whose absorption and dispersion
    share one arbitrary-units axis; the absorptive part of the coupling beam
    is flux-balance-pinned in a closed steady state, so only the common-scale
    comparison is physically meaningful there.
    """
    t0 = time.monotonic()
    scheme = x.make_scheme("system1", branching_3_to_1=1.0)
    base = x.SystemParams(
        scheme,
        (
            x.FieldDrive(x.FieldId.PROBE, 0.1, 0.0, ("1", "3")),
            x.FieldDrive(x.FieldId.COUPLING, 3.55, 0.0, ("2", "3")),
            x.FieldDrive(x.FieldId.SIGNAL, 5.0, -121.0, ("2", "4")),
        ),
    )
    spec = x.SweepSpec(
        base=base, axis="coupling", start=-20.0, stop=20.0, points=401,
        fields=(x.FieldId.COUPLING, x.FieldId.SIGNAL),
        methods=("analytic", "lindblad"),
    )
    res = x.run_sweep(spec)
    # the known linear resonance (signal beam hits its bare transition) sits
    # at a coupling detuning of one splitting; the window is 4*Gamma wide
    policy = x.Policy("exclude-window", center=scheme.splitting_mhz, width=24.0)
    metrics = x.compare(
        x.select_method(res, "analytic"), x.select_method(res, "lindblad"), policy
    )
    elapsed = time.monotonic() - t0
    worst = metrics.worst_rel_l2_common()
    ok = worst < 0.05 and elapsed < 60.0
    detail = ", ".join(
        f"{f}/{c}={v:.4f}" for (f, c), v in sorted(metrics.rel_l2_common.items())
    )
    report(5, ok, f"overlay rel L2 (common scale) {detail}, {elapsed:.1f} s")


def test_criterion_6_cpt_squeezing_candidate():
    """Signal-beam absorption at the two-photon point, all Rabi 0.1 MHz and
    the coupling laser resonant with the upper excited transition, compared
    with the probe's linear absorption peak.

    The reference is the two-level closed form: in the closed steady state
    optical pumping depletes the probe's ground level and suppresses its raw
    peak, which would make the comparison meaningless.
    """
    scheme = x.make_scheme("system1")
    p = x.SystemParams(
        scheme,
        (
            x.FieldDrive(x.FieldId.PROBE, 0.1, 121.0, ("1", "3")),
            x.FieldDrive(x.FieldId.COUPLING, 0.1, 121.0, ("2", "3")),
            x.FieldDrive(x.FieldId.SIGNAL, 0.1, 0.0, ("2", "4")),
        ),
    )
    st = x.steady_state(x.liouvillian_for(p))
    sig = p.field(x.FieldId.SIGNAL)
    n_sig = x.photon_flux(st.coherence(("2", "4")), sig, p.physical, pair=("2", "4"))

    g3 = scheme.total_decay("3")
    probe_rabi = abs(p.field(x.FieldId.PROBE).rabi)
    # two-level probe response peaks on resonance at |Op|^2 / (2 Gamma3)
    n_probe_peak = 0.5 * probe_rabi**2 * (g3 / 2.0) / (2.0 * (g3 / 2.0) ** 2)
    ratio = abs(n_sig) / n_probe_peak
    ok = 0.1 <= ratio <= 10.0
    report(
        6, ok,
        f"CPT signal absorption / probe linear peak = {ratio:.2f} "
        f"(n_sig={n_sig:.3e}, peak={n_probe_peak:.3e})",
    )


def test_criterion_7_ninth_order_scaling():
    rng = np.random.default_rng(107)
    worst = 0.0
    vanish_ok = True
    for _ in range(10):
        p = random_s3_params(rng)
        base25, base26 = x.perturbed_coherences_s3(p)
        for fid in (
            x.FieldId.PROBE,
            x.FieldId.COUPLING,
            x.FieldId.SIGNAL,
            x.FieldId.WEAK_SIGNAL_23,
            x.FieldId.WEAK_SIGNAL_24,
        ):
            s = 2.0
            f0 = p.field(fid)
            ps = p.with_fields(
                **{fid.value: x.FieldDrive(fid, s * f0.rabi, f0.detuning, f0.transition)}
            )
            new25, new26 = x.perturbed_coherences_s3(ps)
            for base, new in ((base25, new25), (base26, new26)):
                for t0_, t1_ in zip(base.terms, new.terms):
                    deg = t0_.degrees.get(fid, 0)
                    tail0, br0 = s3_tail_and_bracket(p, t0_)
                    tail1, br1 = s3_tail_and_bracket(ps, t1_)
                    predicted = s**deg * (tail1 / tail0) * (br0 / br1)
                    if abs(t0_.value) == 0:
                        continue
                    actual = t1_.value / t0_.value
                    worst = max(worst, abs(actual - predicted) / abs(predicted))
        p0 = random_s3_params(rng, weak_scale=0.0)
        r25, r26 = x.perturbed_coherences_s3(p0)
        vanish_ok = vanish_ok and r25.total == 0 and r26.total == 0
    ok = worst < 1e-12 and vanish_ok
    report(
        7, ok,
        f"ninth-order per-field exponents, worst rel {worst:.2e}; "
        f"zero weak fields -> zero coherences: {vanish_ok}",
    )


def test_criterion_8_lindblad_invariants():
    rng = np.random.default_rng(108)
    t0 = time.monotonic()
    worst_trace = worst_herm = worst_cross = 0.0
    worst_eig = 0.0
    checked = 0
    while checked < 50:
        if checked % 2 == 0:
            p = random_s1_params(rng)
        else:
            p = random_s2_params(rng)
        L = x.liouvillian_for(p)
        if spectral_gap(L) < 0.3:
            continue  # keep the explicit integrator honest and fast
        ns = x.steady_state(L)
        worst_trace = max(worst_trace, abs(np.trace(ns.rho) - 1.0))
        worst_herm = max(worst_herm, float(np.max(np.abs(ns.rho - ns.rho.conj().T))))
        worst_eig = min(worst_eig, float(np.min(np.linalg.eigvalsh(ns.rho))))
        ev = x.evolve(L, default_initial_state(L))
        worst_cross = max(worst_cross, float(np.max(np.abs(ns.rho - ev.rho))))
        checked += 1
    elapsed = time.monotonic() - t0
    ok = (
        worst_trace < 1e-10
        and worst_herm < 1e-10
        and worst_eig > -1e-8
        and worst_cross < 1e-8
    )
    report(
        8, ok,
        f"trace {worst_trace:.1e}, herm {worst_herm:.1e}, eigmin {worst_eig:.1e}, "
        f"cross-method {worst_cross:.1e} over 50 draws, {elapsed:.1f} s",
    )
