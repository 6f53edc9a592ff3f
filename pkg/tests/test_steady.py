import numpy as np
import pytest

import xpmsim as x
from xpmsim.steady import default_initial_state, spectral_gap
from conftest import random_s1_params, random_s2_params


class TestSolveAmplitudes:
    def test_identity(self):
        b = x.solve_amplitudes(np.eye(3, dtype=complex), np.array([1, 0, 0], dtype=complex))
        assert b == pytest.approx(np.array([1, 0, 0]))

    def test_two_level_closed_form(self):
        p = x.make_params(
            "system1", probe=(0.1, 0.5), coupling=(0.0, 0.0), signal=(0.0, 0.0)
        )
        b2, b3, b4 = x.solve_amplitudes(x.rwa_matrix(p))
        assert b3 == pytest.approx(np.conj(0.1) / (2 * p.half_width_a))
        assert abs(b2) == 0 and abs(b4) == 0

    def test_residual_bound_random(self, rng):
        for _ in range(50):
            m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            m += 6 * np.eye(6)  # keep it well conditioned
            rhs = rng.normal(size=6) + 1j * rng.normal(size=6)
            b = x.solve_amplitudes(m, rhs)
            assert np.linalg.norm(m @ b - rhs) <= 1e-12 * np.linalg.norm(rhs)

    def test_singular_rejected(self):
        m = np.zeros((2, 2), dtype=complex)
        with pytest.raises(x.SingularMatrixError):
            x.solve_amplitudes(m, np.array([1.0, 0.0], dtype=complex))


class TestLiouvillian:
    def test_trace_preservation_row(self, reference_params):
        L = x.liouvillian_for(reference_params)
        n = L.dim
        identity_row = np.eye(n, dtype=complex).reshape(-1)
        assert np.max(np.abs(identity_row @ L.matrix)) < 1e-12

    def test_no_fields_ground_state_is_steady(self):
        scheme = x.make_scheme("system1")
        L = x.build_liouvillian(scheme, fields=())
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        assert np.max(np.abs(L.matrix @ rho.reshape(-1))) < 1e-14

    def test_hamiltonian_matches_amplitude_equations(self, reference_params):
        """Multiplying the Schrodinger rows by -2 and adding the decay half
        widths must reproduce the steady-state coefficient matrix."""
        p = reference_params
        h = x.build_hamiltonian(p.scheme, p.fields)
        m = x.rwa_matrix(p).matrix
        idx = {"1": 0, "2": 1, "3": 2, "4": 3}
        rows = ("2", "3", "4")
        g = {"2": 0.0, "3": p.scheme.total_decay("3"), "4": p.scheme.total_decay("4")}
        for i, ri in enumerate(rows):
            for j, cj in enumerate(rows):
                expected = -2.0 * h[idx[ri], idx[cj]]
                if ri == cj:
                    expected += 1j * g[ri]
                assert m[i, j] == pytest.approx(expected)

    def test_frame_conflict_detected(self):
        scheme = x.make_scheme("system3")
        fields = (
            x.FieldDrive(x.FieldId.PROBE, 0.1, 0.0, ("1", "3")),
            x.FieldDrive(x.FieldId.COUPLING, 1.0, 0.0, ("2", "3")),
            x.FieldDrive(x.FieldId.SIGNAL, 1.0, 0.0, ("2", "4")),
            # a second beam on |2>-|3> at a different frequency has no
            # time-independent rotating frame
            x.FieldDrive(x.FieldId.WEAK_SIGNAL_23, 0.01, 5.0, ("2", "3")),
        )
        with pytest.raises(ValueError):
            x.build_hamiltonian(scheme, fields)


class TestSteadyState:
    def test_no_fields_falls_back_to_initial(self):
        scheme = x.make_scheme("system1")
        L = x.build_liouvillian(scheme, fields=())
        with pytest.warns(UserWarning, match="degenerate"):
            st = x.steady_state(L)
        assert st.method == "evolution"
        assert st.nullspace_dim > 1
        assert st.population("1") == pytest.approx(1.0)

    def test_reference_point_shows_raman_dip(self):
        """Probe transparency at two-photon resonance: |rho_31| dips when the
        coupling crosses the Raman condition."""
        def probe_coh(dc):
            p = x.make_params(
                "system1", probe=(0.1, 0.0), coupling=(3.55, dc), signal=(5.0, dc - 121.0)
            )
            st = x.steady_state(x.liouvillian_for(p))
            return abs(st.coherence(("1", "3")))

        on = probe_coh(0.0)
        off = probe_coh(2.5)
        assert on < 0.2 * off

    def test_invariants_on_random_configurations(self, rng):
        for _ in range(20):
            p = random_s1_params(rng)
            st = x.steady_state(x.liouvillian_for(p))
            rho = st.rho
            assert abs(np.trace(rho) - 1) < 1e-10
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-10
            assert np.min(np.linalg.eigvalsh(rho)) > -1e-8

    def test_weak_probe_reproduces_amplitude_coherence(self):
        # |probe| = 0.01 * min(Gamma): the pure-state linear response holds to 1%
        p = x.make_params(
            "system1", probe=(0.06, 0.0), coupling=(3.55, 1.0), signal=(5.0, 1.0 - 121.0)
        )
        st = x.steady_state(x.liouvillian_for(p))
        assert st.coherence(("1", "3")) == pytest.approx(
            x.probe_coherence_s1(p).total, rel=1e-2
        )

    def test_weak_probe_linearity(self):
        def coh(op):
            p = x.make_params(
                "system1", probe=(op, 0.0), coupling=(3.55, 1.0), signal=(5.0, -120.0)
            )
            return x.steady_state(x.liouvillian_for(p)).coherence(("1", "3"))

        c1 = coh(0.03)
        c2 = coh(0.06)
        assert c2 / c1 == pytest.approx(2.0, rel=1e-2)


class TestEvolve:
    def test_zero_generator_is_identity_map(self):
        scheme = x.make_scheme("system1", gamma3=0.0, gamma4=0.0)
        L = x.build_liouvillian(scheme, fields=())
        L = x.Liouvillian(np.zeros_like(L.matrix), L.basis, L.hamiltonian)
        rho0 = np.diag([0.25, 0.25, 0.25, 0.25]).astype(complex)
        st = x.evolve(L, rho0, t_final=3.0)
        assert np.max(np.abs(st.rho - rho0)) < 1e-12

    def test_cross_method_agreement(self, rng):
        checked = 0
        while checked < 5:
            p = random_s1_params(rng)
            L = x.liouvillian_for(p)
            if spectral_gap(L) < 0.05:
                continue
            ns = x.steady_state(L)
            ev = x.evolve(L, default_initial_state(L))
            assert np.max(np.abs(ns.rho - ev.rho)) < 1e-8
            checked += 1

    def test_trace_preserved_along_trajectory(self, reference_params):
        L = x.liouvillian_for(reference_params)
        rho0 = default_initial_state(L)
        for t in (0.5, 2.0, 8.0):
            st = x.evolve(L, rho0, t_final=t)
            assert abs(np.trace(st.rho) - 1.0) < 1e-10

    def test_nonconvergence_reported(self):
        # pure coherent drive, no decay: no steady state to converge to
        scheme = x.make_scheme("system1", gamma3=0.0, gamma4=0.0)
        p = x.SystemParams(
            scheme,
            (
                x.FieldDrive(x.FieldId.PROBE, 1.0, 0.0, ("1", "3")),
                x.FieldDrive(x.FieldId.COUPLING, 0.0, 0.0, ("2", "3")),
                x.FieldDrive(x.FieldId.SIGNAL, 0.0, 0.0, ("2", "4")),
            ),
        )
        L = x.liouvillian_for(p)
        with pytest.raises(x.NonConvergenceError):
            x.evolve(L, default_initial_state(L), max_horizon=50.0)


class TestSchroedingerConsistency:
    def test_lossless_short_horizon_matches_amplitude_dynamics(self):
        """With decay off and a pure start, the master equation is driven by
        the same H as the amplitude equations."""
        scheme = x.make_scheme("system1", gamma3=0.0, gamma4=0.0)
        p = x.SystemParams(
            scheme,
            (
                x.FieldDrive(x.FieldId.PROBE, 0.4, 0.3, ("1", "3")),
                x.FieldDrive(x.FieldId.COUPLING, 1.3, -0.2, ("2", "3")),
                x.FieldDrive(x.FieldId.SIGNAL, 0.9, 0.5, ("2", "4")),
            ),
        )
        h = x.build_hamiltonian(p.scheme, p.fields)
        L = x.liouvillian_for(p)
        b0 = np.array([1.0, 0, 0, 0], dtype=complex)
        t = 0.35
        # amplitude propagation via the eigendecomposition of H
        w, v = np.linalg.eigh(h)
        b_t = v @ (np.exp(-1j * w * t) * (v.conj().T @ b0))
        st = x.evolve(L, np.outer(b0, b0.conj()), t_final=t, rtol=1e-12, atol=1e-14)
        assert np.max(np.abs(st.rho - np.outer(b_t, b_t.conj()))) < 1e-9


class TestSystem2Lindblad:
    def test_invariants(self, rng):
        for _ in range(5):
            p = random_s2_params(rng)
            st = x.steady_state(x.liouvillian_for(p))
            assert abs(np.trace(st.rho) - 1) < 1e-10
            assert np.min(np.linalg.eigvalsh(st.rho)) > -1e-8
