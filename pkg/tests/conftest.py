import numpy as np
import pytest

import xpmsim as x


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_complex(rng, scale=5.0):
    return scale * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


def random_s1_params(rng, *, case=x.Case.EIT, scheme=None, probe_scale=0.5):
    """Nonsingular random System1 parameters (pole guard enforced by retry)."""
    scheme = scheme or x.make_scheme("system1")
    for _ in range(100):
        dp = float(rng.uniform(-5, 5))
        dc = dp if case is x.Case.CPT else float(rng.uniform(-5, 5))
        ds = float(rng.uniform(-5, 5))
        fields = (
            x.FieldDrive(x.FieldId.PROBE, random_complex(rng, probe_scale), dp, ("1", "3")),
            x.FieldDrive(x.FieldId.COUPLING, random_complex(rng), dc, ("2", "3")),
            x.FieldDrive(x.FieldId.SIGNAL, random_complex(rng), ds, ("2", "4")),
        )
        p = x.SystemParams(scheme, fields, case)
        try:
            x.d_factor(p)
        except x.PoleError:
            continue
        if abs(p.field(x.FieldId.COUPLING).rabi) < 0.1:
            continue
        return p
    raise RuntimeError("could not draw nonsingular parameters")


def random_s2_params(rng, *, zero_loop_phase=False):
    """Random System2 drives. The three beams close a frequency loop, so the
    |2>-|3> detuning is fixed by the other two. With ``zero_loop_phase`` the
    gauge-invariant phase arg(conj(O12) * conj(O23) * O13) is set to zero;
    the energy split among the loop's fields depends on that phase, so the
    flux-equality statements hold in the phase-free configuration."""
    scheme = x.make_scheme("system2")
    for _ in range(100):
        d_ab = float(rng.uniform(-5, 5))
        d_d = float(rng.uniform(-5, 5))
        oc = random_complex(rng)
        od = random_complex(rng)
        if zero_loop_phase:
            w = np.conj(oc) * od
            oab = float(rng.uniform(0.2, 5.0)) * w / abs(w)
        else:
            oab = random_complex(rng)
        fields = (
            x.FieldDrive(x.FieldId.FIELD_A, oab, d_ab, ("1", "2")),
            x.FieldDrive(x.FieldId.FIELD_C, oc, d_d - d_ab, ("2", "3")),
            x.FieldDrive(x.FieldId.FIELD_D, od, d_d, ("1", "3")),
        )
        p = x.SystemParams(scheme, fields)
        w21w31 = p.complex_detunings()
        q = 4 * w21w31["w31"] * w21w31["w21"] - abs(oc) ** 2
        if abs(q) > 1e-6 and min(abs(oab), abs(oc), abs(od)) > 0.05:
            return p
    raise RuntimeError("could not draw nonsingular parameters")


def random_s3_params(rng, weak_scale=0.02):
    scheme = x.make_scheme("system3")
    for _ in range(100):
        d = float(rng.uniform(-5, 5))
        fields = (
            x.FieldDrive(x.FieldId.PROBE, random_complex(rng), d, ("1", "3")),
            x.FieldDrive(x.FieldId.COUPLING, random_complex(rng), d, ("2", "3")),
            x.FieldDrive(x.FieldId.SIGNAL, random_complex(rng), float(rng.uniform(-5, 5)), ("2", "4")),
            x.FieldDrive(x.FieldId.WEAK_SIGNAL_23, random_complex(rng, weak_scale), d, ("2", "3")),
            x.FieldDrive(x.FieldId.WEAK_SIGNAL_24, random_complex(rng, weak_scale), float(rng.uniform(-5, 5)), ("2", "4")),
        )
        p = x.SystemParams(scheme, fields)
        if abs(p.field(x.FieldId.COUPLING).rabi) < 0.1:
            continue
        try:
            x.d_factor(p)
        except x.PoleError:
            continue
        return p
    raise RuntimeError("could not draw nonsingular parameters")


@pytest.fixture
def reference_params():
    """The canonical Case I working point:
    probe 0.1 MHz, coupling 3.55 MHz, signal 5 MHz."""
    return x.make_params(
        "system1",
        probe=(0.1, 0.0),
        coupling=(3.55, 1.0),
        signal=(5.0, 1.0 - 121.0),
    )


@pytest.fixture
def cpt_params():
    return x.make_params(
        "system1",
        case="cpt",
        probe=(0.1, 121.0),
        coupling=(0.1, 121.0),
        signal=(0.1, 0.0),
    )
