"""Circuit model: line constants, film inductance, immittances, materials."""

import dataclasses

import numpy as np
import pytest

import pmhybrid as pm
from pmhybrid.circuit_model import (ISRR_FREQ, ISRR_LINEWIDTH, LINE_Z0,
                                    _shunt_admittance_masked)
from pmhybrid.constants import C_LIGHT, ETA0, TWO_PI
from pmhybrid.errors import SingularityError


def test_line_constants_give_unit_index_delay():
    """L0 = Z0*ls/c and C0 = ls/(Z0*c): the bare line propagates at c."""
    p = pm.default_params(ls=0.005)
    tau = 0.005 / C_LIGHT
    assert p.l0 == pytest.approx(LINE_Z0 * tau, rel=1e-15)
    assert p.c0 == pytest.approx(tau / LINE_Z0, rel=1e-15)
    assert np.sqrt(p.l0 * p.c0) == pytest.approx(tau, rel=1e-14)
    assert np.sqrt(p.l0 / p.c0) == pytest.approx(LINE_Z0, rel=1e-14)


def test_default_tank_resonance_and_quality():
    p = pm.default_params()
    f_tank = 1.0 / (TWO_PI * np.sqrt(p.l_isrr * p.c_isrr))
    assert f_tank == pytest.approx(ISRR_FREQ, rel=1e-12)
    q = p.r_isrr / (TWO_PI * ISRR_FREQ * p.l_isrr)
    assert TWO_PI * ISRR_FREQ / (2.0 * q) == pytest.approx(ISRR_LINEWIDTH,
                                                           rel=1e-12)


def test_calibrated_profile_frozen_values():
    p = pm.calibrated_params()
    assert p.l_isrr == pytest.approx(1.25 * p.l0, rel=1e-15)
    assert p.m0 == pytest.approx(0.085 * np.sqrt(3.5), rel=1e-15)
    assert p.kittel.alpha == 0.0125
    assert p.mc.imag > 0  # forward direction carries the +i component
    assert p.mc.imag / p.mc.real == pytest.approx(0.0088 / 0.0296, rel=1e-12)


def test_params_validation():
    p = pm.default_params()
    with pytest.raises(ValueError, match="l0"):
        dataclasses.replace(p, l0=0.0)
    with pytest.raises(ValueError, match="m0"):
        dataclasses.replace(p, m0=-0.1)
    with pytest.raises(ValueError, match="direction"):
        p.with_direction("sideways")
    assert p.with_direction("reverse").mc == p.mc.conjugate()
    assert p.with_direction("forward") is p


def test_l_yig_matches_formula_transcription():
    """Direct transcription oracle at a pinned off-resonant point."""
    p = pm.default_params()
    yig = pm.YigInductanceParams(kittel=p.kittel, l0=p.l0)
    w, h = TWO_PI * 3.3e9, 55e-3
    wh = p.kittel.gamma_mu0 * h
    wm = p.kittel.gamma_mu0 * p.kittel.mu0_Ms
    a = p.kittel.alpha
    expected = p.l0 * (wm * (wh + wm + 1j * w * a)
                       / (wh * (wh + wm) - w**2 + 1j * w * a * (2 * wh + wm)))
    got = pm.l_yig(w, h, yig)
    assert got == pytest.approx(expected, rel=1e-14)


def test_l_yig_static_limit():
    """omega -> 0 gives the real static value L0 * wm/wH."""
    p = pm.default_params()
    yig = pm.YigInductanceParams(kittel=p.kittel, l0=p.l0)
    wh = p.kittel.gamma_mu0 * 60e-3
    wm = p.kittel.gamma_mu0 * p.kittel.mu0_Ms
    got = pm.l_yig(0.0, 60e-3, yig)
    assert got == pytest.approx(p.l0 * wm / wh, rel=1e-14)
    assert got.imag == 0.0


def test_l_yig_high_frequency_decay():
    """Far above resonance the film inductance vanishes; in the lossless
    limit it decays like 1/omega^2."""
    kit = pm.KittelParams(alpha=0.0)
    p = pm.default_params()
    yig = pm.YigInductanceParams(kittel=kit, l0=p.l0)
    w = 1e14
    a = pm.l_yig(w, 60e-3, yig)
    b = pm.l_yig(2 * w, 60e-3, yig)
    assert abs(a) < 1e-6 * p.l0
    assert abs(b / a) == pytest.approx(0.25, rel=1e-4)


def test_l_yig_lossless_resonance_is_guarded():
    kit = pm.KittelParams(alpha=0.0)
    p = pm.default_params()
    yig = pm.YigInductanceParams(kittel=kit, l0=p.l0)
    h = 60e-3
    wh = kit.gamma_mu0 * h
    wm = kit.gamma_mu0 * kit.mu0_Ms
    wr = np.sqrt(wh * (wh + wm))
    # hit the pole exactly: den = wr^2 - w^2 with w*w == wh*(wh+wm)
    w = np.sqrt(wh * (wh + wm))
    if wh * (wh + wm) - w**2 == 0.0:
        with pytest.raises(SingularityError, match="rad/s"):
            pm.l_yig(w, h, yig)
    else:  # fp rounding missed the exact pole; force it with a crafted field
        pytest.skip("floating-point sqrt did not land on the exact pole")
    assert wr > 0


def test_l_yig_loss_sign_near_resonance():
    """Under e^{+i omega t}, a lossy inductance has Im < 0 near resonance."""
    p = pm.default_params()
    yig = pm.YigInductanceParams(kittel=p.kittel, l0=p.l0)
    h = 60e-3
    wr = pm.kittel_frequency(p.kittel, h)
    vals = pm.l_yig(np.linspace(0.98 * wr, 1.02 * wr, 41), h, yig)
    assert np.all(vals.imag < 0)


def test_series_impedance_decoupled_is_bare_inductor():
    p = dataclasses.replace(pm.default_params(), m0=0.0)
    w = TWO_PI * 3.1e9
    assert pm.series_impedance(w, 60e-3, p) == 1j * w * p.l0


def test_shunt_admittance_blocks_dc():
    p = pm.default_params()
    assert pm.shunt_admittance(0.0, 60e-3, p) == 0.0


def test_shunt_admittance_reports_vanished_subbranch():
    """A crafted real Mc cancels the tank series inductance exactly."""
    kit = pm.KittelParams(alpha=0.0)
    p = dataclasses.replace(pm.default_params(), kittel=kit)
    w, h = TWO_PI * 3.0e9, 70e-3
    yig = pm.YigInductanceParams(kittel=kit, l0=p.l0)
    ly = pm.l_yig(w, h, yig)
    assert ly.imag == 0.0
    p_bad = dataclasses.replace(p, mc=complex(-p.l_isrr / ly.real))
    with pytest.raises(SingularityError, match="tank series-inductance"):
        pm.shunt_admittance(w, h, p_bad)


def test_grid_masks_singular_point_instead_of_raising():
    kit = pm.KittelParams(alpha=0.0)
    p = dataclasses.replace(pm.default_params(), kittel=kit)
    w, h = TWO_PI * 3.0e9, 70e-3
    yig = pm.YigInductanceParams(kittel=kit, l0=p.l0)
    ly = pm.l_yig(w, h, yig)
    p_bad = dataclasses.replace(p, mc=complex(-p.l_isrr / ly.real))
    freqs = np.array([2.9e9, 3.0e9, 3.1e9])
    fields = np.array([0.06, 0.07])
    out = pm.material_grid(p_bad, fields, freqs)
    assert out["masked"][1, 1]
    assert int(out["masked"].sum()) == 1
    assert np.all(np.isfinite(out["n"][~out["masked"]]))


def test_decoupled_film_collapses_field_axis():
    """M0 = Mc = 0: the film never enters, so n is field-independent."""
    p = dataclasses.replace(pm.default_params(), m0=0.0, mc=0j)
    freqs = np.linspace(3.0e9, 3.8e9, 21)
    fields = np.linspace(40e-3, 80e-3, 5)
    out = pm.material_grid(p, fields, freqs)
    assert np.array_equal(out["n"], np.broadcast_to(out["n"][:1], out["n"].shape))


def test_decoupled_limit_recovers_bare_cell():
    """With the film decoupled and the tank shorted out of the shunt path,
    the cell is the bare lumped 50 ohm line: theta = 2*asin(omega*tau/2),
    n = theta/(omega*tau), z = (Z0/eta0)*cos(theta/2)."""
    p = dataclasses.replace(pm.default_params(), m0=0.0, mc=0j, c_isrr=1.0)
    w = TWO_PI * 3.2e9
    tau = p.ls / C_LIGHT
    theta = 2.0 * np.arcsin(w * tau / 2.0)
    point = pm.material_from_circuit(w, 60e-3, p)
    assert point.n == pytest.approx(theta / (w * tau), rel=1e-9)
    assert point.z == pytest.approx((LINE_Z0 / ETA0) * np.cos(theta / 2.0),
                                    rel=1e-9)
    assert point.n.real > 1.0  # the lumped cell is slightly slow
    assert point.eps_eff * point.mu_eff == pytest.approx(point.n**2, rel=1e-10)


def test_bracket_identity_on_grid(cal_params):
    """eps*mu = n^2 and mu/eps = z^2 (spec'd to 1e-10) on real grid points."""
    freqs = np.linspace(2.9e9, 4.1e9, 7)
    fields = np.linspace(45e-3, 75e-3, 5)
    out = pm.material_grid(cal_params, fields, freqs)
    n, z = out["n"], out["z"]
    eps, mu = out["eps"], out["mu"]
    assert np.nanmax(np.abs(eps * mu - n**2) / np.abs(n**2)) < 1e-10
    assert np.nanmax(np.abs(mu / eps - z**2) / np.abs(z**2)) < 1e-10


def test_partition_factor_invariance():
    """G reshuffles eps/mu but leaves n and the product invariant."""
    base = pm.default_params()
    w, h = TWO_PI * 3.35e9, 58e-3
    ref = pm.material_from_circuit(w, h, base)
    for g in (0.5, 2.0):
        p = dataclasses.replace(base, g=g)
        point = pm.material_from_circuit(w, h, p)
        assert point.n == pytest.approx(ref.n, rel=1e-12)
        assert point.eps_eff == pytest.approx(ref.eps_eff * g, rel=1e-12)
        assert point.mu_eff == pytest.approx(ref.mu_eff / g, rel=1e-12)
        assert point.z == pytest.approx(ref.z / g, rel=1e-12)


def test_real_coupling_is_reciprocal():
    """With Im(Mc) = 0 forward and reverse evaluations are identical."""
    p = dataclasses.replace(pm.default_params(), mc=0.0093 + 0j)
    freqs = np.linspace(3.0e9, 3.8e9, 41)
    fields = np.linspace(50e-3, 70e-3, 11)
    fwd = pm.material_grid(p, fields, freqs, "forward")
    rev = pm.material_grid(p, fields, freqs, "reverse")
    assert np.array_equal(fwd["n"], rev["n"])


def test_complex_coupling_breaks_reciprocity(cal_params):
    freqs = np.linspace(3.0e9, 3.8e9, 41)
    fields = np.linspace(50e-3, 70e-3, 11)
    fwd = pm.material_grid(cal_params, fields, freqs, "forward")
    rev = pm.material_grid(cal_params, fields, freqs, "reverse")
    assert np.nanmax(np.abs(fwd["n"] - rev["n"])) > 0.1


def test_bloch_phase_scalar_principal_branch():
    theta = 0.3 - 0.02j
    zy = (2j * np.sin(theta / 2.0)) ** 2
    got = pm.bloch_phase(zy, 1.0 + 0j, ls=0.005)
    assert got == pytest.approx(theta, rel=1e-12)


def test_bloch_phase_tracks_smooth_lossy_ramp_exactly():
    """Inverse-construction oracle: a smooth loss-signed phase ramp inside the
    principal zone is recovered exactly."""
    thetas = np.linspace(0.2, 2.9, 600) - 0.05j
    zy = (2j * np.sin(thetas / 2.0)) ** 2
    got = pm.bloch_phase(zy[None, :], np.ones((1, len(thetas)), dtype=complex),
                         ls=0.005)
    assert np.allclose(got[0], thetas, rtol=1e-9, atol=1e-9)


def test_bloch_phase_reflects_at_damping_sign_flip():
    """Inverse-construction oracle: when the loss sign flips mid-row the
    tracked phase reflects to -theta (the negative-index reading of the same
    dispersion) and the jump is flagged, not absorbed."""
    re = np.linspace(0.9, 1.2, 80)
    im = np.where(np.arange(80) < 40, -0.02, +0.02)
    thetas = re + 1j * im
    zy = (2j * np.sin(thetas / 2.0)) ** 2
    got, flags = pm.bloch_phase(zy[None, :],
                                np.ones((1, 80), dtype=complex), ls=0.005,
                                return_flags=True)
    assert np.allclose(got[0, :40], thetas[:40], rtol=1e-9, atol=1e-9)
    assert np.allclose(got[0, 40:], -thetas[40:], rtol=1e-9, atol=1e-9)
    assert flags[0, 40]
    assert not flags[0, :40].any()
    assert not flags[0, 41:].any()


def test_bloch_phase_flags_trust_region_jumps():
    thetas = np.concatenate([np.linspace(0.2, 0.5, 50),
                             np.linspace(2.8, 3.0, 50)]) - 0.01j
    zy = (2j * np.sin(thetas / 2.0)) ** 2
    _, flags = pm.bloch_phase(zy[None, :],
                              np.ones((1, 100), dtype=complex), ls=0.005,
                              return_flags=True)
    assert flags[0, 50]
    assert not flags[0, :50].any()


def test_single_point_grid_matches_scalar_path(cal_params):
    w, h = TWO_PI * 3.3e9, 55e-3
    point = pm.material_from_circuit(w, h, cal_params)
    out = pm.material_grid(cal_params, np.array([h]), np.array([w / TWO_PI]))
    assert out["n"][0, 0] == pytest.approx(point.n, rel=1e-12)
    assert out["z"][0, 0] == pytest.approx(point.z, rel=1e-12)


def test_synth_sparams_reciprocal_ports_within_direction(cal_params):
    freqs = np.linspace(3.0e9, 3.8e9, 101)
    spec = pm.synth_sparams(cal_params, 55e-3, freqs, "forward")
    assert np.array_equal(spec.s21, spec.s12)
    assert np.array_equal(spec.s11, spec.s22)


def test_synth_sparams_bare_cell_continuum_limit():
    """At frequencies where the cell is electrically short the bare line is
    matched: S11 -> 0 and S21 -> the free propagation factor."""
    p = dataclasses.replace(pm.default_params(), m0=0.0, mc=0j, c_isrr=1.0)
    freqs = np.linspace(5e7, 1e8, 11)
    spec = pm.synth_sparams(p, 60e-3, freqs)
    k0ls = TWO_PI * freqs / C_LIGHT * p.ls
    assert np.max(np.abs(spec.s11)) < 1e-5
    assert np.max(np.abs(np.abs(spec.s21) - 1.0)) < 1e-8
    assert np.allclose(spec.s21, np.exp(-1j * k0ls), atol=1e-4)


def test_shunt_masked_scalar_shape():
    p = pm.default_params()
    y, code = _shunt_admittance_masked(TWO_PI * 3.2e9, 60e-3, p)
    assert isinstance(y, complex)
    assert code.shape == (1,) and code[0] == 0
