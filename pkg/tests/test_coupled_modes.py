"""Hybrid-eigenvalue model: exactness oracles, tracking, zero-damping windows."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import pmhybrid as pm
from pmhybrid.circuit_model import ISRR_FREQ, ISRR_LINEWIDTH, KAPPA_C, \
    MAGNON_LINEWIDTH
from pmhybrid.constants import TWO_PI
from pmhybrid.coupled_modes import DampingProfile, _collect_roots

ISRR = pm.BareMode(omega=TWO_PI * ISRR_FREQ, linewidth=ISRR_LINEWIDTH)
KITTEL = pm.KittelParams()


def quadratic_residuals(w1, w2, kappa, roots):
    """Trace and product identities of (x - r1)(x - r2) = x^2 - Sx + P."""
    omega_isrr = w1.real
    s = roots[0] + roots[1]
    p = roots[0] * roots[1]
    trace = s - (w1 + w2)
    prod = p - (w1 * w2 - (omega_isrr * kappa) ** 2 / 4.0)
    return abs(trace) / abs(w1), abs(prod) / abs(w1) ** 2


def test_eigenvalue_trace_product_oracle():
    """Roots satisfy the quadratic's trace/product identities to 1e-12."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        w1 = complex(TWO_PI * rng.uniform(2e9, 5e9),
                     -TWO_PI * rng.uniform(1e6, 1e8))
        w2 = complex(TWO_PI * rng.uniform(2e9, 5e9),
                     -TWO_PI * rng.uniform(1e5, 1e8))
        kappa = complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1))
        isrr = pm.BareMode(omega=w1.real, linewidth=-w1.imag)
        pair = pm.hybrid_eigenvalues(isrr, w2, pm.Coupling(kappa))
        t, p = quadratic_residuals(w1, w2, kappa, (pair.upper, pair.lower))
        assert t < 1e-12 and p < 1e-12


def test_zero_coupling_returns_bare_modes():
    pair = pm.hybrid_eigenvalues(ISRR, 2.0e10 - 1j * 1e7, pm.Coupling(0.0))
    bare = sorted([ISRR.omega_tilde, 2.0e10 - 1j * 1e7], key=lambda z: -z.real)
    assert pair.upper == pytest.approx(bare[0], rel=1e-14)
    assert pair.lower == pytest.approx(bare[1], rel=1e-14)


def test_degenerate_real_splitting_exact():
    """At a real degeneracy with real kappa the splitting is omega*kappa."""
    w = TWO_PI * 3.4e9
    isrr = pm.BareMode(omega=w, linewidth=0.0)
    pair = pm.hybrid_eigenvalues(isrr, complex(w), pm.Coupling(0.0296))
    split = pair.upper - pair.lower
    assert split.imag == 0.0
    assert split.real == pytest.approx(w * 0.0296, rel=1e-12)


def test_hermitian_inputs_give_real_eigenvalues():
    isrr = pm.BareMode(omega=TWO_PI * 3.4e9, linewidth=0.0)
    w2 = complex(TWO_PI * 3.3e9)
    pair = pm.hybrid_eigenvalues(isrr, w2, pm.Coupling(0.05))
    assert abs(pair.upper.imag) < 1e-6 * abs(pair.upper.real)
    assert abs(pair.lower.imag) < 1e-6 * abs(pair.lower.real)


def test_eigenvalues_scale_linearly_with_frequency():
    """Homogeneity: scaling every frequency input by c scales the roots by c."""
    w2 = TWO_PI * (3.2e9 - 1j * 5e6)
    kap = pm.Coupling(KAPPA_C)
    a = pm.hybrid_eigenvalues(ISRR, w2, kap)
    isrr2 = pm.BareMode(omega=2 * ISRR.omega, linewidth=2 * ISRR.linewidth)
    b = pm.hybrid_eigenvalues(isrr2, 2 * w2, kap)
    assert b.upper == pytest.approx(2 * a.upper, rel=1e-13)
    assert b.lower == pytest.approx(2 * a.lower, rel=1e-13)


def test_kittel_frequency_hand_value():
    """omega_r = sqrt(wH (wH + wM)) at 60 mT with the default film constants."""
    wh = TWO_PI * 28e9 * 60e-3
    wm = TWO_PI * 28e9 * 0.175
    expected = np.sqrt(wh * (wh + wm))
    assert pm.kittel_frequency(KITTEL, 60e-3) == pytest.approx(expected, rel=1e-14)


def test_kittel_rejects_negative_field():
    with pytest.raises(ValueError):
        pm.kittel_frequency(KITTEL, -1e-3)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-3, max_value=0.3))
def test_crossing_field_inverts_kittel(h):
    w = pm.kittel_frequency(KITTEL, h)
    assert pm.crossing_field(KITTEL, w) == pytest.approx(h, rel=1e-12)


def test_track_branches_follows_continuity_through_crossing():
    """Complex-distance tracking keeps branches smooth where Re-sorting kinks."""
    fields = np.linspace(40e-3, 80e-3, 801)
    magnon = pm.kittel_frequency(KITTEL, fields) - 1j * MAGNON_LINEWIDTH
    plus, minus = pm.hybrid_eigenvalues(ISRR, magnon, pm.Coupling(KAPPA_C),
                                        sort=False)
    tracked = pm.track_branches(fields, plus, minus)
    for curve in (tracked.upper, tracked.lower):
        steps = np.abs(np.diff(curve))
        assert steps.max() < 5 * np.median(steps) + TWO_PI * 2e7


def test_track_branches_records_exact_ties():
    fields = np.array([0.0, 1.0])
    a = np.array([1.0 + 0j, 1.5 + 0j])
    b = np.array([2.0 + 0j, 1.5 + 0j])
    # degenerate point: both assignments give the same summed distance
    tracked = pm.track_branches(fields, a, b)
    assert tracked.ties == [1]
    assert tracked.upper[1] == tracked.lower[1] == 1.5 + 0j


def test_branch_linewidth_sign_convention():
    assert pm.branch_linewidth(1.0 - 2.0j) == pytest.approx(2.0)
    pair = pm.HybridPair(upper=3.0 - 1.0j, lower=1.0 + 0.5j)
    up, lo = pm.branch_linewidth(pair)
    assert up == pytest.approx(1.0) and lo == pytest.approx(-0.5)


def test_zero_damping_window_frozen_values():
    """The two anti-damping windows of the frozen coupled-mode configuration."""
    win_up = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                    pm.Coupling(KAPPA_C), branch="upper")
    assert win_up is not None
    assert win_up[0] * 1e3 == pytest.approx(62.4210, abs=0.02)
    assert win_up[1] * 1e3 == pytest.approx(75.2698, abs=0.02)
    win_lo = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                    pm.Coupling(KAPPA_C.conjugate()),
                                    branch="lower")
    assert win_lo is not None
    assert win_lo[0] * 1e3 == pytest.approx(49.6458, abs=0.02)
    assert win_lo[1] * 1e3 == pytest.approx(61.9195, abs=0.02)


def test_zero_damping_window_matches_quoted_fields_loosely():
    """Quoted experimental windows land within the calibrated-model tolerance
    band (±40 % class): S21 [50.3, 64.4] mT near the conj lower window and
    S12 [56.5, 70.7] mT near the +kappa upper window."""
    win_lo = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                    pm.Coupling(KAPPA_C.conjugate()),
                                    branch="lower")
    win_up = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                    pm.Coupling(KAPPA_C), branch="upper")
    assert win_lo[0] * 1e3 == pytest.approx(50.3, rel=0.4)
    assert win_lo[1] * 1e3 == pytest.approx(64.4, rel=0.4)
    assert win_up[0] * 1e3 == pytest.approx(56.5, rel=0.4)
    assert win_up[1] * 1e3 == pytest.approx(70.7, rel=0.4)


def test_conjugate_coupling_swaps_antidamped_branch():
    """+kappa anti-damps the upper branch only; conj(kappa) the lower only."""
    combos = {}
    for name, kap in (("plus", KAPPA_C), ("conj", KAPPA_C.conjugate())):
        for branch in ("upper", "lower"):
            win = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                         pm.Coupling(kap), branch=branch)
            combos[(name, branch)] = win
    assert combos[("plus", "upper")] is not None
    assert combos[("plus", "lower")] is None
    assert combos[("conj", "upper")] is None
    assert combos[("conj", "lower")] is not None


def test_linewidth_negative_strictly_inside_window():
    """Between H- and H+ the branch is anti-damped (negative linewidth)."""
    win = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                 pm.Coupling(KAPPA_C), branch="upper")
    lo, hi = win
    inside = np.linspace(lo + 1e-4, hi - 1e-4, 9)
    outside = np.array([lo - 5e-3, hi + 5e-3])
    prof_in = pm.damping_profile(inside, ISRR, KITTEL, MAGNON_LINEWIDTH,
                                 pm.Coupling(KAPPA_C), branch="upper")
    assert np.all(prof_in.delta_omega < 0)
    prof_out = pm.damping_profile(outside, ISRR, KITTEL, MAGNON_LINEWIDTH,
                                  pm.Coupling(KAPPA_C), branch="upper")
    assert np.all(prof_out.delta_omega > 0)


def test_no_window_for_real_coupling():
    """Purely coherent coupling cannot drive the linewidth negative."""
    win = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                 pm.Coupling(abs(KAPPA_C)), branch="upper")
    assert win is None


def test_zero_damping_fields_refines_profile_crossings():
    win = pm.zero_damping_window(ISRR, KITTEL, MAGNON_LINEWIDTH,
                                 pm.Coupling(KAPPA_C), branch="upper")
    fields = np.linspace(20e-3, 120e-3, 4001)
    prof = pm.damping_profile(fields, ISRR, KITTEL, MAGNON_LINEWIDTH,
                              pm.Coupling(KAPPA_C), branch="upper")
    roots = pm.zero_damping_fields(prof)
    assert roots is not None
    assert roots[0] == pytest.approx(win[0], abs=5e-5)
    assert roots[1] == pytest.approx(win[1], abs=5e-5)


def test_zero_damping_fields_none_without_sign_change():
    prof = DampingProfile(fields=np.linspace(0.02, 0.1, 50),
                          delta_omega=np.full(50, 1e6), branch="upper")
    assert pm.zero_damping_fields(prof) is None


def test_more_than_two_crossings_raise_listing_fields():
    h = np.linspace(0.02, 0.1, 400)
    wavy = np.sin(200.0 * h)  # many sign changes
    prof = DampingProfile(fields=h, delta_omega=wavy, branch="upper")
    with pytest.raises(ValueError, match="crossings"):
        pm.zero_damping_fields(prof)


def test_collect_roots_degenerate_touch():
    assert _collect_roots([0.05]) == (0.05, 0.05)
    assert _collect_roots([]) is None


def test_bare_mode_validation():
    with pytest.raises(ValueError):
        pm.BareMode(omega=-1.0, linewidth=0.0)
    mode = pm.BareMode(omega=2.0, linewidth=0.5)
    assert mode.omega_tilde == 2.0 - 0.5j
