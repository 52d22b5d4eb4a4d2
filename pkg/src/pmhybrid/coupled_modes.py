"""Coupled-mode model of a photon-magnon hybrid.

A fixed-frequency microwave resonator mode and a field-tuned Kittel magnon
mode hybridize through a complex coupling constant kappa. Re(kappa) is
coherent coupling, Im(kappa) is dissipative coupling; conjugating kappa
models the reverse propagation direction.

Complex mode frequencies are omega - i*delta_omega (see ``constants``), so a
branch with negative linewidth delta_omega is anti-damped. The pair of zero
crossings of a branch linewidth along the field axis bounds the anti-damping
window (H_minus, H_plus).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import TWO_PI


@dataclass(frozen=True)
class BareMode:
    """Uncoupled mode: center frequency and half linewidth, both rad/s."""

    omega: float
    linewidth: float = 0.0

    def __post_init__(self) -> None:
        if self.omega < 0:
            raise ValueError(f"bare mode frequency must be >= 0, got {self.omega}")

    @property
    def omega_tilde(self) -> complex:
        return self.omega - 1j * self.linewidth


@dataclass(frozen=True)
class Coupling:
    """Complex coupling constant; conjugate() gives the reverse direction."""

    kappa: complex

    def conjugate(self) -> "Coupling":
        return Coupling(kappa=complex(self.kappa).conjugate())


@dataclass(frozen=True)
class KittelParams:
    """Ferromagnetic resonance parameters.

    gamma_mu0 is the gyromagnetic ratio times mu0 in rad/s per tesla,
    mu0_Ms the saturation magnetization in tesla, alpha the Gilbert damping.
    """

    gamma_mu0: float = TWO_PI * 28e9
    mu0_Ms: float = 0.175
    alpha: float = 1e-4

    def __post_init__(self) -> None:
        if self.gamma_mu0 <= 0:
            raise ValueError(f"gamma_mu0 must be > 0, got {self.gamma_mu0}")
        if self.mu0_Ms < 0:
            raise ValueError(f"mu0_Ms must be >= 0, got {self.mu0_Ms}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class HybridPair:
    """Hybridized eigenfrequencies with Re(upper) >= Re(lower)."""

    upper: complex
    lower: complex

    def __post_init__(self) -> None:
        if self.upper.real < self.lower.real:
            raise ValueError("upper branch must have Re >= lower branch")


@dataclass(frozen=True)
class TrackedBranches:
    """Branch curves ordered by continuity along the field axis.

    ``ties`` lists field indices where both assignments were equidistant and
    the previous ordering was kept.
    """

    fields: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    ties: list = field(default_factory=list)


@dataclass(frozen=True)
class DampingProfile:
    """Sampled branch linewidth delta_omega(H) for one hybrid branch."""

    fields: np.ndarray
    delta_omega: np.ndarray
    branch: str = "upper"

    def __post_init__(self) -> None:
        if len(self.fields) != len(self.delta_omega):
            raise ValueError("fields and delta_omega must have equal length")
        if len(self.fields) >= 2 and not np.all(np.diff(self.fields) > 0):
            raise ValueError("field axis must be strictly increasing")


def kittel_frequency(params: KittelParams, mu0_h):
    """Kittel FMR frequency omega_r = sqrt(omega_H (omega_H + omega_m)), rad/s.

    omega_H = gamma_mu0 * mu0_h and omega_m = gamma_mu0 * mu0_Ms. Accepts
    scalar or array field. Negative fields are outside the model's domain.
    """
    h = np.asarray(mu0_h, dtype=float)
    if np.any(h < 0):
        raise ValueError("mu0_h must be >= 0 (out-of-plane/negative bias not modeled)")
    wh = params.gamma_mu0 * h
    wm = params.gamma_mu0 * params.mu0_Ms
    out = np.sqrt(wh * (wh + wm))
    return float(out) if np.isscalar(mu0_h) else out


def crossing_field(params: KittelParams, omega: float) -> float:
    """Field where the Kittel frequency equals ``omega`` (inverse of the dispersion)."""
    wm = params.gamma_mu0 * params.mu0_Ms
    wh = np.sqrt(omega**2 + (wm / 2.0) ** 2) - wm / 2.0
    return float(wh / params.gamma_mu0)


def hybrid_eigenvalues(isrr: BareMode, magnon_tilde, coupling: Coupling,
                       sort: bool = True):
    """Eigenfrequencies of the two coupled modes.

    omega_pm = ((w1 + w2) +/- sqrt((w1 - w2)^2 + (omega_isrr * kappa)^2)) / 2
    with w1 = isrr.omega_tilde, w2 = magnon_tilde and a real resonator
    frequency isrr.omega multiplying kappa.

    ``magnon_tilde`` may be a complex scalar or array. With ``sort`` the pair
    is ordered by real part (HybridPair for scalars, (upper, lower) arrays
    otherwise); unsorted returns the (+, -) root pair as written.
    """
    w1 = isrr.omega_tilde
    w2 = np.asarray(magnon_tilde, dtype=complex)
    gap = np.sqrt((w1 - w2) ** 2 + (isrr.omega * coupling.kappa) ** 2)
    plus = 0.5 * ((w1 + w2) + gap)
    minus = 0.5 * ((w1 + w2) - gap)
    if not sort:
        if w2.ndim == 0:
            return complex(plus), complex(minus)
        return plus, minus
    upper = np.where(plus.real >= minus.real, plus, minus)
    lower = np.where(plus.real >= minus.real, minus, plus)
    if w2.ndim == 0:
        return HybridPair(upper=complex(upper), lower=complex(lower))
    return upper, lower


def track_branches(fields, eigen_a, eigen_b) -> TrackedBranches:
    """Order two eigenvalue sequences into continuous branches along ``fields``.

    The first point is labeled by real part (upper = larger Re). Each later
    point keeps or swaps the incoming pair to minimize the summed complex
    distance to the previous point; exact ties keep the previous ordering and
    are recorded in the result's ``ties``.
    """
    fields = np.asarray(fields, dtype=float)
    a = np.asarray(eigen_a, dtype=complex)
    b = np.asarray(eigen_b, dtype=complex)
    if not (len(fields) == len(a) == len(b)):
        raise ValueError("fields and eigenvalue sequences must have equal length")
    n = len(fields)
    upper = np.empty(n, dtype=complex)
    lower = np.empty(n, dtype=complex)
    ties: list[int] = []
    if n == 0:
        return TrackedBranches(fields=fields, upper=upper, lower=lower, ties=ties)
    if a[0].real >= b[0].real:
        upper[0], lower[0] = a[0], b[0]
    else:
        upper[0], lower[0] = b[0], a[0]
    for i in range(1, n):
        keep = abs(a[i] - upper[i - 1]) + abs(b[i] - lower[i - 1])
        swap = abs(b[i] - upper[i - 1]) + abs(a[i] - lower[i - 1])
        if keep == swap:
            ties.append(i)
        if swap < keep:
            upper[i], lower[i] = b[i], a[i]
        else:
            upper[i], lower[i] = a[i], b[i]
    return TrackedBranches(fields=fields, upper=upper, lower=lower, ties=ties)


def branch_linewidth(omega_tilde):
    """Half linewidth delta_omega = -Im(omega_tilde); negative means anti-damped."""
    if isinstance(omega_tilde, HybridPair):
        return (-omega_tilde.upper.imag, -omega_tilde.lower.imag)
    return -np.imag(omega_tilde)


def damping_profile(fields, isrr: BareMode, kittel: KittelParams,
                    magnon_linewidth: float, coupling: Coupling,
                    branch: str = "upper") -> DampingProfile:
    """Branch linewidth along a field sweep, ordered by continuity tracking."""
    if branch not in ("upper", "lower"):
        raise ValueError(f"branch must be 'upper' or 'lower', got {branch!r}")
    fields = np.asarray(fields, dtype=float)
    magnon = kittel_frequency(kittel, fields) - 1j * magnon_linewidth
    plus, minus = hybrid_eigenvalues(isrr, magnon, coupling, sort=False)
    tracked = track_branches(fields, plus, minus)
    curve = tracked.upper if branch == "upper" else tracked.lower
    return DampingProfile(fields=fields, delta_omega=branch_linewidth(curve),
                          branch=branch)


def _collect_roots(roots):
    """Validate and order crossing fields shared by the zero-damping ops."""
    roots = sorted(set(roots))
    if not roots:
        return None
    if len(roots) > 2:
        listing = ", ".join(f"{r:.6g}" for r in roots)
        raise ValueError(f"expected at most 2 zero-damping crossings, found "
                         f"{len(roots)} at fields (T): {listing}")
    if len(roots) == 1:
        # linewidth touches zero once: degenerate (zero-width) window
        return (roots[0], roots[0])
    return (roots[0], roots[1])


def zero_damping_fields(profile: DampingProfile):
    """Fields (H_minus, H_plus) where the branch linewidth crosses zero.

    Sign-change brackets on the sampled profile are refined by bisection of
    the profile's interpolant to a bracket below 1e-3 mT. Returns None when
    the linewidth never changes sign; more than two crossings raise, listing
    all of them.
    """
    dw = np.asarray(profile.delta_omega, dtype=float)
    h = np.asarray(profile.fields, dtype=float)
    if len(h) < 2 or float(np.max(np.abs(dw))) == 0.0:
        return None
    sign = np.sign(dw)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = [float(h[i]) for i in np.nonzero(dw == 0.0)[0]]
    for i in idx:
        roots.append(float(brentq(lambda x: float(np.interp(x, h, dw)),
                                  h[i], h[i + 1], xtol=1e-6)))
    return _collect_roots(roots)


def zero_damping_window(isrr: BareMode, kittel: KittelParams,
                        magnon_linewidth: float, coupling: Coupling,
                        branch: str = "upper",
                        field_range: tuple = (20e-3, 120e-3),
                        samples: int = 4001):
    """Anti-damping window of one hybrid branch from the analytic model.

    Densely samples the branch linewidth over ``field_range`` and refines
    each zero crossing by bisection of the analytic eigenvalue linewidth,
    resolving the branch inside a bracket by continuity with its left end.
    Returns (H_minus, H_plus) in tesla or None.
    """
    fields = np.linspace(field_range[0], field_range[1], samples)
    magnon = kittel_frequency(kittel, fields) - 1j * magnon_linewidth
    plus, minus = hybrid_eigenvalues(isrr, magnon, coupling, sort=False)
    tracked = track_branches(fields, plus, minus)
    curve = tracked.upper if branch == "upper" else tracked.lower
    dw = branch_linewidth(curve)
    sign = np.sign(dw)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = [float(fields[i]) for i in np.nonzero(dw == 0.0)[0]]

    def local_linewidth(x, ref):
        w2 = kittel_frequency(kittel, float(x)) - 1j * magnon_linewidth
        p, m = hybrid_eigenvalues(isrr, complex(w2), coupling, sort=False)
        e = p if abs(p - ref) <= abs(m - ref) else m
        return -e.imag

    for i in idx:
        ref = curve[i]
        roots.append(float(brentq(lambda x: local_linewidth(x, ref),
                                  fields[i], fields[i + 1], xtol=1e-6)))
    return _collect_roots(roots)
