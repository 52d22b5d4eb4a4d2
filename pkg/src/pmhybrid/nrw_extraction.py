"""Nicolson-Ross-Weir retrieval of n, z, eps, mu from two-port S-parameters.

Given a slab's S11/S21 (measured file or synthesized), recover the
normalized wave impedance z, the interface reflection Gamma, the
propagation term P, the refractive index n with explicit log-branch
bookkeeping, and the effective material parameters eps_eff = n/z and
mu_eff = n*z, together with the lossy-medium NRI condition
eps'*mu'' + eps''*mu' < 0.

Impedances here are normalized to the measurement line, so a matched slab
has z = 1. Stored complex values follow the conventions of ``constants``
(n'' = -Im(n) >= 0 in passive media).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, TWO_PI
from .errors import DataError

_SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class TwoPortSpectrum:
    """Two-port S-parameters on a strictly increasing frequency axis (Hz)."""

    freqs: np.ndarray
    s11: np.ndarray
    s21: np.ndarray
    s12: np.ndarray
    s22: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.freqs)
        for name in ("s11", "s21", "s12", "s22"):
            if len(getattr(self, name)) != n:
                raise DataError(f"{name} length {len(getattr(self, name))} "
                                f"does not match {n} frequencies")
        if n >= 2 and not np.all(np.diff(self.freqs) > 0):
            raise DataError("frequency axis must be strictly increasing")

    def transmission(self, direction: str = "forward") -> np.ndarray:
        return self.s21 if direction == "forward" else self.s12

    def reflection(self, direction: str = "forward") -> np.ndarray:
        return self.s11 if direction == "forward" else self.s22


@dataclass(frozen=True)
class BranchJump:
    """A continuity-threshold violation between adjacent frequency points."""

    index: int
    frequency: float
    size: float


@dataclass(frozen=True)
class MaterialSpectrum:
    """Extracted material parameters over frequency.

    eps_eff = n/z and mu_eff = n*z hold exactly by construction. ``masked``
    marks points where the retrieval was singular; ``jumps`` reports branch
    continuity violations (never silently absorbed).
    """

    freqs: np.ndarray
    n: np.ndarray
    z: np.ndarray
    eps_eff: np.ndarray
    mu_eff: np.ndarray
    condition: np.ndarray
    is_nri: np.ndarray
    branch_index: np.ndarray
    masked: np.ndarray
    jumps: list = field(default_factory=list)


def impedance_from_s(s11, s21):
    """Normalized impedance z from S11/S21; returns (z, singular_mask).

    z = sqrt(((1+S11)^2 - S21^2) / ((1-S11)^2 - S21^2)) with the root chosen
    so Re(z) >= 0, ties broken toward Im(z) >= 0. Points with |denominator|
    < 1e-14 are masked.
    """
    s11 = np.asarray(s11, dtype=complex)
    s21 = np.asarray(s21, dtype=complex)
    num = (1.0 + s11) ** 2 - s21**2
    den = (1.0 - s11) ** 2 - s21**2
    mask = np.abs(den) < _SINGULAR_TOL
    safe_den = np.where(mask, 1.0, den)
    z = np.sqrt(num / safe_den)
    flip = (z.real < 0) | ((z.real == 0) & (z.imag < 0))
    z = np.where(flip, -z, z)
    z = np.where(mask, np.nan + 1j * np.nan, z)
    return z, mask


def reflection_coefficient(z):
    """Interface reflection Gamma = (z - 1)/(z + 1)."""
    z = np.asarray(z, dtype=complex)
    return (z - 1.0) / (z + 1.0)


def propagation_term(s11, s21, z):
    """Propagation factor P = (S11 + S21 - Gamma)/(1 - (S11 + S21)*Gamma).

    Returns (P, singular_mask); points with a near-zero denominator are
    masked.
    """
    s11 = np.asarray(s11, dtype=complex)
    s21 = np.asarray(s21, dtype=complex)
    gamma = reflection_coefficient(z)
    s_sum = s11 + s21
    den = 1.0 - s_sum * gamma
    mask = np.abs(den) < _SINGULAR_TOL
    p = np.where(mask, np.nan + 1j * np.nan, (s_sum - gamma) / np.where(mask, 1.0, den))
    mask = mask | ~np.isfinite(p)
    return p, mask


def refractive_index(p, ls: float, freqs, jump_threshold: float = 1.0):
    """Refractive index n = -ln(P)/(i*k0*ls) with branch continuity.

    The principal log is augmented by an integer branch offset k (adding
    2*pi*k/(k0*ls) to n'), selected point-by-point for continuity along
    frequency with k = 0 at the lowest frequency. Returns (n, branch_index,
    jumps) where jumps lists adjacent-point changes exceeding
    ``jump_threshold`` in |n| (reported, never absorbed).
    """
    p = np.asarray(p, dtype=complex)
    freqs = np.asarray(freqs, dtype=float)
    if p.shape != freqs.shape:
        raise DataError("P and frequency axis shapes differ")
    k0ls = TWO_PI * freqs * ls / C_LIGHT
    if np.any(k0ls <= 0):
        raise DataError("frequencies must be > 0 for index retrieval")
    bad = (p == 0) | ~np.isfinite(p)
    n_prin = np.where(bad, np.nan + 1j * np.nan,
                      np.log(np.where(bad, 1.0, p)) / (-1j * k0ls))
    period = TWO_PI / k0ls
    n = np.array(n_prin)
    branch = np.zeros(p.shape, dtype=int)
    prev = None
    for i in range(len(n)):
        if not np.isfinite(n_prin[i]):
            continue
        if prev is None:
            prev = n[i]  # k = 0 seed at the lowest usable frequency
            continue
        k = int(np.round((prev.real - n_prin[i].real) / period[i]))
        branch[i] = k
        n[i] = n_prin[i] + k * period[i]
        prev = n[i]
    jumps = []
    finite = np.isfinite(n)
    last = None
    for i in range(len(n)):
        if not finite[i]:
            continue
        if last is not None:
            size = float(abs(n[i] - n[last]))
            if size > jump_threshold:
                jumps.append(BranchJump(index=i, frequency=float(freqs[i]), size=size))
        last = i
    return n, branch, jumps


def nri_condition(eps_eff, mu_eff):
    """Lossy-medium NRI condition value eps'*mu'' + eps''*mu' and its sign.

    With the storage convention eps = eps' - i*eps'', mu = mu' - i*mu'' the
    value equals -Im(eps*mu). Returns (value, is_nri) with is_nri =
    (value < 0).
    """
    eps = np.asarray(eps_eff, dtype=complex)
    mu = np.asarray(mu_eff, dtype=complex)
    value = eps.real * (-mu.imag) + (-eps.imag) * mu.real
    return value, value < 0


def de_embed(total: TwoPortSpectrum, background: TwoPortSpectrum,
             mode: str = "subtract") -> TwoPortSpectrum:
    """Remove the background (bare-line) response from transmission terms.

    ``subtract`` removes the background transmission by complex subtraction;
    ``ratio`` divides it out (fixture de-embedding). Reflection terms pass
    through unchanged. Frequency axes must match exactly.
    """
    if mode not in ("subtract", "ratio"):
        raise DataError(f"de-embed mode must be 'subtract' or 'ratio', got {mode!r}")
    ft, fb = np.asarray(total.freqs), np.asarray(background.freqs)
    if ft.shape != fb.shape or np.any(ft != fb):
        if ft.shape != fb.shape:
            raise DataError(f"frequency axes differ in length: {len(ft)} vs {len(fb)}")
        i = int(np.nonzero(ft != fb)[0][0])
        raise DataError(f"frequency axes differ first at index {i}: "
                        f"{ft[i]!r} vs {fb[i]!r} Hz")
    if mode == "subtract":
        s21 = total.s21 - background.s21
        s12 = total.s12 - background.s12
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            s21 = total.s21 / background.s21
            s12 = total.s12 / background.s12
    return TwoPortSpectrum(freqs=total.freqs, s11=total.s11, s21=s21,
                           s12=s12, s22=total.s22)


def extract_material(spectrum: TwoPortSpectrum, ls: float,
                     direction: str = "forward",
                     jump_threshold: float = 1.0) -> MaterialSpectrum:
    """Full NRW chain: S -> z -> Gamma -> P -> n -> (eps, mu, condition)."""
    if direction not in ("forward", "reverse"):
        raise DataError(f"direction must be 'forward' or 'reverse', got {direction!r}")
    s11 = spectrum.reflection(direction)
    s21 = spectrum.transmission(direction)
    z, mask_z = impedance_from_s(s11, s21)
    p, mask_p = propagation_term(s11, s21, z)
    n, branch, jumps = refractive_index(p, ls, spectrum.freqs, jump_threshold)
    eps = n / z
    mu = n * z
    value, is_nri = nri_condition(eps, mu)
    masked = mask_z | mask_p | ~np.isfinite(n)
    return MaterialSpectrum(freqs=np.asarray(spectrum.freqs, dtype=float),
                            n=n, z=z, eps_eff=eps, mu_eff=mu,
                            condition=value, is_nri=is_nri & ~masked,
                            branch_index=branch, masked=masked, jumps=jumps)
